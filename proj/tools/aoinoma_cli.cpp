#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "aoinoma/harness/config.hpp"
#include "aoinoma/harness/experiment.hpp"

namespace h = aoinoma::harness;

namespace {

struct Common {
    std::string config;
    std::string profile = "desk";
    std::uint64_t seed = 1;
    std::string scheme;
    std::string out = ".";
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c, bool with_out = true)
{
    cmd->add_option("--config", c.config, "key = value config file applied on top of the profile");
    cmd->add_option("--profile", c.profile, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--seed", c.seed, "experiment seed");
    cmd->add_option("--scheme", c.scheme, "proposed, oma, matching, uniform-power or random-phi");
    cmd->add_option("--set", c.overrides, "extra key=value override (repeatable)");
    if (with_out) {
        cmd->add_option("--out", c.out, "output directory");
    }
}

h::ExperimentConfig resolve(const Common& c)
{
    h::ExperimentConfig cfg = h::profile(c.profile);
    if (!c.config.empty()) {
        cfg = h::load_config(c.config, cfg);
    }
    for (const auto& kv : c.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        }
        h::set_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!c.scheme.empty()) {
        cfg.scheme = c.scheme;
    }
    cfg.validate();
    return cfg;
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

void log_line(const std::string& line) { std::cerr << line << '\n'; }

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"AoI-aware NOMA scheduling experiments"};
    app.require_subcommand(1);

    Common train_opts;
    auto* train = app.add_subcommand("train", "train a DQN agent and write per-episode metrics and a checkpoint");
    add_common(train, train_opts);
    bool quiet = false;
    train->add_flag("--quiet", quiet, "suppress progress lines");

    Common eval_opts;
    std::string checkpoint;
    auto* evaluate = app.add_subcommand("evaluate", "greedy evaluation of a checkpoint");
    add_common(evaluate, eval_opts);
    evaluate->add_option("--checkpoint", checkpoint, "checkpoint file (default: <out>/checkpoint.txt)");

    Common sweep_opts;
    std::string axis = "p_max";
    std::string seeds_text = "1";
    std::string schemes_text;
    std::string values_text;
    auto* sweep = app.add_subcommand("sweep", "train and evaluate every scheme at every axis value");
    add_common(sweep, sweep_opts);
    sweep->add_option("--axis", axis, "p_max, packet_bits or subcarriers")
        ->check(CLI::IsMember({"p_max", "packet_bits", "subcarriers"}));
    sweep->add_option("--seeds", seeds_text, "comma-separated seeds");
    sweep->add_option("--schemes", schemes_text, "comma-separated schemes (default: all)");
    sweep->add_option("--values", values_text, "comma-separated axis values (default: from the config)");
    sweep->add_flag("--quiet", quiet, "suppress progress lines");

    std::string metrics;
    std::string figure;
    std::string plot_out = ".";
    auto* plot = app.add_subcommand("plot-data", "project a metrics file onto a figure's data series");
    plot->add_option("--metrics", metrics, "metrics CSV file")->required();
    plot->add_option("--figure", figure, "figure id")->required();
    plot->add_option("--out", plot_out, "output directory");

    Common check_opts;
    auto* validate = app.add_subcommand("validate-config", "check a config and print the effective values");
    add_common(validate, check_opts, false);

    CLI11_PARSE(app, argc, argv);

    try {
        const h::Progress progress = quiet ? h::Progress{} : h::Progress{log_line};
        if (*train) {
            const auto cfg = resolve(train_opts);
            h::run_train(cfg, train_opts.seed, train_opts.out, progress);
        } else if (*evaluate) {
            const auto cfg = resolve(eval_opts);
            const std::string path = checkpoint.empty() ? eval_opts.out + "/checkpoint.txt" : checkpoint;
            h::run_evaluate(cfg, eval_opts.seed, path, eval_opts.out);
        } else if (*sweep) {
            const auto cfg = resolve(sweep_opts);
            const auto ax = h::parse_axis(axis);
            std::vector<std::uint64_t> seeds;
            for (const auto& s : split_list(seeds_text)) {
                seeds.push_back(std::stoull(s));
            }
            std::vector<aoinoma::baselines::Scheme> schemes;
            for (const auto& s : split_list(schemes_text)) {
                schemes.push_back(aoinoma::baselines::parse_scheme(s));
            }
            if (schemes.empty()) {
                schemes = aoinoma::baselines::all_schemes();
            }
            std::vector<double> values = h::axis_values(cfg, ax);
            if (!values_text.empty()) {
                values.clear();
                for (const auto& v : split_list(values_text)) {
                    values.push_back(std::stod(v));
                }
            }
            h::run_sweep(cfg, ax, values, schemes, seeds, sweep_opts.out, progress);
        } else if (*plot) {
            for (const auto& path : h::emit_plot_data(metrics, figure, plot_out)) {
                std::cout << path << '\n';
            }
        } else if (*validate) {
            std::cout << h::serialize_config(resolve(check_opts));
        }
    } catch (const std::exception& e) {
        std::cerr << "aoinoma: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
