#include "aoinoma/harness/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace aoinoma::harness {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const std::string& dir, const std::string& name)
{
    fs::create_directories(dir);
    const auto path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    return out;
}

struct FigureSpec {
    const char* id;
    const char* kind;  // "train" or "sweep"
    const char* axis;  // sweep axis, empty for training curves
    const char* column;
};

const std::vector<FigureSpec>& figure_specs()
{
    static const std::vector<FigureSpec> specs{
        {"loss", "train", "", "loss"},
        {"reward", "train", "", "reward_raw"},
        {"epsilon", "train", "", "epsilon"},
        {"aaoi-vs-pmax", "sweep", "p_max", "aaoi"},
        {"reward-vs-pmax", "sweep", "p_max", "reward"},
        {"ee-vs-pmax", "sweep", "p_max", "ee"},
        {"transmitted-vs-pmax", "sweep", "p_max", "transmitted_ratio"},
        {"aaoi-vs-packet", "sweep", "packet_bits", "aaoi"},
        {"reward-vs-packet", "sweep", "packet_bits", "reward"},
        {"aaoi-vs-subcarriers", "sweep", "subcarriers", "aaoi"},
        {"reward-vs-subcarriers", "sweep", "subcarriers", "reward"},
    };
    return specs;
}

}  // namespace

TrainOutput train_agent(const ExperimentConfig& cfg, std::uint64_t seed, const Progress& progress)
{
    dqn::Trainer trainer(cfg.to_env(), cfg.to_train(), cfg.scheme_id(), cfg.effective_matching_capacity(), seed);
    TrainOutput out;
    for (int e = 0; e < cfg.episodes; ++e) {
        out.episodes.push_back(trainer.train_episode());
        if (progress && (e + 1) % 10 == 0) {
            const auto& m = out.episodes.back();
            std::ostringstream line;
            line << "episode " << m.episode << " reward " << m.reward_raw << " loss " << m.loss << " aaoi "
                 << m.aaoi_s;
            progress(line.str());
        }
    }
    out.checkpoint = trainer.checkpoint();
    return out;
}

TrainOutput run_train(const ExperimentConfig& cfg, std::uint64_t seed, const std::string& out_dir,
                      const Progress& progress)
{
    TrainOutput out = train_agent(cfg, seed, progress);
    auto metrics = open_out(out_dir, "train_metrics.csv");
    write_episode_csv(metrics, "train", cfg.scheme_id(), out.episodes);
    auto ckpt = open_out(out_dir, "checkpoint.txt");
    dqn::save_checkpoint(ckpt, out.checkpoint);
    return out;
}

std::vector<dqn::EpisodeMetrics> run_evaluate(const ExperimentConfig& cfg, std::uint64_t seed,
                                              const std::string& checkpoint_path, const std::string& out_dir)
{
    std::ifstream in(checkpoint_path);
    if (!in) {
        throw std::runtime_error("cannot open checkpoint '" + checkpoint_path + "'");
    }
    dqn::Trainer trainer(cfg.to_env(), cfg.to_train(), cfg.scheme_id(), cfg.effective_matching_capacity(), seed);
    trainer.restore(dqn::load_checkpoint(in));
    std::vector<dqn::EpisodeMetrics> rows;
    for (int e = 0; e < cfg.eval_episodes; ++e) {
        rows.push_back(trainer.evaluate_episode());
        rows.back().episode = e + 1;
    }
    auto out = open_out(out_dir, "eval_metrics.csv");
    write_episode_csv(out, "evaluate", cfg.scheme_id(), rows);
    return rows;
}

PointSummary train_and_evaluate(const ExperimentConfig& cfg, std::uint64_t seed)
{
    dqn::Trainer trainer(cfg.to_env(), cfg.to_train(), cfg.scheme_id(), cfg.effective_matching_capacity(), seed);
    for (int e = 0; e < cfg.sweep_episodes; ++e) {
        trainer.train_episode();
    }
    PointSummary s;
    env::PacketCounters packets;
    for (int e = 0; e < cfg.eval_episodes; ++e) {
        const auto m = trainer.evaluate_episode();
        s.reward += m.reward_raw;
        s.aaoi_s += m.aaoi_s;
        s.ee += m.ee_bits_per_joule_per_hz;
        packets += m.packets;
    }
    const double n = cfg.eval_episodes;
    s.reward /= n;
    s.aaoi_s /= n;
    s.ee /= n;
    s.transmitted_ratio = safe_transmitted_ratio(packets);
    return s;
}

SweepAxis parse_axis(const std::string& name)
{
    if (name == "p_max") {
        return SweepAxis::PMax;
    }
    if (name == "packet_bits") {
        return SweepAxis::PacketBits;
    }
    if (name == "subcarriers") {
        return SweepAxis::Subcarriers;
    }
    throw std::invalid_argument("unknown sweep axis '" + name + "' (expected p_max, packet_bits or subcarriers)");
}

std::string to_string(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::PMax:
        return "p_max";
    case SweepAxis::PacketBits:
        return "packet_bits";
    case SweepAxis::Subcarriers:
        return "subcarriers";
    }
    return "";
}

std::vector<double> axis_values(const ExperimentConfig& cfg, SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::PMax:
        return cfg.sweep_p_max_dbm;
    case SweepAxis::PacketBits:
        return cfg.sweep_packet_bits;
    case SweepAxis::Subcarriers:
        return cfg.sweep_subcarriers;
    }
    return {};
}

ExperimentConfig at_axis_value(ExperimentConfig cfg, SweepAxis axis, double value)
{
    switch (axis) {
    case SweepAxis::PMax:
        cfg.p_max_dbm = value;
        break;
    case SweepAxis::PacketBits:
        cfg.packet_bits = {value};
        break;
    case SweepAxis::Subcarriers:
        cfg.subcarriers = static_cast<int>(value);
        break;
    }
    return cfg;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values,
                                const std::vector<baselines::Scheme>& schemes,
                                const std::vector<std::uint64_t>& seeds, const std::string& out_dir,
                                const Progress& progress)
{
    expects(!seeds.empty(), "sweep needs at least one seed");
    std::vector<SweepRow> rows;
    for (double value : values) {
        for (auto scheme : schemes) {
            ExperimentConfig point = at_axis_value(cfg, axis, value);
            point.scheme = baselines::to_string(scheme);
            std::vector<double> reward, aaoi, ee, sent;
            for (auto seed : seeds) {
                const auto s = train_and_evaluate(point, seed);
                reward.push_back(s.reward);
                aaoi.push_back(s.aaoi_s);
                ee.push_back(s.ee);
                sent.push_back(s.transmitted_ratio);
                if (progress) {
                    std::ostringstream line;
                    line << to_string(axis) << '=' << value << ' ' << point.scheme << " seed " << seed << " reward "
                         << s.reward << " aaoi " << s.aaoi_s;
                    progress(line.str());
                }
            }
            SweepRow row;
            row.axis = to_string(axis);
            row.axis_value = value;
            row.scheme = point.scheme;
            row.seeds = static_cast<int>(seeds.size());
            const auto r = mean_std(reward);
            const auto a = mean_std(aaoi);
            const auto e = mean_std(ee);
            const auto t = mean_std(sent);
            row.reward_mean = r.mean;
            row.reward_std = r.std;
            row.aaoi_mean = a.mean;
            row.aaoi_std = a.std;
            row.ee_mean = e.mean;
            row.ee_std = e.std;
            row.transmitted_ratio_mean = t.mean;
            row.transmitted_ratio_std = t.std;
            rows.push_back(row);
        }
    }
    if (!out_dir.empty()) {
        auto out = open_out(out_dir, "sweep_" + to_string(axis) + ".csv");
        write_sweep_csv(out, rows);
    }
    return rows;
}

const std::vector<std::string>& figure_ids()
{
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> out;
        for (const auto& s : figure_specs()) {
            out.emplace_back(s.id);
        }
        return out;
    }();
    return ids;
}

std::vector<std::string> emit_plot_data(const std::string& metrics_path, const std::string& figure,
                                        const std::string& out_dir)
{
    const FigureSpec* spec = nullptr;
    for (const auto& s : figure_specs()) {
        if (figure == s.id) {
            spec = &s;
        }
    }
    if (!spec) {
        std::string list;
        for (const auto& id : figure_ids()) {
            list += (list.empty() ? "" : ", ") + id;
        }
        throw std::invalid_argument("unknown figure id '" + figure + "'; valid ids: " + list);
    }
    std::ifstream in(metrics_path);
    if (!in) {
        throw std::runtime_error("cannot open metrics file '" + metrics_path + "'");
    }
    const CsvTable table = read_csv(in);
    const bool sweep = std::string(spec->kind) == "sweep";
    if (!table.kind.empty()) {
        const bool table_sweep = table.kind == "sweep";
        if (table_sweep != sweep) {
            throw std::invalid_argument("figure '" + figure + "' needs a " + spec->kind + " metrics file, got kind=" +
                                        table.kind);
        }
    }

    // x, y[, std] per scheme, in file order.
    std::map<std::string, std::vector<std::vector<std::string>>> series;
    std::vector<std::string> order;
    std::vector<std::vector<std::string>> all;
    if (!table.header.empty()) {
        const int scheme_col = table.column("scheme");
        int x_col = 0;
        int y_col = 0;
        int std_col = -1;
        int axis_col = -1;
        if (sweep) {
            x_col = table.column("axis_value");
            y_col = table.column(std::string(spec->column) + "_mean");
            std_col = table.column(std::string(spec->column) + "_std");
            axis_col = table.column("axis");
        } else {
            x_col = table.column("episode");
            y_col = table.column(spec->column);
        }
        for (const auto& row : table.rows) {
            if (axis_col >= 0 && row.at(axis_col) != spec->axis) {
                continue;
            }
            std::vector<std::string> point{row.at(x_col), row.at(y_col)};
            all.push_back(point);
            if (std_col >= 0) {
                point.push_back(row.at(std_col));
            }
            const std::string& scheme = row.at(scheme_col);
            if (!series.count(scheme)) {
                order.push_back(scheme);
            }
            series[scheme].push_back(point);
        }
    }

    const std::string x_name = sweep ? spec->axis : "episode";
    const std::string y_name = sweep ? std::string(spec->column) + "_mean" : spec->column;
    std::vector<std::string> written;
    auto write = [&](const std::string& name, const std::vector<std::vector<std::string>>& points, bool with_std) {
        auto out = open_out(out_dir, name);
        out << "# " << x_name << ' ' << y_name << (with_std ? " " + std::string(spec->column) + "_std" : "") << '\n';
        for (const auto& p : points) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                out << (i ? " " : "") << p[i];
            }
            out << '\n';
        }
        written.push_back((fs::path(out_dir) / name).string());
    };
    write(figure + ".dat", all, false);
    for (const auto& scheme : order) {
        write(figure + "__" + scheme + ".dat", series[scheme], sweep);
    }
    return written;
}

}  // namespace aoinoma::harness
