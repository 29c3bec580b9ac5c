#include "aoinoma/harness/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace aoinoma::harness {

namespace {

using C = ExperimentConfig;
using Member = std::variant<int C::*, double C::*, bool C::*, std::string C::*, std::vector<double> C::*>;

struct Field {
    const char* key;
    Member member;
};

const std::vector<Field>& fields()
{
    static const std::vector<Field> table{
        {"ue_count", &C::ue_count},
        {"subcarriers", &C::subcarriers},
        {"info_types", &C::info_types},
        {"subcarrier_spacing_hz", &C::subcarrier_spacing_hz},
        {"noise_psd_dbm_hz", &C::noise_psd_dbm_hz},
        {"slot_s", &C::slot_s},
        {"packet_bits", &C::packet_bits},
        {"buffer_bits", &C::buffer_bits},
        {"p_max_dbm", &C::p_max_dbm},
        {"circuit_w", &C::circuit_w},
        {"cycles_per_bit", &C::cycles_per_bit},
        {"cpu_hz", &C::cpu_hz},
        {"capacitance", &C::capacitance},
        {"fading_variance", &C::fading_variance},
        {"levels", &C::levels},
        {"power_levels", &C::power_levels},
        {"noma_quota", &C::noma_quota},
        {"theta_cap", &C::theta_cap},
        {"kappa_min", &C::kappa_min},
        {"penalty_weight", &C::penalty_weight},
        {"constraint_window", &C::constraint_window},
        {"d0", &C::d0},
        {"cell_radius", &C::cell_radius},
        {"speed", &C::speed},
        {"pathloss_exp", &C::pathloss_exp},
        {"episodes", &C::episodes},
        {"steps", &C::steps},
        {"replay", &C::replay},
        {"batch", &C::batch},
        {"eps0", &C::eps0},
        {"eps_dec", &C::eps_dec},
        {"eps_min", &C::eps_min},
        {"eps_mode", &C::eps_mode},
        {"lr", &C::lr},
        {"gamma", &C::gamma},
        {"adam_beta1", &C::adam_beta1},
        {"adam_beta2", &C::adam_beta2},
        {"adam_eps", &C::adam_eps},
        {"double_dqn", &C::double_dqn},
        {"grad_clip", &C::grad_clip},
        {"hidden_units", &C::hidden_units},
        {"hidden_layers", &C::hidden_layers},
        {"clone_period", &C::clone_period},
        {"scheme", &C::scheme},
        {"matching_capacity", &C::matching_capacity},
        {"eval_episodes", &C::eval_episodes},
        {"sweep_episodes", &C::sweep_episodes},
        {"sweep_p_max_dbm", &C::sweep_p_max_dbm},
        {"sweep_packet_bits", &C::sweep_packet_bits},
        {"sweep_subcarriers", &C::sweep_subcarriers},
    };
    return table;
}

const Field& find_field(const std::string& key)
{
    for (const auto& f : fields()) {
        if (key == f.key) {
            return f;
        }
    }
    throw std::invalid_argument("unknown config key '" + key + "'");
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
        throw std::invalid_argument("config key '" + key + "': not a finite number: '" + text + "'");
    }
    return v;
}

int parse_int(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || *end != '\0' || errno == ERANGE || v < -2147483647L || v > 2147483647L) {
        throw std::invalid_argument("config key '" + key + "': not an integer: '" + text + "'");
    }
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    if (t == "true" || t == "1") {
        return true;
    }
    if (t == "false" || t == "0") {
        return false;
    }
    throw std::invalid_argument("config key '" + key + "': expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) {
        throw std::invalid_argument("config key '" + key + "': empty list");
    }
    return out;
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void require(bool ok, const char* key, const std::string& what)
{
    if (!ok) {
        throw std::invalid_argument(std::string("config key '") + key + "': " + what);
    }
}

}  // namespace

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : fields()) {
            k.emplace_back(f.key);
        }
        return k;
    }();
    return keys;
}

void set_value(ExperimentConfig& cfg, const std::string& key, const std::string& value)
{
    const Field& field = find_field(key);
    std::visit(
        [&](auto member) {
            using T = std::remove_reference_t<decltype(cfg.*member)>;
            if constexpr (std::is_same_v<T, int>) {
                cfg.*member = parse_int(key, value);
            } else if constexpr (std::is_same_v<T, double>) {
                cfg.*member = parse_double(key, value);
            } else if constexpr (std::is_same_v<T, bool>) {
                cfg.*member = parse_bool(key, value);
            } else if constexpr (std::is_same_v<T, std::string>) {
                cfg.*member = trim(value);
            } else {
                cfg.*member = parse_list(key, value);
            }
        },
        field.member);
}

std::string get_value(const ExperimentConfig& cfg, const std::string& key)
{
    const Field& field = find_field(key);
    return std::visit(
        [&](auto member) -> std::string {
            const auto& v = cfg.*member;
            using T = std::remove_cvref_t<decltype(v)>;
            if constexpr (std::is_same_v<T, int>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, double>) {
                return format_double(v);
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::string>) {
                return v;
            } else {
                std::string out;
                for (std::size_t i = 0; i < v.size(); ++i) {
                    out += (i ? "," : "") + format_double(v[i]);
                }
                return out;
            }
        },
        field.member);
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base)
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        try {
            set_value(base, key, line.substr(eq + 1));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(std::string(e.what()) + " (line " + std::to_string(lineno) + ")");
        }
    }
    return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base)
{
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config file '" + path + "'");
    }
    return parse_config(in, std::move(base));
}

std::string serialize_config(const ExperimentConfig& cfg)
{
    std::string out;
    for (const auto& key : config_keys()) {
        out += key + " = " + get_value(cfg, key) + "\n";
    }
    return out;
}

ExperimentConfig profile(const std::string& name)
{
    ExperimentConfig cfg;
    if (name == "desk") {
        return cfg;
    }
    if (name == "paper") {
        cfg.ue_count = 5;
        cfg.subcarriers = 2;
        cfg.info_types = 5;
        cfg.episodes = 400;
        cfg.sweep_episodes = 400;
        return cfg;
    }
    throw std::invalid_argument("unknown profile '" + name + "' (expected desk or paper)");
}

void ExperimentConfig::validate() const
{
    require(ue_count >= 1, "ue_count", "must be >= 1");
    require(subcarriers >= 1, "subcarriers", "must be >= 1");
    require(info_types >= 1 && info_types <= 15, "info_types", "must lie in [1, 15]");
    require(subcarrier_spacing_hz > 0.0, "subcarrier_spacing_hz", "must be positive");
    require(slot_s > 0.0, "slot_s", "must be positive");
    require(packet_bits.size() == 1 || static_cast<int>(packet_bits.size()) == info_types, "packet_bits",
            "needs one value or one per information type");
    for (double b : packet_bits) {
        require(b > 0.0, "packet_bits", "must be positive");
    }
    require(buffer_bits > 0.0, "buffer_bits", "must be positive");
    require(circuit_w > 0.0, "circuit_w", "must be positive");
    require(cycles_per_bit > 0.0, "cycles_per_bit", "must be positive");
    require(cpu_hz > 0.0, "cpu_hz", "must be positive");
    require(capacitance > 0.0, "capacitance", "must be positive");
    require(fading_variance > 0.0, "fading_variance", "must be positive");
    require(levels >= 2, "levels", "must be >= 2");
    require(power_levels >= 1, "power_levels", "must be >= 1");
    require(noma_quota >= 1, "noma_quota", "must be >= 1");
    require(theta_cap >= 1, "theta_cap", "must be >= 1");
    require(kappa_min > 0.0, "kappa_min", "must be positive");
    require(penalty_weight >= 0.0, "penalty_weight", "must be non-negative");
    require(constraint_window >= 1, "constraint_window", "must be >= 1");
    require(d0 > 0.0, "d0", "must be positive");
    require(cell_radius > d0, "cell_radius", "must exceed d0");
    require(speed >= 0.0, "speed", "must be non-negative");
    require(pathloss_exp > 0.0, "pathloss_exp", "must be positive");
    require(episodes >= 1, "episodes", "must be >= 1");
    require(steps >= 1, "steps", "must be >= 1");
    require(replay >= 1, "replay", "must be >= 1");
    require(batch >= 1 && batch <= replay, "batch", "must lie in [1, replay]");
    require(eps0 >= 0.0 && eps0 <= 1.0, "eps0", "must lie in [0, 1]");
    require(eps_dec >= 0.0, "eps_dec", "must be non-negative");
    require(eps_min >= 0.0 && eps_min <= 1.0, "eps_min", "must lie in [0, 1]");
    require(eps_mode == "linear" || eps_mode == "exponential", "eps_mode", "must be linear or exponential");
    require(lr >= 0.0, "lr", "must be non-negative");
    require(gamma >= 0.0 && gamma < 1.0, "gamma", "must lie in [0, 1)");
    require(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "adam_beta1", "must lie in [0, 1)");
    require(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "adam_beta2", "must lie in [0, 1)");
    require(adam_eps > 0.0, "adam_eps", "must be positive");
    require(grad_clip >= 0.0, "grad_clip", "must be non-negative (0 disables)");
    require(hidden_units >= 1, "hidden_units", "must be >= 1");
    require(hidden_layers >= 0, "hidden_layers", "must be >= 0");
    require(clone_period >= 1, "clone_period", "must be >= 1");
    try {
        baselines::parse_scheme(scheme);
    } catch (const std::invalid_argument& e) {
        require(false, "scheme", e.what());
    }
    require(matching_capacity >= 0, "matching_capacity", "must be >= 0");
    require(eval_episodes >= 1, "eval_episodes", "must be >= 1");
    require(sweep_episodes >= 1, "sweep_episodes", "must be >= 1");
    for (double p : sweep_packet_bits) {
        require(p > 0.0, "sweep_packet_bits", "must be positive");
    }
    for (double n : sweep_subcarriers) {
        require(n >= 1.0 && n == std::floor(n), "sweep_subcarriers", "must be positive integers");
    }
}

mdp::EnvConfig ExperimentConfig::to_env() const
{
    validate();
    mdp::EnvConfig env;
    env.ues = ue_count;
    env.info.types = info_types;
    env.info.packet_bits = packet_bits.size() == 1 ? std::vector<double>(info_types, packet_bits[0]) : packet_bits;
    env.info.buffer_bits = buffer_bits;
    env.info.slot_s = slot_s;
    env.info.theta_cap_slots = theta_cap;
    env.channel.fading_variance = fading_variance;
    env.channel.d0_m = d0;
    env.channel.cell_radius_m = cell_radius;
    env.channel.speed_mps = speed;
    env.channel.pathloss_exp = pathloss_exp;
    env.channel.levels = levels;
    env.radio.subcarriers = subcarriers;
    env.radio.spacing_hz = subcarrier_spacing_hz;
    env.radio.noma_quota = noma_quota;
    env.radio.noise_psd_w_hz = dbm_to_watts(noise_psd_dbm_hz);
    env.radio.p_max_w = dbm_to_watts(p_max_dbm);
    env.radio.circuit_w = circuit_w;
    env.compute.cycles_per_bit = cycles_per_bit;
    env.compute.cpu_hz = cpu_hz;
    env.compute.capacitance = capacitance;
    env.constraint.kappa_s = kappa_min;
    env.constraint.penalty_weight = penalty_weight;
    env.constraint.window_slots = constraint_window;
    env.power_levels = power_levels;
    env.validate();
    return env;
}

dqn::TrainConfig ExperimentConfig::to_train() const
{
    validate();
    dqn::TrainConfig t;
    t.episodes = episodes;
    t.steps = steps;
    t.replay = replay;
    t.batch = batch;
    t.gamma = gamma;
    t.adam = {lr, adam_beta1, adam_beta2, adam_eps};
    t.exploration = {eps0, eps_dec, eps_min,
                     eps_mode == "exponential" ? agents::DecayMode::Exponential : agents::DecayMode::Linear};
    t.clone_period = clone_period;
    t.double_dqn = double_dqn;
    t.grad_clip = grad_clip;
    t.hidden_units = hidden_units;
    t.hidden_layers = hidden_layers;
    t.validate();
    return t;
}

}  // namespace aoinoma::harness
