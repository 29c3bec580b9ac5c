#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aoinoma/baselines.hpp"
#include "aoinoma/dqn/trainer.hpp"
#include "aoinoma/mdp_env.hpp"

namespace aoinoma::harness {

/// Flat experiment description. Powers and noise are kept in dBm as written
/// in the file; to_env() converts to watts.
struct ExperimentConfig {
    int ue_count = 3;
    int subcarriers = 2;
    int info_types = 3;
    double subcarrier_spacing_hz = 60e3;
    double noise_psd_dbm_hz = -174.0;
    double slot_s = 0.01;
    /// One value for every type, or one per type.
    std::vector<double> packet_bits{1000.0};
    double buffer_bits = 4000.0;
    double p_max_dbm = 10.0;
    double circuit_w = 0.2;
    double cycles_per_bit = 737.5;
    double cpu_hz = 2e9;
    double capacitance = 2.5e-28;
    double fading_variance = 1.0;
    int levels = 8;
    int power_levels = 4;
    int noma_quota = 2;
    int theta_cap = 1000;
    double kappa_min = 0.2;
    double penalty_weight = 1.0;
    int constraint_window = 1000;
    double d0 = 1.0;
    double cell_radius = 500.0;
    double speed = 10.0;
    double pathloss_exp = 3.0;

    int episodes = 200;
    int steps = 300;
    int replay = 200;
    int batch = 32;
    double eps0 = 0.9;
    double eps_dec = 1e-4;
    double eps_min = 1e-4;
    std::string eps_mode = "linear";
    double lr = 0.01;
    double gamma = 0.9;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    bool double_dqn = true;
    double grad_clip = 10.0;
    int hidden_units = 64;
    int hidden_layers = 3;
    int clone_period = 100;

    std::string scheme = "proposed";
    int matching_capacity = 0;  ///< 0 means one per subcarrier (no user-side limit)
    int eval_episodes = 20;
    int sweep_episodes = 80;
    std::vector<double> sweep_p_max_dbm{-10.0, 0.0, 10.0, 20.0, 30.0};
    std::vector<double> sweep_packet_bits{500.0, 1000.0, 1500.0, 2000.0};
    std::vector<double> sweep_subcarriers{2.0, 3.0};

    bool operator==(const ExperimentConfig&) const = default;

    /// Throws std::invalid_argument naming the offending key.
    void validate() const;

    mdp::EnvConfig to_env() const;
    dqn::TrainConfig to_train() const;
    baselines::Scheme scheme_id() const { return baselines::parse_scheme(scheme); }
    int effective_matching_capacity() const { return matching_capacity > 0 ? matching_capacity : subcarriers; }
};

/// "desk" (small, fast) or "paper" (full published sizes).
ExperimentConfig profile(const std::string& name);

/// Applies `key = value` lines on top of `base`. Unknown keys and malformed
/// values throw std::invalid_argument naming the key and line.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

void set_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::string get_value(const ExperimentConfig& cfg, const std::string& key);
const std::vector<std::string>& config_keys();

/// Every key, one per line, in a fixed order; parse_config reads it back exactly.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace aoinoma::harness
