#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aoinoma/dqn/trainer.hpp"
#include "aoinoma/harness/config.hpp"
#include "aoinoma/harness/metrics.hpp"

namespace aoinoma::harness {

/// Optional progress sink; receives one short line per finished unit of work.
using Progress = std::function<void(const std::string&)>;

struct TrainOutput {
    std::vector<dqn::EpisodeMetrics> episodes;
    dqn::Checkpoint checkpoint;
};

/// Trains one agent. Pure function of (cfg, seed).
TrainOutput train_agent(const ExperimentConfig& cfg, std::uint64_t seed, const Progress& progress = {});

/// Writes <out>/train_metrics.csv and <out>/checkpoint.txt.
TrainOutput run_train(const ExperimentConfig& cfg, std::uint64_t seed, const std::string& out_dir,
                      const Progress& progress = {});

/// Greedy evaluation of a checkpoint over cfg.eval_episodes; writes
/// <out>/eval_metrics.csv.
std::vector<dqn::EpisodeMetrics> run_evaluate(const ExperimentConfig& cfg, std::uint64_t seed,
                                              const std::string& checkpoint_path, const std::string& out_dir);

/// Trains for cfg.sweep_episodes and then averages cfg.eval_episodes greedy
/// episodes. Returns (reward, aaoi, ee, transmitted ratio).
struct PointSummary {
    double reward = 0.0;
    double aaoi_s = 0.0;
    double ee = 0.0;
    double transmitted_ratio = 0.0;
};
PointSummary train_and_evaluate(const ExperimentConfig& cfg, std::uint64_t seed);

enum class SweepAxis { PMax, PacketBits, Subcarriers };
SweepAxis parse_axis(const std::string& name);
std::string to_string(SweepAxis axis);
std::vector<double> axis_values(const ExperimentConfig& cfg, SweepAxis axis);
ExperimentConfig at_axis_value(ExperimentConfig cfg, SweepAxis axis, double value);

/// One row per (axis value, scheme) in that order. Writes
/// <out>/sweep_<axis>.csv when out_dir is non-empty.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values,
                                const std::vector<baselines::Scheme>& schemes,
                                const std::vector<std::uint64_t>& seeds, const std::string& out_dir,
                                const Progress& progress = {});

const std::vector<std::string>& figure_ids();

/// Projects a metrics file onto one figure: <out>/<figure>.dat with (x, y)
/// for every row, plus <out>/<figure>__<scheme>.dat per scheme. Returns the
/// written paths. Unknown ids throw std::invalid_argument listing the valid ones.
std::vector<std::string> emit_plot_data(const std::string& metrics_path, const std::string& figure,
                                        const std::string& out_dir);

}  // namespace aoinoma::harness
