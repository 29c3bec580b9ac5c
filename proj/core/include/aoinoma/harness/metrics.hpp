#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aoinoma/baselines.hpp"
#include "aoinoma/dqn/trainer.hpp"

// CSV metrics files. Every file starts with a schema comment
// "# aoinoma-metrics v1 kind=<kind>" followed by a fixed header line.
namespace aoinoma::harness {

inline constexpr const char* kSchemaPrefix = "# aoinoma-metrics v1 kind=";

const std::vector<std::string>& episode_columns();
const std::vector<std::string>& sweep_columns();

/// Throws ContractViolation if a value is not finite.
std::string format_number(double v);

/// kind is "train" or "evaluate"; one row per episode.
void write_episode_csv(std::ostream& out, const std::string& kind, baselines::Scheme scheme,
                       const std::vector<dqn::EpisodeMetrics>& rows);

struct SweepRow {
    std::string axis;
    double axis_value = 0.0;
    std::string scheme;
    int seeds = 0;
    double reward_mean = 0.0;
    double reward_std = 0.0;
    double aaoi_mean = 0.0;
    double aaoi_std = 0.0;
    double ee_mean = 0.0;
    double ee_std = 0.0;
    double transmitted_ratio_mean = 0.0;
    double transmitted_ratio_std = 0.0;
};

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct CsvTable {
    std::string kind;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of `name` in the header; throws std::invalid_argument if absent.
    int column(const std::string& name) const;
};

/// An empty stream reads as an empty table with no kind.
CsvTable read_csv(std::istream& in);

/// Sample mean and (n-1) standard deviation; the deviation is 0 for n = 1.
struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};
MeanStd mean_std(const std::vector<double>& values);

/// transmitted / generated, 0 when nothing was generated.
double safe_transmitted_ratio(const env::PacketCounters& c);

}  // namespace aoinoma::harness
