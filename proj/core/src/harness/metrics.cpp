#include "aoinoma/harness/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace aoinoma::harness {

const std::vector<std::string>& episode_columns()
{
    static const std::vector<std::string> cols{
        "episode",     "steps",       "scheme",       "dqn_rho",         "dqn_p",
        "dqn_phi",     "reward_raw",  "reward_penalized", "loss",         "epsilon",
        "aaoi_s",      "ee_bits_per_joule_per_hz", "r_total_bps", "p_total_w", "transmitted_ratio",
        "dropped_ratio", "cpu_energy_j",
    };
    return cols;
}

const std::vector<std::string>& sweep_columns()
{
    static const std::vector<std::string> cols{
        "axis",      "axis_value", "scheme",  "seeds",  "reward_mean",           "reward_std",
        "aaoi_mean", "aaoi_std",   "ee_mean", "ee_std", "transmitted_ratio_mean", "transmitted_ratio_std",
    };
    return cols;
}

std::string format_number(double v)
{
    expects(std::isfinite(v), "refusing to write a non-finite metric");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double safe_transmitted_ratio(const env::PacketCounters& c)
{
    return c.generated > 0 ? c.transmitted_ratio() : 0.0;
}

namespace {

void write_header(std::ostream& out, const std::string& kind, const std::vector<std::string>& cols)
{
    out << kSchemaPrefix << kind << '\n';
    for (std::size_t i = 0; i < cols.size(); ++i) {
        out << (i ? "," : "") << cols[i];
    }
    out << '\n';
}

}  // namespace

void write_episode_csv(std::ostream& out, const std::string& kind, baselines::Scheme scheme,
                       const std::vector<dqn::EpisodeMetrics>& rows)
{
    write_header(out, kind, episode_columns());
    const auto flags = baselines::scheme_flags(scheme);
    const std::string name = baselines::to_string(scheme);
    for (const auto& r : rows) {
        const double sent = safe_transmitted_ratio(r.packets);
        out << r.episode << ',' << r.steps << ',' << name << ',' << flags.dqn_rho << ',' << flags.dqn_p << ','
            << flags.dqn_phi << ',' << format_number(r.reward_raw) << ',' << format_number(r.reward_penalized) << ','
            << format_number(r.loss) << ',' << format_number(r.epsilon) << ',' << format_number(r.aaoi_s) << ','
            << format_number(r.ee_bits_per_joule_per_hz) << ',' << format_number(r.r_total_bps) << ','
            << format_number(r.p_total_w) << ',' << format_number(sent) << ','
            << format_number(r.packets.generated > 0 ? 1.0 - sent : 0.0) << ',' << format_number(r.cpu_energy_j)
            << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    write_header(out, "sweep", sweep_columns());
    for (const auto& r : rows) {
        out << r.axis << ',' << format_number(r.axis_value) << ',' << r.scheme << ',' << r.seeds << ','
            << format_number(r.reward_mean) << ',' << format_number(r.reward_std) << ','
            << format_number(r.aaoi_mean) << ',' << format_number(r.aaoi_std) << ',' << format_number(r.ee_mean)
            << ',' << format_number(r.ee_std) << ',' << format_number(r.transmitted_ratio_mean) << ','
            << format_number(r.transmitted_ratio_std) << '\n';
    }
}

int CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return static_cast<int>(i);
        }
    }
    throw std::invalid_argument("metrics file has no column '" + name + "'");
}

CsvTable read_csv(std::istream& in)
{
    CsvTable table;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            out.push_back(cell);
        }
        return out;
    };
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            const std::string prefix = kSchemaPrefix;
            if (line.rfind(prefix, 0) == 0) {
                table.kind = line.substr(prefix.size());
            }
            continue;
        }
        if (table.header.empty()) {
            table.header = split(line);
        } else {
            table.rows.push_back(split(line));
        }
    }
    return table;
}

MeanStd mean_std(const std::vector<double>& values)
{
    MeanStd out;
    if (values.empty()) {
        return out;
    }
    for (double v : values) {
        out.mean += v;
    }
    out.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - out.mean) * (v - out.mean);
        }
        out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return out;
}

}  // namespace aoinoma::harness
