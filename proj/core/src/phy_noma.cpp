#include "aoinoma/phy_noma.hpp"

#include <cmath>
#include <stdexcept>

namespace aoinoma::phy {

void RadioConfig::validate() const
{
    if (subcarriers < 1) {
        throw std::invalid_argument("subcarriers must be >= 1");
    }
    if (!(spacing_hz > 0.0)) {
        throw std::invalid_argument("subcarrier_spacing_hz must be positive");
    }
    if (noma_quota < 1) {
        throw std::invalid_argument("noma_quota must be >= 1");
    }
    if (!(p_max_w > 0.0)) {
        throw std::invalid_argument("p_max must be positive");
    }
    if (!(circuit_w > 0.0)) {
        throw std::invalid_argument("circuit_w must be positive");
    }
    if (!(noise_psd_w_hz > 0.0)) {
        throw std::invalid_argument("noise_psd must be positive");
    }
}

void ComputeConfig::validate() const
{
    if (!(cycles_per_bit > 0.0) || !(cpu_hz > 0.0) || !(capacitance > 0.0)) {
        throw std::invalid_argument("cycles_per_bit, cpu_hz and capacitance must be positive");
    }
}

namespace {

// m' interferes with m when m' is decoded after m: weaker gain, or equal gain
// and higher index.
bool decoded_after(double gain_other, int other, double gain_target, int target)
{
    return gain_other < gain_target || (gain_other == gain_target && other > target);
}

}  // namespace

std::vector<int> sic_interferers(std::span<const double> gains, std::span<const std::uint8_t> assigned, int target)
{
    expects(assigned[target] != 0, "SIC: target UE is not on this subcarrier");
    std::vector<int> out;
    for (int m = 0; m < static_cast<int>(gains.size()); ++m) {
        if (m != target && assigned[m] && decoded_after(gains[m], m, gains[target], target)) {
            out.push_back(m);
        }
    }
    return out;
}

Grid<double> sinr(const Grid<double>& power_w, const Grid<double>& gains, const Grid<std::uint8_t>& rho,
                  const RadioConfig& cfg)
{
    const int ues = rho.rows();
    const int carriers = rho.cols();
    const double noise = cfg.noise_w();
    Grid<double> gamma(ues, carriers, 0.0);
    for (int n = 0; n < carriers; ++n) {
        for (int m = 0; m < ues; ++m) {
            if (!rho(m, n)) {
                continue;
            }
            double interference = 0.0;
            for (int k = 0; k < ues; ++k) {
                if (k != m && rho(k, n) && decoded_after(gains(k, n), k, gains(m, n), m)) {
                    interference += power_w(k, n) * gains(k, n);
                }
            }
            gamma(m, n) = power_w(m, n) * gains(m, n) / (noise + interference);
        }
    }
    return gamma;
}

double user_rate(std::span<const std::uint8_t> rho_row, std::span<const double> sinr_row, double spacing_hz)
{
    double rate = 0.0;
    for (std::size_t n = 0; n < rho_row.size(); ++n) {
        if (rho_row[n]) {
            rate += spacing_hz * std::log2(1.0 + sinr_row[n]);
        }
    }
    return rate;
}

std::vector<double> user_rates(const Grid<std::uint8_t>& rho, const Grid<double>& gamma, double spacing_hz)
{
    std::vector<double> rates(rho.rows());
    for (int m = 0; m < rho.rows(); ++m) {
        rates[m] = user_rate(rho.row(m), gamma.row(m), spacing_hz);
    }
    return rates;
}

bool check_rate_coverage(std::span<const std::uint8_t> phi, std::span<const double> packet_bits, double rate_bps,
                         double slot_s)
{
    double bits = 0.0;
    for (std::size_t f = 0; f < phi.size(); ++f) {
        bits += phi[f] * packet_bits[f];
    }
    return bits <= rate_bps * slot_s;
}

bool check_subcarrier_quota(const Grid<std::uint8_t>& rho, int quota)
{
    for (int n = 0; n < rho.cols(); ++n) {
        int users = 0;
        for (int m = 0; m < rho.rows(); ++m) {
            users += rho(m, n);
        }
        if (users > quota) {
            return false;
        }
    }
    return true;
}

bool check_power_budget(std::span<const std::uint8_t> rho_row, std::span<const double> power_row, double p_max_w)
{
    double total = 0.0;
    for (std::size_t n = 0; n < rho_row.size(); ++n) {
        expects(power_row[n] >= 0.0, "power must be non-negative");
        total += rho_row[n] * power_row[n];
    }
    return total <= p_max_w * (1.0 + kBudgetSlack);
}

CpuLoad cpu_load(const Grid<std::uint8_t>& phi, std::span<const double> packet_bits, const ComputeConfig& cfg,
                 double slot_s)
{
    double bits = 0.0;
    for (int m = 0; m < phi.rows(); ++m) {
        for (int f = 0; f < phi.cols(); ++f) {
            bits += phi(m, f) * packet_bits[f];
        }
    }
    CpuLoad load;
    load.cycles_per_s = bits * cfg.cycles_per_bit / slot_s;
    load.feasible = load.cycles_per_s <= cfg.cpu_hz;
    return load;
}

double cpu_energy(double cycles_per_s, double capacitance, double slot_s)
{
    expects(cycles_per_s >= 0.0, "CPU frequency must be non-negative");
    return capacitance * cycles_per_s * cycles_per_s * cycles_per_s * slot_s;
}

}  // namespace aoinoma::phy
