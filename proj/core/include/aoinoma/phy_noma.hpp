#pragma once

#include <span>
#include <vector>

#include "aoinoma/common.hpp"

// Uplink NOMA physical layer: SIC ordering, SINR, Shannon rate and the radio
// and edge-compute constraint checks.
namespace aoinoma::phy {

struct RadioConfig {
    int subcarriers = 2;
    double spacing_hz = 60e3;
    int noma_quota = 2;
    double noise_psd_w_hz = 3.981071705534972e-21;  // -174 dBm/Hz
    double p_max_w = 0.01;
    double circuit_w = 0.2;

    void validate() const;
    double noise_w() const { return spacing_hz * noise_psd_w_hz; }
};

struct ComputeConfig {
    double cycles_per_bit = 737.5;
    double cpu_hz = 2e9;
    double capacitance = 2.5e-28;

    void validate() const;
};

/// UEs co-assigned on the subcarrier whose gain does not exceed the target's.
/// Equal gains: the lower index is decoded first and so sees the higher index
/// as interference, never the reverse.
std::vector<int> sic_interferers(std::span<const double> gains, std::span<const std::uint8_t> assigned, int target);

/// gamma for every (UE, subcarrier); zero where unassigned.
Grid<double> sinr(const Grid<double>& power_w, const Grid<double>& gains, const Grid<std::uint8_t>& rho,
                  const RadioConfig& cfg);

double user_rate(std::span<const std::uint8_t> rho_row, std::span<const double> sinr_row, double spacing_hz);

std::vector<double> user_rates(const Grid<std::uint8_t>& rho, const Grid<double>& gamma, double spacing_hz);

bool check_rate_coverage(std::span<const std::uint8_t> phi, std::span<const double> packet_bits, double rate_bps,
                         double slot_s);

bool check_subcarrier_quota(const Grid<std::uint8_t>& rho, int quota);

/// Relative slack on the budget so that grid levels summing to exactly P_max
/// are not rejected by rounding.
inline constexpr double kBudgetSlack = 1e-9;

bool check_power_budget(std::span<const std::uint8_t> rho_row, std::span<const double> power_row, double p_max_w);

struct CpuLoad {
    double cycles_per_s = 0.0;
    bool feasible = true;
};

CpuLoad cpu_load(const Grid<std::uint8_t>& phi, std::span<const double> packet_bits, const ComputeConfig& cfg,
                 double slot_s);

double cpu_energy(double cycles_per_s, double capacitance, double slot_s);

}  // namespace aoinoma::phy
