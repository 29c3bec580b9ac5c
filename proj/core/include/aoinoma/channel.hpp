#pragma once

#include <vector>

#include "aoinoma/common.hpp"

// Rayleigh fading, distance path loss, mobility and gain quantization.
namespace aoinoma::channel {

struct ChannelConfig {
    double fading_variance = 1.0;
    double d0_m = 1.0;
    double cell_radius_m = 500.0;
    double speed_mps = 10.0;
    double pathloss_exp = 3.0;
    int levels = 8;

    void validate() const;
};

/// |g|^2 for g ~ CN(0, sigma2), i.e. exponential with mean sigma2.
double sample_fading(Rng& rng, double sigma2);

/// |h|^2 = |g|^2 (d0/d)^exponent. Distances below d0 are clamped to d0 and
/// counted in clamp_count().
double channel_gain(double fading, double distance_m, double d0_m, double exponent = 3.0);
long clamp_count();

/// Equal-probability quantizer for an exponentially distributed gain. Level i
/// (1-based) covers [a_i, a_{i+1}) with a_1 = 0 and a_{L+1} = +inf; its
/// representative is the conditional mean of the bin.
class Quantizer {
public:
    static Quantizer build(int levels, double sigma2, double mean_pathloss = 1.0);

    int levels() const { return static_cast<int>(representatives_.size()); }
    double mean() const { return mean_; }
    const std::vector<double>& boundaries() const { return boundaries_; }
    const std::vector<double>& representatives() const { return representatives_; }
    double representative(int level) const { return representatives_.at(level - 1); }
    /// Probability mass of bin `level` under the design distribution.
    double bin_probability(int level) const;
    int level_of(double gain) const;

private:
    double mean_ = 1.0;
    std::vector<double> boundaries_;
    std::vector<double> representatives_;
};

struct ChannelState {
    int level = 1;
    double gain = 0.0;
};

ChannelState quantize_gain(double gain, const Quantizer& quantizer);

struct Position {
    double x = 0.0;
    double y = 0.0;

    double distance() const;
};

/// Uniform over the disk of `radius`, at least `min_distance` from the BS.
Position place_ue(Rng& rng, double radius, double min_distance);

/// One slot of random-direction motion, reflected back into the cell.
Position move_ue(Position position, double speed, double delta, Rng& rng, double radius);

}  // namespace aoinoma::channel
