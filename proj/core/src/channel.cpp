#include "aoinoma/channel.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace aoinoma::channel {

namespace {
std::atomic<long> g_clamps{0};
}

void ChannelConfig::validate() const
{
    if (!(fading_variance > 0.0)) {
        throw std::invalid_argument("fading_variance must be positive");
    }
    if (!(d0_m > 0.0)) {
        throw std::invalid_argument("d0 must be positive");
    }
    if (!(cell_radius_m > d0_m)) {
        throw std::invalid_argument("cell_radius must exceed d0");
    }
    if (speed_mps < 0.0) {
        throw std::invalid_argument("speed must be non-negative");
    }
    if (levels < 2) {
        throw std::invalid_argument("levels must be >= 2");
    }
}

double sample_fading(Rng& rng, double sigma2)
{
    expects(sigma2 > 0.0, "fading variance must be positive");
    return std::exponential_distribution<double>(1.0 / sigma2)(rng);
}

double channel_gain(double fading, double distance_m, double d0_m, double exponent)
{
    if (distance_m < d0_m) {
        g_clamps.fetch_add(1, std::memory_order_relaxed);
        distance_m = d0_m;
    }
    return fading * std::pow(d0_m / distance_m, exponent);
}

long clamp_count() { return g_clamps.load(std::memory_order_relaxed); }

Quantizer Quantizer::build(int levels, double sigma2, double mean_pathloss)
{
    expects(levels >= 2, "quantizer needs at least two levels");
    expects(sigma2 > 0.0 && mean_pathloss > 0.0, "quantizer mean must be positive");
    Quantizer q;
    q.mean_ = sigma2 * mean_pathloss;
    const double mu = q.mean_;
    q.boundaries_.resize(levels + 1);
    q.boundaries_[0] = 0.0;
    for (int k = 1; k < levels; ++k) {
        q.boundaries_[k] = -mu * std::log1p(-static_cast<double>(k) / levels);
    }
    q.boundaries_[levels] = std::numeric_limits<double>::infinity();

    // E[X | a <= X < b] for X ~ Exp(mean mu); every bin has mass 1/L.
    q.representatives_.resize(levels);
    for (int k = 0; k < levels; ++k) {
        const double a = q.boundaries_[k];
        const double b = q.boundaries_[k + 1];
        if (std::isinf(b)) {
            q.representatives_[k] = a + mu;
        } else {
            const double ea = std::exp(-a / mu);
            const double eb = std::exp(-b / mu);
            q.representatives_[k] = mu + (a * ea - b * eb) / (ea - eb);
        }
    }
    return q;
}

double Quantizer::bin_probability(int level) const
{
    const double a = boundaries_.at(level - 1);
    const double b = boundaries_.at(level);
    const double upper = std::isinf(b) ? 0.0 : std::exp(-b / mean_);
    return std::exp(-a / mean_) - upper;
}

int Quantizer::level_of(double gain) const
{
    expects(gain >= 0.0, "gain must be non-negative");
    // Half-open bins: the first boundary strictly greater than gain closes the bin.
    int level = 1;
    while (level < levels() && gain >= boundaries_[level]) {
        ++level;
    }
    return level;
}

ChannelState quantize_gain(double gain, const Quantizer& quantizer)
{
    const int level = quantizer.level_of(gain);
    return {level, quantizer.representative(level)};
}

double Position::distance() const { return std::hypot(x, y); }

Position place_ue(Rng& rng, double radius, double min_distance)
{
    // Area-uniform radius over the annulus [min_distance, radius].
    const double u = uniform01(rng);
    const double r = std::sqrt(min_distance * min_distance + u * (radius * radius - min_distance * min_distance));
    const double angle = 2.0 * std::numbers::pi * uniform01(rng);
    return {r * std::cos(angle), r * std::sin(angle)};
}

Position move_ue(Position position, double speed, double delta, Rng& rng, double radius)
{
    const double angle = 2.0 * std::numbers::pi * uniform01(rng);
    const double step = speed * delta;
    Position next{position.x + step * std::cos(angle), position.y + step * std::sin(angle)};
    const double d = next.distance();
    if (d > radius) {
        const double scale = (2.0 * radius - d) / d;
        next.x *= scale;
        next.y *= scale;
    }
    return next;
}

}  // namespace aoinoma::channel
