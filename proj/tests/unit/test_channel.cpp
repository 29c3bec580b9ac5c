#include <doctest.h>

#include <cmath>
#include <limits>

#include "aoinoma/channel.hpp"

using namespace aoinoma;
using namespace aoinoma::channel;

TEST_CASE("sample_fading: exponential with the configured mean")
{
    Rng rng = make_stream(1, Stream::Fading);
    const int draws = 100000;
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) {
        sum += sample_fading(rng, 1.0);
    }
    CHECK(std::abs(sum / draws - 1.0) < 0.02);

    Rng a = make_stream(2, Stream::Fading);
    Rng b = make_stream(2, Stream::Fading);
    CHECK(sample_fading(a, 1.0) == sample_fading(b, 1.0));
    // Same underlying draw, scaled variance.
    CHECK(sample_fading(a, 3.0) == doctest::Approx(3.0 * sample_fading(b, 1.0)));
    CHECK_THROWS_AS(sample_fading(a, 0.0), ContractViolation);
}

TEST_CASE("channel_gain: cube law")
{
    CHECK(channel_gain(0.7, 1.0, 1.0) == 0.7);
    CHECK(channel_gain(0.8, 2.0, 1.0) == doctest::Approx(0.1));
    CHECK(channel_gain(0.0, 30.0, 1.0) == 0.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double d = 1.0; d < 500.0; d *= 1.7) {
        const double g = channel_gain(1.0, d, 1.0);
        CHECK(g < prev);
        prev = g;
        CHECK(channel_gain(2.5, d, 1.0) == doctest::Approx(2.5 * g));
    }
}

TEST_CASE("channel_gain: distances inside d0 are clamped and counted")
{
    const long before = clamp_count();
    CHECK(channel_gain(0.5, 0.2, 1.0) == 0.5);
    CHECK(clamp_count() == before + 1);
}

TEST_CASE("quantizer boundaries are exponential quantiles")
{
    const Quantizer q2 = Quantizer::build(2, 1.0);
    CHECK(q2.boundaries()[1] == doctest::Approx(0.6931).epsilon(1e-4));

    const Quantizer q = Quantizer::build(4, 1.0);
    const auto& a = q.boundaries();
    REQUIRE(a.size() == 5);
    CHECK(a[0] == 0.0);
    CHECK(std::abs(a[1] - 0.2877) < 1e-4);
    CHECK(std::abs(a[2] - 0.6931) < 1e-4);
    CHECK(std::abs(a[3] - 1.3863) < 1e-4);
    CHECK(std::isinf(a[4]));

    for (int levels : {2, 3, 4, 8, 16}) {
        const Quantizer qq = Quantizer::build(levels, 1.3, 0.4);
        double total = 0.0;
        for (int i = 1; i <= levels; ++i) {
            total += qq.bin_probability(i);
            CHECK(qq.bin_probability(i) == doctest::Approx(1.0 / levels));
            // Representative inside its bin.
            CHECK(qq.representative(i) >= qq.boundaries()[i - 1]);
            CHECK(qq.representative(i) < qq.boundaries()[i]);
            CHECK(qq.boundaries()[i] > qq.boundaries()[i - 1]);
        }
        CHECK(total == doctest::Approx(1.0));
    }
}

TEST_CASE("quantizer representatives are conditional means")
{
    // Numerical integration of x e^{-x} over each bin, independent of the
    // closed form.
    const Quantizer q = Quantizer::build(4, 1.0);
    for (int i = 1; i <= 4; ++i) {
        const double lo = q.boundaries()[i - 1];
        const double hi = std::isinf(q.boundaries()[i]) ? 60.0 : q.boundaries()[i];
        const int steps = 200000;
        const double h = (hi - lo) / steps;
        double num = 0.0, den = 0.0;
        for (int k = 0; k < steps; ++k) {
            const double x = lo + (k + 0.5) * h;
            num += x * std::exp(-x) * h;
            den += std::exp(-x) * h;
        }
        CHECK(q.representative(i) == doctest::Approx(num / den).epsilon(1e-6));
    }
}

TEST_CASE("quantize_gain: half-open bins")
{
    const Quantizer q = Quantizer::build(4, 1.0);
    CHECK(quantize_gain(0.0, q).level == 1);
    CHECK(quantize_gain(0.1, q).level == 1);
    CHECK(quantize_gain(1e300, q).level == 4);
    for (int i = 2; i <= 4; ++i) {
        CHECK(q.level_of(q.boundaries()[i - 1]) == i);
        CHECK(q.level_of(std::nextafter(q.boundaries()[i - 1], 0.0)) == i - 1);
    }
    const ChannelState s = quantize_gain(0.5, q);
    CHECK(s.gain == q.representative(s.level));
}

TEST_CASE("quantizer occupancy is uniform within 3 sigma")
{
    for (int levels : {4, 8}) {
        const Quantizer q = Quantizer::build(levels, 1.0);
        Rng rng = make_stream(13, Stream::Fading);
        const int draws = 100000;
        std::vector<int> hits(levels, 0);
        for (int i = 0; i < draws; ++i) {
            ++hits[q.level_of(sample_fading(rng, 1.0)) - 1];
        }
        const double p = 1.0 / levels;
        const double sigma = std::sqrt(draws * p * (1 - p));
        for (int h : hits) {
            CHECK(std::abs(h - draws * p) <= 3.0 * sigma);
        }
    }
}

TEST_CASE("mobility")
{
    Rng rng = make_stream(4, Stream::Mobility);
    const Position start{10.0, -20.0};
    const Position still = move_ue(start, 0.0, 0.01, rng, 500.0);
    CHECK(still.x == start.x);
    CHECK(still.y == start.y);

    const Position moved = move_ue(start, 10.0, 0.01, rng, 500.0);
    CHECK(std::hypot(moved.x - start.x, moved.y - start.y) == doctest::Approx(0.1));

    Position p{0.0, 499.95};
    for (int i = 0; i < 10000; ++i) {
        p = move_ue(p, 10.0, 0.01, rng, 500.0);
        CHECK(p.distance() <= 500.0);
    }
    // Fast steps reflect off the boundary too.
    p = {0.0, 490.0};
    for (int i = 0; i < 10000; ++i) {
        p = move_ue(p, 2000.0, 0.01, rng, 500.0);
        CHECK(p.distance() <= 500.0);
    }
}

TEST_CASE("placement stays inside the annulus")
{
    Rng rng = make_stream(5, Stream::Placement);
    for (int i = 0; i < 10000; ++i) {
        const Position p = place_ue(rng, 500.0, 1.0);
        CHECK(p.distance() <= 500.0 + 1e-9);
        CHECK(p.distance() >= 1.0 - 1e-9);
    }
}

TEST_CASE("config validation")
{
    ChannelConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.levels = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = ChannelConfig{};
    cfg.cell_radius_m = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
