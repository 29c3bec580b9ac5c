#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aoinoma {

/// Raised when a caller breaks an operation's precondition (infeasible action,
/// malformed input shape, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline void expects(bool condition, const std::string& what)
{
    if (!condition) {
        throw ContractViolation(what);
    }
}

using Bits = std::vector<std::uint8_t>;

/// Dense row-major matrix used for per-(UE, subcarrier) and per-(UE, type) data.
template <class T>
class Grid {
public:
    Grid() = default;
    Grid(int rows, int cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill)
    {
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    const T& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    std::span<T> row(int r) { return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)}; }
    std::span<const T> row(int r) const
    {
        return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
    }

    std::vector<T> column(int c) const
    {
        std::vector<T> out(rows_);
        for (int r = 0; r < rows_; ++r) {
            out[r] = (*this)(r, c);
        }
        return out;
    }

    std::vector<T>& flat() { return data_; }
    const std::vector<T>& flat() const { return data_; }

    bool operator==(const Grid&) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

using Rng = std::mt19937_64;

/// Independent random streams derived from one experiment seed. Each consumer
/// owns its stream so adding draws in one place never shifts another.
enum class Stream : std::uint64_t {
    Traffic = 1,
    Fading,
    Mobility,
    Placement,
    Exploration,
    Replay,
    Init,
    Baseline,
};

inline Rng make_stream(std::uint64_t seed, Stream stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), 0x5eedu};
    return Rng(seq);
}

inline double uniform01(Rng& rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline int uniform_index(Rng& rng, int n)
{
    return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace aoinoma
