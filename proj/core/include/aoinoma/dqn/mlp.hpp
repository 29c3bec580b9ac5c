#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "aoinoma/common.hpp"

namespace aoinoma::dqn {

/// Fully connected network, ReLU on hidden layers and identity output. All
/// parameters live in one flat vector, layer by layer: the weight matrix
/// (out x in, row-major) followed by the bias vector.
class Mlp {
public:
    Mlp() = default;
    /// Zero-initialized network with the given layer sizes (input first).
    explicit Mlp(std::vector<int> sizes);

    /// Uniform in +-sqrt(6 / (fan_in + fan_out)) for weights, zero biases.
    static Mlp glorot(std::vector<int> sizes, Rng& rng);

    const std::vector<int>& sizes() const { return sizes_; }
    int input_dim() const { return sizes_.front(); }
    int output_dim() const { return sizes_.back(); }
    int layer_count() const { return static_cast<int>(sizes_.size()) - 1; }

    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    std::size_t param_count() const { return params_.size(); }

    double& weight(int layer, int out, int in);
    double& bias(int layer, int out);

    /// Activations of every layer, input included; filled by forward().
    struct Tape {
        std::vector<std::vector<double>> activations;
    };

    std::vector<double> forward(std::span<const double> input) const;
    std::vector<double> forward(std::span<const double> input, Tape& tape) const;

    /// Adds d(loss)/d(params) to `grad` given d(loss)/d(output) for the pass
    /// recorded in `tape`.
    void backward(const Tape& tape, std::span<const double> grad_output, std::span<double> grad) const;

    /// Column-batched variant: layer activations are stored feature-major,
    /// entry (feature, sample) at feature * batch + sample. Outputs match the
    /// single-sample pass exactly.
    struct BatchTape {
        int batch = 0;
        std::vector<std::vector<double>> activations;
    };

    /// `inputs` holds input_dim() x batch values, feature-major. Returns the
    /// output_dim() x batch block.
    const std::vector<double>& forward_batch(std::span<const double> inputs, int batch, BatchTape& tape) const;
    void backward_batch(const BatchTape& tape, std::span<const double> grad_output, std::span<double> grad) const;

    bool operator==(const Mlp&) const = default;

private:
    std::size_t weight_offset(int layer) const { return offsets_[layer]; }
    std::size_t bias_offset(int layer) const
    {
        return offsets_[layer] + static_cast<std::size_t>(sizes_[layer]) * sizes_[layer + 1];
    }

    std::vector<int> sizes_;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
};

struct AdamConfig {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long t = 0;

    explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
    bool operator==(const AdamState&) const = default;
};

/// One bias-corrected Adam update; increments state.t first.
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state, const AdamConfig& cfg);

/// Rescales `grad` so its Euclidean norm is at most max_norm; returns the norm
/// before clipping. A non-positive max_norm disables clipping.
double clip_grad_norm(std::span<double> grad, double max_norm);

/// Online and target networks plus optimizer state.
struct Checkpoint {
    Mlp online;
    Mlp target;
    AdamState adam;
    long steps = 0;

    bool operator==(const Checkpoint&) const = default;
};

void save_checkpoint(std::ostream& out, const Checkpoint& ckpt);
/// Throws std::runtime_error on a malformed or unsupported file.
Checkpoint load_checkpoint(std::istream& in);

}  // namespace aoinoma::dqn
