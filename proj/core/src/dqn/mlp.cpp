#include "aoinoma/dqn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace aoinoma::dqn {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes))
{
    expects(sizes_.size() >= 2, "network needs an input and an output layer");
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        expects(sizes_[l] > 0 && sizes_[l + 1] > 0, "layer sizes must be positive");
        offsets_.push_back(offset);
        offset += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
    }
    params_.assign(offset, 0.0);
}

Mlp Mlp::glorot(std::vector<int> sizes, Rng& rng)
{
    Mlp net(std::move(sizes));
    for (int l = 0; l < net.layer_count(); ++l) {
        const int fan_in = net.sizes_[l];
        const int fan_out = net.sizes_[l + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (int o = 0; o < fan_out; ++o) {
            for (int i = 0; i < fan_in; ++i) {
                net.weight(l, o, i) = dist(rng);
            }
        }
    }
    return net;
}

double& Mlp::weight(int layer, int out, int in)
{
    return params_[weight_offset(layer) + static_cast<std::size_t>(out) * sizes_[layer] + in];
}

double& Mlp::bias(int layer, int out) { return params_[bias_offset(layer) + out]; }

std::vector<double> Mlp::forward(std::span<const double> input) const
{
    Tape tape;
    return forward(input, tape);
}

std::vector<double> Mlp::forward(std::span<const double> input, Tape& tape) const
{
    expects(static_cast<int>(input.size()) == input_dim(), "input dimension does not match the network");
    tape.activations.resize(sizes_.size());
    tape.activations[0].assign(input.begin(), input.end());
    for (int l = 0; l < layer_count(); ++l) {
        const int fan_in = sizes_[l];
        const int fan_out = sizes_[l + 1];
        const double* w = params_.data() + weight_offset(l);
        const double* b = params_.data() + bias_offset(l);
        const std::vector<double>& x = tape.activations[l];
        std::vector<double>& y = tape.activations[l + 1];
        y.resize(fan_out);
        const bool hidden = l + 1 < layer_count();
        for (int o = 0; o < fan_out; ++o) {
            const double* row = w + static_cast<std::size_t>(o) * fan_in;
            double acc = b[o];
            for (int i = 0; i < fan_in; ++i) {
                acc += row[i] * x[i];
            }
            y[o] = hidden ? std::max(acc, 0.0) : acc;
        }
    }
    return tape.activations.back();
}

void Mlp::backward(const Tape& tape, std::span<const double> grad_output, std::span<double> grad) const
{
    expects(grad.size() == params_.size(), "gradient buffer size mismatch");
    expects(static_cast<int>(grad_output.size()) == output_dim(), "output gradient size mismatch");
    std::vector<double> delta(grad_output.begin(), grad_output.end());
    std::vector<double> below;
    for (int l = layer_count() - 1; l >= 0; --l) {
        const int fan_in = sizes_[l];
        const int fan_out = sizes_[l + 1];
        const double* w = params_.data() + weight_offset(l);
        double* gw = grad.data() + weight_offset(l);
        double* gb = grad.data() + bias_offset(l);
        const std::vector<double>& x = tape.activations[l];
        below.assign(fan_in, 0.0);
        for (int o = 0; o < fan_out; ++o) {
            const double d = delta[o];
            if (d == 0.0) {
                continue;
            }
            gb[o] += d;
            double* grow = gw + static_cast<std::size_t>(o) * fan_in;
            const double* row = w + static_cast<std::size_t>(o) * fan_in;
            for (int i = 0; i < fan_in; ++i) {
                grow[i] += d * x[i];
                below[i] += d * row[i];
            }
        }
        if (l > 0) {
            // ReLU derivative, taken as zero at the kink.
            for (int i = 0; i < fan_in; ++i) {
                if (x[i] <= 0.0) {
                    below[i] = 0.0;
                }
            }
        }
        delta.swap(below);
    }
}

namespace {

// y(o, s) = b(o) + sum_i w(o, i) x(i, s), summed in increasing i for every
// (o, s) so results match the single-sample pass bit for bit. Blocks of 4x4
// outputs keep the accumulators in registers.
void affine_block(const double* w, const double* b, const double* x, double* y, int fan_in, int fan_out,
                  std::size_t nb)
{
    constexpr int kB = 4;
    const int o_full = fan_out / kB * kB;
    const std::size_t s_full = nb / kB * kB;
    for (int o0 = 0; o0 < o_full; o0 += kB) {
        const double* r0 = w + static_cast<std::size_t>(o0) * fan_in;
        for (std::size_t s0 = 0; s0 < s_full; s0 += kB) {
            double acc[kB][kB];
            for (int a = 0; a < kB; ++a) {
                for (int c = 0; c < kB; ++c) {
                    acc[a][c] = b[o0 + a];
                }
            }
            for (int i = 0; i < fan_in; ++i) {
                const double* xi = x + i * nb + s0;
                for (int a = 0; a < kB; ++a) {
                    const double wi = r0[static_cast<std::size_t>(a) * fan_in + i];
                    for (int c = 0; c < kB; ++c) {
                        acc[a][c] += wi * xi[c];
                    }
                }
            }
            for (int a = 0; a < kB; ++a) {
                for (int c = 0; c < kB; ++c) {
                    y[(o0 + a) * nb + s0 + c] = acc[a][c];
                }
            }
        }
    }
    // Ragged edges.
    for (int o = 0; o < fan_out; ++o) {
        const std::size_t s_begin = o < o_full ? s_full : 0;
        const double* row = w + static_cast<std::size_t>(o) * fan_in;
        for (std::size_t s = s_begin; s < nb; ++s) {
            double acc = b[o];
            for (int i = 0; i < fan_in; ++i) {
                acc += row[i] * x[i * nb + s];
            }
            y[o * nb + s] = acc;
        }
    }
}

}  // namespace

const std::vector<double>& Mlp::forward_batch(std::span<const double> inputs, int batch, BatchTape& tape) const
{
    expects(batch >= 1, "batch must be non-empty");
    expects(inputs.size() == static_cast<std::size_t>(input_dim()) * batch, "batched input size mismatch");
    const std::size_t nb = static_cast<std::size_t>(batch);
    tape.batch = batch;
    tape.activations.resize(sizes_.size());
    tape.activations[0].assign(inputs.begin(), inputs.end());
    for (int l = 0; l < layer_count(); ++l) {
        const int fan_in = sizes_[l];
        const int fan_out = sizes_[l + 1];
        std::vector<double>& y = tape.activations[l + 1];
        y.resize(static_cast<std::size_t>(fan_out) * nb);
        affine_block(params_.data() + weight_offset(l), params_.data() + bias_offset(l),
                     tape.activations[l].data(), y.data(), fan_in, fan_out, nb);
        if (l + 1 < layer_count()) {
            for (double& v : y) {
                v = std::max(v, 0.0);
            }
        }
    }
    return tape.activations.back();
}

void Mlp::backward_batch(const BatchTape& tape, std::span<const double> grad_output, std::span<double> grad) const
{
    const std::size_t nb = static_cast<std::size_t>(tape.batch);
    expects(grad.size() == params_.size(), "gradient buffer size mismatch");
    expects(grad_output.size() == static_cast<std::size_t>(output_dim()) * nb, "output gradient size mismatch");
    std::vector<double> delta(grad_output.begin(), grad_output.end());
    std::vector<double> below;
    std::vector<int> live;
    for (int l = layer_count() - 1; l >= 0; --l) {
        const int fan_in = sizes_[l];
        const int fan_out = sizes_[l + 1];
        const double* w = params_.data() + weight_offset(l);
        double* gw = grad.data() + weight_offset(l);
        double* gb = grad.data() + bias_offset(l);
        const double* x = tape.activations[l].data();

        // Output units with a non-zero error somewhere in the batch.
        live.clear();
        for (int o = 0; o < fan_out; ++o) {
            const double* d = delta.data() + o * nb;
            double sum = 0.0;
            bool any = false;
            for (std::size_t s = 0; s < nb; ++s) {
                sum += d[s];
                any = any || d[s] != 0.0;
            }
            if (any) {
                gb[o] += sum;
                live.push_back(o);
            }
        }

        // Weight gradient: gw(o, i) += sum_s delta(o, s) x(i, s).
        for (int o : live) {
            const double* d = delta.data() + o * nb;
            double* grow = gw + static_cast<std::size_t>(o) * fan_in;
            for (int i = 0; i < fan_in; ++i) {
                const double* xi = x + i * nb;
                double acc[4] = {0.0, 0.0, 0.0, 0.0};
                std::size_t s = 0;
                for (; s + 4 <= nb; s += 4) {
                    for (int c = 0; c < 4; ++c) {
                        acc[c] += d[s + c] * xi[s + c];
                    }
                }
                double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
                for (; s < nb; ++s) {
                    total += d[s] * xi[s];
                }
                grow[i] += total;
            }
        }
        if (l == 0) {
            break;
        }

        // Error below: below(i, s) = sum_o w(o, i) delta(o, s), masked by ReLU.
        below.assign(static_cast<std::size_t>(fan_in) * nb, 0.0);
        for (int o : live) {
            const double* d = delta.data() + o * nb;
            const double* row = w + static_cast<std::size_t>(o) * fan_in;
            for (int i = 0; i < fan_in; ++i) {
                const double wi = row[i];
                double* bi = below.data() + i * nb;
                for (std::size_t s = 0; s < nb; ++s) {
                    bi[s] += wi * d[s];
                }
            }
        }
        for (std::size_t k = 0; k < below.size(); ++k) {
            if (x[k] <= 0.0) {
                below[k] = 0.0;
            }
        }
        delta.swap(below);
    }
}

namespace {
constexpr double kMomentFloor = 1e-200;
}

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state, const AdamConfig& cfg)
{
    expects(params.size() == grad.size() && state.m.size() == params.size() && state.v.size() == params.size(),
            "Adam buffers must match the parameter count");
    ++state.t;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        // Moments of long-idle parameters decay geometrically into the
        // subnormal range, where arithmetic is very slow. At this size they
        // move a parameter by less than 1e-190, so drop them.
        if (std::abs(state.m[i]) < kMomentFloor) {
            state.m[i] = 0.0;
        }
        if (state.v[i] < kMomentFloor) {
            state.v[i] = 0.0;
        }
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        params[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
}

double clip_grad_norm(std::span<double> grad, double max_norm)
{
    double sq = 0.0;
    for (double g : grad) {
        sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double scale = max_norm / norm;
        for (double& g : grad) {
            g *= scale;
        }
    }
    return norm;
}

namespace {

constexpr const char* kMagic = "aoinoma-checkpoint";
constexpr int kVersion = 1;

void write_values(std::ostream& out, const char* tag, const std::vector<double>& values)
{
    out << tag << ' ' << values.size() << '\n';
    char buf[64];
    for (double v : values) {
        std::snprintf(buf, sizeof buf, "%a", v);
        out << buf << '\n';
    }
}

void write_net(std::ostream& out, const char* tag, const Mlp& net)
{
    out << tag << ' ' << net.sizes().size();
    for (int s : net.sizes()) {
        out << ' ' << s;
    }
    out << '\n';
    write_values(out, "params", net.params());
}

void expect_token(std::istream& in, const std::string& want)
{
    std::string got;
    if (!(in >> got) || got != want) {
        throw std::runtime_error("checkpoint: expected '" + want + "', found '" + got + "'");
    }
}

std::vector<double> read_values(std::istream& in, const std::string& tag)
{
    expect_token(in, tag);
    std::size_t n = 0;
    if (!(in >> n)) {
        throw std::runtime_error("checkpoint: missing count after '" + tag + "'");
    }
    std::vector<double> values(n);
    std::string token;
    for (auto& v : values) {
        if (!(in >> token)) {
            throw std::runtime_error("checkpoint: truncated '" + tag + "' block");
        }
        v = std::strtod(token.c_str(), nullptr);
    }
    return values;
}

Mlp read_net(std::istream& in, const std::string& tag)
{
    expect_token(in, tag);
    std::size_t layers = 0;
    in >> layers;
    std::vector<int> sizes(layers);
    for (auto& s : sizes) {
        in >> s;
    }
    if (!in || layers < 2) {
        throw std::runtime_error("checkpoint: bad layer shape for '" + tag + "'");
    }
    Mlp net(sizes);
    auto values = read_values(in, "params");
    if (values.size() != net.param_count()) {
        throw std::runtime_error("checkpoint: parameter count does not match shape for '" + tag + "'");
    }
    net.params() = std::move(values);
    return net;
}

}  // namespace

void save_checkpoint(std::ostream& out, const Checkpoint& ckpt)
{
    out << kMagic << ' ' << kVersion << '\n';
    out << "steps " << ckpt.steps << '\n';
    write_net(out, "online", ckpt.online);
    write_net(out, "target", ckpt.target);
    out << "adam_t " << ckpt.adam.t << '\n';
    write_values(out, "adam_m", ckpt.adam.m);
    write_values(out, "adam_v", ckpt.adam.v);
    out << "end\n";
}

Checkpoint load_checkpoint(std::istream& in)
{
    expect_token(in, kMagic);
    int version = 0;
    if (!(in >> version) || version != kVersion) {
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
    }
    Checkpoint ckpt;
    expect_token(in, "steps");
    in >> ckpt.steps;
    ckpt.online = read_net(in, "online");
    ckpt.target = read_net(in, "target");
    expect_token(in, "adam_t");
    in >> ckpt.adam.t;
    ckpt.adam.m = read_values(in, "adam_m");
    ckpt.adam.v = read_values(in, "adam_v");
    expect_token(in, "end");
    if (ckpt.adam.m.size() != ckpt.online.param_count() || ckpt.adam.v.size() != ckpt.online.param_count()) {
        throw std::runtime_error("checkpoint: optimizer moments do not match the network");
    }
    return ckpt;
}

}  // namespace aoinoma::dqn
