#include "burstcast/nn/network.hpp"

#include <algorithm>
#include <cmath>

#include "burstcast/core/error.hpp"
#include "burstcast/core/rng.hpp"
#include "burstcast/nn/kernels.hpp"

namespace burstcast::nn {

using kernels::axpy;
using kernels::dot;

Network::Network(ModelSpec spec) : spec_(std::move(spec)), layout_(make_layout(spec_)) {
    std::size_t in = spec_.input_width;
    for (std::size_t k = 0; k < spec_.lstm_widths.size(); ++k) {
        std::array<Direction, 2> dirs{};
        for (std::size_t dir = 0; dir < spec_.directions(); ++dir) {
            const std::string p = "lstm" + std::to_string(k + 1) + (dir == 0 ? ".fwd." : ".bwd.");
            dirs[dir] = Direction{layout_.at(p + "w_x").offset, layout_.at(p + "w_h").offset,
                                  layout_.at(p + "b").offset, in, spec_.lstm_widths[k]};
        }
        layers_.push_back(dirs);
        in = spec_.lstm_widths[k] * spec_.directions();
    }
    if (spec_.variant == Variant::lstm_attention) {
        att_w_ = layout_.at("attention.w").offset;
        att_v_ = layout_.at("attention.v").offset;
    }
    dense_w_ = layout_.at("dense.w").offset;
    dense_b_ = layout_.at("dense.b").offset;
    out_w_ = layout_.at("out.w").offset;
    out_b_ = layout_.at("out.b").offset;
}

LstmWeights Network::lstm_view(std::span<const double> p, const Direction& d) const {
    const std::size_t n = 4 * d.hidden;
    return LstmWeights{p.subspan(d.w_x, d.input_width * n), p.subspan(d.w_h, d.hidden * n), p.subspan(d.b, n),
                       d.input_width, d.hidden};
}

LstmGrads Network::lstm_grads(std::span<double> g, const Direction& d) const {
    const std::size_t n = 4 * d.hidden;
    return LstmGrads{g.subspan(d.w_x, d.input_width * n), g.subspan(d.w_h, d.hidden * n), g.subspan(d.b, n)};
}

Workspace Network::make_workspace() const {
    Workspace ws;
    const std::size_t L = spec_.lookback;
    const std::size_t layers = layers_.size();
    ws.h.resize(layers);
    ws.dropped.resize(layers);
    ws.mask.resize(layers);
    ws.dh.resize(layers);
    ws.trace.resize(layers);
    for (std::size_t k = 0; k < layers; ++k) {
        const std::size_t w = spec_.lstm_widths[k] * spec_.directions();
        ws.h[k].assign(L * w, 0.0);
        ws.dh[k].assign(L * w, 0.0);
        if (k + 1 < layers) {
            ws.dropped[k].assign(L * w, 0.0);
            ws.mask[k].assign(L * w, 1.0);
        }
    }
    const std::size_t r = spec_.readout_width();
    ws.readout.assign(r, 0.0);
    ws.readout_mask.assign(r, 1.0);
    ws.readout_in.assign(r, 0.0);
    ws.d_readout.assign(r, 0.0);
    ws.dense_pre.assign(spec_.dense_width, 0.0);
    ws.dense_out.assign(spec_.dense_width, 0.0);
    ws.d_dense.assign(spec_.dense_width, 0.0);
    return ws;
}

namespace {

void draw_mask(Rng& rng, double p, std::vector<double>& mask) {
    const double keep = 1.0 / (1.0 - p);
    for (double& m : mask) m = rng.uniform() < p ? 0.0 : keep;
}

}  // namespace

double Network::forward(std::span<const double> p, const double* x, Mode mode, std::uint64_t dropout_seed,
                        Workspace& ws) const {
    const std::size_t L = spec_.lookback;
    const std::size_t layers = layers_.size();
    ws.dropout_active = mode == Mode::train && spec_.dropout > 0.0;
    Rng rng(dropout_seed);

    const double* in = x;
    std::size_t in_stride = spec_.input_width;
    for (std::size_t k = 0; k < layers; ++k) {
        const std::size_t d = spec_.lstm_widths[k];
        const std::size_t w = d * spec_.directions();
        for (std::size_t dir = 0; dir < spec_.directions(); ++dir)
            lstm_sequence_forward(lstm_view(p, layers_[k][dir]), in, in_stride, L, dir == 1, ws.h[k].data() + dir * d,
                                  w, ws.trace[k][dir]);
        if (k + 1 < layers) {
            if (ws.dropout_active) {
                draw_mask(rng, spec_.dropout, ws.mask[k]);
                for (std::size_t i = 0; i < ws.h[k].size(); ++i) ws.dropped[k][i] = ws.h[k][i] * ws.mask[k][i];
                in = ws.dropped[k].data();
            } else {
                in = ws.h[k].data();
            }
            in_stride = w;
        }
    }

    const std::size_t top = layers - 1;
    const std::size_t tw = spec_.readout_width();
    if (spec_.variant == Variant::lstm_attention) {
        const AttentionWeights aw{p.subspan(att_w_, tw * spec_.attention_width), p.subspan(att_v_, spec_.attention_width),
                                  tw, spec_.attention_width};
        attention_forward(aw, ws.h[top].data(), L, tw, ws.readout.data(), ws.attention);
    } else {
        std::copy_n(ws.h[top].data() + (L - 1) * tw, tw, ws.readout.data());
    }
    if (ws.dropout_active) {
        draw_mask(rng, spec_.dropout, ws.readout_mask);
        for (std::size_t i = 0; i < tw; ++i) ws.readout_in[i] = ws.readout[i] * ws.readout_mask[i];
    } else {
        ws.readout_in = ws.readout;
    }

    const std::size_t D = spec_.dense_width;
    std::copy_n(p.data() + dense_b_, D, ws.dense_pre.data());
    for (std::size_t j = 0; j < tw; ++j) axpy(ws.readout_in[j], p.data() + dense_w_ + j * D, ws.dense_pre.data(), D);
    for (std::size_t i = 0; i < D; ++i) ws.dense_out[i] = ws.dense_pre[i] > 0.0 ? ws.dense_pre[i] : 0.0;
    ws.output = p[out_b_] + dot(ws.dense_out.data(), p.data() + out_w_, D);
    return ws.output;
}

void Network::backward(std::span<const double> p, const double* x, double d_output, Workspace& ws,
                       std::span<double> g) const {
    const std::size_t L = spec_.lookback;
    const std::size_t layers = layers_.size();
    const std::size_t D = spec_.dense_width;
    const std::size_t tw = spec_.readout_width();

    g[out_b_] += d_output;
    axpy(d_output, ws.dense_out.data(), g.data() + out_w_, D);
    for (std::size_t i = 0; i < D; ++i) ws.d_dense[i] = ws.dense_pre[i] > 0.0 ? d_output * p[out_w_ + i] : 0.0;
    for (std::size_t i = 0; i < D; ++i) g[dense_b_ + i] += ws.d_dense[i];
    for (std::size_t j = 0; j < tw; ++j) {
        axpy(ws.readout_in[j], ws.d_dense.data(), g.data() + dense_w_ + j * D, D);
        ws.d_readout[j] = dot(p.data() + dense_w_ + j * D, ws.d_dense.data(), D);
    }
    if (ws.dropout_active)
        for (std::size_t j = 0; j < tw; ++j) ws.d_readout[j] *= ws.readout_mask[j];

    const std::size_t top = layers - 1;
    std::fill(ws.dh[top].begin(), ws.dh[top].end(), 0.0);
    if (spec_.variant == Variant::lstm_attention) {
        const AttentionWeights aw{p.subspan(att_w_, tw * spec_.attention_width), p.subspan(att_v_, spec_.attention_width),
                                  tw, spec_.attention_width};
        const AttentionGrads ag{g.subspan(att_w_, tw * spec_.attention_width), g.subspan(att_v_, spec_.attention_width)};
        attention_backward(aw, ag, ws.h[top].data(), L, tw, ws.attention, ws.d_readout.data(), ws.dh[top].data(), tw);
    } else {
        std::copy_n(ws.d_readout.data(), tw, ws.dh[top].data() + (L - 1) * tw);
    }

    for (std::size_t k = layers; k-- > 0;) {
        const std::size_t d = spec_.lstm_widths[k];
        const std::size_t w = d * spec_.directions();
        const double* in;
        std::size_t in_stride;
        double* dx = nullptr;
        if (k == 0) {
            in = x;
            in_stride = spec_.input_width;
        } else {
            in = ws.dropout_active ? ws.dropped[k - 1].data() : ws.h[k - 1].data();
            in_stride = spec_.lstm_widths[k - 1] * spec_.directions();
            std::fill(ws.dh[k - 1].begin(), ws.dh[k - 1].end(), 0.0);
            dx = ws.dh[k - 1].data();
        }
        for (std::size_t dir = 0; dir < spec_.directions(); ++dir) {
            const auto& dr = layers_[k][dir];
            lstm_sequence_backward(lstm_view(p, dr), lstm_grads(g, dr), in, in_stride, L, dir == 1,
                                   ws.h[k].data() + dir * d, w, ws.trace[k][dir], ws.dh[k].data() + dir * d, w, dx,
                                   in_stride);
        }
        if (k > 0 && ws.dropout_active)
            for (std::size_t i = 0; i < ws.dh[k - 1].size(); ++i) ws.dh[k - 1][i] *= ws.mask[k - 1][i];
    }
}

double mse_loss(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size()) throw ShapeError("mse_loss: prediction and target lengths differ");
    if (pred.empty()) throw ShapeError("mse_loss: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double r = target[i] - pred[i];
        s += r * r;
    }
    return s / static_cast<double>(pred.size());
}

LossGradient batch_loss_gradient(const Network& net, std::span<const double> params, const SampleView& data,
                                 std::span<const std::size_t> batch, std::uint64_t batch_seed, Exec exec) {
    const std::size_t B = batch.size();
    const std::size_t P = params.size();
    if (B == 0) throw ShapeError("batch_loss_gradient: empty batch");
    if (P != net.parameter_count()) throw ShapeError("batch_loss_gradient: parameter vector size mismatch");
    // Samples are grouped into fixed chunks that accumulate in batch order;
    // chunk sums are then added in order. The grouping does not depend on the
    // thread count, so serial and threaded runs agree bit for bit.
    const std::size_t chunks = (B + kGradientChunk - 1) / kGradientChunk;
    std::vector<double> partial(chunks * P, 0.0);
    std::vector<double> sq(B, 0.0);
    const double scale = 2.0 / static_cast<double>(B);

    auto run_chunk = [&](std::size_t c, Workspace& ws) {
        std::span<double> acc(partial.data() + c * P, P);
        for (std::size_t i = c * kGradientChunk; i < std::min(B, (c + 1) * kGradientChunk); ++i) {
            const std::size_t s = batch[i];
            const double* x = data.inputs + s * data.sample_size;
            const double y = net.forward(params, x, Mode::train, derive_seed(batch_seed, {s}), ws);
            const double r = y - data.targets[s];
            sq[i] = r * r;
            net.backward(params, x, scale * r, ws, acc);
        }
    };

    if (exec == Exec::parallel) {
#pragma omp parallel
        {
            Workspace ws = net.make_workspace();
#pragma omp for schedule(dynamic, 1)
            for (std::size_t c = 0; c < chunks; ++c) run_chunk(c, ws);
        }
    } else {
        Workspace ws = net.make_workspace();
        for (std::size_t c = 0; c < chunks; ++c) run_chunk(c, ws);
    }

    LossGradient out;
    out.grad.assign(partial.begin(), partial.begin() + static_cast<std::ptrdiff_t>(P));
    for (std::size_t c = 1; c < chunks; ++c) {
        const double* gc = partial.data() + c * P;
        for (std::size_t j = 0; j < P; ++j) out.grad[j] += gc[j];
    }
    for (std::size_t i = 0; i < B; ++i) out.loss += sq[i];
    out.loss /= static_cast<double>(B);
    return out;
}

std::vector<double> predict(const Network& net, std::span<const double> params, const SampleView& data, Exec exec) {
    const std::size_t n = data.targets.size();
    std::vector<double> out(n);
    if (exec == Exec::parallel) {
#pragma omp parallel
        {
            Workspace ws = net.make_workspace();
#pragma omp for schedule(static)
            for (std::size_t i = 0; i < n; ++i)
                out[i] = net.forward(params, data.inputs + i * data.sample_size, Mode::eval, 0, ws);
        }
    } else {
        Workspace ws = net.make_workspace();
        for (std::size_t i = 0; i < n; ++i)
            out[i] = net.forward(params, data.inputs + i * data.sample_size, Mode::eval, 0, ws);
    }
    return out;
}

namespace {

void check_batch(const ModelParams& params, std::size_t values, std::size_t batch_size) {
    const auto& s = params.spec;
    if (params.values.size() != make_layout(s).total())
        throw ShapeError("parameter vector does not match the model spec");
    if (batch_size == 0 || values != batch_size * s.lookback * s.input_width)
        throw ShapeError("batch shape does not match lookback x input width of the model spec");
}

}  // namespace

std::vector<double> forward_batch(const ModelParams& params, std::span<const double> batch, std::size_t batch_size,
                                  Mode mode, std::uint64_t dropout_seed) {
    check_batch(params, batch.size(), batch_size);
    const Network net(params.spec);
    Workspace ws = net.make_workspace();
    const std::size_t ss = params.spec.lookback * params.spec.input_width;
    std::vector<double> out(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i)
        out[i] = net.forward(params.values, batch.data() + i * ss, mode, derive_seed(dropout_seed, {i}), ws);
    return out;
}

Gradients backward_batch(const ModelParams& params, std::span<const double> batch, std::span<const double> targets,
                         Mode mode, std::uint64_t dropout_seed) {
    check_batch(params, batch.size(), targets.size());
    const Network net(params.spec);
    Workspace ws = net.make_workspace();
    const std::size_t ss = params.spec.lookback * params.spec.input_width;
    const std::size_t B = targets.size();
    Gradients g{net.layout(), std::vector<double>(net.parameter_count(), 0.0)};
    for (std::size_t i = 0; i < B; ++i) {
        const double* x = batch.data() + i * ss;
        const double y = net.forward(params.values, x, mode, derive_seed(dropout_seed, {i}), ws);
        net.backward(params.values, x, 2.0 * (y - targets[i]) / static_cast<double>(B), ws, g.values);
    }
    return g;
}

}  // namespace burstcast::nn
