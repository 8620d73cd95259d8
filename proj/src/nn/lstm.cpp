#include "burstcast/nn/lstm.hpp"

#include <algorithm>
#include <cmath>

#include "burstcast/core/error.hpp"
#include "burstcast/core/rng.hpp"
#include "burstcast/nn/kernels.hpp"

namespace burstcast::nn {

using kernels::axpy;
using kernels::dot;
using kernels::sigmoid;

LstmLayerParams::LstmLayerParams(std::size_t in, std::size_t d)
    : input_width(in), hidden(d), w_x(in * 4 * d, 0.0), w_h(d * 4 * d, 0.0), b(4 * d, 0.0) {}

LstmLayerParams LstmLayerParams::random(std::size_t in, std::size_t d, std::uint64_t seed, double scale) {
    LstmLayerParams p(in, d);
    Rng rng(seed);
    for (double& v : p.w_x) v = rng.uniform(-scale, scale);
    for (double& v : p.w_h) v = rng.uniform(-scale, scale);
    for (double& v : p.b) v = rng.uniform(-scale, scale);
    return p;
}

void lstm_cell_step(const LstmWeights& w, const double* x, const double* h_prev, const double* c_prev, double* h,
                    double* c, double* gates) {
    const std::size_t d = w.hidden;
    const std::size_t n = 4 * d;
    double z_local[512];
    std::vector<double> z_heap;
    double* z = z_local;
    if (n > 512) {
        z_heap.resize(n);
        z = z_heap.data();
    }
    std::copy(w.b.begin(), w.b.end(), z);
    for (std::size_t j = 0; j < w.input_width; ++j) axpy(x[j], w.w_x.data() + j * n, z, n);
    if (h_prev)
        for (std::size_t j = 0; j < d; ++j) axpy(h_prev[j], w.w_h.data() + j * n, z, n);
    for (std::size_t k = 0; k < d; ++k) {
        const double ig = sigmoid(z[k]);
        const double fg = sigmoid(z[d + k]);
        const double gg = kernels::tanh(z[2 * d + k]);
        const double og = sigmoid(z[3 * d + k]);
        const double cp = c_prev ? c_prev[k] : 0.0;
        const double cn = fg * cp + ig * gg;
        c[k] = cn;
        h[k] = og * kernels::tanh(cn);
        if (gates) {
            gates[k] = ig;
            gates[d + k] = fg;
            gates[2 * d + k] = gg;
            gates[3 * d + k] = og;
        }
    }
}

CellState lstm_cell_forward(std::span<const double> x, std::span<const double> h_prev, std::span<const double> c_prev,
                            const LstmLayerParams& p) {
    const std::size_t d = p.hidden;
    if (x.size() != p.input_width || h_prev.size() != d || c_prev.size() != d || p.w_x.size() != p.input_width * 4 * d ||
        p.w_h.size() != d * 4 * d || p.b.size() != 4 * d)
        throw ShapeError("lstm_cell_forward: input, state or parameter shapes disagree");
    CellState s{std::vector<double>(d), std::vector<double>(d)};
    lstm_cell_step(p.view(), x.data(), h_prev.data(), c_prev.data(), s.h.data(), s.c.data(), nullptr);
    return s;
}

void LstmTrace::resize(std::size_t L, std::size_t d) {
    gates.resize(L * 4 * d);
    c.assign((L + 1) * d, 0.0);
    tanh_c.resize(L * d);
    dz.resize(L * 4 * d);
    dh_next.resize(d);
    dc_next.resize(d);
}

namespace {

// out[t] = b + x_t W_x for every t. Looping over input rows first keeps one
// weight row hot while it is applied to the whole window.
void input_projection(const LstmWeights& w, const double* x, std::size_t x_stride, std::size_t L, double* out) {
    const std::size_t n = 4 * w.hidden;
    for (std::size_t t = 0; t < L; ++t) std::copy(w.b.begin(), w.b.end(), out + t * n);
    for (std::size_t j = 0; j < w.input_width; ++j) {
        const double* row = w.w_x.data() + j * n;
        for (std::size_t t = 0; t < L; ++t) axpy(x[t * x_stride + j], row, out + t * n, n);
    }
}

}  // namespace

void lstm_sequence_forward(const LstmWeights& w, const double* x, std::size_t x_stride, std::size_t L, bool reverse,
                           double* h, std::size_t h_stride, LstmTrace& tr) {
    const std::size_t d = w.hidden;
    const std::size_t n = 4 * d;
    tr.resize(L, d);
    // Pre-activations by time index; the recurrence adds h_prev W_h in place.
    double* zx = tr.dz.data();
    input_projection(w, x, x_stride, L, zx);
    for (std::size_t s = 0; s < L; ++s) {
        const std::size_t t = reverse ? L - 1 - s : s;
        const std::size_t tp = reverse ? t + 1 : t - 1;
        double* z = zx + t * n;
        if (s > 0) {
            const double* h_prev = h + tp * h_stride;
            for (std::size_t j = 0; j < d; ++j) axpy(h_prev[j], w.w_h.data() + j * n, z, n);
        }
        const double* c_prev = tr.c.data() + s * d;
        double* c = tr.c.data() + (s + 1) * d;
        double* gates = tr.gates.data() + s * n;
        double* tc = tr.tanh_c.data() + s * d;
        double* ht = h + t * h_stride;
        for (std::size_t k = 0; k < 2 * d; ++k) gates[k] = sigmoid(z[k]);
        for (std::size_t k = 2 * d; k < 3 * d; ++k) gates[k] = kernels::tanh(z[k]);
        for (std::size_t k = 3 * d; k < n; ++k) gates[k] = sigmoid(z[k]);
        for (std::size_t k = 0; k < d; ++k) {
            c[k] = gates[d + k] * c_prev[k] + gates[k] * gates[2 * d + k];
            tc[k] = kernels::tanh(c[k]);
            ht[k] = gates[3 * d + k] * tc[k];
        }
    }
}

void lstm_sequence_backward(const LstmWeights& w, const LstmGrads& g, const double* x, std::size_t x_stride,
                            std::size_t L, bool reverse, const double* h, std::size_t h_stride, LstmTrace& tr,
                            const double* dh, std::size_t dh_stride, double* dx, std::size_t dx_stride) {
    const std::size_t d = w.hidden;
    const std::size_t n = 4 * d;
    std::fill(tr.dh_next.begin(), tr.dh_next.end(), 0.0);
    std::fill(tr.dc_next.begin(), tr.dc_next.end(), 0.0);

    // Recurrence first, keeping only W_h in play; dz is stored by time index.
    for (std::size_t s = L; s-- > 0;) {
        const std::size_t t = reverse ? L - 1 - s : s;
        const double* gates = tr.gates.data() + s * n;
        const double* tc = tr.tanh_c.data() + s * d;
        const double* c_prev = tr.c.data() + s * d;
        const double* dh_t = dh + t * dh_stride;
        double* dz = tr.dz.data() + t * n;

        for (std::size_t k = 0; k < d; ++k) {
            const double ig = gates[k], fg = gates[d + k], gg = gates[2 * d + k], og = gates[3 * d + k];
            const double dhk = dh_t[k] + tr.dh_next[k];
            const double dc = tr.dc_next[k] + dhk * og * (1.0 - tc[k] * tc[k]);
            dz[k] = dc * gg * ig * (1.0 - ig);
            dz[d + k] = dc * c_prev[k] * fg * (1.0 - fg);
            dz[2 * d + k] = dc * ig * (1.0 - gg * gg);
            dz[3 * d + k] = dhk * tc[k] * og * (1.0 - og);
            tr.dc_next[k] = dc * fg;
        }
        if (s > 0)
            for (std::size_t j = 0; j < d; ++j) tr.dh_next[j] = dot(w.w_h.data() + j * n, dz, n);
    }

    const double* dz = tr.dz.data();
    for (std::size_t t = 0; t < L; ++t)
        for (std::size_t k = 0; k < n; ++k) g.b[k] += dz[t * n + k];
    for (std::size_t j = 0; j < w.input_width; ++j) {
        double* gw = g.w_x.data() + j * n;
        for (std::size_t t = 0; t < L; ++t) axpy(x[t * x_stride + j], dz + t * n, gw, n);
    }
    // h_prev of the step at time t is h at t -/+ 1; the first processed step has none.
    const std::size_t t_lo = reverse ? 0 : 1;
    const std::size_t t_hi = reverse ? L - 1 : L;
    for (std::size_t j = 0; j < d; ++j) {
        double* gw = g.w_h.data() + j * n;
        for (std::size_t t = t_lo; t < t_hi; ++t) {
            const std::size_t tp = reverse ? t + 1 : t - 1;
            axpy(h[tp * h_stride + j], dz + t * n, gw, n);
        }
    }
    if (dx) {
        for (std::size_t j = 0; j < w.input_width; ++j) {
            const double* row = w.w_x.data() + j * n;
            for (std::size_t t = 0; t < L; ++t) dx[t * dx_stride + j] += dot(row, dz + t * n, n);
        }
    }
}

std::vector<double> bilstm_layer_forward(std::span<const double> seq, std::size_t L, const LstmLayerParams& fwd,
                                         const LstmLayerParams& bwd) {
    if (L == 0) throw ShapeError("bilstm_layer_forward: empty sequence");
    if (fwd.input_width != bwd.input_width || fwd.hidden != bwd.hidden || seq.size() != L * fwd.input_width)
        throw ShapeError("bilstm_layer_forward: sequence or direction shapes disagree");
    const std::size_t d = fwd.hidden;
    std::vector<double> out(L * 2 * d);
    LstmTrace tr;
    lstm_sequence_forward(fwd.view(), seq.data(), fwd.input_width, L, false, out.data(), 2 * d, tr);
    lstm_sequence_forward(bwd.view(), seq.data(), bwd.input_width, L, true, out.data() + d, 2 * d, tr);
    return out;
}

}  // namespace burstcast::nn
