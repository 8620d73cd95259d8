#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace burstcast::nn {

/// Non-owning view of one LSTM direction. Gate order inside every 4d block is
/// input, forget, candidate, output. w_x is input_width x 4d, w_h is d x 4d.
struct LstmWeights {
    std::span<const double> w_x;
    std::span<const double> w_h;
    std::span<const double> b;
    std::size_t input_width = 0;
    std::size_t hidden = 0;
};

struct LstmGrads {
    std::span<double> w_x;
    std::span<double> w_h;
    std::span<double> b;
};

/// Owning parameters for a single LSTM direction.
struct LstmLayerParams {
    std::size_t input_width = 0;
    std::size_t hidden = 0;
    std::vector<double> w_x;
    std::vector<double> w_h;
    std::vector<double> b;

    LstmLayerParams() = default;
    LstmLayerParams(std::size_t input_width, std::size_t hidden);

    static LstmLayerParams random(std::size_t input_width, std::size_t hidden, std::uint64_t seed, double scale = 0.5);

    LstmWeights view() const { return {w_x, w_h, b, input_width, hidden}; }

    double& w_x_at(std::size_t input, std::size_t gate_row) { return w_x[input * 4 * hidden + gate_row]; }
    double& w_h_at(std::size_t h, std::size_t gate_row) { return w_h[h * 4 * hidden + gate_row]; }
};

/// One step of the cell. `gates` (size 4d, may be empty) receives the
/// activated gate values. Unchecked hot-path version.
void lstm_cell_step(const LstmWeights& w, const double* x, const double* h_prev, const double* c_prev, double* h,
                    double* c, double* gates);

struct CellState {
    std::vector<double> h;
    std::vector<double> c;
};

/// Checked single step; throws ShapeError on mismatched sizes.
CellState lstm_cell_forward(std::span<const double> x, std::span<const double> h_prev, std::span<const double> c_prev,
                            const LstmLayerParams& params);

/// Per-sequence cache for backpropagation, indexed by processing step.
struct LstmTrace {
    std::vector<double> gates;  // L x 4d
    std::vector<double> c;      // (L + 1) x d, row 0 is the zero initial state
    std::vector<double> tanh_c; // L x d
    std::vector<double> dz;     // L x 4d: forward pre-activations, then backward gate deltas
    std::vector<double> dh_next, dc_next;

    void resize(std::size_t L, std::size_t d);
};

/// Runs one direction over L rows of x (row stride x_stride). Processing
/// order is t = 0..L-1, or L-1..0 when `reverse`; the hidden state for time t
/// is written to h + t * h_stride either way.
void lstm_sequence_forward(const LstmWeights& w, const double* x, std::size_t x_stride, std::size_t L, bool reverse,
                           double* h, std::size_t h_stride, LstmTrace& trace);

/// Backpropagation through time for one direction. dh holds dLoss/dh_t for
/// every t; gradients are accumulated into `g`; dLoss/dx_t is accumulated into
/// dx when it is non-null.
void lstm_sequence_backward(const LstmWeights& w, const LstmGrads& g, const double* x, std::size_t x_stride,
                            std::size_t L, bool reverse, const double* h, std::size_t h_stride, LstmTrace& trace,
                            const double* dh, std::size_t dh_stride, double* dx, std::size_t dx_stride);

/// One bidirectional layer over an L x F row-major sequence; returns
/// L x 2d rows of [forward h_t ; backward h_t].
std::vector<double> bilstm_layer_forward(std::span<const double> seq, std::size_t L, const LstmLayerParams& forward,
                                         const LstmLayerParams& backward);

}  // namespace burstcast::nn
