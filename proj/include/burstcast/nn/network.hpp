#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "burstcast/core/exec.hpp"
#include "burstcast/nn/attention.hpp"
#include "burstcast/nn/lstm.hpp"
#include "burstcast/nn/params.hpp"

namespace burstcast::nn {

enum class Mode { eval, train };

/// Per-sample scratch. One per thread; reused across samples.
struct Workspace {
    std::vector<std::vector<double>> h;        // layer k output, L x width_k
    std::vector<std::vector<double>> dropped;  // layer k output after dropout (k < top)
    std::vector<std::vector<double>> mask;     // inverted-dropout scales for `dropped`
    std::vector<std::array<LstmTrace, 2>> trace;
    AttentionTrace attention;
    std::vector<double> readout, readout_mask, readout_in;
    std::vector<double> dense_pre, dense_out;
    double output = 0.0;
    bool dropout_active = false;

    std::vector<std::vector<double>> dh;
    std::vector<double> d_readout, d_dense;
};

/// The fixed three-graph regressor over flat parameters laid out by
/// make_layout(spec).
class Network {
public:
    explicit Network(ModelSpec spec);

    const ModelSpec& spec() const { return spec_; }
    std::size_t parameter_count() const { return layout_.total(); }
    const ParamLayout& layout() const { return layout_; }

    Workspace make_workspace() const;

    /// One sample, L x F row-major. Dropout masks are drawn from `dropout_seed`
    /// in train mode only.
    double forward(std::span<const double> params, const double* x, Mode mode, std::uint64_t dropout_seed,
                   Workspace& ws) const;

    /// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(output) for
    /// the sample most recently passed to forward() with this workspace.
    void backward(std::span<const double> params, const double* x, double d_output, Workspace& ws,
                  std::span<double> grad) const;

private:
    struct Direction {
        std::size_t w_x, w_h, b;  // offsets
        std::size_t input_width, hidden;
    };
    LstmWeights lstm_view(std::span<const double> params, const Direction& d) const;
    LstmGrads lstm_grads(std::span<double> grad, const Direction& d) const;

    ModelSpec spec_;
    ParamLayout layout_;
    std::vector<std::array<Direction, 2>> layers_;
    std::size_t att_w_ = 0, att_v_ = 0, dense_w_ = 0, dense_b_ = 0, out_w_ = 0, out_b_ = 0;
};

double mse_loss(std::span<const double> pred, std::span<const double> target);

/// Contiguous block of samples, each lookback x width, plus the standardized
/// targets used by the loss.
struct SampleView {
    const double* inputs = nullptr;
    std::size_t sample_size = 0;
    std::span<const double> targets;
};

struct LossGradient {
    double loss = 0.0;
    std::vector<double> grad;
};

/// Samples per gradient partial sum in batch_loss_gradient.
inline constexpr std::size_t kGradientChunk = 8;

/// Mean squared error over `batch` (indices into the view) and its exact
/// gradient. Sample i uses dropout stream derive_seed(batch_seed, {i}).
/// Gradients are reduced in a fixed order, so both execution modes return
/// identical bits.
LossGradient batch_loss_gradient(const Network& net, std::span<const double> params, const SampleView& data,
                                 std::span<const std::size_t> batch, std::uint64_t batch_seed, Exec exec);

/// Eval-mode predictions for every sample in the view.
std::vector<double> predict(const Network& net, std::span<const double> params, const SampleView& data, Exec exec);

/// Checked batch entry point: batch is B x L x F.
std::vector<double> forward_batch(const ModelParams& params, std::span<const double> batch, std::size_t batch_size,
                                  Mode mode = Mode::eval, std::uint64_t dropout_seed = 0);

/// Checked gradient of mse_loss over a B x L x F batch. Blocks the variant does
/// not use are absent from the result.
Gradients backward_batch(const ModelParams& params, std::span<const double> batch, std::span<const double> targets,
                         Mode mode = Mode::eval, std::uint64_t dropout_seed = 0);

}  // namespace burstcast::nn
