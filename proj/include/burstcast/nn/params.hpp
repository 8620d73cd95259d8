#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "burstcast/nn/model_spec.hpp"

namespace burstcast::nn {

/// A named rows x cols slice of the flat parameter vector. Matrices are stored
/// input-major: row j holds the weights leaving input j, so forward passes are
/// contiguous axpy updates.
struct ParamBlock {
    std::string name;
    std::size_t offset = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::size_t size() const { return rows * cols; }
    bool operator==(const ParamBlock&) const = default;
};

class ParamLayout {
public:
    ParamLayout() = default;

    void add(std::string name, std::size_t rows, std::size_t cols);
    const ParamBlock* find(std::string_view name) const;
    const ParamBlock& at(std::string_view name) const;
    const std::vector<ParamBlock>& blocks() const { return blocks_; }
    std::size_t total() const { return total_; }

    bool operator==(const ParamLayout&) const = default;

private:
    std::vector<ParamBlock> blocks_;
    std::size_t total_ = 0;
};

/// Layout for a spec. Block names: "lstm<k>.<fwd|bwd>.{w_x,w_h,b}",
/// "attention.{w,v}", "dense.{w,b}", "out.{w,b}". Blocks a variant does not
/// use are not present.
ParamLayout make_layout(const ModelSpec& spec);

std::size_t count_parameters(const ModelSpec& spec);

struct ModelParams {
    ModelSpec spec;
    ParamLayout layout;
    std::vector<double> values;

    std::span<double> block(std::string_view name);
    std::span<const double> block(std::string_view name) const;
};

/// Zero-valued parameters.
ModelParams zero_params(const ModelSpec& spec);

/// Seeded uniform(-k, k) initialisation. Every block draws from its own
/// stream, filled input row by input row, so appending an input column leaves
/// the weights of the existing columns unchanged. LSTM matrices use
/// k = 1/sqrt(hidden); dense and attention matrices k = 1/sqrt(fan_in).
/// Biases start at 0 except the forget gate (1.0).
ModelParams init_params(const ModelSpec& spec, std::uint64_t seed);

/// Gradient buffer keyed by the same layout as the parameters it belongs to.
struct Gradients {
    ParamLayout layout;
    std::vector<double> values;

    /// nullopt when the block is not part of this model's graph.
    std::optional<std::span<const double>> find(std::string_view name) const;
};

}  // namespace burstcast::nn
