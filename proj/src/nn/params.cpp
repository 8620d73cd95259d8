#include "burstcast/nn/params.hpp"

#include <cmath>
#include <stdexcept>

#include "burstcast/core/error.hpp"
#include "burstcast/core/rng.hpp"

namespace burstcast::nn {

const char* to_string(Variant v) {
    switch (v) {
        case Variant::uni_lstm: return "uni_lstm";
        case Variant::lstm_attention: return "lstm_attention";
        case Variant::bilstm: return "bilstm";
    }
    return "unknown";
}

std::optional<Variant> parse_variant(std::string_view text) {
    for (auto v : {Variant::uni_lstm, Variant::lstm_attention, Variant::bilstm})
        if (text == to_string(v)) return v;
    return std::nullopt;
}

ModelSpec ModelSpec::reference(Variant variant, std::size_t lookback, std::size_t input_width, double dropout) {
    ModelSpec s;
    s.variant = variant;
    s.lookback = lookback;
    s.input_width = input_width;
    s.lstm_widths = variant == Variant::lstm_attention ? std::vector<std::size_t>{64, 32}
                                                       : std::vector<std::size_t>{32, 32};
    s.attention_width = s.lstm_widths.back();
    s.dense_width = 32;
    s.dropout = dropout;
    return s;
}

void ModelSpec::validate() const {
    if (lookback == 0 || input_width == 0) throw ShapeError("model spec: lookback and input width must be positive");
    if (lstm_widths.empty()) throw ShapeError("model spec: at least one recurrent layer is required");
    for (auto w : lstm_widths)
        if (w == 0) throw ShapeError("model spec: recurrent widths must be positive");
    if (dense_width == 0) throw ShapeError("model spec: dense width must be positive");
    if (variant == Variant::lstm_attention && attention_width == 0)
        throw ShapeError("model spec: attention width must be positive");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ShapeError("model spec: dropout must lie in [0, 1)");
}

void ParamLayout::add(std::string name, std::size_t rows, std::size_t cols) {
    blocks_.push_back(ParamBlock{std::move(name), total_, rows, cols});
    total_ += rows * cols;
}

const ParamBlock* ParamLayout::find(std::string_view name) const {
    for (const auto& b : blocks_)
        if (b.name == name) return &b;
    return nullptr;
}

const ParamBlock& ParamLayout::at(std::string_view name) const {
    const auto* b = find(name);
    if (!b) throw ShapeError("no parameter block named '" + std::string(name) + "'");
    return *b;
}

ParamLayout make_layout(const ModelSpec& spec) {
    spec.validate();
    ParamLayout layout;
    std::size_t in = spec.input_width;
    for (std::size_t k = 0; k < spec.lstm_widths.size(); ++k) {
        const std::size_t d = spec.lstm_widths[k];
        for (std::size_t dir = 0; dir < spec.directions(); ++dir) {
            const std::string p = "lstm" + std::to_string(k + 1) + (dir == 0 ? ".fwd." : ".bwd.");
            layout.add(p + "w_x", in, 4 * d);
            layout.add(p + "w_h", d, 4 * d);
            layout.add(p + "b", 1, 4 * d);
        }
        in = d * spec.directions();
    }
    if (spec.variant == Variant::lstm_attention) {
        layout.add("attention.w", spec.lstm_widths.back(), spec.attention_width);
        layout.add("attention.v", 1, spec.attention_width);
    }
    layout.add("dense.w", spec.readout_width(), spec.dense_width);
    layout.add("dense.b", 1, spec.dense_width);
    layout.add("out.w", spec.dense_width, 1);
    layout.add("out.b", 1, 1);
    return layout;
}

std::size_t count_parameters(const ModelSpec& spec) { return make_layout(spec).total(); }

std::span<double> ModelParams::block(std::string_view name) {
    const auto& b = layout.at(name);
    return {values.data() + b.offset, b.size()};
}

std::span<const double> ModelParams::block(std::string_view name) const {
    const auto& b = layout.at(name);
    return {values.data() + b.offset, b.size()};
}

ModelParams zero_params(const ModelSpec& spec) {
    ModelParams p;
    p.spec = spec;
    p.layout = make_layout(spec);
    p.values.assign(p.layout.total(), 0.0);
    return p;
}

namespace {

std::uint64_t name_tag(const std::string& name) {
    // FNV-1a, stable across platforms.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

ModelParams init_params(const ModelSpec& spec, std::uint64_t seed) {
    ModelParams p = zero_params(spec);
    for (const auto& b : p.layout.blocks()) {
        auto vals = std::span<double>(p.values.data() + b.offset, b.size());
        const bool is_bias = b.name.ends_with(".b");
        if (is_bias) {
            if (b.name.starts_with("lstm")) {
                const std::size_t d = b.cols / 4;
                for (std::size_t i = d; i < 2 * d; ++i) vals[i] = 1.0;  // gate order i, f, g, o
            }
            continue;
        }
        double k;
        if (b.name.starts_with("lstm")) {
            k = 1.0 / std::sqrt(static_cast<double>(b.cols / 4));
        } else if (b.name == "attention.v") {
            k = 1.0 / std::sqrt(static_cast<double>(b.cols));
        } else {
            k = 1.0 / std::sqrt(static_cast<double>(b.rows));
        }
        Rng rng(derive_seed(seed, {name_tag(b.name)}));
        for (double& v : vals) v = rng.uniform(-k, k);
    }
    return p;
}

std::optional<std::span<const double>> Gradients::find(std::string_view name) const {
    const auto* b = layout.find(name);
    if (!b) return std::nullopt;
    return std::span<const double>(values.data() + b->offset, b->size());
}

}  // namespace burstcast::nn
