#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace burstcast::nn {

enum class Variant { uni_lstm, lstm_attention, bilstm };

const char* to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view text);

/// Architecture of one of the three sequence regressors:
///   uni_lstm:       LSTM stack -> last hidden -> dense(ReLU) -> linear
///   lstm_attention: LSTM stack -> additive attention context -> dense(ReLU) -> linear
///   bilstm:         bidirectional stack -> last concatenated hidden -> dense(ReLU) -> linear
/// Dropout sits between recurrent layers and in front of the dense head.
struct ModelSpec {
    Variant variant = Variant::bilstm;
    std::size_t lookback = 30;
    std::size_t input_width = 16;
    /// Hidden width per direction, one entry per recurrent layer.
    std::vector<std::size_t> lstm_widths{32, 32};
    /// Projection width of the attention scorer (lstm_attention only).
    std::size_t attention_width = 32;
    std::size_t dense_width = 32;
    double dropout = 0.2;

    /// Published sizes: bilstm 2x32 per direction, lstm_attention 64 -> 32,
    /// uni_lstm 2x32; dense head 32 -> 1; attention width equals the top
    /// recurrent width.
    static ModelSpec reference(Variant variant, std::size_t lookback, std::size_t input_width, double dropout = 0.2);

    bool bidirectional() const { return variant == Variant::bilstm; }
    std::size_t directions() const { return bidirectional() ? 2 : 1; }
    /// Width of the vector handed to the dense head.
    std::size_t readout_width() const { return lstm_widths.back() * directions(); }

    /// Throws ShapeError on empty/zero widths or dropout outside [0, 1).
    void validate() const;

    bool operator==(const ModelSpec&) const = default;
};

}  // namespace burstcast::nn
