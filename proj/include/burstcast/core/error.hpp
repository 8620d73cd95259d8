#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace burstcast {

/// Raised by the CSV/record parsers. Row numbers are 1-based and count the
/// header as row 1, so they match what a spreadsheet shows.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t row, const std::string& message)
        : std::runtime_error("row " + std::to_string(row) + ": " + message), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Tensor or parameter shapes that do not agree with a model spec.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input data that cannot support the requested operation (too short, empty,
/// degenerate). Distinct from ParseError: the data parsed fine.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training diverged or produced a non-finite value.
class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace burstcast
