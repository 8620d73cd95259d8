#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace burstcast::csv {

/// Streaming reader for delimited text with RFC 4180 quoting (quoted fields
/// may contain the delimiter, doubled quotes and newlines).
class Reader {
public:
    explicit Reader(std::istream& in, char delimiter = ',') : in_(in), delim_(delimiter) {}

    /// Next record, or nullopt at end of input. Throws ParseError on an
    /// unterminated quoted field.
    std::optional<std::vector<std::string>> next();

    /// 1-based number of the record most recently returned.
    std::size_t record_number() const noexcept { return record_; }

private:
    std::istream& in_;
    char delim_;
    std::size_t record_ = 0;
};

/// Quotes a field only when it needs quoting.
std::string escape(std::string_view field, char delimiter = ',');

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

/// Strict whole-field parses; nullopt on empty text, junk or overflow.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace burstcast::csv
