#include "burstcast/core/csv.hpp"

#include <charconv>
#include <cmath>

#include "burstcast/core/error.hpp"

namespace burstcast::csv {

std::optional<std::vector<std::string>> Reader::next() {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    const std::size_t start_record = record_ + 1;

    int ch;
    while ((ch = in_.get()) != std::char_traits<char>::eof()) {
        any = true;
        const char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            in_quotes = true;
        } else if (c == delim_) {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            fields.push_back(std::move(field));
            record_ = start_record;
            return fields;
        } else if (c == '\r') {
            if (in_.peek() == '\n') in_.get();
            fields.push_back(std::move(field));
            record_ = start_record;
            return fields;
        } else {
            field.push_back(c);
        }
    }
    if (in_quotes) throw ParseError(start_record, "unterminated quoted field");
    if (!any) return std::nullopt;
    fields.push_back(std::move(field));
    record_ = start_record;
    return fields;
}

std::string escape(std::string_view field, char delimiter) {
    if (field.find_first_of(std::string{delimiter} + "\"\r\n") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t");
    return text.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<long long> parse_int(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc{} && ptr == text.data() + text.size()) return v;
    // Catalog exports sometimes write integer codes as "3.0".
    auto d = parse_double(text);
    if (d && std::floor(*d) == *d && std::fabs(*d) < 9e15) return static_cast<long long>(*d);
    return std::nullopt;
}

}  // namespace burstcast::csv
