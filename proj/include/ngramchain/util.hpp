#pragma once

// Shared plumbing: error types, strict number formatting/parsing, TSV helpers.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ngramchain {

using WordId = std::uint32_t;
using NgramId = std::uint32_t;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OrderTooSmall : Error { using Error::Error; };
struct ZeroHistory : Error { using Error::Error; };
struct MissingScore : Error { using Error::Error; };
struct MalformedRow : Error { using Error::Error; };
struct NonFiniteScore : Error { using Error::Error; };
struct MixedOrder : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct EmptyAfterFilter : Error { using Error::Error; };
struct InvalidId : Error { using Error::Error; };
struct BrokenChain : Error { using Error::Error; };
struct DuplicateNgram : Error { using Error::Error; };
struct NonPositivePpl : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// Formats with enough digits that parse_double() recovers the exact value,
// so a parse/re-format cycle is byte-stable.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw MalformedRow("not a number: '" + std::string(s) + "'");
    return v;
}

inline std::uint64_t parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw MalformedRow("not a non-negative integer: '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(strip_cr(line));
    return lines;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace ngramchain
