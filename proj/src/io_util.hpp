#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace steer {

// All numeric text I/O goes through these helpers: 17 significant digits out
// (enough to round-trip IEEE 754 binary64 exactly), locale-independent
// parsing in. Parse failures carry the 1-based line number.

std::string format_double(double v);

double parse_double(std::string_view token, const std::string& context,
                    std::uint64_t line_no);
std::uint64_t parse_u64(std::string_view token, const std::string& context,
                        std::uint64_t line_no);

// Splits on spaces/tabs; never returns empty tokens.
std::vector<std::string_view> split_fields(std::string_view line);

// Strips a trailing '\r' (so CRLF files parse like LF files).
std::string_view strip_cr(std::string_view line);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace steer
