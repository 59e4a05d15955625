#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace uekit::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// 64-bit FNV-1a, rendered as 16 hex digits by `hex_digest`.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex_digest(std::string_view data);

std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);

/// Parses a Python- or JSON-style list of string literals, e.g.
/// `['a', "b"]`. Leading prose and code fences before the first '[' are
/// skipped. Throws ParseError on anything else.
std::vector<std::string> parse_string_list(std::string_view payload);
std::string format_string_list(const std::vector<std::string>& items);

/// Substitutes `{name}` placeholders. Unknown placeholders are left as-is.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& fields);

}  // namespace uekit::text
