#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dialeval::text {

// Trims surrounding whitespace and collapses internal runs to one space.
// Case and punctuation are preserved.
std::string normalize(std::string_view s);

std::string trim(std::string_view s);

// ASCII-only lower-casing; multi-byte UTF-8 sequences pass through untouched.
std::string casefold(std::string_view s);

bool contains(std::string_view haystack, std::string_view needle);
bool starts_with(std::string_view s, std::string_view prefix);

std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

// "A", "A and B", "A, B, and C"
std::string join_options(const std::vector<std::string>& items);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace dialeval::text
