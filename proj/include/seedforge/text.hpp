#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace seedforge::text {

// Normalization used for answer matching and choice comparison: dash/quote
// folding, diacritic stripping, ASCII lowercasing, punctuation to spaces,
// whitespace collapse, article (a/an/the) removal.
std::string normalize_for_match(std::string_view raw);

// normalize_for_match split into tokens.
std::vector<std::string> normalize_tokens(std::string_view raw);

// True iff `needle_tokens` occurs as a contiguous run inside `hay_tokens`.
bool token_subsequence(const std::vector<std::string>& hay_tokens,
                       const std::vector<std::string>& needle_tokens);

// Entity identity key: trimmed, whitespace-collapsed, ASCII-lowercased.
std::string entity_key(std::string_view surface);

std::string trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);
std::string ascii_lower(std::string_view s);

bool iequals_ascii(std::string_view a, std::string_view b);

// Word-boundary test for substitution: a boundary sits between a word byte
// (alnum, '_', or any byte >= 0x80) and anything else.
bool is_word_byte(unsigned char c);

enum class CasePattern { lower, upper, title, mixed };

CasePattern classify_case(std::string_view span);

// Renders `replacement` in the case pattern of the matched span; `mixed`
// keeps the replacement's own casing.
std::string apply_case_pattern(CasePattern pattern, std::string_view replacement);

// FNV-1a 64-bit; stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view data);
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed);

std::string to_hex(std::uint64_t v);

// Shortest round-trip decimal form (std::to_chars), for stable fingerprints.
std::string format_double(double v);

}  // namespace seedforge::text
