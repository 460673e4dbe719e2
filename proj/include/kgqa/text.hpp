#pragma once

// Small text helpers shared by the fuzzy index, the similarity scorer and the
// deterministic stub backends. All similarity work is done on Unicode
// codepoints, not bytes, so multi-byte names score sensibly.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kgqa::text {

// Decodes UTF-8 into codepoints. Invalid bytes are kept as single codepoints
// of their byte value so arbitrary input never throws.
std::vector<char32_t> to_codepoints(std::string_view utf8);

// Sorted multiset of codepoint bigrams, each packed into a uint64.
std::vector<std::uint64_t> bigram_multiset(std::string_view utf8);

// Dice coefficient over bigram multisets: 2*|a ∩ b| / (|a| + |b|).
// Equal strings score 1 even when too short to have bigrams.
double bigram_dice(std::string_view a, std::string_view b);
double bigram_dice(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                   bool equal_strings);

// True when the two strings share at least one bigram.
bool shares_bigram(std::string_view a, std::string_view b);

// Levenshtein distance over codepoints.
std::size_t levenshtein(std::string_view a, std::string_view b);

// 1 - levenshtein / max(len); 1 for two empty strings.
double edit_similarity(std::string_view a, std::string_view b);

// Strips surrounding ASCII whitespace.
std::string_view trim(std::string_view s);

// Drops a trailing bracketed qualifier: "Name [qualifier]" -> "Name".
// Returns the input unchanged when no qualifier is present.
std::string_view strip_qualifier(std::string_view name);

std::string to_lower_ascii(std::string_view s);

} // namespace kgqa::text
