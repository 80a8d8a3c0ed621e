#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sparseact::text {

// NFKC normalization + case folding (ICU). Invalid UTF-8 bytes are replaced
// with U+FFFD instead of failing.
std::string fold(std::string_view in);

// Decode UTF-8 into codepoints, substituting U+FFFD for invalid sequences.
std::vector<char32_t> decode_utf8(std::string_view in);

std::string encode_utf8(const std::vector<char32_t>& cps);

// Folded tokens: split on whitespace, keep alphanumerics and marks, strip
// other punctuation in place (no split), keep hyphens only between token
// characters.
std::vector<std::string> tokenize(std::string_view in);

// Folded tokens joined by a single space.
std::string normalize(std::string_view in);

// Edit distance over codepoints.
std::size_t levenshtein(std::string_view a, std::string_view b);

// Character n-grams over codepoints, packed 21 bits per codepoint.
// Bigrams come back as a sorted multiset, trigrams as sorted (key, count).
std::vector<std::uint64_t> bigram_multiset(std::string_view in);
std::vector<std::pair<std::uint64_t, std::uint32_t>> trigram_counts(std::string_view in);

// Dice coefficient 2|A∩B| / (|A|+|B|) over sorted multisets; 0 when both empty.
double dice(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b);

// Cosine over sorted sparse count vectors; 0 when either is empty.
double cosine(const std::vector<std::pair<std::uint64_t, std::uint32_t>>& a,
              const std::vector<std::pair<std::uint64_t, std::uint32_t>>& b);

} // namespace sparseact::text
