#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace gwf {

using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;

// Subset of the alphabet as a bitmask; alphabets hold at most 64 symbols.
using Subset = std::uint64_t;

inline constexpr std::size_t kMaxAlphabet = 64;

inline int subset_size(Subset s) noexcept { return std::popcount(s); }

inline bool contains(Subset s, Symbol i) noexcept { return ((s >> i) & 1U) != 0; }

inline Subset full_subset(std::size_t alphabet_size) noexcept {
  return alphabet_size >= 64 ? ~Subset{0} : ((Subset{1} << alphabet_size) - 1);
}

std::vector<Symbol> subset_members(Subset s);
Subset subset_from(const std::vector<Symbol>& members);

// Base-|alphabet| digits (0-9 then a-z); dot-separated decimals for alphabets above 36.
std::string format_word(const Word& word, std::size_t alphabet_size);
Word parse_word(const std::string& text, std::size_t alphabet_size);

// "{0,2}" style rendering used in reports.
std::string format_subset(Subset s);

}  // namespace gwf
