#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "edcode/rational.hpp"

namespace edcode {

using Symbol = std::uint32_t;
using SymbolString = std::vector<Symbol>;

// A string matching (tau1, tau2): equal-length sequences over the alphabet
// plus a padding star; deleting stars from tau1 gives the sent string and
// from tau2 the received string, and every column is either matched-equal or
// has a star on at least one side. Stars are represented as -1.
struct StringMatching {
    static constexpr std::int64_t kStar = -1;
    std::vector<std::int64_t> tau1;
    std::vector<std::int64_t> tau2;

    bool valid_for(const SymbolString& sent, const SymbolString& received) const;
};

struct SuffixDistanceResult {
    Ratio value;
    StringMatching witness;
};

// Number of edit operations (insertions + deletions) between x and y.
std::int64_t edit_distance(const SymbolString& x, const SymbolString& y);

// Longest common subsequence length; ED(x,y) == |x| + |y| - 2 * lcs(x,y).
std::int64_t lcs(const SymbolString& x, const SymbolString& y);

// Minimum over matchings sm -> rm of the worst suffix-cut ratio
//   (stars in tau1[i..] + stars in tau2[i..]) / (non-star count of tau1[i..]).
// A cut with zero denominator and positive numerator is +infinity.
// Requires sm non-empty; rm may be empty.
SuffixDistanceResult suffix_distance(const SymbolString& sm, const SymbolString& rm);

// Exhaustive-enumeration oracle for suffix_distance. Inputs capped at
// length 8 per side; throws std::invalid_argument above the cap.
SuffixDistanceResult suffix_distance_bruteforce(const SymbolString& sm,
                                                const SymbolString& rm);

// Re-scores a matching by the suffix-distance formula, independently of the
// DP that produced it.
Ratio score_matching_suffix(const StringMatching& m);

// Total star count of a matching: sc(tau1) + sc(tau2).
std::int64_t score_matching_edit(const StringMatching& m);

// Fraction of `samples` uniform strings y of length n with
// ED(x, y) <= alpha * |x|.
double ed_tail_empirical(const SymbolString& x, std::size_t n,
                         std::uint32_t alphabet_size, const Ratio& alpha,
                         std::size_t samples, std::uint64_t seed);

} // namespace edcode
