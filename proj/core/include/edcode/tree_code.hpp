#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "edcode/metrics.hpp"
#include "edcode/rational.hpp"

namespace edcode {

// A labeled complete d-ary tree of depth n used as a prefix code: the
// codeword of a message is the label sequence along its path, so C(x)[i]
// depends only on x[1..i]. Labels are stored explicitly (level order) or
// derived lazily from the seed via a hash chain; both are immutable after
// construction.
struct TreeCode {
    std::uint32_t d = 2;
    int n = 1;
    std::uint32_t out_alphabet_size = 2;
    std::uint64_t seed = 0;
    bool lazy = false;
    // labels[k][code]: label of the edge entering the depth-(k+1) node whose
    // path has base-d code `code` (explicit trees only).
    std::vector<std::vector<Symbol>> labels;

    // Label of the edge entering `node` (a non-empty path of child indices).
    Symbol label(const SymbolString& node) const;
    SymbolString encode(const SymbolString& message) const;
};

TreeCode build_random_tree(std::uint32_t d, int n, std::uint32_t out_alphabet_size,
                           std::uint64_t seed);
// Labels computed on demand from the seed; usable at depths where explicit
// storage is infeasible. Same determinism guarantee as build_random_tree but
// a different label stream.
TreeCode make_lazy_tree(std::uint32_t d, int n, std::uint32_t out_alphabet_size,
                        std::uint64_t seed);

Symbol encode_step(const TreeCode& tree, const SymbolString& message_prefix);

// Four nodes A,B,D,E with B the lowest common ancestor of D and E (so B is a
// proper ancestor of both and D,E diverge at B), A an ancestor of B or B
// itself, and ED(AD,BE) <= alpha * max(|AD|,|BE|), where AD and BE are the
// label strings along the respective downward paths.
struct BadLambda {
    SymbolString a, b, d_node, e_node;  // node paths (root = empty)
    SymbolString ad_string, be_string;
    Ratio ratio;  // ED(AD,BE) / max(|AD|,|BE|)
};

std::optional<BadLambda> find_bad_lambda(const TreeCode& tree, const Ratio& alpha);

struct EdtcConstructionError : std::runtime_error {
    EdtcConstructionError(int attempts_, std::optional<BadLambda> witness_);
    int attempts;
    std::optional<BadLambda> last_witness;
};

// Rejection sampling: draw random trees until one is alpha-bad-lambda free;
// throws EdtcConstructionError after max_attempts failures.
TreeCode build_edtc_rejection(std::uint32_t d, int n, const Ratio& alpha,
                              std::uint32_t out_alphabet_size, std::uint64_t seed,
                              int max_attempts);

// Closed integer interval [lo, hi]; length is hi - lo.
struct Interval {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    std::int64_t length() const { return hi - lo; }
    friend bool operator==(const Interval&, const Interval&) = default;
    friend auto operator<=>(const Interval&, const Interval&) = default;
};

std::int64_t interval_union_length(std::vector<Interval> intervals);

// Pairwise-disjoint subset with total length at least half the union length
// (minimal greedy subcover split into two alternating disjoint classes; the
// heavier class is returned per connected component).
std::vector<Interval> disjoint_interval_cover(const std::vector<Interval>& intervals);

// A bad lambda whose D or E lies on a root-to-leaf path marks the interval
// [depth(A), depth(A) + max(|AD|,|AE|)] on that path. The report carries the
// path maximizing the merged union of such intervals.
struct PotencyReport {
    SymbolString worst_path;  // leaf path of length n
    std::int64_t bad_interval_union_length = 0;
    std::vector<Interval> intervals;   // merged intervals on worst_path
    std::vector<BadLambda> witnesses;  // one per (pre-merge) interval
};

// Exhaustive over all leaves; requires n <= 8 on explicit-storage scales.
PotencyReport potency_report(const TreeCode& tree, const Ratio& alpha);
// Same computation restricted to `num_paths` random leaves.
PotencyReport potency_report_sampled(const TreeCode& tree, const Ratio& alpha,
                                     int num_paths, std::uint64_t seed);

struct DecodeResult {
    SymbolString message;
    Ratio sd;
};

// arg min over all non-empty message prefixes m of SD(C(m), rm), ties broken
// by shorter length then lexicographic order; exact via best-first search
// with an admissible relaxed-completion bound.
DecodeResult decode_exact(const TreeCode& tree, const SymbolString& rm,
                          const Ratio& alpha);

// Ground-truth-assisted decoder for large simulations: if
// SD(C(true_sent), rm) <= alpha/2 the unique-decoding guarantee applies and
// true_sent is returned; otherwise message is empty and the decode is marked
// invalid (the pessimistic wrong answer the analysis permits).
struct ShortcutResult {
    SymbolString message;
    bool valid = false;  // true iff the threshold test passed
    Ratio sd;
};

ShortcutResult decode_shortcut(const TreeCode& tree, const SymbolString& rm,
                               const SymbolString& true_sent, const Ratio& alpha);

// Line-oriented text format: header "d n alphabet_size seed", then one line
// per level-order edge label; bit-exact round trip. Lazy trees are
// materialized on write (and rejected above the explicit-storage cap).
std::string serialize_tree(const TreeCode& tree);
TreeCode parse_tree(const std::string& text);

} // namespace edcode
