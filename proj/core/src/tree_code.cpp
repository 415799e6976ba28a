#include "edcode/tree_code.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <map>
#include <queue>
#include <sstream>

#include "edcode/util.hpp"

namespace edcode {

namespace {

constexpr std::uint64_t kExplicitLabelCap = std::uint64_t{1} << 22;

std::uint64_t total_edges(std::uint32_t d, int n) {
    std::uint64_t total = 0, level = 1;
    for (int k = 1; k <= n; ++k) {
        level *= d;
        total += level;
        if (total > kExplicitLabelCap) return total;
    }
    return total;
}

std::uint64_t path_code(const SymbolString& node, std::uint32_t d) {
    std::uint64_t code = 0;
    for (Symbol s : node) code = code * d + s;
    return code;
}

} // namespace

Symbol TreeCode::label(const SymbolString& node) const {
    assert(!node.empty() && node.size() <= static_cast<std::size_t>(n));
    if (lazy) {
        std::uint64_t h = seed;
        for (Symbol s : node) h = hash_mix(h, s + 1);
        return static_cast<Symbol>(h % out_alphabet_size);
    }
    return labels[node.size() - 1][path_code(node, d)];
}

SymbolString TreeCode::encode(const SymbolString& message) const {
    SymbolString out;
    out.reserve(message.size());
    SymbolString prefix;
    for (Symbol s : message) {
        prefix.push_back(s);
        out.push_back(label(prefix));
    }
    return out;
}

TreeCode build_random_tree(std::uint32_t d, int n, std::uint32_t out_alphabet_size,
                           std::uint64_t seed) {
    if (d < 2 || n < 1 || out_alphabet_size < 2)
        throw std::invalid_argument("bad tree parameters");
    if (total_edges(d, n) > kExplicitLabelCap)
        throw std::invalid_argument("tree too large for explicit storage");
    TreeCode tree{d, n, out_alphabet_size, seed, false, {}};
    Rng rng(seed);
    tree.labels.resize(static_cast<std::size_t>(n));
    std::uint64_t level_size = 1;
    for (int k = 0; k < n; ++k) {
        level_size *= d;
        auto& level = tree.labels[static_cast<std::size_t>(k)];
        level.resize(level_size);
        for (auto& sym : level)
            sym = static_cast<Symbol>(rng.below(out_alphabet_size));
    }
    return tree;
}

TreeCode make_lazy_tree(std::uint32_t d, int n, std::uint32_t out_alphabet_size,
                        std::uint64_t seed) {
    if (d < 2 || n < 1 || out_alphabet_size < 2)
        throw std::invalid_argument("bad tree parameters");
    return TreeCode{d, n, out_alphabet_size, seed, true, {}};
}

Symbol encode_step(const TreeCode& tree, const SymbolString& message_prefix) {
    if (message_prefix.empty() ||
        message_prefix.size() > static_cast<std::size_t>(tree.n))
        throw std::invalid_argument("prefix length out of range");
    return tree.label(message_prefix);
}

namespace {

// All node paths of depth 1..n in BFS order, with their codewords.
struct NodeSet {
    std::vector<SymbolString> paths;
    std::vector<SymbolString> codewords;
};

NodeSet enumerate_nodes(const TreeCode& tree) {
    if (total_edges(tree.d, tree.n) > kExplicitLabelCap)
        throw std::invalid_argument("tree too large for exhaustive node enumeration");
    NodeSet nodes;
    std::vector<std::pair<SymbolString, SymbolString>> frontier{{{}, {}}};
    for (int depth = 1; depth <= tree.n; ++depth) {
        std::vector<std::pair<SymbolString, SymbolString>> next;
        for (const auto& [path, codeword] : frontier) {
            for (Symbol c = 0; c < tree.d; ++c) {
                auto p = path;
                p.push_back(c);
                auto cw = codeword;
                cw.push_back(tree.label(p));
                nodes.paths.push_back(p);
                nodes.codewords.push_back(cw);
                next.emplace_back(std::move(p), std::move(cw));
            }
        }
        frontier = std::move(next);
    }
    return nodes;
}

bool is_prefix(const SymbolString& a, const SymbolString& b) {
    return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

std::size_t common_prefix_len(const SymbolString& a, const SymbolString& b) {
    std::size_t i = 0;
    while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
    return i;
}

SymbolString slice(const SymbolString& s, std::size_t from, std::size_t to) {
    return SymbolString(s.begin() + static_cast<std::ptrdiff_t>(from),
                        s.begin() + static_cast<std::ptrdiff_t>(to));
}

// Checks ED(AD,BE) <= alpha * max(|AD|,|BE|) for the quadruple defined by
// node indices (di, ei) with B their diverging ancestor and A at depth la.
std::optional<BadLambda> check_lambda(const NodeSet& nodes, std::size_t di,
                                      std::size_t ei, std::size_t bl,
                                      std::size_t la, const Ratio& alpha) {
    const auto& dp = nodes.paths[di];
    const auto& ep = nodes.paths[ei];
    const std::int64_t len_ad = static_cast<std::int64_t>(dp.size() - la);
    const std::int64_t len_be = static_cast<std::int64_t>(ep.size() - bl);
    const std::int64_t longer = std::max(len_ad, len_be);
    // ED >= |len difference|: cheap filter before the quadratic DP.
    if ((longer - std::min(len_ad, len_be)) * alpha.den > alpha.num * longer)
        return std::nullopt;
    SymbolString ad = slice(nodes.codewords[di], la, dp.size());
    SymbolString be = slice(nodes.codewords[ei], bl, ep.size());
    const std::int64_t ed = edit_distance(ad, be);
    if (ed * alpha.den > alpha.num * longer) return std::nullopt;
    BadLambda lambda;
    lambda.a = slice(dp, 0, la);
    lambda.b = slice(dp, 0, bl);
    lambda.d_node = dp;
    lambda.e_node = ep;
    lambda.ad_string = std::move(ad);
    lambda.be_string = std::move(be);
    lambda.ratio = Ratio{ed, longer}.reduced();
    return lambda;
}

} // namespace

std::optional<BadLambda> find_bad_lambda(const TreeCode& tree, const Ratio& alpha) {
    NodeSet nodes = enumerate_nodes(tree);
    for (std::size_t di = 0; di < nodes.paths.size(); ++di) {
        for (std::size_t ei = 0; ei < nodes.paths.size(); ++ei) {
            if (di == ei) continue;
            const auto& dp = nodes.paths[di];
            const auto& ep = nodes.paths[ei];
            const std::size_t bl = common_prefix_len(dp, ep);
            // B must be a proper ancestor of both: D and E diverge at B.
            if (bl == dp.size() || bl == ep.size()) continue;
            for (std::size_t la = 0; la <= bl; ++la) {
                if (auto lambda = check_lambda(nodes, di, ei, bl, la, alpha))
                    return lambda;
            }
        }
    }
    return std::nullopt;
}

EdtcConstructionError::EdtcConstructionError(int attempts_,
                                             std::optional<BadLambda> witness_)
    : std::runtime_error("tree-code construction failed after " +
                         std::to_string(attempts_) + " attempts"),
      attempts(attempts_),
      last_witness(std::move(witness_)) {}

TreeCode build_edtc_rejection(std::uint32_t d, int n, const Ratio& alpha,
                              std::uint32_t out_alphabet_size, std::uint64_t seed,
                              int max_attempts) {
    if (n > 8) throw std::invalid_argument("exhaustive verification capped at n <= 8");
    std::optional<BadLambda> last;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        TreeCode tree = build_random_tree(
            d, n, out_alphabet_size,
            hash_mix(seed, static_cast<std::uint64_t>(attempt)));
        last = find_bad_lambda(tree, alpha);
        if (!last.has_value()) return tree;
    }
    throw EdtcConstructionError(max_attempts, std::move(last));
}

std::int64_t interval_union_length(std::vector<Interval> intervals) {
    std::sort(intervals.begin(), intervals.end());
    std::int64_t total = 0, covered_to = std::numeric_limits<std::int64_t>::min();
    for (const auto& iv : intervals) {
        if (iv.hi <= covered_to) continue;
        total += iv.hi - std::max(iv.lo, covered_to);
        covered_to = std::max(covered_to, iv.hi);
    }
    return total;
}

std::vector<Interval> disjoint_interval_cover(const std::vector<Interval>& input) {
    std::vector<Interval> intervals;
    for (const auto& iv : input)
        if (iv.length() > 0) intervals.push_back(iv);
    std::sort(intervals.begin(), intervals.end());
    std::vector<Interval> result;
    std::size_t i = 0;
    while (i < intervals.size()) {
        // Minimal greedy subcover of one connected component: each point is
        // covered at most twice, so the alternating classes are each
        // disjoint and together have length >= the component's union.
        std::vector<Interval> chain{intervals[i]};
        std::int64_t reach = intervals[i].hi;
        std::size_t j = i + 1;
        while (j < intervals.size() && intervals[j].lo <= reach) {
            // Extend furthest among intervals starting within the covered part.
            Interval best{reach, reach};
            while (j < intervals.size() && intervals[j].lo <= reach) {
                if (intervals[j].hi > best.hi) best = intervals[j];
                ++j;
            }
            if (best.hi <= reach) break;
            chain.push_back(best);
            reach = best.hi;
            // Re-scan: later-sorted intervals may start within the new reach.
            while (j < intervals.size() && intervals[j].lo <= reach &&
                   intervals[j].hi <= reach)
                ++j;
        }
        std::int64_t odd = 0, even = 0;
        for (std::size_t k = 0; k < chain.size(); ++k)
            (k % 2 == 0 ? even : odd) += chain[k].length();
        for (std::size_t k = (even >= odd ? 0 : 1); k < chain.size(); k += 2)
            result.push_back(chain[k]);
        while (j < intervals.size() && intervals[j].hi <= reach) ++j;
        i = j;
    }
    return result;
}

namespace {

std::vector<Interval> merge_intervals(std::vector<Interval> intervals) {
    std::sort(intervals.begin(), intervals.end());
    std::vector<Interval> merged;
    for (const auto& iv : intervals) {
        if (!merged.empty() && iv.lo <= merged.back().hi)
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        else
            merged.push_back(iv);
    }
    return merged;
}

PotencyReport potency_over_leaves(const TreeCode& tree, const Ratio& alpha,
                                  const std::vector<SymbolString>& leaves) {
    NodeSet nodes = enumerate_nodes(tree);
    // Index nodes by path for on-path lookup.
    std::map<SymbolString, std::size_t> index;
    for (std::size_t i = 0; i < nodes.paths.size(); ++i) index[nodes.paths[i]] = i;

    PotencyReport report;
    bool first = true;
    for (const auto& leaf : leaves) {
        std::map<Interval, BadLambda> found;  // dedupe by interval
        for (std::size_t depth = 1; depth <= leaf.size(); ++depth) {
            const std::size_t xi = index.at(slice(leaf, 0, depth));
            for (std::size_t yi = 0; yi < nodes.paths.size(); ++yi) {
                if (yi == xi) continue;
                for (auto [di, ei] : {std::pair{xi, yi}, std::pair{yi, xi}}) {
                    const auto& dp = nodes.paths[di];
                    const auto& ep = nodes.paths[ei];
                    const std::size_t bl = common_prefix_len(dp, ep);
                    if (bl == dp.size() || bl == ep.size()) continue;
                    for (std::size_t la = 0; la <= bl; ++la) {
                        const std::int64_t hi = static_cast<std::int64_t>(
                            std::max(dp.size(), ep.size()));
                        Interval iv{static_cast<std::int64_t>(la), hi};
                        if (found.count(iv)) continue;
                        if (auto lambda = check_lambda(nodes, di, ei, bl, la, alpha))
                            found.emplace(iv, std::move(*lambda));
                    }
                }
            }
        }
        std::vector<Interval> intervals;
        intervals.reserve(found.size());
        for (const auto& [iv, lambda] : found) intervals.push_back(iv);
        const std::int64_t union_len = interval_union_length(intervals);
        if (first || union_len > report.bad_interval_union_length) {
            first = false;
            report.worst_path = leaf;
            report.bad_interval_union_length = union_len;
            report.intervals = merge_intervals(intervals);
            report.witnesses.clear();
            for (auto& [iv, lambda] : found) report.witnesses.push_back(lambda);
        }
    }
    return report;
}

} // namespace

PotencyReport potency_report(const TreeCode& tree, const Ratio& alpha) {
    std::vector<SymbolString> leaves;
    std::vector<SymbolString> frontier{{}};
    for (int depth = 1; depth <= tree.n; ++depth) {
        std::vector<SymbolString> next;
        for (const auto& path : frontier) {
            for (Symbol c = 0; c < tree.d; ++c) {
                auto p = path;
                p.push_back(c);
                next.push_back(std::move(p));
            }
        }
        frontier = std::move(next);
    }
    return potency_over_leaves(tree, alpha, frontier);
}

PotencyReport potency_report_sampled(const TreeCode& tree, const Ratio& alpha,
                                     int num_paths, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<SymbolString> leaves;
    for (int i = 0; i < num_paths; ++i) {
        SymbolString leaf(static_cast<std::size_t>(tree.n));
        for (auto& s : leaf) s = static_cast<Symbol>(rng.below(tree.d));
        leaves.push_back(std::move(leaf));
    }
    return potency_over_leaves(tree, alpha, leaves);
}

namespace {

// Lower bound on SD(C(m'), rm) over all extensions m' of the prefix whose
// codeword is sm (including m' = the prefix itself): future sent symbols are
// relaxed to wildcards that may match any received symbol or be deleted.
// Entries track (stars, sent symbols in the suffix, worst cut so far) and
// only the Pareto frontier survives.
struct RelaxedEntry {
    std::int64_t num;
    std::int64_t den;
    Ratio m;
};

Ratio cut(std::int64_t num, std::int64_t den) {
    if (den == 0) return num > 0 ? Ratio::infinity() : Ratio::zero();
    return Ratio{num, den};
}

void prune_relaxed(std::vector<RelaxedEntry>& es) {
    std::sort(es.begin(), es.end(), [](const RelaxedEntry& a, const RelaxedEntry& b) {
        if (a.num != b.num) return a.num < b.num;
        if (a.den != b.den) return a.den > b.den;
        return a.m < b.m;
    });
    std::vector<RelaxedEntry> kept;
    for (const auto& e : es) {
        bool dominated = false;
        for (const auto& k : kept) {
            if (k.num <= e.num && k.den >= e.den && k.m <= e.m) {
                dominated = true;
                break;
            }
        }
        if (!dominated) kept.push_back(e);
    }
    es = std::move(kept);
}

Ratio relaxed_lower_bound(const SymbolString& sm, const SymbolString& rm,
                          std::int64_t max_extension) {
    const std::int64_t J = static_cast<std::int64_t>(sm.size());
    const std::int64_t R = static_cast<std::int64_t>(rm.size());
    auto idx = [R](std::int64_t a, std::int64_t b) {
        return static_cast<std::size_t>(a * (R + 1) + b);
    };
    std::vector<std::vector<RelaxedEntry>> cells(
        static_cast<std::size_t>((J + 1) * (R + 1)));
    // Base row a == J: w wildcard sent symbols absorb min(w, r) of the r
    // remaining received symbols; the leftovers on either side are stars.
    // The worst achievable tail cut is exactly num/den (the cut at the tail
    // head), attained by placing insertion columns first.
    for (std::int64_t b = R; b >= 0; --b) {
        const std::int64_t r = R - b;
        std::vector<RelaxedEntry> es;
        for (std::int64_t w = 0; w <= max_extension; ++w) {
            const std::int64_t matched = std::min(w, r);
            const std::int64_t num = (r - matched) + (w - matched);
            es.push_back(RelaxedEntry{num, w, cut(num, w)});
        }
        prune_relaxed(es);
        cells[idx(J, b)] = std::move(es);
    }
    for (std::int64_t a = J - 1; a >= 0; --a) {
        for (std::int64_t b = R; b >= 0; --b) {
            std::vector<RelaxedEntry> es;
            auto fold = [&](const std::vector<RelaxedEntry>& succ,
                            std::int64_t dnum, std::int64_t dden) {
                for (const auto& e : succ) {
                    const std::int64_t num = e.num + dnum;
                    const std::int64_t den = e.den + dden;
                    es.push_back(RelaxedEntry{num, den, max(e.m, cut(num, den))});
                }
            };
            if (b < R && sm[static_cast<std::size_t>(a)] == rm[static_cast<std::size_t>(b)])
                fold(cells[idx(a + 1, b + 1)], 0, 1);
            fold(cells[idx(a + 1, b)], 1, 1);  // delete the sent symbol
            if (b < R) fold(cells[idx(a, b + 1)], 1, 0);  // insertion
            prune_relaxed(es);
            cells[idx(a, b)] = std::move(es);
        }
    }
    Ratio best = Ratio::infinity();
    for (const auto& e : cells[idx(0, 0)]) best = min(best, e.m);
    return best;
}

struct SearchNode {
    Ratio lb;
    SymbolString msg;
};

// Pop order: smallest bound first, then shorter message, then lexicographic —
// mirrors the decoder's declared tie-break.
struct SearchNodeGreater {
    bool operator()(const SearchNode& a, const SearchNode& b) const {
        if (a.lb != b.lb) return b.lb < a.lb;
        if (a.msg.size() != b.msg.size()) return a.msg.size() > b.msg.size();
        return a.msg > b.msg;
    }
};

} // namespace

DecodeResult decode_exact(const TreeCode& tree, const SymbolString& rm,
                          const Ratio& /*alpha*/) {
    std::priority_queue<SearchNode, std::vector<SearchNode>, SearchNodeGreater> queue;
    auto push_child = [&](const SymbolString& msg, const Ratio& incumbent) {
        SymbolString cw = tree.encode(msg);
        Ratio lb = relaxed_lower_bound(
            cw, rm, tree.n - static_cast<std::int64_t>(msg.size()));
        if (lb <= incumbent) queue.push(SearchNode{lb, msg});
    };

    DecodeResult best;
    best.sd = Ratio::infinity();
    for (Symbol c = 0; c < tree.d; ++c) push_child({c}, best.sd);

    while (!queue.empty()) {
        SearchNode node = queue.top();
        if (node.lb > best.sd) break;
        queue.pop();
        const Ratio sd = suffix_distance(tree.encode(node.msg), rm).value;
        const bool better =
            sd < best.sd ||
            (sd == best.sd &&
             (node.msg.size() < best.message.size() ||
              (node.msg.size() == best.message.size() && node.msg < best.message)));
        if (best.sd.is_infinite() && best.message.empty()) {
            best.message = node.msg;
            best.sd = sd;
        } else if (better) {
            best.message = node.msg;
            best.sd = sd;
        }
        if (node.msg.size() < static_cast<std::size_t>(tree.n)) {
            for (Symbol c = 0; c < tree.d; ++c) {
                SymbolString child = node.msg;
                child.push_back(c);
                push_child(child, best.sd);
            }
        }
    }
    return best;
}

ShortcutResult decode_shortcut(const TreeCode& tree, const SymbolString& rm,
                               const SymbolString& true_sent, const Ratio& alpha) {
    ShortcutResult result;
    if (true_sent.empty()) throw std::invalid_argument("true_sent must be non-empty");
    result.sd = suffix_distance(tree.encode(true_sent), rm).value;
    // sd <= alpha/2, compared exactly as 2 * sd <= alpha.
    if (!result.sd.is_infinite() &&
        2 * result.sd.num * alpha.den <= alpha.num * result.sd.den) {
        result.message = true_sent;
        result.valid = true;
    }
    return result;
}

std::string serialize_tree(const TreeCode& tree) {
    if (total_edges(tree.d, tree.n) > kExplicitLabelCap)
        throw std::invalid_argument("tree too large to serialize");
    std::ostringstream out;
    out << tree.d << ' ' << tree.n << ' ' << tree.out_alphabet_size << ' '
        << tree.seed << '\n';
    std::vector<SymbolString> frontier{{}};
    for (int depth = 1; depth <= tree.n; ++depth) {
        std::vector<SymbolString> next;
        for (const auto& path : frontier) {
            for (Symbol c = 0; c < tree.d; ++c) {
                auto p = path;
                p.push_back(c);
                out << tree.label(p) << '\n';
                next.push_back(std::move(p));
            }
        }
        frontier = std::move(next);
    }
    return out.str();
}

TreeCode parse_tree(const std::string& text) {
    std::istringstream in(text);
    TreeCode tree;
    if (!(in >> tree.d >> tree.n >> tree.out_alphabet_size >> tree.seed))
        throw std::invalid_argument("bad tree header");
    if (tree.d < 2 || tree.n < 1 || tree.out_alphabet_size < 2 ||
        total_edges(tree.d, tree.n) > kExplicitLabelCap)
        throw std::invalid_argument("bad tree header");
    tree.lazy = false;
    tree.labels.resize(static_cast<std::size_t>(tree.n));
    std::uint64_t level_size = 1;
    for (int k = 0; k < tree.n; ++k) {
        level_size *= tree.d;
        auto& level = tree.labels[static_cast<std::size_t>(k)];
        level.resize(level_size);
        for (auto& sym : level) {
            if (!(in >> sym) || sym >= tree.out_alphabet_size)
                throw std::invalid_argument("bad tree label");
        }
    }
    Symbol extra;
    if (in >> extra) throw std::invalid_argument("trailing tree data");
    return tree;
}

} // namespace edcode
