#include "edcode/metrics.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "edcode/util.hpp"

namespace edcode {

bool StringMatching::valid_for(const SymbolString& sent,
                               const SymbolString& received) const {
    if (tau1.size() != tau2.size()) return false;
    SymbolString s, r;
    for (std::size_t i = 0; i < tau1.size(); ++i) {
        const bool star1 = tau1[i] == kStar;
        const bool star2 = tau2[i] == kStar;
        if (!star1 && !star2 && tau1[i] != tau2[i]) return false;
        if (!star1) s.push_back(static_cast<Symbol>(tau1[i]));
        if (!star2) r.push_back(static_cast<Symbol>(tau2[i]));
    }
    return s == sent && r == received;
}

std::int64_t edit_distance(const SymbolString& x, const SymbolString& y) {
    const std::size_t n = x.size(), m = y.size();
    std::vector<std::int64_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<std::int64_t>(j);
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<std::int64_t>(i);
        for (std::size_t j = 1; j <= m; ++j) {
            std::int64_t best = std::min(prev[j], cur[j - 1]) + 1;
            if (x[i - 1] == y[j - 1]) best = std::min(best, prev[j - 1]);
            cur[j] = best;
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

std::int64_t lcs(const SymbolString& x, const SymbolString& y) {
    const std::size_t n = x.size(), m = y.size();
    std::vector<std::int64_t> prev(m + 1, 0), cur(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            if (x[i - 1] == y[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
        std::fill(cur.begin(), cur.end(), 0);
    }
    return prev[m];
}

Ratio score_matching_suffix(const StringMatching& m) {
    const std::size_t len = m.tau1.size();
    Ratio worst = Ratio::zero();
    std::int64_t stars = 0;   // stars in tau1[i..] + tau2[i..]
    std::int64_t nonstar1 = 0;
    for (std::size_t k = len; k-- > 0;) {
        if (m.tau1[k] == StringMatching::kStar) ++stars; else ++nonstar1;
        if (m.tau2[k] == StringMatching::kStar) ++stars;
        Ratio cut{stars, nonstar1};
        if (stars > 0 && nonstar1 == 0) cut = Ratio::infinity();
        worst = max(worst, cut);
    }
    return worst;
}

std::int64_t score_matching_edit(const StringMatching& m) {
    std::int64_t sc = 0;
    for (auto v : m.tau1) sc += (v == StringMatching::kStar);
    for (auto v : m.tau2) sc += (v == StringMatching::kStar);
    return sc;
}

namespace {

enum Move : std::uint8_t { kEnd = 0, kDiag = 1, kDel = 2, kIns = 3 };

struct Entry {
    std::int64_t num;   // total stars in the suffix alignment
    Ratio m;            // worst cut ratio within the suffix
    Move move;
    std::int32_t succ;  // entry index in the successor cell
};

// Keep, per cell, only the Pareto frontier over (num asc, m desc): a larger
// star count is only worth carrying if it achieves a strictly smaller worst
// ratio downstream.
void prune(std::vector<Entry>& es) {
    std::sort(es.begin(), es.end(), [](const Entry& a, const Entry& b) {
        if (a.num != b.num) return a.num < b.num;
        return a.m < b.m;
    });
    std::vector<Entry> kept;
    for (const Entry& e : es) {
        if (kept.empty() || e.m < kept.back().m) kept.push_back(e);
    }
    es = std::move(kept);
}

} // namespace

SuffixDistanceResult suffix_distance(const SymbolString& sm, const SymbolString& rm) {
    if (sm.empty()) throw std::invalid_argument("suffix_distance: empty sent string");
    const std::int64_t A = static_cast<std::int64_t>(sm.size());
    const std::int64_t B = static_cast<std::int64_t>(rm.size());
    auto idx = [B](std::int64_t a, std::int64_t b) {
        return static_cast<std::size_t>(a * (B + 1) + b);
    };
    std::vector<std::vector<Entry>> cells(static_cast<std::size_t>((A + 1) * (B + 1)));
    cells[idx(A, B)] = {Entry{0, Ratio::zero(), kEnd, -1}};

    auto front = [A](std::int64_t a, std::int64_t num) {
        const std::int64_t den = A - a;  // sent symbols remaining in the suffix
        if (den == 0 && num > 0) return Ratio::infinity();
        return Ratio{num, den};
    };

    for (std::int64_t a = A; a >= 0; --a) {
        for (std::int64_t b = B; b >= 0; --b) {
            if (a == A && b == B) continue;
            std::vector<Entry> es;
            if (a < A && b < B && sm[static_cast<std::size_t>(a)] == rm[static_cast<std::size_t>(b)]) {
                const auto& succ = cells[idx(a + 1, b + 1)];
                for (std::int32_t i = 0; i < static_cast<std::int32_t>(succ.size()); ++i) {
                    const Entry& e = succ[static_cast<std::size_t>(i)];
                    es.push_back(Entry{e.num, max(e.m, front(a, e.num)), kDiag, i});
                }
            }
            if (a < A) {
                const auto& succ = cells[idx(a + 1, b)];
                for (std::int32_t i = 0; i < static_cast<std::int32_t>(succ.size()); ++i) {
                    const Entry& e = succ[static_cast<std::size_t>(i)];
                    es.push_back(Entry{e.num + 1, max(e.m, front(a, e.num + 1)), kDel, i});
                }
            }
            if (b < B) {
                const auto& succ = cells[idx(a, b + 1)];
                for (std::int32_t i = 0; i < static_cast<std::int32_t>(succ.size()); ++i) {
                    const Entry& e = succ[static_cast<std::size_t>(i)];
                    es.push_back(Entry{e.num + 1, max(e.m, front(a, e.num + 1)), kIns, i});
                }
            }
            prune(es);
            cells[idx(a, b)] = std::move(es);
        }
    }

    const auto& root = cells[idx(0, 0)];
    assert(!root.empty());
    std::size_t best = 0;
    for (std::size_t i = 1; i < root.size(); ++i)
        if (root[i].m < root[best].m) best = i;

    SuffixDistanceResult result;
    result.value = root[best].m.reduced();
    std::int64_t a = 0, b = 0;
    std::int32_t ei = static_cast<std::int32_t>(best);
    while (true) {
        const Entry& e = cells[idx(a, b)][static_cast<std::size_t>(ei)];
        if (e.move == kEnd) break;
        switch (e.move) {
        case kDiag:
            result.witness.tau1.push_back(sm[static_cast<std::size_t>(a)]);
            result.witness.tau2.push_back(rm[static_cast<std::size_t>(b)]);
            ++a; ++b;
            break;
        case kDel:
            result.witness.tau1.push_back(sm[static_cast<std::size_t>(a)]);
            result.witness.tau2.push_back(StringMatching::kStar);
            ++a;
            break;
        case kIns:
            result.witness.tau1.push_back(StringMatching::kStar);
            result.witness.tau2.push_back(rm[static_cast<std::size_t>(b)]);
            ++b;
            break;
        default:
            assert(false);
        }
        ei = e.succ;
    }
    return result;
}

namespace {

void enumerate_matchings(const SymbolString& sm, const SymbolString& rm,
                         std::size_t a, std::size_t b, StringMatching& cur,
                         SuffixDistanceResult& best, bool& have) {
    if (a == sm.size() && b == rm.size()) {
        Ratio v = score_matching_suffix(cur);
        if (!have || v < best.value) {
            best.value = v.reduced();
            best.witness = cur;
            have = true;
        }
        return;
    }
    // Columns with a star on both sides are never beneficial and would make
    // the matching space infinite; they are skipped.
    if (a < sm.size() && b < rm.size() && sm[a] == rm[b]) {
        cur.tau1.push_back(sm[a]);
        cur.tau2.push_back(rm[b]);
        enumerate_matchings(sm, rm, a + 1, b + 1, cur, best, have);
        cur.tau1.pop_back();
        cur.tau2.pop_back();
    }
    if (a < sm.size()) {
        cur.tau1.push_back(sm[a]);
        cur.tau2.push_back(StringMatching::kStar);
        enumerate_matchings(sm, rm, a + 1, b, cur, best, have);
        cur.tau1.pop_back();
        cur.tau2.pop_back();
    }
    if (b < rm.size()) {
        cur.tau1.push_back(StringMatching::kStar);
        cur.tau2.push_back(rm[b]);
        enumerate_matchings(sm, rm, a, b + 1, cur, best, have);
        cur.tau1.pop_back();
        cur.tau2.pop_back();
    }
}

} // namespace

SuffixDistanceResult suffix_distance_bruteforce(const SymbolString& sm,
                                                const SymbolString& rm) {
    if (sm.size() > 8 || rm.size() > 8)
        throw std::invalid_argument("suffix_distance_bruteforce: length cap is 8");
    if (sm.empty())
        throw std::invalid_argument("suffix_distance_bruteforce: empty sent string");
    SuffixDistanceResult best;
    bool have = false;
    StringMatching cur;
    enumerate_matchings(sm, rm, 0, 0, cur, best, have);
    assert(have);
    return best;
}

double ed_tail_empirical(const SymbolString& x, std::size_t n,
                         std::uint32_t alphabet_size, const Ratio& alpha,
                         std::size_t samples, std::uint64_t seed) {
    Rng rng(seed);
    const std::int64_t m = static_cast<std::int64_t>(x.size());
    std::size_t hits = 0;
    SymbolString y(n);
    for (std::size_t s = 0; s < samples; ++s) {
        for (auto& sym : y) sym = static_cast<Symbol>(rng.below(alphabet_size));
        const std::int64_t ed = edit_distance(x, y);
        // ED <= alpha * m, compared exactly.
        if (!alpha.is_infinite() && ed * alpha.den <= alpha.num * m) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(samples);
}

} // namespace edcode
