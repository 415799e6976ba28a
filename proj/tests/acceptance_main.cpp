// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Scales are chosen so the whole binary runs in a few minutes.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "edcode/harness.hpp"
#include "edcode/metrics.hpp"
#include "edcode/tree_code.hpp"
#include "edcode/util.hpp"

using namespace edcode;

namespace {

using Clock = std::chrono::steady_clock;

long long ms_since(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                                 start)
        .count();
}

bool report(int index, const char* name, bool ok, const std::string& detail) {
    std::printf("criterion %d [%s]: %s (%s)\n", index, name, ok ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    return ok;
}

std::vector<SymbolString> binary_strings_up_to(int max_len) {
    std::vector<SymbolString> out{{}};
    for (int len = 1; len <= max_len; ++len) {
        for (std::uint32_t code = 0; code < (1u << len); ++code) {
            SymbolString s;
            for (int k = len - 1; k >= 0; --k) s.push_back((code >> k) & 1u);
            out.push_back(s);
        }
    }
    return out;
}

// 1. The suffix-distance dynamic program agrees with exhaustive matching
// enumeration on the complete cross product of binary strings of length <= 5.
bool criterion_metric_oracle() {
    const auto start = Clock::now();
    const auto strings = binary_strings_up_to(5);
    long long pairs = 0;
    bool ok = true;
    for (const auto& sm : strings) {
        if (sm.empty()) continue;  // sent prefix is always non-empty
        for (const auto& rm : strings) {
            ++pairs;
            if (suffix_distance(sm, rm).value !=
                suffix_distance_bruteforce(sm, rm).value) {
                ok = false;
            }
        }
    }
    const auto elapsed = ms_since(start);
    return report(1, "suffix-distance oracle equivalence", ok && elapsed < 60000,
                  std::to_string(pairs) + " pairs, " + std::to_string(elapsed) +
                      " ms");
}

// 2. Edit distance equals |x|+|y|-2*LCS on 10^5 sampled pairs of length <= 8
// over a 4-letter alphabet.
bool criterion_edit_lcs_identity() {
    Rng rng(20240817);
    long long violations = 0;
    for (int it = 0; it < 100000; ++it) {
        SymbolString x(rng.below(9)), y(rng.below(9));
        for (auto& c : x) c = static_cast<Symbol>(rng.below(4));
        for (auto& c : y) c = static_cast<Symbol>(rng.below(4));
        if (edit_distance(x, y) !=
            static_cast<std::int64_t>(x.size() + y.size()) - 2 * lcs(x, y))
            ++violations;
    }
    return report(2, "edit-distance / LCS identity", violations == 0,
                  "100000 pairs, " + std::to_string(violations) + " violations");
}

// 3. Random-string edit-distance tail: Pr[ED <= m/2] at m=n=8, |Sigma|=4 stays
// below 4^-2 plus three binomial standard deviations.
bool criterion_ed_tail() {
    Rng rng(977);
    SymbolString x(8);
    for (auto& c : x) c = static_cast<Symbol>(rng.below(4));
    const double rate = ed_tail_empirical(x, 8, 4, Ratio{1, 2}, 10000, 31);
    const double bound = 0.0625 + 3.0 * std::sqrt(0.0625 * 0.9375 / 10000.0);
    char detail[96];
    std::snprintf(detail, sizeof detail, "rate %.4f vs bound %.4f, 10000 samples",
                  rate, bound);
    return report(3, "random-string edit-distance tail", rate <= bound, detail);
}

// 4. Unique decoding: for 20 distance-checked trees (d=2, n=5, alpha=2/5) and
// every received string of length <= 5 over the full output alphabet, at most
// one codeword prefix sits at suffix distance <= alpha/2. An integer
// edit-distance prefilter (SD >= ED/|rm|) keeps the sweep exhaustive yet fast.
bool criterion_uniqueness() {
    const auto start = Clock::now();
    const Ratio alpha{2, 5};
    const std::uint32_t sigma = 16;
    long long violations = 0, rm_checked = 0;
    int trees = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        TreeCode tree;
        try {
            tree = build_edtc_rejection(2, 5, alpha, sigma, seed * 7 + 1, 5000);
        } catch (const EdtcConstructionError&) {
            continue;
        }
        ++trees;
        std::vector<SymbolString> prefixes;
        for (int len = 1; len <= 5; ++len) {
            for (std::uint32_t code = 0; code < (1u << len); ++code) {
                SymbolString m;
                for (int k = len - 1; k >= 0; --k) m.push_back((code >> k) & 1u);
                prefixes.push_back(tree.encode(m));
            }
        }
        for (int len = 1; len <= 5; ++len) {
            SymbolString rm(static_cast<std::size_t>(len), 0);
            while (true) {
                int below = 0;
                for (const auto& cw : prefixes) {
                    if (2 * edit_distance(cw, rm) * alpha.den >
                        alpha.num * static_cast<std::int64_t>(rm.size()))
                        continue;
                    const Ratio sd = suffix_distance(cw, rm).value;
                    if (!sd.is_infinite() &&
                        2 * sd.num * alpha.den <= alpha.num * sd.den)
                        ++below;
                    if (below > 1) break;
                }
                if (below > 1) ++violations;
                ++rm_checked;
                int pos = len - 1;
                while (pos >= 0 && ++rm[static_cast<std::size_t>(pos)] == sigma)
                    rm[static_cast<std::size_t>(pos--)] = 0;
                if (pos < 0) break;
            }
        }
    }
    return report(4, "unique decoding below alpha/2", trees == 20 && violations == 0,
                  std::to_string(trees) + " trees, " + std::to_string(rm_checked) +
                      " received strings, " + std::to_string(violations) +
                      " violations, " + std::to_string(ms_since(start)) + " ms");
}

// 5. Zero noise, both schemes, T in {2,4,8}, 50 seeds: both parties output the
// correct leaf at the deadline, 100%.
bool criterion_zero_noise() {
    const auto start = Clock::now();
    int sessions = 0, correct = 0;
    for (const ProtocolKind kind : {ProtocolKind::poly, ProtocolKind::constant}) {
        for (const int T : {2, 4, 8}) {
            ExperimentConfig exp;
            exp.kind = kind;
            exp.T = T;
            exp.adversary = "none";
            for (std::uint64_t seed = 0; seed < 50; ++seed) {
                const auto art = run_configured_session(exp, Ratio{0, 1}, seed);
                ++sessions;
                if (art.report.output_correct_a && art.report.output_correct_b)
                    ++correct;
            }
        }
    }
    return report(5, "zero-noise end-to-end decoding", correct == sessions,
                  std::to_string(correct) + "/" + std::to_string(sessions) +
                      " sessions correct, " + std::to_string(ms_since(start)) +
                      " ms");
}

// 6. Every session in the adversarial sweep suite satisfies the trace-level
// inequalities: the good-decoding lower bounds, the milestone-interval
// bounds, the full-page bound, and the description-length bound.
bool criterion_trace_audits() {
    const auto start = Clock::now();
    long long rows_total = 0, rows_violating = 0;
    for (const ProtocolKind kind : {ProtocolKind::poly, ProtocolKind::constant}) {
        for (const char* adversary :
             {"random", "burst-substitute", "burst-out-of-sync"}) {
            ExperimentConfig exp;
            exp.kind = kind;
            exp.T = 4;
            exp.N = kind == ProtocolKind::poly ? 32 : 48;
            exp.alpha = Ratio{1, 2};
            exp.eps = Ratio{1, 2};
            exp.adversary = adversary;
            exp.adversary_rate = 0.4;
            exp.burst_start = 3;
            exp.burst_length = 6;
            exp.rhos = {Ratio{0, 1}, Ratio{1, 32}, Ratio{1, 16}, Ratio{1, 8}};
            exp.seeds.clear();
            for (std::uint64_t s = 0; s < 15; ++s) exp.seeds.push_back(s);
            for (const auto& row : run_sweep(exp)) {
                ++rows_total;
                if (!row.audits_ok) ++rows_violating;
            }
        }
    }
    const auto elapsed = ms_since(start);
    return report(6, "trace-level inequality audits",
                  rows_violating == 0 && elapsed < 600000,
                  std::to_string(rows_total) + " sessions, " +
                      std::to_string(rows_violating) + " violations, " +
                      std::to_string(elapsed) + " ms");
}

// 7. Guaranteed regime (1 - 16*rho/alpha - 2*rho well above zero): every
// session against every implemented adversary ends with both outputs correct.
bool criterion_guaranteed_regime() {
    const auto start = Clock::now();
    const int T = 8, N = 128;
    const Ratio alpha{3, 5}, rho{1, 50};
    // margin = 1 - 16*rho/alpha - 2*rho = 1 - 8/15 - 1/25 > 0.42
    const double margin =
        1.0 - 16.0 * rho.num * alpha.den / (double)(rho.den * alpha.num) -
        2.0 * rho.num / (double)rho.den;
    int sessions = 0, correct = 0;
    for (const char* adversary :
         {"none", "random", "burst-substitute", "burst-out-of-sync"}) {
        ExperimentConfig exp;
        exp.T = T;
        exp.N = N;
        exp.alpha = alpha;
        exp.adversary = adversary;
        exp.adversary_rate = 1.0;  // spend the whole budget as early as possible
        exp.burst_start = 2;
        exp.burst_length = N;  // truncated by the budget
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto art = run_configured_session(exp, rho, seed);
            ++sessions;
            if (art.report.output_correct_a && art.report.output_correct_b)
                ++correct;
        }
    }
    // The out-of-sync input-spoofing adversary, with its whole window inside
    // the budget.
    const auto cfg = poly_config_relaxed(T, N, alpha, rho, 0, 1, true);
    const TreeCode tree = make_poly_tree(cfg);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const PjpInstance inst = generate_instance(T, seed);
        const PjpInstance twin = flip_last_choice(inst);
        PolyParty alice(PartyId::alice, inst, tree, cfg, Decoder{});
        PolyParty bob(PartyId::bob, inst, tree, cfg, Decoder{});
        alice.set_decoder(make_shortcut_decoder(tree, cfg.alpha, bob));
        bob.set_decoder(make_shortcut_decoder(tree, cfg.alpha, alice));
        auto simulated = std::make_unique<PolyParty>(PartyId::bob, twin, tree, cfg,
                                                     make_greedy_decoder(tree));
        auto adversary = adversary_spoof_input(PartyId::alice, 1,
                                               cfg.budget_total(),
                                               std::move(simulated));
        const RunLog log = run_session(alice, bob, *adversary, cfg, inst);
        const auto rep = analyze_log(log);
        ++sessions;
        if (rep.output_correct_a && rep.output_correct_b) ++correct;
    }
    char detail[128];
    std::snprintf(detail, sizeof detail,
                  "margin %.3f, %d/%d sessions correct, %lld ms", margin, correct,
                  sessions, ms_since(start));
    return report(7, "guaranteed-regime correctness",
                  margin > 0.25 && correct == sessions, detail);
}

// 8. Paired-world out-of-sync attack with budget floor(N/3): the victim's
// received prefixes at round ceil(2N/3) are bit-identical across the two
// worlds, so any forced output there is wrong in at least one world.
bool criterion_attack_demo() {
    bool ok = true;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const SpoofDemo demo = run_spoof_demo(12, Ratio{1, 2}, seed);
        ok = ok && demo.views_identical && demo.sent_identical &&
             demo.outputs_equal && demo.wrong_in_some_world &&
             demo.correct_leaf1 != demo.correct_leaf2 &&
             demo.log1.budget.spent == 4 && demo.log2.budget.spent == 4;
    }
    return report(8, "paired-world blinding attack", ok,
                  "8 seeds, N=12, budget 4 per world");
}

// 9. Determinism: repeating a construction, a session, and a sweep yields
// byte-identical trees, traces, and CSVs.
bool criterion_determinism() {
    bool ok = true;

    const auto tree_once = [] {
        return serialize_tree(build_edtc_rejection(2, 4, Ratio{1, 2}, 16, 5, 200));
    };
    ok = ok && tree_once() == tree_once();

    const auto trace_once = [](ProtocolKind kind) {
        ExperimentConfig exp;
        exp.kind = kind;
        exp.T = 4;
        exp.N = kind == ProtocolKind::poly ? 32 : 48;
        exp.adversary = "random";
        return serialize_runlog(
            run_configured_session(exp, Ratio{1, 8}, 7).log);
    };
    ok = ok && trace_once(ProtocolKind::poly) == trace_once(ProtocolKind::poly);
    ok = ok &&
         trace_once(ProtocolKind::constant) == trace_once(ProtocolKind::constant);

    const auto csv_once = [] {
        ExperimentConfig exp;
        exp.T = 2;
        exp.N = 16;
        exp.adversary = "random";
        exp.rhos = {Ratio{0, 1}, Ratio{1, 8}};
        exp.seeds = {1, 2, 3};
        return sweep_to_csv(run_sweep(exp));
    };
    ok = ok && csv_once() == csv_once();

    return report(9, "byte-identical reruns", ok, "tree, traces, CSV");
}

} // namespace

int main() {
    bool ok = true;
    ok &= criterion_metric_oracle();
    ok &= criterion_edit_lcs_identity();
    ok &= criterion_ed_tail();
    ok &= criterion_uniqueness();
    ok &= criterion_zero_noise();
    ok &= criterion_trace_audits();
    ok &= criterion_guaranteed_regime();
    ok &= criterion_attack_demo();
    ok &= criterion_determinism();
    std::printf("acceptance: %s\n", ok ? "ALL PASS" : "FAILURES PRESENT");
    return ok ? 0 : 1;
}
