#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "edcode/harness.hpp"
#include "edcode/metrics.hpp"
#include "edcode/tree_code.hpp"
#include "edcode/util.hpp"

using namespace edcode;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string default_out_dir() {
    const char* env = std::getenv("EDCODE_OUT_DIR");
    return env && *env ? env : ".";
}

struct SessionFlags {
    std::string protocol = "poly";
    int T = 4;
    int N = 0;
    std::string eps = "1/2";
    std::string alpha = "1/2";
    std::string rho = "0";
    std::string adversary = "none";
    double adversary_rate = 0.5;
    int burst_start = 3;
    int burst_length = 4;
    std::uint64_t seed = 1;
    std::uint64_t tree_seed = 1;
};

void add_session_flags(CLI::App* cmd, SessionFlags& f) {
    cmd->add_option("--protocol", f.protocol, "poly or const")
        ->check(CLI::IsMember({"poly", "const"}));
    cmd->add_option("--T", f.T, "pointer-jumping depth");
    cmd->add_option("--N", f.N, "rounds per party (0 = desk-scale default)");
    cmd->add_option("--eps", f.eps, "epsilon as p/q (constant scheme)");
    cmd->add_option("--alpha", f.alpha, "tree-code distance parameter p/q");
    cmd->add_option("--rho", f.rho, "noise fraction p/q");
    cmd->add_option("--adversary", f.adversary,
                    "none | random | burst-substitute | burst-out-of-sync");
    cmd->add_option("--adversary-rate", f.adversary_rate,
                    "per-transmission corruption rate (random)");
    cmd->add_option("--burst-start", f.burst_start, "first corrupted transmission");
    cmd->add_option("--burst-length", f.burst_length, "burst length");
    cmd->add_option("--seed", f.seed, "instance / adversary seed");
    cmd->add_option("--tree-seed", f.tree_seed, "tree label seed");
}

ExperimentConfig to_experiment(const SessionFlags& f) {
    ExperimentConfig exp;
    exp.kind = f.protocol == "const" ? ProtocolKind::constant : ProtocolKind::poly;
    exp.T = f.T;
    exp.N = f.N;
    exp.eps = parse_ratio(f.eps);
    exp.alpha = parse_ratio(f.alpha);
    exp.rhos = {parse_ratio(f.rho)};
    exp.adversary = f.adversary;
    exp.adversary_rate = f.adversary_rate;
    exp.burst_start = f.burst_start;
    exp.burst_length = f.burst_length;
    exp.seeds = {f.seed};
    exp.tree_seed = f.tree_seed;
    return exp;
}

// Prints every audited inequality with its slack; returns false on violation.
bool print_report(const ProtocolConfig& cfg, const AnalysisReport& rep) {
    std::cout << "rounds: alice " << rep.n_a << ", bob " << rep.n_b
              << "; corruptions spent " << rep.spent << " of "
              << cfg.budget_total() << "\n";
    std::cout << "outputs: alice " << (rep.output_correct_a ? "correct" : "wrong")
              << ", bob " << (rep.output_correct_b ? "correct" : "wrong")
              << "; joint path progress " << rep.l_final << "/" << cfg.T << "\n";
    std::cout << "decodings: alice " << rep.g_a << " good / " << rep.b_a
              << " bad, bob " << rep.g_b << " good / " << rep.b_b << " bad\n";
    std::cout << "good-decoding lower bound: slack alice " << rep.good_bound_slack_a
              << ", bob " << rep.good_bound_slack_b << " -> "
              << (rep.good_bound_ok_a && rep.good_bound_ok_b ? "ok" : "VIOLATED")
              << "\n";
    std::cout << "milestone-interval bounds: "
              << (rep.milestone_bound_ok ? "ok" : "VIOLATED " + rep.milestone_violation)
              << "\n";
    if (cfg.kind == ProtocolKind::constant) {
        std::cout << "full-page bound: alice " << rep.full_pages_a << ", bob "
                  << rep.full_pages_b << " -> "
                  << (rep.full_page_bound_ok ? "ok" : "VIOLATED") << "\n";
        std::cout << "description-length sum: " << rep.description_sum
                  << " <= " << rep.description_budget << " -> "
                  << (rep.description_sum_ok ? "ok" : "VIOLATED") << "\n";
    }
    std::cout << "matching/budget identities: "
              << (rep.budget_identities_ok ? "ok" : "VIOLATED") << "\n";
    return rep.good_bound_ok_a && rep.good_bound_ok_b && rep.milestone_bound_ok &&
           rep.full_page_bound_ok && rep.description_sum_ok &&
           rep.budget_identities_ok;
}

int cmd_gen_tree(std::uint32_t d, int n, const std::string& alpha_text,
                 std::uint32_t sigma, std::uint64_t seed, int max_attempts,
                 std::string out_path, const std::string& out_dir) {
    const Ratio alpha = parse_ratio(alpha_text);
    if (out_path.empty()) {
        std::ostringstream name;
        name << "tree-d" << d << "-n" << n << "-seed" << seed << ".txt";
        out_path = (fs::path(out_dir) / name.str()).string();
    }
    try {
        const TreeCode tree = build_edtc_rejection(d, n, alpha, sigma, seed,
                                                   max_attempts);
        write_file(out_path, serialize_tree(tree));
        std::cout << "bad-lambda-free: true\n";
        if (n <= 6) {
            const PotencyReport pot = potency_report(tree, alpha);
            std::cout << "worst-path bad-interval union: "
                      << pot.bad_interval_union_length << "\n";
        }
        std::cout << "wrote " << out_path << "\n";
        return 0;
    } catch (const EdtcConstructionError& e) {
        std::cout << "bad-lambda-free: false (after " << e.attempts
                  << " attempts)\n";
        if (e.last_witness) {
            std::cout << "witness ratio: " << e.last_witness->ratio.num << "/"
                      << e.last_witness->ratio.den << "\n";
        }
        return 1;
    }
}

int cmd_verify_tree(const std::string& in_path, const std::string& alpha_text) {
    const TreeCode tree = parse_tree(read_file(in_path));
    const Ratio alpha = parse_ratio(alpha_text);
    const auto bad = find_bad_lambda(tree, alpha);
    if (!bad) {
        std::cout << "bad-lambda-free: true\n";
        return 0;
    }
    std::cout << "bad-lambda-free: false\n";
    std::cout << "witness ratio: " << bad->ratio.num << "/" << bad->ratio.den
              << " (strings " << bad->ad_string.size() << " vs "
              << bad->be_string.size() << ")\n";
    return 1;
}

int cmd_sim(const SessionFlags& flags, const std::string& trace_path,
            const std::string& replay_path) {
    if (!replay_path.empty()) {
        const RunLog log = parse_runlog(read_file(replay_path));
        std::cout << "replayed " << replay_path << "\n";
        return print_report(log.config, analyze_log(log)) ? 0 : 1;
    }
    const ExperimentConfig exp = to_experiment(flags);
    const SessionArtifacts art =
        run_configured_session(exp, exp.rhos.front(), exp.seeds.front());
    std::cout << "protocol " << flags.protocol << " T " << art.config.T << " N "
              << art.config.N << " rho " << art.config.rho.num << "/"
              << art.config.rho.den << " seed " << exp.seeds.front() << "\n";
    const bool ok = print_report(art.config, art.report);
    if (!trace_path.empty()) {
        write_file(trace_path, serialize_runlog(art.log));
        std::cout << "wrote " << trace_path << "\n";
    }
    return ok ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, std::string out_path, bool summary,
              bool timings, const std::string& out_dir) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open " + config_path);
    const ExperimentConfig exp = experiment_from_key_values(parse_key_values(in));
    const auto rows = run_sweep(exp, timings);
    if (out_path.empty())
        out_path = (fs::path(out_dir) / "sweep.csv").string();
    write_file(out_path, sweep_to_csv(rows));
    std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
    if (summary) std::cout << sweep_summary(rows);
    bool ok = true;
    for (const auto& row : rows) ok = ok && row.audits_ok;
    std::cout << "trace audits: " << (ok ? "ok" : "VIOLATED") << "\n";
    return ok ? 0 : 1;
}

int cmd_attack(int N, const std::string& alpha_text, std::uint64_t seed) {
    const SpoofDemo demo = run_spoof_demo(N, parse_ratio(alpha_text), seed);
    std::cout << "paired-world out-of-sync attack: N=" << N
              << " rho=1/6 window=" << N / 3 << " spent=" << demo.log1.budget.spent
              << "+" << demo.log2.budget.spent << "\n";
    std::cout << "victim views at round " << demo.compare_round << ": "
              << (demo.views_identical && demo.sent_identical ? "identical"
                                                              : "DIFFER")
              << "\n";
    std::cout << "forced outputs: " << demo.output_world1 << " vs "
              << demo.output_world2 << "; correct leaves: " << demo.correct_leaf1
              << " vs " << demo.correct_leaf2 << "\n";
    std::cout << "wrong in at least one world: "
              << (demo.wrong_in_some_world ? "yes" : "NO") << "\n";
    return demo.views_identical && demo.sent_identical && demo.wrong_in_some_world
               ? 0
               : 1;
}

int cmd_selftest() {
    bool all_ok = true;
    auto report = [&](const std::string& name, bool ok) {
        std::cout << name << ": " << (ok ? "pass" : "FAIL") << "\n";
        all_ok = all_ok && ok;
    };

    // Dynamic program vs. exhaustive matching enumeration, all binary strings
    // of length <= 5.
    {
        std::vector<SymbolString> strings{{}};
        for (int len = 1; len <= 5; ++len) {
            for (std::uint32_t code = 0; code < (1u << len); ++code) {
                SymbolString s;
                for (int k = len - 1; k >= 0; --k)
                    s.push_back((code >> k) & 1u);
                strings.push_back(s);
            }
        }
        bool ok = true;
        for (const auto& sm : strings) {
            if (sm.empty()) continue;
            for (const auto& rm : strings)
                ok = ok && suffix_distance(sm, rm).value ==
                               suffix_distance_bruteforce(sm, rm).value;
        }
        report("suffix-distance oracle equivalence (binary, length <= 5)", ok);
    }

    // Edit-distance / LCS identity on sampled pairs.
    {
        Rng rng(20240817);
        bool ok = true;
        for (int it = 0; it < 100000; ++it) {
            SymbolString x(rng.below(9)), y(rng.below(9));
            for (auto& c : x) c = static_cast<Symbol>(rng.below(4));
            for (auto& c : y) c = static_cast<Symbol>(rng.below(4));
            ok = ok && edit_distance(x, y) ==
                           static_cast<std::int64_t>(x.size() + y.size()) -
                               2 * lcs(x, y);
        }
        report("edit-distance = |x|+|y|-2*LCS (100000 sampled pairs)", ok);
    }

    // Random-string edit-distance tail at m=n=8, |Sigma|=4, alpha=1/2:
    // empirical rate <= 4^-2 plus 3-sigma binomial slack.
    {
        Rng rng(977);
        SymbolString x(8);
        for (auto& c : x) c = static_cast<Symbol>(rng.below(4));
        const double rate = ed_tail_empirical(x, 8, 4, Ratio{1, 2}, 10000, 31);
        const double bound = 0.0625 + 3.0 * std::sqrt(0.0625 * 0.9375 / 10000.0);
        std::cout << "  tail rate " << rate << " vs bound " << bound << "\n";
        report("random-string edit-distance tail bound", rate <= bound);
    }

    return all_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"interactive coding over insertion/deletion channels"};
    app.require_subcommand(1);
    std::string out_dir = default_out_dir();
    app.add_option("--out-dir", out_dir,
                   "output directory (default $EDCODE_OUT_DIR or .)");

    // gen-tree
    auto* gen = app.add_subcommand("gen-tree", "construct a distance-checked tree");
    std::uint32_t gt_d = 2, gt_sigma = 16;
    int gt_n = 6, gt_attempts = 2000;
    std::uint64_t gt_seed = 7;
    std::string gt_alpha = "1/4", gt_out;
    gen->add_option("--d", gt_d, "arity");
    gen->add_option("--n", gt_n, "depth");
    gen->add_option("--alpha", gt_alpha, "distance parameter p/q");
    gen->add_option("--sigma", gt_sigma, "output alphabet size");
    gen->add_option("--seed", gt_seed, "construction seed");
    gen->add_option("--max-attempts", gt_attempts, "rejection-sampling cap");
    gen->add_option("--out", gt_out, "output file (default derived)");

    // verify-tree
    auto* verify = app.add_subcommand("verify-tree", "check a serialized tree");
    std::string vt_in, vt_alpha = "1/4";
    verify->add_option("--in", vt_in, "tree file")->required();
    verify->add_option("--alpha", vt_alpha, "distance parameter p/q");

    // sim
    auto* sim = app.add_subcommand("sim", "run one session and audit it");
    SessionFlags sim_flags;
    std::string sim_trace, sim_replay;
    add_session_flags(sim, sim_flags);
    sim->add_option("--trace", sim_trace, "write the replayable trace here");
    sim->add_option("--replay", sim_replay, "re-audit a saved trace instead");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "grid of sessions to CSV");
    std::string sw_config, sw_out;
    bool sw_summary = false, sw_timings = false;
    sweep->add_option("--config", sw_config, "key = value experiment file")
        ->required();
    sweep->add_option("--out", sw_out, "CSV path (default <out-dir>/sweep.csv)");
    sweep->add_flag("--summary", sw_summary, "print success rate per rho");
    sweep->add_flag("--timings", sw_timings,
                    "record wall-clock ms (breaks byte-stability)");

    // attack
    auto* attack = app.add_subcommand("attack", "paired-world blinding demo");
    int at_n = 12;
    std::string at_alpha = "1/2";
    std::uint64_t at_seed = 0;
    attack->add_option("--N", at_n, "rounds per party (multiple of 3)");
    attack->add_option("--alpha", at_alpha, "distance parameter p/q");
    attack->add_option("--seed", at_seed, "instance seed");

    // selftest
    app.add_subcommand("selftest", "metric oracle and identity sweeps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed())
            return cmd_gen_tree(gt_d, gt_n, gt_alpha, gt_sigma, gt_seed, gt_attempts,
                                gt_out, out_dir);
        if (verify->parsed()) return cmd_verify_tree(vt_in, vt_alpha);
        if (sim->parsed()) return cmd_sim(sim_flags, sim_trace, sim_replay);
        if (sweep->parsed())
            return cmd_sweep(sw_config, sw_out, sw_summary, sw_timings, out_dir);
        if (attack->parsed()) return cmd_attack(at_n, at_alpha, at_seed);
        return cmd_selftest();
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
