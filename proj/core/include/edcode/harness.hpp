#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edcode/channel.hpp"
#include "edcode/coding_const.hpp"
#include "edcode/coding_poly.hpp"

namespace edcode {

// A reproducible experiment grid: one protocol at fixed (T, N, eps, alpha),
// swept over noise fractions and seeds with one adversary family.
struct ExperimentConfig {
    ProtocolKind kind = ProtocolKind::poly;
    int T = 4;
    int N = 0;  // 0 selects the desk-scale default (8T poly, 12T constant)
    Ratio eps{1, 2};
    Ratio alpha{1, 2};
    std::vector<Ratio> rhos{Ratio{0, 1}};
    // none | random | burst-substitute | burst-out-of-sync
    std::string adversary = "random";
    double adversary_rate = 0.5;  // per-transmission corruption rate (random)
    int burst_start = 3;          // first corrupted global transmission (burst)
    int burst_length = 4;
    std::vector<std::uint64_t> seeds{1};
    std::uint64_t tree_seed = 1;

    int effective_n() const { return N > 0 ? N : (kind == ProtocolKind::poly ? 8 : 12) * T; }
};

// "key = value" lines, '#' comments, blank lines ignored.
std::map<std::string, std::string> parse_key_values(std::istream& in);
// Accepts "p/q" or an integer.
Ratio parse_ratio(const std::string& text);
// Unknown keys throw std::invalid_argument; list values are comma-separated.
ExperimentConfig experiment_from_key_values(const std::map<std::string, std::string>& kv);

ProtocolConfig make_protocol_config(const ExperimentConfig& exp, const Ratio& rho);

struct SessionArtifacts {
    ProtocolConfig config;
    PjpInstance instance;
    RunLog log;
    AnalysisReport report;
};

// One full session of the configured protocol at the given noise fraction,
// fully determined by (exp, rho, seed).
SessionArtifacts run_configured_session(const ExperimentConfig& exp, const Ratio& rho,
                                        std::uint64_t seed);

struct SweepRow {
    std::uint64_t seed = 0;
    Ratio rho;
    ProtocolKind kind = ProtocolKind::poly;
    int n = 0;
    int n_a = 0, n_b = 0, spent = 0;
    int g_a = 0, b_a = 0, g_b = 0, b_b = 0;
    bool alice_correct = false, bob_correct = false;
    std::int64_t good_slack = 0;  // min of the per-party good-decoding slacks
    std::int64_t page_slack = 0;  // constant: min over parties of eps*N_party - full_pages, cleared of denominators; 0 for poly
    std::int64_t runtime_ms = 0;  // 0 unless timing was requested (keeps CSVs byte-stable)
    bool audits_ok = false;       // every analyzer inequality held
};

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row);
std::string csv_field(const std::string& raw);  // RFC 4180 quoting

// Rows ordered by (rho, seed). With measure_time the runtime column holds
// wall-clock milliseconds and the CSV is no longer byte-stable.
std::vector<SweepRow> run_sweep(const ExperimentConfig& exp, bool measure_time = false);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);
// Success-rate-per-rho text table.
std::string sweep_summary(const std::vector<SweepRow>& rows);

// Copies the instance and flips the deepest forced choice (Bob's for even T),
// yielding a twin instance whose correct leaf differs.
PjpInstance flip_last_choice(const PjpInstance& instance);

// Paired-world out-of-sync attack on the polynomial scheme at T=2, rho=1/6:
// in world 1 Alice's sends during rounds [1, floor(N/3)] are answered by a
// privately simulated Bob holding the twin input; in world 2 the twin input
// is real and the simulation holds the original, over the mirrored window.
// Alice's view at round ceil(2N/3) is bit-identical across worlds, so her
// forced output there is wrong in at least one of them.
struct SpoofDemo {
    int compare_round = 0;  // ceil(2N/3) = the output deadline at rho = 1/6
    bool views_identical = false;    // received prefixes match across worlds
    bool sent_identical = false;     // and so do Alice's own sends
    bool outputs_equal = false;
    bool wrong_in_some_world = false;
    std::uint64_t output_world1 = 0, output_world2 = 0;
    std::uint64_t correct_leaf1 = 0, correct_leaf2 = 0;
    RunLog log1, log2;
};

SpoofDemo run_spoof_demo(int N, const Ratio& alpha, std::uint64_t seed);

} // namespace edcode
