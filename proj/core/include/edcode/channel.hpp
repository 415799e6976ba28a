#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "edcode/metrics.hpp"
#include "edcode/pjp.hpp"
#include "edcode/rational.hpp"

namespace edcode {

enum class PartyId { alice, bob };
inline PartyId other(PartyId p) { return p == PartyId::alice ? PartyId::bob : PartyId::alice; }
inline const char* party_name(PartyId p) { return p == PartyId::alice ? "alice" : "bob"; }

enum class ProtocolKind { poly, constant };

// The knobs shared by both coding schemes and consumed by the scheduler and
// the trace analyzer. Produced by poly_config / const_config.
struct ProtocolConfig {
    ProtocolKind kind = ProtocolKind::poly;
    int T = 0;
    int N = 0;
    Ratio alpha;            // tree-code distance parameter
    Ratio rho;              // noise fraction; budget = floor(2*rho*N)
    Ratio eps;              // constant-alphabet epsilon (poly: the config epsilon)
    int page_capacity = 0;  // constant only: ceil(1/eps^2)
    int live_boost = 0;     // constant only: ceil(1/eps)
    int output_round = 0;   // ceil(N*(1-2*rho))
    std::uint32_t in_alphabet_size = 0;
    std::uint32_t out_alphabet_size = 0;
    std::uint64_t tree_seed = 0;
    bool decoder_exact = false;  // recorded decoder selection

    int budget_total() const {
        return static_cast<int>((2 * rho.num * N) / rho.den);
    }
};

// Everything observable about one protocol step, for logging and analysis.
struct StepInfo {
    Symbol sent = 0;
    bool decode_performed = false;  // false only for Alice's first step
    SymbolString decoded;           // decoded counterpart message (input symbols)
    bool decode_valid = true;       // resolved to a well-formed edge set
    bool cycle_boundary = true;     // table update ran this round (poly: always)
    bool full_page = false;         // emitted page met capacity (constant only)
    // Edges newly counted for progress this round, with the transmitted
    // description length: poly logs the edge encoded in this round's symbol
    // (length 1), constant logs edges whose final description bit was sent.
    std::vector<std::pair<EdgeId, int>> progress_edges;
    std::uint64_t votes_leader = 0;  // current argmax leaf code
    std::int64_t votes_max = 0;
    std::optional<std::uint64_t> output_leaf;  // set at the output deadline
};

// Deterministic state machine for one protocol party. step() consumes the
// received channel symbol (absent only for Alice's first send) and returns
// the next channel symbol to send.
class PartyMachine {
public:
    virtual ~PartyMachine() = default;
    virtual Symbol step(std::optional<Symbol> received) = 0;
    virtual int round() const = 0;                        // local i after step
    virtual const SymbolString& sent_message() const = 0; // input-alphabet prefix
    virtual const StepInfo& last_step() const = 0;
    virtual std::optional<std::uint64_t> output() const = 0;
};

enum class ActionKind { deliver, substitute, out_of_sync };

struct CorruptionAction {
    ActionKind kind = ActionKind::deliver;
    Symbol forged = 0;  // meaningful unless deliver
    int cost() const { return kind == ActionKind::deliver ? 0 : 1; }
};

struct NoiseBudget {
    int total = 0;
    int spent = 0;
    int left() const { return total - spent; }
};

// One in-flight channel symbol, presented to the adversary.
struct Transmission {
    PartyId from = PartyId::alice;
    Symbol symbol = 0;
    int sender_round = 0;  // sender's local round
    int global_index = 0;  // 1-based transmission counter
};

class Adversary {
public:
    virtual ~Adversary() = default;
    virtual CorruptionAction act(const Transmission& tx, const NoiseBudget& budget) = 0;
};

std::unique_ptr<Adversary> adversary_none();
std::unique_ptr<Adversary> adversary_random(double rate, std::uint64_t seed,
                                            std::uint32_t out_alphabet_size);
// Corrupts transmissions with global_index in [start, start+length) using the
// given kind; the forged symbol is the original plus one, modulo alphabet.
std::unique_ptr<Adversary> adversary_burst(int start, int length, ActionKind kind,
                                           std::uint32_t out_alphabet_size);
// Out-of-syncs every victim transmission whose sender round falls in
// [window_start, window_start + window_length), replacing the genuine reply
// with the reply of a privately simulated counterpart (fresh at window start,
// running on an alternative input). Delivers honestly otherwise.
std::unique_ptr<Adversary> adversary_spoof_input(PartyId victim, int window_start,
                                                 int window_length,
                                                 std::unique_ptr<PartyMachine> simulated);

struct LogEvent {
    int t = 0;  // global decode-time index, 1-based
    PartyId party = PartyId::alice;
    int round = 0;  // local round of the stepping party
    bool received_present = false;
    Symbol received = 0;
    ActionKind action = ActionKind::deliver;  // provenance of the received symbol
    bool received_inserted = false;           // substitute or out_of_sync forgery
    bool good_decoding = false;               // classification against ground truth
    bool decoded_full_prefix = false;
    StepInfo info;
};

struct RunLog {
    ProtocolConfig config;
    PjpInstance instance;
    NoiseBudget budget;
    std::vector<LogEvent> events;
    int n_a = 0, n_b = 0;  // final local round counters
    // Canonical matchings implied by the action trace: tau_a matches Bob's
    // channel sends against Alice's receipts, tau_b the reverse direction.
    StringMatching tau_a, tau_b;
    std::optional<std::uint64_t> output_a, output_b;
};

struct SessionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RunLog run_session(PartyMachine& alice, PartyMachine& bob, Adversary& adversary,
                   const ProtocolConfig& config, const PjpInstance& instance);

// Trace audit of the analysis-side inequalities on an actual run.
struct AnalysisReport {
    int n_a = 0, n_b = 0, spent = 0;
    int g_a = 0, b_a = 0, g_b = 0, b_b = 0;  // good/bad decoding counts
    std::int64_t sc1 = 0, sc2 = 0, sc3 = 0, sc4 = 0;
    std::vector<int> l_of_t;      // joint-path progress after each event
    std::vector<int> milestones;  // m(0..T); -1 where never reached
    int l_final = 0;
    // Good-decoding lower bound (poly Lemma-5 form, constant Lemma-9 form):
    // slack = g - bound, in units of alpha.den * eps.den.
    std::int64_t good_bound_slack_a = 0, good_bound_slack_b = 0;
    bool good_bound_ok_a = false, good_bound_ok_b = false;
    bool milestone_bound_ok = true;    // per-interval milestone inequalities
    std::string milestone_violation;   // first violated interval, if any
    bool full_page_bound_ok = true;    // full pages <= eps * N_party (constant)
    int full_pages_a = 0, full_pages_b = 0;
    bool description_sum_ok = true;    // sum of path-edge description lengths
    std::int64_t description_sum = 0;
    double description_budget = 0.0;   // T*(log2((N_A+N_B)/T)+4)
    bool output_correct_a = false, output_correct_b = false;
    bool budget_identities_ok = false;  // sc identities + termination skew
};

AnalysisReport analyze_log(const RunLog& log);

// Line-per-event text trace embedding config and instance; replay of a
// serialized trace reproduces the identical AnalysisReport.
std::string serialize_runlog(const RunLog& log);
RunLog parse_runlog(const std::string& text);

} // namespace edcode
