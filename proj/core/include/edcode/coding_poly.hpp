#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "edcode/channel.hpp"
#include "edcode/pjp.hpp"
#include "edcode/tree_code.hpp"

namespace edcode {

// Input-alphabet symbol of the polynomial scheme: a round pointer n in [0,N]
// plus a grandchild index s in [4]. n=N is the empty edge (s fixed to 1 when
// encoding, ignored when decoding); n=0 names a rootless first- or
// second-level edge per the instance enumeration.
struct PolySymbol {
    int n = 0;
    int s = 1;
};

Symbol poly_pack(const PolySymbol& sym);
PolySymbol poly_unpack(Symbol value);
inline std::uint32_t poly_in_alphabet(int N) {
    return 4u * (static_cast<std::uint32_t>(N) + 1u);
}

// Strict parameters: N = ceil(T/(16 eps)), alpha = 1 - eps, rho = 1/18 - eps,
// for 0 < eps < 1/18.
ProtocolConfig poly_config(int T, const Ratio& eps, std::uint32_t out_alphabet_size,
                           std::uint64_t tree_seed);
// Desk-scale parameters: caller-chosen N, alpha and rho; throws unless rho is
// below the guarantee threshold when `require_guarantee` is set.
ProtocolConfig poly_config_relaxed(int T, int N, const Ratio& alpha, const Ratio& rho,
                                   std::uint32_t out_alphabet_size,
                                   std::uint64_t tree_seed,
                                   bool require_guarantee = false);
// Largest admissible noise fraction for a given alpha: the proof needs
// 1 - 16*rho/alpha - 2*rho > 0, i.e. rho < alpha / (16 + 2*alpha).
Ratio poly_rho_bound(const Ratio& alpha);

// Resolves a decoded message into its indicated edge set. Any out-of-range
// pointer (n >= position, pointer to an empty or unresolved slot, rootless
// index out of range for the sender's side, or depth overflow) invalidates
// the whole message.
struct EdgeResolution {
    std::vector<EdgeId> edges;  // non-empty resolved edges, in message order
    std::vector<std::optional<EdgeId>> per_round;  // slot k-1 -> edge sent at round k
    bool valid = true;
};
EdgeResolution resolve_poly_message(const SymbolString& message, int N, int T,
                                    bool sender_is_alice);

// Decoder plug: maps the received channel string to a counterpart message.
// `valid` is false when the decoder itself declares failure (the shortcut's
// threshold miss), which forces an empty edge set.
struct DecodeOutcome {
    SymbolString message;
    bool valid = true;
};
using Decoder = std::function<DecodeOutcome(const SymbolString& rm)>;

Decoder make_exact_decoder(const TreeCode& tree, const Ratio& alpha);
// Ground-truth-assisted decoder; `counterpart` must outlive the decoder.
Decoder make_shortcut_decoder(const TreeCode& tree, const Ratio& alpha,
                              const PartyMachine& counterpart);
// Greedy best-child descent returning the suffix-distance minimizer along the
// descended path. A deterministic function of the received string alone, with
// d * |rm| distance evaluations per call; used where exhaustive minimization
// is intractable (heavily desynchronized strings) and decode quality is
// secondary, such as the paired-world attack demonstration.
Decoder make_greedy_decoder(const TreeCode& tree);

// The polynomial-alphabet tree for a config: a lazy 4(N+1)-ary depth-N code.
TreeCode make_poly_tree(const ProtocolConfig& config);

class PolyParty final : public PartyMachine {
public:
    PolyParty(PartyId id, const PjpInstance& instance, TreeCode tree,
              const ProtocolConfig& config, Decoder decoder);

    Symbol step(std::optional<Symbol> received) override;
    int round() const override { return round_; }
    const SymbolString& sent_message() const override { return sent_message_; }
    const StepInfo& last_step() const override { return info_; }
    std::optional<std::uint64_t> output() const override { return output_; }

    void set_decoder(Decoder decoder) { decoder_ = std::move(decoder); }
    const std::vector<std::optional<EdgeId>>& sent_edges() const { return sent_edges_; }
    const std::map<std::uint64_t, std::int64_t>& votes() const { return votes_; }

private:
    PartyId id_;
    PjpInstance instance_;
    TreeCode tree_;
    ProtocolConfig config_;
    Decoder decoder_;
    int round_ = 0;
    SymbolString received_;
    SymbolString sent_message_;
    std::vector<std::optional<EdgeId>> sent_edges_;
    std::map<EdgeId, int> first_sent_round_;
    std::map<std::uint64_t, std::int64_t> votes_;
    std::optional<std::uint64_t> output_;
    StepInfo info_;
};

} // namespace edcode
