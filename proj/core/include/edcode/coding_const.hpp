#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "edcode/channel.hpp"
#include "edcode/coding_poly.hpp"  // Decoder / DecodeOutcome plumbing
#include "edcode/pjp.hpp"
#include "edcode/tree_code.hpp"

namespace edcode {

using BitString = std::vector<std::uint8_t>;

// Varying-length edge encoding: 3 bits for s in {0}..4 (0 with delta 0 is the
// empty edge) followed by the minimal big-endian binary of delta = i - n
// (no bits when delta = 0). Total length <= ceil(log2(delta+1)) + 3.
BitString encode_edge_description(int delta, int s);
struct EdgeDescription {
    int delta = 0;
    int s = 0;
    bool valid = false;  // false on non-minimal delta bits or s > 4
};
EdgeDescription decode_edge_description(const BitString& bits);

// One transmission attempt of an edge. start_round is the sender round in
// which the first description bit went out (-1 until then); remove_flag is
// set once a live_zero or fully_sent flag has been transmitted, and the
// entry is dropped at the next cycle boundary.
struct EdgeEntry {
    EdgeId edge;
    BitString description;
    int sent_length = 0;
    std::int64_t live_points = 0;
    int added_round = 0;
    int start_round = -1;
    bool remove_flag = false;
};

struct EdgeTable {
    std::vector<EdgeEntry> entries;
    int pages_total(int page_capacity) const {
        const int n = static_cast<int>(entries.size());
        return n == 0 ? 1 : (n + page_capacity - 1) / page_capacity;
    }
    std::int64_t live_points_sum() const {
        std::int64_t sum = 0;
        for (const auto& e : entries) sum += e.live_points;
        return sum;
    }
};

// Emits one page: per occupied slot the next unsent description bit plus the
// live_zero / fully_sent / newly_added flags, with per-bit live-point and
// sent-length accounting; unoccupied slots are zero-filled. `cycle_round`
// is the round the current cycle started (for the newly_added flag).
// Completions of this page are appended to `completions` when non-null.
Symbol emit_page(EdgeTable& table, int page_idx, int round, int cycle_round,
                 int page_capacity, bool& full_page,
                 std::vector<std::pair<EdgeId, int>>* completions);

// Runs a whole cycle over a table snapshot, one page per round starting at
// `start_round`; the table's cycle is assumed to have started at start_round.
std::vector<Symbol> cycle_emit(EdgeTable& table, int page_capacity, int start_round);

// Cycle-boundary maintenance: drop entries whose removal flag was
// transmitted, then boost the indicated edge or insert it fresh (live points
// = live_boost, description built by `describe`). Empty indication performs
// the removals only.
void update_table(EdgeTable& table, const std::optional<EdgeId>& edge, int live_boost,
                  int round, const std::function<BitString(const EdgeId&)>& describe);

// Receiver-side reconstruction of the sender's table from a decoded message
// prefix; parsed from scratch on every decode.
struct MirrorSlot {
    BitString bits;
    int start_round = -1;
    int insert_round = 0;
    bool remove_after_cycle = false;
    bool completed = false;
    std::optional<EdgeId> edge;  // set when completed and resolvable
};

struct MirrorTable {
    std::vector<MirrorSlot> slots;             // live slots, sender table order
    std::vector<EdgeId> completed_edges;       // E(d), completion order
    std::map<int, EdgeId> completed_by_start;  // start round -> edge
    bool valid = true;                         // false on any malformed page
    int cycles_completed = 0;
};

MirrorTable mirror_apply(const SymbolString& decoded, const ProtocolConfig& config,
                         bool sender_is_alice);

// Page wire layout (frozen): bit 0 = last_page flag; slot j occupies bits
// 1+4j..4+4j as (payload, live_zero, fully_sent, newly_added).
struct SlotBits {
    std::uint8_t payload = 0, live_zero = 0, fully_sent = 0, newly_added = 0;
};
Symbol pack_page(bool last_page, const std::vector<SlotBits>& slots, int page_capacity);
std::pair<bool, std::vector<SlotBits>> unpack_page(Symbol value, int page_capacity);

// Strict parameters: N = ceil(T/eps^2), alpha = 1 - eps, rho = 1/18 - eps,
// page_capacity = ceil(1/eps^2), live_boost = ceil(1/eps). Page symbols wider
// than 31 bits are not materializable; such configs carry in_alphabet_size 0
// and cannot be run (strict-regime constants are documentation-scale only).
ProtocolConfig const_config(int T, const Ratio& eps, std::uint64_t tree_seed);
ProtocolConfig const_config_relaxed(int T, int N, const Ratio& eps, const Ratio& alpha,
                                    const Ratio& rho, std::uint64_t tree_seed);

TreeCode make_const_tree(const ProtocolConfig& config);

class ConstParty final : public PartyMachine {
public:
    ConstParty(PartyId id, const PjpInstance& instance, TreeCode tree,
               const ProtocolConfig& config, Decoder decoder);

    Symbol step(std::optional<Symbol> received) override;
    int round() const override { return round_; }
    const SymbolString& sent_message() const override { return sent_message_; }
    const StepInfo& last_step() const override { return info_; }
    std::optional<std::uint64_t> output() const override { return output_; }

    void set_decoder(Decoder decoder) { decoder_ = std::move(decoder); }
    const EdgeTable& table() const { return table_; }
    int pages_total() const { return pages_total_; }
    int page_index() const { return page_idx_; }
    int cycle_first_round() const { return cycle_first_round_; }
    const std::map<std::uint64_t, std::int64_t>& votes() const { return votes_; }
    // First completed transmission start round per edge (pointer targets).
    const std::map<EdgeId, int>& completed_start_rounds() const {
        return completed_start_;
    }

private:
    PartyId id_;
    PjpInstance instance_;
    TreeCode tree_;
    ProtocolConfig config_;
    Decoder decoder_;
    int round_ = 0;
    SymbolString received_;
    SymbolString sent_message_;
    EdgeTable table_;
    int pages_total_ = 1;
    int page_idx_ = 0;  // next page to emit within the current cycle
    int cycle_first_round_ = 1;
    std::map<EdgeId, int> completed_start_;
    std::map<std::uint64_t, std::int64_t> votes_;
    std::optional<std::uint64_t> output_;
    StepInfo info_;
};

} // namespace edcode
