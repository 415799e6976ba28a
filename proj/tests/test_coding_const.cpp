#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "edcode/channel.hpp"
#include "edcode/coding_const.hpp"
#include "edcode/pjp.hpp"
#include "edcode/tree_code.hpp"

using namespace edcode;

namespace {

struct ConstSession {
    std::unique_ptr<ConstParty> alice, bob;
    RunLog log;
};

ConstSession run_const(const ProtocolConfig& cfg, const PjpInstance& inst,
                       Adversary& adversary) {
    ConstSession s;
    const TreeCode tree = make_const_tree(cfg);
    s.alice = std::make_unique<ConstParty>(PartyId::alice, inst, tree, cfg, Decoder{});
    s.bob = std::make_unique<ConstParty>(PartyId::bob, inst, tree, cfg, Decoder{});
    s.alice->set_decoder(make_shortcut_decoder(tree, cfg.alpha, *s.bob));
    s.bob->set_decoder(make_shortcut_decoder(tree, cfg.alpha, *s.alice));
    s.log = run_session(*s.alice, *s.bob, adversary, cfg, inst);
    return s;
}

ProtocolConfig half_eps_config(int T, int N, const Ratio& rho, std::uint64_t seed) {
    return const_config_relaxed(T, N, Ratio{1, 2}, Ratio{1, 2}, rho, seed);
}

} // namespace

TEST_CASE("edge descriptions use 3 bits of s plus a minimal big-endian delta") {
    CHECK(encode_edge_description(0, 0) == BitString{0, 0, 0});
    CHECK(encode_edge_description(0, 3) == BitString{0, 1, 1});
    CHECK(encode_edge_description(5, 3) == BitString{0, 1, 1, 1, 0, 1});
    CHECK(encode_edge_description(1, 4) == BitString{1, 0, 0, 1});
    CHECK_THROWS_AS(encode_edge_description(-1, 1), std::invalid_argument);
    CHECK_THROWS_AS(encode_edge_description(0, 5), std::invalid_argument);
    CHECK_THROWS_AS(encode_edge_description(3, 0), std::invalid_argument);

    for (int delta = 0; delta <= 64; ++delta) {
        for (int s = delta == 0 ? 0 : 1; s <= 4; ++s) {
            const auto desc = decode_edge_description(encode_edge_description(delta, s));
            REQUIRE(desc.valid);
            CHECK(desc.delta == delta);
            CHECK(desc.s == s);
        }
    }
    CHECK_FALSE(decode_edge_description({0, 1}).valid);           // too short
    CHECK_FALSE(decode_edge_description({1, 0, 1}).valid);        // s = 5
    CHECK_FALSE(decode_edge_description({0, 1, 1, 0, 1}).valid);  // non-minimal delta
}

TEST_CASE("page packing follows the frozen wire layout") {
    const int C = 4;
    std::vector<SlotBits> slots(4);
    slots[0].payload = 1;
    slots[1].fully_sent = 1;
    slots[2].newly_added = 1;
    const Symbol value = pack_page(true, slots, C);
    CHECK(value == (1u | (1u << 1) | (1u << 7) | (1u << 12)));

    const auto [last, back] = unpack_page(value, C);
    CHECK(last);
    CHECK(back[0].payload == 1);
    CHECK(back[0].live_zero == 0);
    CHECK(back[1].fully_sent == 1);
    CHECK(back[2].newly_added == 1);
    CHECK(back[3].payload == 0);

    CHECK(pack_page(false, {}, C) == 0u);
    CHECK(pack_page(true, {}, C) == 1u);
    CHECK_THROWS_AS(pack_page(true, std::vector<SlotBits>(5), C),
                    std::invalid_argument);
    CHECK_THROWS_AS(pack_page(true, {}, 8), std::invalid_argument);
}

TEST_CASE("page emission spends one live point and one description bit per slot") {
    const int C = 4;
    EdgeTable table;
    auto describe_fixed = [](const EdgeId&) { return BitString{1, 0, 1, 1}; };
    update_table(table, EdgeId{{1}}, 2, 1, describe_fixed);
    REQUIRE(table.entries.size() == 1);
    CHECK(table.entries[0].live_points == 2);
    CHECK(table.entries[0].added_round == 1);

    bool full = false;
    std::vector<std::pair<EdgeId, int>> done;
    Symbol page = emit_page(table, 0, 1, 1, C, full, &done);
    CHECK_FALSE(full);
    CHECK(done.empty());
    CHECK(table.entries[0].sent_length == 1);
    CHECK(table.entries[0].live_points == 1);
    CHECK(table.entries[0].start_round == 1);
    CHECK_FALSE(table.entries[0].remove_flag);
    {
        const auto [last, slots] = unpack_page(page, C);
        CHECK(last);  // single page cycle
        CHECK(slots[0].payload == 1);
        CHECK(slots[0].newly_added == 1);
        CHECK(slots[0].live_zero == 0);
    }

    // Next cycle without a boost: the second bit starves the entry.
    page = emit_page(table, 0, 2, 2, C, full, &done);
    {
        const auto [last, slots] = unpack_page(page, C);
        CHECK(slots[0].payload == 0);
        CHECK(slots[0].live_zero == 1);
        CHECK(slots[0].fully_sent == 0);
        CHECK(slots[0].newly_added == 0);
    }
    CHECK(table.entries[0].remove_flag);
    update_table(table, std::nullopt, 2, 3, describe_fixed);
    CHECK(table.entries.empty());
    CHECK(table.pages_total(C) == 1);  // empty table still emits one page

    // Boosted every cycle, a four-bit description completes on round 4.
    for (int r = 3; r <= 6; ++r) {
        update_table(table, EdgeId{{1}}, 2, r, describe_fixed);
        emit_page(table, 0, r, r, C, full, &done);
    }
    REQUIRE(done.size() == 1);
    CHECK(done[0].first == EdgeId{{1}});
    CHECK(done[0].second == 4);
    CHECK(table.entries[0].remove_flag);
    CHECK(table.entries[0].start_round == 3);
    // Re-indicating the completed edge re-inserts it from scratch.
    update_table(table, EdgeId{{1}}, 2, 7, describe_fixed);
    REQUIRE(table.entries.size() == 1);
    CHECK(table.entries[0].sent_length == 0);
    CHECK(table.entries[0].added_round == 7);
}

TEST_CASE("five entries at capacity four give two pages with exactly one full") {
    const int C = 4;
    EdgeTable table;
    auto describe = [](const EdgeId& e) {
        return encode_edge_description(static_cast<int>(e.path.size()), 1);
    };
    std::vector<EdgeId> edges{EdgeId{{0}}, EdgeId{{0, 0}}, EdgeId{{0, 0, 0}},
                              EdgeId{{0, 1}}, EdgeId{{1}}};
    for (std::size_t i = 0; i < edges.size(); ++i)
        update_table(table, edges[i], 3, static_cast<int>(i) + 1, describe);
    REQUIRE(table.entries.size() == 5);
    CHECK(table.pages_total(C) == 2);

    bool full0 = false, full1 = false;
    const Symbol p0 = emit_page(table, 0, 6, 6, C, full0, nullptr);
    const Symbol p1 = emit_page(table, 1, 7, 6, C, full1, nullptr);
    CHECK(full0);
    CHECK_FALSE(full1);
    CHECK((p0 & 1u) == 0u);  // not the last page
    CHECK((p1 & 1u) == 1u);

    EdgeTable again;
    for (std::size_t i = 0; i < edges.size(); ++i)
        update_table(again, edges[i], 3, static_cast<int>(i) + 1, describe);
    const auto pages = cycle_emit(again, C, 6);
    REQUIRE(pages.size() == 2);
    CHECK(pages[0] == p0);
    CHECK(pages[1] == p1);
}

TEST_CASE("strict parameters follow the closed forms but are documentation-scale") {
    const auto cfg = const_config(4, Ratio{1, 36}, 5);
    CHECK(cfg.N == 4 * 1296);
    CHECK(cfg.alpha == Ratio{35, 36});
    CHECK(cfg.rho == Ratio{1, 36});  // 1/18 - 1/36
    CHECK(cfg.page_capacity == 1296);
    CHECK(cfg.live_boost == 36);
    CHECK(cfg.in_alphabet_size == 0);  // 5185-bit symbols are not materializable
    CHECK_THROWS_AS(make_const_tree(cfg), std::invalid_argument);
    CHECK_THROWS_AS(const_config(4, Ratio{1, 18}, 5), std::invalid_argument);

    const auto relaxed = half_eps_config(4, 32, Ratio{0, 1}, 5);
    CHECK(relaxed.page_capacity == 4);
    CHECK(relaxed.live_boost == 2);
    CHECK(relaxed.in_alphabet_size == 1u << 17);
    CHECK(relaxed.out_alphabet_size == 1u << 30);
    CHECK(relaxed.output_round == 32);
    CHECK_THROWS_AS(
        const_config_relaxed(4, 32, Ratio{1, 10}, Ratio{1, 2}, Ratio{0, 1}, 5),
        std::invalid_argument);  // 401-bit symbols
}

TEST_CASE("the receiver mirror reconstructs the sender table bit for bit") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const int T = 2 + 2 * static_cast<int>(seed % 4);
        const auto inst = generate_instance(T, seed * 17 + 3);
        const auto cfg = half_eps_config(T, 8 * T, Ratio{0, 1}, seed);
        auto adv = adversary_none();
        const auto s = run_const(cfg, inst, *adv);
        CAPTURE(seed);
        CAPTURE(T);

        for (const auto* party : {s.alice.get(), s.bob.get()}) {
            const bool is_alice = party == s.alice.get();
            const MirrorTable mirror =
                mirror_apply(party->sent_message(), cfg, is_alice);
            REQUIRE(mirror.valid);

            // Completion instances, in order, match the sender's own log.
            std::vector<EdgeId> sender_completions;
            for (const auto& ev : s.log.events) {
                if ((ev.party == PartyId::alice) != is_alice) continue;
                for (const auto& [edge, len] : ev.info.progress_edges)
                    sender_completions.push_back(edge);
            }
            CHECK(mirror.completed_edges == sender_completions);

            // First-completion start rounds agree with the sender's pointers.
            for (const auto& [edge, start] : party->completed_start_rounds()) {
                REQUIRE(mirror.completed_by_start.count(start));
                CHECK(mirror.completed_by_start.at(start) == edge);
            }

            // Every prefix of an honest transmission parses cleanly.
            for (std::size_t len = 0; len <= party->sent_message().size(); ++len) {
                const SymbolString prefix(party->sent_message().begin(),
                                          party->sent_message().begin() +
                                              static_cast<std::ptrdiff_t>(len));
                CHECK(mirror_apply(prefix, cfg, is_alice).valid);
            }

            // Live points never go negative.
            for (const auto& entry : party->table().entries)
                CHECK(entry.live_points >= 0);
        }
    }
}

TEST_CASE("malformed page streams are rejected as a whole") {
    const auto inst = generate_instance(2, 11);
    const auto cfg = half_eps_config(2, 16, Ratio{0, 1}, 11);
    auto adv = adversary_none();
    const auto s = run_const(cfg, inst, *adv);
    const SymbolString& msg = s.alice->sent_message();
    REQUIRE(mirror_apply(msg, cfg, true).valid);

    // A payload bit in a padding slot.
    SymbolString bad = msg;
    bad[0] |= 1u << 13;  // slot 3 payload
    CHECK_FALSE(mirror_apply(bad, cfg, true).valid);

    // A newly_added flag on a slot that predates the cycle.
    bad = msg;
    bad[1] |= 1u << 4;  // slot 0 newly_added
    CHECK_FALSE(mirror_apply(bad, cfg, true).valid);

    // Clearing the last-page flag of a structurally final page without a
    // follow-up new edge.
    bad = msg;
    REQUIRE((bad[0] & 1u) == 1u);
    bad[0] &= ~1u;
    CHECK_FALSE(mirror_apply(bad, cfg, true).valid);
}

TEST_CASE("noiseless sessions decode the common leaf for realistic lengths") {
    for (const int T : {2, 4, 8}) {
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            const auto inst = generate_instance(T, seed * 13 + 1);
            const auto cfg = half_eps_config(T, 8 * T, Ratio{0, 1}, seed + 9);
            auto adv = adversary_none();
            const auto s = run_const(cfg, inst, *adv);
            const auto rep = analyze_log(s.log);
            CAPTURE(T);
            CAPTURE(seed);
            CHECK(rep.l_final == T);
            CHECK(rep.output_correct_a);
            CHECK(rep.output_correct_b);
            CHECK(rep.good_bound_ok_a);
            CHECK(rep.good_bound_ok_b);
            CHECK(rep.milestone_bound_ok);
            CHECK(rep.full_page_bound_ok);
            CHECK(rep.description_sum_ok);
            CHECK(rep.budget_identities_ok);
        }
    }
}

TEST_CASE("trace inequalities hold under random and burst adversaries") {
    const int T = 4;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto inst = generate_instance(T, seed + 200);
        const auto cfg = half_eps_config(T, 48, Ratio{1, 12}, seed);
        CAPTURE(seed);
        for (int variant = 0; variant < 3; ++variant) {
            std::unique_ptr<Adversary> adv;
            switch (variant) {
                case 0:
                    adv = adversary_random(0.25, seed * 11 + 3, cfg.out_alphabet_size);
                    break;
                case 1:
                    adv = adversary_burst(4 + static_cast<int>(seed % 6), 5,
                                          ActionKind::substitute,
                                          cfg.out_alphabet_size);
                    break;
                default:
                    adv = adversary_burst(5, 5, ActionKind::out_of_sync,
                                          cfg.out_alphabet_size);
                    break;
            }
            CAPTURE(variant);
            const auto s = run_const(cfg, inst, *adv);
            const auto rep = analyze_log(s.log);
            CHECK(rep.budget_identities_ok);
            CHECK(rep.good_bound_ok_a);
            CHECK(rep.good_bound_ok_b);
            CHECK(rep.milestone_bound_ok);
            CHECK(rep.full_page_bound_ok);
            CHECK(rep.description_sum_ok);
        }
    }
}

TEST_CASE("constant-scheme sessions are deterministic") {
    const auto inst = generate_instance(4, 31);
    const auto cfg = half_eps_config(4, 40, Ratio{1, 10}, 8);
    std::string first, second;
    for (auto* out : {&first, &second}) {
        auto adv = adversary_random(0.35, 4321, cfg.out_alphabet_size);
        *out = serialize_runlog(run_const(cfg, inst, *adv).log);
    }
    CHECK(first == second);
}
