#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "edcode/channel.hpp"
#include "edcode/coding_poly.hpp"
#include "edcode/pjp.hpp"
#include "edcode/tree_code.hpp"

using namespace edcode;

namespace {

std::uint64_t leaf_code(const std::vector<std::uint8_t>& path) {
    std::uint64_t code = 0;
    for (auto bit : path) code = code * 2 + bit;
    return code;
}

struct PolySession {
    std::unique_ptr<PolyParty> alice, bob;
    RunLog log;
};

PolySession run_poly(const ProtocolConfig& cfg, const PjpInstance& inst,
                     Adversary& adversary) {
    PolySession s;
    const TreeCode tree = make_poly_tree(cfg);
    s.alice = std::make_unique<PolyParty>(PartyId::alice, inst, tree, cfg, Decoder{});
    s.bob = std::make_unique<PolyParty>(PartyId::bob, inst, tree, cfg, Decoder{});
    if (cfg.decoder_exact) {
        s.alice->set_decoder(make_exact_decoder(tree, cfg.alpha));
        s.bob->set_decoder(make_exact_decoder(tree, cfg.alpha));
    } else {
        s.alice->set_decoder(make_shortcut_decoder(tree, cfg.alpha, *s.bob));
        s.bob->set_decoder(make_shortcut_decoder(tree, cfg.alpha, *s.alice));
    }
    s.log = run_session(*s.alice, *s.bob, adversary, cfg, inst);
    return s;
}

} // namespace

TEST_CASE("input symbol packing round-trips and flags out-of-range values") {
    for (int n = 0; n <= 20; ++n) {
        for (int s = 1; s <= 4; ++s) {
            const PolySymbol sym{n, s};
            const PolySymbol back = poly_unpack(poly_pack(sym));
            CHECK(back.n == n);
            CHECK(back.s == s);
        }
    }
    CHECK_THROWS_AS(poly_pack({0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(poly_pack({0, 5}), std::invalid_argument);
    CHECK(poly_in_alphabet(16) == 68);
}

TEST_CASE("strict config follows the closed-form parameters") {
    const auto cfg = poly_config(16, Ratio{1, 32}, 0, 7);
    CHECK(cfg.N == 32);
    CHECK(cfg.alpha == Ratio{31, 32});
    CHECK(cfg.rho == Ratio{7, 288});  // 1/18 - 1/32
    CHECK(cfg.in_alphabet_size == 4 * 33);
    CHECK(cfg.output_round == 31);  // ceil(32 * (1 - 7/144))
    CHECK_THROWS_AS(poly_config(16, Ratio{1, 18}, 0, 7), std::invalid_argument);
    CHECK_THROWS_AS(poly_config(16, Ratio{1, 10}, 0, 7), std::invalid_argument);

    // eps -> 1/18 drives rho to 0.
    CHECK(poly_config(16, Ratio{999, 18000}, 0, 7).rho.num > 0);
    CHECK(poly_config(16, Ratio{999, 18000}, 0, 7).rho < Ratio{1, 1000});
}

TEST_CASE("the relaxed-mode noise bound solves the guarantee inequality") {
    // 16*rho/alpha + 2*rho = 1 at rho = alpha/(16+2*alpha); alpha = 1/2
    // gives 1/34.
    CHECK(poly_rho_bound(Ratio{1, 2}) == Ratio{1, 34});
    CHECK(poly_rho_bound(Ratio{1, 1}) == Ratio{1, 18});
    CHECK_NOTHROW(
        poly_config_relaxed(4, 16, Ratio{1, 2}, Ratio{1, 35}, 0, 1, true));
    CHECK_THROWS_AS(
        poly_config_relaxed(4, 16, Ratio{1, 2}, Ratio{1, 34}, 0, 1, true),
        std::invalid_argument);
}

TEST_CASE("message resolution follows the pointer chain and rejects bad pointers") {
    const int N = 10, T = 4;
    // Alice as sender: round 1 names root edge 1 (s=2), round 2 points back
    // to round 1 with grandchild s=3 -> edge 110.
    SymbolString msg{poly_pack({0, 2}), poly_pack({1, 3})};
    auto res = resolve_poly_message(msg, N, T, true);
    REQUIRE(res.valid);
    REQUIRE(res.edges.size() == 2);
    CHECK(res.edges[0] == EdgeId{{1}});
    CHECK(res.edges[1] == EdgeId{{1, 1, 0}});

    // Empty symbols resolve to no edge but keep the chain aligned.
    SymbolString with_empty{poly_pack({0, 1}), poly_pack({N, 1}), poly_pack({1, 2})};
    res = resolve_poly_message(with_empty, N, T, true);
    REQUIRE(res.valid);
    REQUIRE(res.edges.size() == 2);
    CHECK(res.edges[1] == EdgeId{{0, 0, 1}});

    // Bob as sender starts at depth 2.
    res = resolve_poly_message({poly_pack({0, 4})}, N, T, false);
    REQUIRE(res.valid);
    CHECK(res.edges == std::vector<EdgeId>{EdgeId{{1, 1}}});

    // Forward pointer (n >= own position) invalidates the whole message.
    CHECK_FALSE(resolve_poly_message({poly_pack({1, 1})}, N, T, true).valid);
    CHECK_FALSE(
        resolve_poly_message({poly_pack({0, 1}), poly_pack({2, 1})}, N, T, true).valid);
    // Pointer to an empty slot.
    CHECK_FALSE(
        resolve_poly_message({poly_pack({N, 1}), poly_pack({1, 1})}, N, T, true).valid);
    // Rootless s out of range for Alice (depth 1 has only two edges).
    CHECK_FALSE(resolve_poly_message({poly_pack({0, 3})}, N, T, true).valid);
    // Depth overflow beyond T.
    SymbolString deep{poly_pack({0, 1}), poly_pack({1, 1}), poly_pack({2, 1})};
    CHECK_FALSE(resolve_poly_message(deep, N, T, true).valid);
    // Pointer beyond N.
    CHECK_FALSE(resolve_poly_message({poly_pack({N + 1, 1})}, N, T, true).valid);
}

TEST_CASE("a scripted invalid decode yields the empty-edge reply") {
    const auto inst = generate_instance(4, 42);
    const auto cfg = poly_config_relaxed(4, 10, Ratio{1, 2}, Ratio{0, 1}, 0, 5);
    const TreeCode tree = make_poly_tree(cfg);
    // Decoder claiming Alice pointed at a future round: whole message invalid.
    PolyParty bob(PartyId::bob, inst, tree, cfg,
                  [](const SymbolString&) -> DecodeOutcome {
                      return {{poly_pack({7, 1})}, true};
                  });
    bob.step(Symbol{3});
    CHECK_FALSE(bob.last_step().decode_valid);
    REQUIRE(bob.sent_edges().size() == 1);
    CHECK_FALSE(bob.sent_edges()[0].has_value());
    CHECK(poly_unpack(bob.sent_message()[0]).n == cfg.N);
}

TEST_CASE("noiseless single steps extend the joint path edge by edge") {
    const auto inst = generate_instance(4, 9);
    const auto cfg = poly_config_relaxed(4, 12, Ratio{1, 2}, Ratio{0, 1}, 0, 3);
    auto adv = adversary_none();
    const auto s = run_poly(cfg, inst, *adv);

    const auto& path = inst.correct_path;
    // Alice sends path edges 1,3 on her first rounds, Bob edges 2,4.
    const auto& ea = s.alice->sent_edges();
    const auto& eb = s.bob->sent_edges();
    REQUIRE(ea.size() >= 3);
    REQUIRE(eb.size() >= 2);
    CHECK(ea[0] == EdgeId{{path[0]}});
    CHECK(eb[0] == EdgeId{{path[0], path[1]}});
    CHECK(ea[1] == EdgeId{{path[0], path[1], path[2]}});
    CHECK(eb[1] == EdgeId{{path[0], path[1], path[2], path[3]}});

    const auto rep = analyze_log(s.log);
    CHECK(rep.l_final == 4);
    CHECK(rep.milestones == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(rep.g_a == cfg.N);
    CHECK(rep.g_b == cfg.N);
    CHECK(rep.good_bound_ok_a);
    CHECK(rep.good_bound_ok_b);
    CHECK(rep.milestone_bound_ok);
    CHECK(rep.budget_identities_ok);
    CHECK(rep.output_correct_a);
    CHECK(rep.output_correct_b);
    CHECK(*s.alice->output() == leaf_code(path));
    CHECK(*s.bob->output() == leaf_code(path));
}

TEST_CASE("noiseless end-to-end runs decode correctly with both decoders") {
    for (const int T : {2, 4}) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const auto inst = generate_instance(T, seed * 31 + 5);
            // Exact decoding (N <= 12).
            {
                const auto cfg = poly_config_relaxed(T, 3 * T, Ratio{1, 2},
                                                     Ratio{0, 1}, 0, seed);
                REQUIRE(cfg.decoder_exact);
                auto adv = adversary_none();
                const auto rep = analyze_log(run_poly(cfg, inst, *adv).log);
                CHECK(rep.output_correct_a);
                CHECK(rep.output_correct_b);
            }
            // Shortcut decoding (N > 12).
            {
                const auto cfg = poly_config_relaxed(T, 13, Ratio{1, 2},
                                                     Ratio{0, 1}, 0, seed);
                REQUIRE_FALSE(cfg.decoder_exact);
                auto adv = adversary_none();
                const auto rep = analyze_log(run_poly(cfg, inst, *adv).log);
                CHECK(rep.output_correct_a);
                CHECK(rep.output_correct_b);
            }
        }
    }
}

TEST_CASE("trace inequalities hold under random and burst adversaries") {
    const int T = 4;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const auto inst = generate_instance(T, seed + 100);
        const auto cfg = poly_config_relaxed(T, 24, Ratio{1, 2}, Ratio{1, 8}, 0, seed);
        CAPTURE(seed);

        for (int variant = 0; variant < 3; ++variant) {
            std::unique_ptr<Adversary> adv;
            switch (variant) {
                case 0:
                    adv = adversary_random(0.3, seed * 7 + 1, cfg.out_alphabet_size);
                    break;
                case 1:
                    adv = adversary_burst(2 + static_cast<int>(seed % 5), 4,
                                          ActionKind::substitute,
                                          cfg.out_alphabet_size);
                    break;
                default:
                    adv = adversary_burst(3, 4, ActionKind::out_of_sync,
                                          cfg.out_alphabet_size);
                    break;
            }
            CAPTURE(variant);
            const auto s = run_poly(cfg, inst, *adv);
            const auto rep = analyze_log(s.log);
            CHECK(rep.budget_identities_ok);
            CHECK(rep.good_bound_ok_a);
            CHECK(rep.good_bound_ok_b);
            CHECK(rep.milestone_bound_ok);
        }
    }
}

TEST_CASE("party machines are deterministic given the received sequence") {
    const auto inst = generate_instance(4, 77);
    const auto cfg = poly_config_relaxed(4, 16, Ratio{1, 2}, Ratio{1, 8}, 0, 2);
    std::string first, second;
    for (auto* out : {&first, &second}) {
        auto adv = adversary_random(0.4, 1234, cfg.out_alphabet_size);
        *out = serialize_runlog(run_poly(cfg, inst, *adv).log);
    }
    CHECK(first == second);
}
