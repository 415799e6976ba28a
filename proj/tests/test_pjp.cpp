#include <stdexcept>

#include <doctest.h>

#include "edcode/pjp.hpp"

using namespace edcode;

TEST_CASE("instance generation is deterministic and well-formed") {
    auto a = generate_instance(8, 42);
    auto b = generate_instance(8, 42);
    CHECK(a.choice == b.choice);
    CHECK(a.correct_path == b.correct_path);
    CHECK(a.correct_path.size() == 8);
    auto c = generate_instance(8, 43);
    CHECK(a.choice != c.choice);
    CHECK_THROWS_AS(generate_instance(3, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_instance(0, 1), std::invalid_argument);
}

TEST_CASE("correct path alternates ownership") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto inst = generate_instance(6, seed);
        std::uint64_t code = 0;
        for (std::size_t d = 1; d <= inst.correct_path.size(); ++d) {
            const std::uint8_t bit = inst.correct_path[d - 1];
            // Odd-depth edges leave even-depth vertices: Alice's map.
            CHECK(PjpInstance::alice_owns_edge_depth(d) == (d % 2 == 1));
            CHECK(inst.choice_at(static_cast<int>(d) - 1, code) == bit);
            code = code * 2 + bit;
        }
    }
}

TEST_CASE("noiseless reference reaches the forced leaf") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        for (int T : {2, 4, 10}) {
            auto inst = generate_instance(T, seed);
            CHECK(noiseless_reference(inst) == inst.correct_path);
        }
    }
}

TEST_CASE("all-left instance walks to the leftmost leaf") {
    auto inst = generate_instance(2, 0);
    for (auto& level : inst.choice)
        for (auto& bit : level) bit = 0;
    inst.correct_path = forced_path(inst);
    CHECK(noiseless_reference(inst) == std::vector<std::uint8_t>{0, 0});
}

TEST_CASE("grandchild index enumeration") {
    EdgeId root_edge{{0}};
    CHECK(grandchild_index(root_edge, EdgeId{{0, 0, 0}}) == 1);
    CHECK(grandchild_index(root_edge, EdgeId{{0, 0, 1}}) == 2);
    CHECK(grandchild_index(root_edge, EdgeId{{0, 1, 0}}) == 3);
    CHECK(grandchild_index(root_edge, EdgeId{{0, 1, 1}}) == 4);
    CHECK_THROWS_AS(grandchild_index(root_edge, EdgeId{{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(grandchild_index(root_edge, EdgeId{{1, 0, 0}}), std::invalid_argument);
}

TEST_CASE("resolve_grandchild inverts grandchild_index on all depth <= 6 pairs") {
    const int T = 6;
    // Enumerate all edges of depth <= 4 and all four grandchildren.
    std::vector<EdgeId> parents;
    for (int d = 1; d <= 4; ++d) {
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << d); ++code) {
            EdgeId e;
            for (int i = d - 1; i >= 0; --i)
                e.path.push_back(static_cast<std::uint8_t>((code >> i) & 1));
            parents.push_back(e);
        }
    }
    for (const auto& p : parents) {
        for (int s = 1; s <= 4; ++s) {
            EdgeId child = resolve_grandchild(p, s, T);
            CHECK(grandchild_index(p, child) == s);
        }
    }
    CHECK_THROWS_AS(resolve_grandchild(EdgeId{{0, 0, 0, 0, 0}}, 1, T),
                    std::invalid_argument);
}

TEST_CASE("rootless enumeration") {
    CHECK(resolve_grandchild(std::nullopt, 1, 4, 1) == EdgeId{{0}});
    CHECK(resolve_grandchild(std::nullopt, 2, 4, 1) == EdgeId{{1}});
    CHECK_THROWS_AS(resolve_grandchild(std::nullopt, 3, 4, 1), std::invalid_argument);
    CHECK(resolve_grandchild(std::nullopt, 1, 4, 2) == EdgeId{{0, 0}});
    CHECK(resolve_grandchild(std::nullopt, 4, 4, 2) == EdgeId{{1, 1}});
    CHECK_THROWS_AS(resolve_grandchild(std::nullopt, 5, 4, 2), std::invalid_argument);
    CHECK_THROWS_AS(resolve_grandchild(std::nullopt, 5, 4, 1), std::invalid_argument);
}

TEST_CASE("instance serialization round-trips bit-exactly") {
    for (std::uint64_t seed : {1ULL, 7ULL, 99ULL}) {
        auto inst = generate_instance(6, seed);
        auto text = serialize_instance(inst);
        auto back = parse_instance(text);
        CHECK(back.T == inst.T);
        CHECK(back.seed == inst.seed);
        CHECK(back.choice == inst.choice);
        CHECK(back.correct_path == inst.correct_path);
        CHECK(serialize_instance(back) == text);
    }
    CHECK_THROWS_AS(parse_instance("garbage"), std::invalid_argument);
    CHECK_THROWS_AS(parse_instance("2 0\n01\n1"), std::invalid_argument);
}
