#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace edcode {

// An edge of the complete binary tree of depth T, named by the bit path from
// the root to its lower endpoint; depth() is the edge's depth in [1, T].
struct EdgeId {
    std::vector<std::uint8_t> path;

    std::size_t depth() const { return path.size(); }
    friend bool operator==(const EdgeId&, const EdgeId&) = default;
    friend auto operator<=>(const EdgeId&, const EdgeId&) = default;
};

// A pointer-jumping instance: one forced outgoing edge per internal vertex,
// with even-depth vertices decided by Alice's map and odd-depth vertices by
// Bob's. The union of the two maps fixes a unique root-to-leaf path.
struct PjpInstance {
    int T = 0;
    std::uint64_t seed = 0;
    // choice[k][v] is the chosen child bit of the v-th vertex (big-endian
    // path code) at depth k, for k in [0, T).
    std::vector<std::vector<std::uint8_t>> choice;
    std::vector<std::uint8_t> correct_path;  // T bits

    std::uint8_t choice_at(int depth, std::uint64_t vertex_code) const {
        return choice[static_cast<std::size_t>(depth)][vertex_code];
    }
    // Alice's map covers even-depth vertices, so she owns odd-depth edges.
    static bool alice_owns_edge_depth(std::size_t edge_depth) {
        return edge_depth % 2 == 1;
    }
};

PjpInstance generate_instance(int T, std::uint64_t seed);

// Recomputes the forced path by walking the choice maps; throws
// std::invalid_argument on a malformed instance.
std::vector<std::uint8_t> forced_path(const PjpInstance& instance);

// T alternating rounds, each party revealing its next path edge; returns the
// reached leaf (as its full bit path).
std::vector<std::uint8_t> noiseless_reference(const PjpInstance& instance);

// s = 2*b1 + b2 + 1 where (b1, b2) are the two descent bits from parent to
// child; throws std::invalid_argument unless child is exactly two levels
// below parent on a common path.
int grandchild_index(const EdgeId& parent, const EdgeId& child);

// Inverse of grandchild_index. When parent is absent, `rootless_depth`
// selects the enumeration of a party's first sendable edges: depth 1 admits
// s in {1,2} (the two root edges), depth 2 admits s in [4] ((depth-1 vertex,
// child) pairs in lexicographic order). Throws std::invalid_argument on an
// out-of-range s or a depth overflow beyond T.
EdgeId resolve_grandchild(const std::optional<EdgeId>& parent, int s, int T,
                          int rootless_depth = 1);

// The joint-path walk both coding schemes perform each round: follow edges
// from the root using the party's own choice map plus the decoded edge set;
// stop when no edge continues, flag ambiguity when two distinct edges leave
// the same vertex.
struct PathWalk {
    std::vector<std::uint8_t> path_bits;
    bool unique = true;                // false on any branching conflict
    std::optional<EdgeId> deepest;     // last edge of the path, if any
    bool reaches_leaf = false;         // path length == T
};

PathWalk walk_unique_path(const PjpInstance& instance, bool own_side_is_alice,
                          const std::vector<EdgeId>& decoded_edges);

// Line-oriented text format: header "T seed", then Alice's and Bob's choice
// maps as level-order bit strings; bit-exact round trip.
std::string serialize_instance(const PjpInstance& instance);
PjpInstance parse_instance(const std::string& text);

} // namespace edcode
