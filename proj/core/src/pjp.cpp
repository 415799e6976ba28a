#include "edcode/pjp.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "edcode/util.hpp"

namespace edcode {

PjpInstance generate_instance(int T, std::uint64_t seed) {
    if (T < 2 || T % 2 != 0) throw std::invalid_argument("T must be even and >= 2");
    if (T > 24) throw std::invalid_argument("explicit choice maps capped at T <= 24");
    PjpInstance inst;
    inst.T = T;
    inst.seed = seed;
    Rng rng(seed);
    inst.choice.resize(static_cast<std::size_t>(T));
    for (int k = 0; k < T; ++k) {
        auto& level = inst.choice[static_cast<std::size_t>(k)];
        level.resize(std::size_t{1} << k);
        for (auto& bit : level) bit = static_cast<std::uint8_t>(rng.below(2));
    }
    inst.correct_path = forced_path(inst);
    return inst;
}

std::vector<std::uint8_t> forced_path(const PjpInstance& inst) {
    if (inst.T <= 0 || inst.choice.size() != static_cast<std::size_t>(inst.T))
        throw std::invalid_argument("malformed instance");
    std::vector<std::uint8_t> path;
    std::uint64_t code = 0;
    for (int k = 0; k < inst.T; ++k) {
        const auto& level = inst.choice[static_cast<std::size_t>(k)];
        if (level.size() != (std::size_t{1} << k) || code >= level.size())
            throw std::invalid_argument("malformed instance");
        const std::uint8_t bit = level[code];
        if (bit > 1) throw std::invalid_argument("malformed instance");
        path.push_back(bit);
        code = code * 2 + bit;
    }
    return path;
}

std::vector<std::uint8_t> noiseless_reference(const PjpInstance& inst) {
    std::vector<std::uint8_t> path;
    std::uint64_t code = 0;
    for (int round = 1; round <= inst.T; ++round) {
        // Round `round` reveals the edge leaving the depth-(round-1) vertex;
        // Alice speaks on odd rounds, Bob on even rounds.
        const int vertex_depth = round - 1;
        const std::uint8_t bit = inst.choice_at(vertex_depth, code);
        path.push_back(bit);
        code = code * 2 + bit;
    }
    return path;
}

int grandchild_index(const EdgeId& parent, const EdgeId& child) {
    if (child.path.size() != parent.path.size() + 2)
        throw std::invalid_argument("not a grandchild: depth mismatch");
    for (std::size_t i = 0; i < parent.path.size(); ++i)
        if (child.path[i] != parent.path[i])
            throw std::invalid_argument("not a grandchild: path mismatch");
    const int b1 = child.path[child.path.size() - 2];
    const int b2 = child.path[child.path.size() - 1];
    return 2 * b1 + b2 + 1;
}

EdgeId resolve_grandchild(const std::optional<EdgeId>& parent, int s, int T,
                          int rootless_depth) {
    if (parent.has_value()) {
        if (s < 1 || s > 4) throw std::invalid_argument("grandchild index out of range");
        if (parent->path.size() + 2 > static_cast<std::size_t>(T))
            throw std::invalid_argument("grandchild depth exceeds T");
        EdgeId child = *parent;
        child.path.push_back(static_cast<std::uint8_t>((s - 1) >> 1));
        child.path.push_back(static_cast<std::uint8_t>((s - 1) & 1));
        return child;
    }
    if (rootless_depth == 1) {
        if (s < 1 || s > 2) throw std::invalid_argument("rootless depth-1 index out of range");
        if (T < 1) throw std::invalid_argument("depth overflow");
        return EdgeId{{static_cast<std::uint8_t>(s - 1)}};
    }
    if (rootless_depth == 2) {
        if (s < 1 || s > 4) throw std::invalid_argument("rootless depth-2 index out of range");
        if (T < 2) throw std::invalid_argument("depth overflow");
        return EdgeId{{static_cast<std::uint8_t>((s - 1) >> 1),
                       static_cast<std::uint8_t>((s - 1) & 1)}};
    }
    throw std::invalid_argument("rootless depth must be 1 or 2");
}

PathWalk walk_unique_path(const PjpInstance& inst, bool own_side_is_alice,
                          const std::vector<EdgeId>& decoded_edges) {
    PathWalk walk;
    std::uint64_t code = 0;
    while (walk.path_bits.size() < static_cast<std::size_t>(inst.T)) {
        const int vertex_depth = static_cast<int>(walk.path_bits.size());
        const std::size_t edge_depth = walk.path_bits.size() + 1;
        unsigned candidates = 0;  // bitmask over child bits {0,1}
        if (PjpInstance::alice_owns_edge_depth(edge_depth) == own_side_is_alice)
            candidates |= 1u << inst.choice_at(vertex_depth, code);
        for (const auto& e : decoded_edges) {
            if (e.path.size() != edge_depth) continue;
            if (std::equal(walk.path_bits.begin(), walk.path_bits.end(), e.path.begin()))
                candidates |= 1u << e.path.back();
        }
        if (candidates == 0) break;
        if (candidates == 3) {
            walk.unique = false;
            break;
        }
        const std::uint8_t bit = candidates == 2 ? 1 : 0;
        walk.path_bits.push_back(bit);
        code = code * 2 + bit;
    }
    if (!walk.path_bits.empty()) walk.deepest = EdgeId{walk.path_bits};
    walk.reaches_leaf =
        walk.unique && walk.path_bits.size() == static_cast<std::size_t>(inst.T);
    return walk;
}

std::string serialize_instance(const PjpInstance& inst) {
    std::ostringstream out;
    out << inst.T << ' ' << inst.seed << '\n';
    for (int parity = 0; parity < 2; ++parity) {
        for (int k = parity; k < inst.T; k += 2)
            for (auto bit : inst.choice[static_cast<std::size_t>(k)])
                out << static_cast<int>(bit);
        out << '\n';
    }
    return out.str();
}

PjpInstance parse_instance(const std::string& text) {
    std::istringstream in(text);
    PjpInstance inst;
    if (!(in >> inst.T >> inst.seed)) throw std::invalid_argument("bad instance header");
    if (inst.T < 2 || inst.T % 2 != 0 || inst.T > 24)
        throw std::invalid_argument("bad instance header");
    inst.choice.resize(static_cast<std::size_t>(inst.T));
    for (int k = 0; k < inst.T; ++k)
        inst.choice[static_cast<std::size_t>(k)].resize(std::size_t{1} << k);
    for (int parity = 0; parity < 2; ++parity) {
        std::string bits;
        if (!(in >> bits)) throw std::invalid_argument("missing choice map");
        std::size_t pos = 0;
        for (int k = parity; k < inst.T; k += 2) {
            for (auto& bit : inst.choice[static_cast<std::size_t>(k)]) {
                if (pos >= bits.size() || (bits[pos] != '0' && bits[pos] != '1'))
                    throw std::invalid_argument("bad choice map");
                bit = static_cast<std::uint8_t>(bits[pos++] - '0');
            }
        }
        if (pos != bits.size()) throw std::invalid_argument("bad choice map length");
    }
    inst.correct_path = forced_path(inst);
    return inst;
}

} // namespace edcode
