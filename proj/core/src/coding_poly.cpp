#include "edcode/coding_poly.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace edcode {

namespace {

std::uint64_t leaf_code(const std::vector<std::uint8_t>& path) {
    std::uint64_t code = 0;
    for (auto bit : path) code = code * 2 + bit;
    return code;
}

int ceil_div(std::int64_t num, std::int64_t den) {
    return static_cast<int>((num + den - 1) / den);
}

int output_deadline(int N, const Ratio& rho) {
    // ceil(N * (1 - 2*rho))
    const std::int64_t num = static_cast<std::int64_t>(N) * (rho.den - 2 * rho.num);
    return ceil_div(num, rho.den);
}

// Default output alphabet: the cube of the arity, so that same-length
// codeword collisions (which would let the exact decoder tie onto an
// impostor message) have probability about d^-2 per node.
std::uint32_t auto_out_alphabet(std::uint32_t in_size, std::uint32_t requested) {
    if (requested != 0) return requested;
    const std::uint64_t cube =
        static_cast<std::uint64_t>(in_size) * in_size * in_size;
    return static_cast<std::uint32_t>(
        std::min<std::uint64_t>(cube, std::uint64_t{1} << 30));
}

} // namespace

Symbol poly_pack(const PolySymbol& sym) {
    if (sym.n < 0 || sym.s < 1 || sym.s > 4)
        throw std::invalid_argument("poly symbol out of range");
    return static_cast<Symbol>(sym.n) * 4u + static_cast<Symbol>(sym.s - 1);
}

PolySymbol poly_unpack(Symbol value) {
    return {static_cast<int>(value / 4u), static_cast<int>(value % 4u) + 1};
}

Ratio poly_rho_bound(const Ratio& alpha) {
    return Ratio{alpha.num, 16 * alpha.den + 2 * alpha.num}.reduced();
}

ProtocolConfig poly_config(int T, const Ratio& eps, std::uint32_t out_alphabet_size,
                           std::uint64_t tree_seed) {
    if (eps.num <= 0 || eps.den <= 0 || 18 * eps.num >= eps.den)
        throw std::invalid_argument("eps must satisfy 0 < eps < 1/18");
    ProtocolConfig cfg;
    cfg.kind = ProtocolKind::poly;
    cfg.T = T;
    cfg.N = ceil_div(static_cast<std::int64_t>(T) * eps.den, 16 * eps.num);
    cfg.alpha = Ratio{eps.den - eps.num, eps.den}.reduced();
    cfg.rho = Ratio{eps.den - 18 * eps.num, 18 * eps.den}.reduced();
    cfg.eps = eps;
    cfg.output_round = output_deadline(cfg.N, cfg.rho);
    cfg.in_alphabet_size = poly_in_alphabet(cfg.N);
    cfg.out_alphabet_size = auto_out_alphabet(cfg.in_alphabet_size, out_alphabet_size);
    cfg.tree_seed = tree_seed;
    cfg.decoder_exact = cfg.N <= 12;
    return cfg;
}

ProtocolConfig poly_config_relaxed(int T, int N, const Ratio& alpha, const Ratio& rho,
                                   std::uint32_t out_alphabet_size,
                                   std::uint64_t tree_seed, bool require_guarantee) {
    if (T < 2 || N < 1) throw std::invalid_argument("bad T or N");
    if (rho.num < 0 || 2 * rho.num > rho.den)
        throw std::invalid_argument("rho must lie in [0, 1/2]");
    if (require_guarantee && !(rho < poly_rho_bound(alpha)))
        throw std::invalid_argument("rho violates the guarantee inequality");
    ProtocolConfig cfg;
    cfg.kind = ProtocolKind::poly;
    cfg.T = T;
    cfg.N = N;
    cfg.alpha = alpha;
    cfg.rho = rho;
    cfg.eps = Ratio{alpha.den - alpha.num, alpha.den}.reduced();
    cfg.output_round = output_deadline(N, rho);
    cfg.in_alphabet_size = poly_in_alphabet(N);
    cfg.out_alphabet_size = auto_out_alphabet(cfg.in_alphabet_size, out_alphabet_size);
    cfg.tree_seed = tree_seed;
    cfg.decoder_exact = N <= 12;
    return cfg;
}

EdgeResolution resolve_poly_message(const SymbolString& message, int N, int T,
                                    bool sender_is_alice) {
    EdgeResolution res;
    res.per_round.reserve(message.size());
    for (std::size_t k = 0; k < message.size(); ++k) {
        const PolySymbol sym = poly_unpack(message[k]);
        if (sym.n > N) {
            res.valid = false;
            break;
        }
        if (sym.n == N) {  // empty edge, any s
            res.per_round.emplace_back(std::nullopt);
            continue;
        }
        EdgeId edge;
        try {
            if (sym.n == 0) {
                // The sender's first sendable edges: depth 1 for Alice (odd
                // depths), depth 2 for Bob.
                edge = resolve_grandchild(std::nullopt, sym.s, T,
                                          sender_is_alice ? 1 : 2);
            } else {
                // Pointer to one of the sender's earlier rounds (1-based);
                // it must precede this symbol and hold a non-empty edge.
                if (sym.n > static_cast<int>(k)) {
                    res.valid = false;
                    break;
                }
                const auto& parent = res.per_round[static_cast<std::size_t>(sym.n) - 1];
                if (!parent) {
                    res.valid = false;
                    break;
                }
                edge = resolve_grandchild(parent, sym.s, T);
            }
        } catch (const std::invalid_argument&) {
            res.valid = false;
            break;
        }
        res.per_round.emplace_back(edge);
        res.edges.push_back(std::move(edge));
    }
    if (!res.valid) res.edges.clear();
    return res;
}

Decoder make_exact_decoder(const TreeCode& tree, const Ratio& alpha) {
    return [tree, alpha](const SymbolString& rm) -> DecodeOutcome {
        if (rm.empty()) return {{}, true};
        return {decode_exact(tree, rm, alpha).message, true};
    };
}

Decoder make_shortcut_decoder(const TreeCode& tree, const Ratio& alpha,
                              const PartyMachine& counterpart) {
    const PartyMachine* peer = &counterpart;
    return [tree, alpha, peer](const SymbolString& rm) -> DecodeOutcome {
        // An empty counterpart prefix can only meet a non-empty rm through an
        // insertion; the empty decode matches the prefix and the insertion
        // flag classifies the round.
        if (rm.empty() || peer->sent_message().empty()) return {{}, true};
        const ShortcutResult res = decode_shortcut(tree, rm, peer->sent_message(), alpha);
        return {res.message, res.valid};
    };
}

Decoder make_greedy_decoder(const TreeCode& tree) {
    return [tree](const SymbolString& rm) -> DecodeOutcome {
        if (rm.empty()) return {{}, true};
        SymbolString msg, best;
        Ratio best_sd = Ratio::infinity();
        const std::size_t limit =
            std::min<std::size_t>(static_cast<std::size_t>(tree.n), rm.size());
        while (msg.size() < limit) {
            Symbol pick = 0;
            Ratio pick_sd = Ratio::infinity();
            for (Symbol c = 0; c < tree.d; ++c) {
                msg.push_back(c);
                const Ratio sd = suffix_distance(tree.encode(msg), rm).value;
                msg.pop_back();
                if (sd < pick_sd) {
                    pick_sd = sd;
                    pick = c;
                }
            }
            msg.push_back(pick);
            if (pick_sd < best_sd) {
                best_sd = pick_sd;
                best = msg;
            }
        }
        return {best, true};
    };
}

TreeCode make_poly_tree(const ProtocolConfig& config) {
    return make_lazy_tree(config.in_alphabet_size, config.N, config.out_alphabet_size,
                          config.tree_seed);
}

PolyParty::PolyParty(PartyId id, const PjpInstance& instance, TreeCode tree,
                     const ProtocolConfig& config, Decoder decoder)
    : id_(id), instance_(instance), tree_(std::move(tree)), config_(config),
      decoder_(std::move(decoder)) {
    if (config_.kind != ProtocolKind::poly)
        throw std::invalid_argument("config is not for the polynomial scheme");
}

Symbol PolyParty::step(std::optional<Symbol> received) {
    if (round_ >= config_.N) throw std::runtime_error("party stepped past round N");
    ++round_;
    if (received) received_.push_back(*received);
    info_ = StepInfo{};

    DecodeOutcome decoded{{}, true};
    if (!received_.empty()) {
        decoded = decoder_(received_);
        info_.decode_performed = true;
    } else {
        info_.decode_performed = received.has_value();
    }
    info_.decoded = decoded.message;

    const bool is_alice = id_ == PartyId::alice;
    std::vector<EdgeId> edges;
    if (decoded.valid) {
        EdgeResolution res = resolve_poly_message(decoded.message, config_.N,
                                                  config_.T, !is_alice);
        info_.decode_valid = res.valid;
        edges = std::move(res.edges);
    } else {
        info_.decode_valid = false;
    }

    const PathWalk walk = walk_unique_path(instance_, is_alice, edges);
    std::optional<EdgeId> chosen;
    if (walk.unique) {
        if (walk.reaches_leaf) ++votes_[leaf_code(walk.path_bits)];
        if (walk.deepest &&
            PjpInstance::alice_owns_edge_depth(walk.deepest->depth()) == is_alice) {
            if (walk.deepest->depth() <= 2) {
                chosen = walk.deepest;
            } else {
                EdgeId grandparent{{walk.deepest->path.begin(),
                                    walk.deepest->path.end() - 2}};
                if (first_sent_round_.count(grandparent)) chosen = walk.deepest;
            }
        }
    }

    PolySymbol out_sym{config_.N, 1};  // empty edge
    if (chosen) {
        if (chosen->depth() == 1) {
            out_sym = {0, chosen->path[0] + 1};
        } else if (chosen->depth() == 2) {
            out_sym = {0, 2 * chosen->path[0] + chosen->path[1] + 1};
        } else {
            EdgeId grandparent{{chosen->path.begin(), chosen->path.end() - 2}};
            out_sym = {first_sent_round_.at(grandparent),
                       grandchild_index(grandparent, *chosen)};
        }
        first_sent_round_.try_emplace(*chosen, round_);
        info_.progress_edges.emplace_back(*chosen, 1);
    }
    sent_edges_.push_back(chosen);
    sent_message_.push_back(poly_pack(out_sym));
    info_.sent = encode_step(tree_, sent_message_);

    for (const auto& [leaf, count] : votes_) {
        if (count > info_.votes_max) {
            info_.votes_max = count;
            info_.votes_leader = leaf;
        }
    }
    if (round_ == config_.output_round) {
        output_ = info_.votes_leader;  // all-zero leaf when no votes yet
        info_.output_leaf = output_;
    }
    return info_.sent;
}

} // namespace edcode
