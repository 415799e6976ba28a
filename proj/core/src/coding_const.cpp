#include "edcode/coding_const.hpp"

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

std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
    return (num + den - 1) / den;
}

int output_deadline(int N, const Ratio& rho) {
    return static_cast<int>(
        ceil_div(static_cast<std::int64_t>(N) * (rho.den - 2 * rho.num), rho.den));
}

std::uint32_t out_alphabet_for(std::uint32_t in_size) {
    if (in_size == 0) return 0;
    const std::uint64_t cube = static_cast<std::uint64_t>(in_size) * in_size * in_size;
    return static_cast<std::uint32_t>(std::min<std::uint64_t>(cube, std::uint64_t{1} << 30));
}

int edge_grandchild_s(const EdgeId& edge) {
    if (edge.depth() == 1) return edge.path[0] + 1;
    if (edge.depth() == 2) return 2 * edge.path[0] + edge.path[1] + 1;
    const EdgeId grandparent{{edge.path.begin(), edge.path.end() - 2}};
    return grandchild_index(grandparent, edge);
}

} // namespace

BitString encode_edge_description(int delta, int s) {
    if (s < 0 || s > 4) throw std::invalid_argument("s out of range");
    if (delta < 0) throw std::invalid_argument("delta out of range");
    if (s == 0 && delta != 0)
        throw std::invalid_argument("empty edge must have delta 0");
    BitString bits{static_cast<std::uint8_t>((s >> 2) & 1),
                   static_cast<std::uint8_t>((s >> 1) & 1),
                   static_cast<std::uint8_t>(s & 1)};
    if (delta > 0) {
        BitString delta_bits;
        for (int v = delta; v > 0; v >>= 1)
            delta_bits.push_back(static_cast<std::uint8_t>(v & 1));
        bits.insert(bits.end(), delta_bits.rbegin(), delta_bits.rend());
    }
    return bits;
}

EdgeDescription decode_edge_description(const BitString& bits) {
    EdgeDescription desc;
    if (bits.size() < 3) return desc;
    desc.s = bits[0] * 4 + bits[1] * 2 + bits[2];
    if (desc.s > 4) return desc;
    if (bits.size() > 3) {
        if (bits[3] == 0) return desc;  // non-minimal encoding
        if (bits.size() - 3 > 30) return desc;
        for (std::size_t k = 3; k < bits.size(); ++k) {
            if (bits[k] > 1) return desc;
            desc.delta = desc.delta * 2 + bits[k];
        }
    }
    desc.valid = true;
    return desc;
}

Symbol pack_page(bool last_page, const std::vector<SlotBits>& slots, int page_capacity) {
    if (static_cast<int>(slots.size()) > page_capacity)
        throw std::invalid_argument("too many slots for the page");
    if (1 + 4 * page_capacity > 31)
        throw std::invalid_argument("page symbol exceeds 31 bits");
    std::uint32_t value = last_page ? 1u : 0u;
    for (std::size_t j = 0; j < slots.size(); ++j) {
        const auto& sb = slots[j];
        const unsigned base = 1u + 4u * static_cast<unsigned>(j);
        value |= static_cast<std::uint32_t>(sb.payload & 1) << base;
        value |= static_cast<std::uint32_t>(sb.live_zero & 1) << (base + 1);
        value |= static_cast<std::uint32_t>(sb.fully_sent & 1) << (base + 2);
        value |= static_cast<std::uint32_t>(sb.newly_added & 1) << (base + 3);
    }
    return value;
}

std::pair<bool, std::vector<SlotBits>> unpack_page(Symbol value, int page_capacity) {
    std::vector<SlotBits> slots(static_cast<std::size_t>(page_capacity));
    for (int j = 0; j < page_capacity; ++j) {
        const unsigned base = 1u + 4u * static_cast<unsigned>(j);
        auto& sb = slots[static_cast<std::size_t>(j)];
        sb.payload = static_cast<std::uint8_t>((value >> base) & 1);
        sb.live_zero = static_cast<std::uint8_t>((value >> (base + 1)) & 1);
        sb.fully_sent = static_cast<std::uint8_t>((value >> (base + 2)) & 1);
        sb.newly_added = static_cast<std::uint8_t>((value >> (base + 3)) & 1);
    }
    return {(value & 1u) != 0, std::move(slots)};
}

Symbol emit_page(EdgeTable& table, int page_idx, int round, int cycle_round,
                 int page_capacity, bool& full_page,
                 std::vector<std::pair<EdgeId, int>>* completions) {
    const int base = page_idx * page_capacity;
    const int occupied = std::max(
        0, std::min(static_cast<int>(table.entries.size()) - base, page_capacity));
    std::vector<SlotBits> slots(static_cast<std::size_t>(occupied));
    for (int j = 0; j < occupied; ++j) {
        EdgeEntry& entry = table.entries[static_cast<std::size_t>(base + j)];
        auto& sb = slots[static_cast<std::size_t>(j)];
        sb.payload = entry.description[static_cast<std::size_t>(entry.sent_length)];
        ++entry.sent_length;
        --entry.live_points;
        if (entry.start_round < 0) entry.start_round = round;
        sb.live_zero = entry.live_points == 0;
        sb.fully_sent =
            entry.sent_length == static_cast<int>(entry.description.size());
        sb.newly_added = entry.added_round == cycle_round;
        if (sb.live_zero || sb.fully_sent) entry.remove_flag = true;
        if (sb.fully_sent && completions)
            completions->emplace_back(entry.edge,
                                      static_cast<int>(entry.description.size()));
    }
    full_page = occupied == page_capacity;
    const bool last_page = page_idx == table.pages_total(page_capacity) - 1;
    return pack_page(last_page, slots, page_capacity);
}

std::vector<Symbol> cycle_emit(EdgeTable& table, int page_capacity, int start_round) {
    std::vector<Symbol> pages;
    const int total = table.pages_total(page_capacity);
    for (int p = 0; p < total; ++p) {
        bool full = false;
        pages.push_back(
            emit_page(table, p, start_round + p, start_round, page_capacity, full,
                      nullptr));
    }
    return pages;
}

void update_table(EdgeTable& table, const std::optional<EdgeId>& edge, int live_boost,
                  int round, const std::function<BitString(const EdgeId&)>& describe) {
    std::erase_if(table.entries, [](const EdgeEntry& e) { return e.remove_flag; });
    if (!edge) return;
    for (auto& entry : table.entries) {
        if (entry.edge == *edge) {
            entry.live_points += live_boost;
            return;
        }
    }
    EdgeEntry entry;
    entry.edge = *edge;
    entry.description = describe(*edge);
    entry.live_points = live_boost;
    entry.added_round = round;
    table.entries.push_back(std::move(entry));
}

MirrorTable mirror_apply(const SymbolString& decoded, const ProtocolConfig& config,
                         bool sender_is_alice) {
    MirrorTable mirror;
    const int C = config.page_capacity;
    int page_idx = 0;
    int cycle_first_round = 1;
    std::size_t old_size = 0;
    bool saw_new = false;
    bool pending_new_required = false;

    auto fail = [&]() {
        mirror.valid = false;
        mirror.slots.clear();
        mirror.completed_edges.clear();
        mirror.completed_by_start.clear();
    };

    for (std::size_t idx = 0; idx < decoded.size() && mirror.valid; ++idx) {
        const int k = static_cast<int>(idx) + 1;  // sender round
        if (k == cycle_first_round) {
            old_size = mirror.slots.size();
            saw_new = false;
            pending_new_required = false;
        }
        const auto [last_flag, slots] = unpack_page(decoded[idx], C);
        const std::size_t base = static_cast<std::size_t>(page_idx) *
                                 static_cast<std::size_t>(C);
        const std::size_t new_page = old_size / static_cast<std::size_t>(C);

        for (int j = 0; j < C && mirror.valid; ++j) {
            const std::size_t gs = base + static_cast<std::size_t>(j);
            const auto& sb = slots[static_cast<std::size_t>(j)];
            const bool occupied_old = gs < old_size;
            const bool new_here = gs == old_size && sb.newly_added != 0;
            if (!occupied_old && !new_here) {
                // Padding (or a missing mandatory new edge) must be all-zero.
                if (sb.payload || sb.live_zero || sb.fully_sent || sb.newly_added) {
                    fail();
                    break;
                }
                if (gs == old_size && pending_new_required) {
                    fail();
                    break;
                }
                continue;
            }
            if (new_here) {
                MirrorSlot fresh;
                fresh.insert_round = cycle_first_round;
                mirror.slots.push_back(std::move(fresh));
                saw_new = true;
            }
            MirrorSlot& slot = mirror.slots[gs];
            const bool expected_newly = slot.insert_round == cycle_first_round;
            if ((sb.newly_added != 0) != expected_newly) {
                fail();
                break;
            }
            slot.bits.push_back(sb.payload);
            if (slot.start_round < 0) slot.start_round = k;
            if (sb.live_zero) slot.remove_after_cycle = true;
            if (sb.fully_sent) {
                if (slot.completed) {
                    fail();
                    break;
                }
                slot.completed = true;
                slot.remove_after_cycle = true;
                const EdgeDescription desc = decode_edge_description(slot.bits);
                if (!desc.valid || desc.s == 0) {
                    fail();
                    break;
                }
                const int n = slot.insert_round - desc.delta;
                EdgeId edge;
                try {
                    if (n < 0) throw std::invalid_argument("negative pointer");
                    if (n == 0) {
                        edge = resolve_grandchild(std::nullopt, desc.s, config.T,
                                                  sender_is_alice ? 1 : 2);
                    } else {
                        const auto it = mirror.completed_by_start.find(n);
                        if (it == mirror.completed_by_start.end())
                            throw std::invalid_argument("unknown pointer target");
                        edge = resolve_grandchild(it->second, desc.s, config.T);
                    }
                } catch (const std::invalid_argument&) {
                    fail();
                    break;
                }
                slot.edge = edge;
                mirror.completed_edges.push_back(edge);
                mirror.completed_by_start.emplace(slot.start_round, edge);
            }
        }
        if (!mirror.valid) break;

        // Validate the last-page flag against the structural page count. The
        // table size is still ambiguous while the potential new-edge slot
        // lies on a later page: a cleared flag there announces the new edge.
        const std::size_t size_now = mirror.slots.size();
        const int pages_now = static_cast<int>(
            size_now == 0 ? 1 : (size_now + static_cast<std::size_t>(C) - 1) /
                                    static_cast<std::size_t>(C));
        const bool structurally_last = page_idx == pages_now - 1;
        pending_new_required = false;
        if (saw_new || static_cast<std::size_t>(page_idx) >= new_page) {
            // New-edge existence fully known.
            if (last_flag != structurally_last) {
                fail();
                break;
            }
        } else if (structurally_last) {
            // A cleared flag here promises a new edge on the next page.
            if (!last_flag) {
                if (new_page != static_cast<std::size_t>(page_idx) + 1) {
                    fail();
                    break;
                }
                pending_new_required = true;
            }
        } else if (last_flag) {
            fail();
            break;
        }
        if (!mirror.valid) break;

        if (last_flag) {
            std::erase_if(mirror.slots,
                          [](const MirrorSlot& s) { return s.remove_after_cycle; });
            ++mirror.cycles_completed;
            cycle_first_round = k + 1;
            page_idx = 0;
        } else {
            ++page_idx;
        }
    }
    return mirror;
}

ProtocolConfig const_config(int T, const Ratio& eps, std::uint64_t tree_seed) {
    if (eps.num <= 0 || eps.den <= 0 || 18 * eps.num >= eps.den)
        throw std::invalid_argument("eps must satisfy 0 < eps < 1/18");
    ProtocolConfig cfg;
    cfg.kind = ProtocolKind::constant;
    cfg.T = T;
    cfg.eps = eps.reduced();
    const std::int64_t p = cfg.eps.num, q = cfg.eps.den;
    cfg.N = static_cast<int>(ceil_div(static_cast<std::int64_t>(T) * q * q, p * p));
    cfg.alpha = Ratio{q - p, q}.reduced();
    cfg.rho = Ratio{q - 18 * p, 18 * q}.reduced();
    cfg.page_capacity = static_cast<int>(ceil_div(q * q, p * p));
    cfg.live_boost = static_cast<int>(ceil_div(q, p));
    cfg.output_round = output_deadline(cfg.N, cfg.rho);
    const int bits = 1 + 4 * cfg.page_capacity;
    cfg.in_alphabet_size = bits <= 31 ? (1u << bits) : 0u;
    cfg.out_alphabet_size = out_alphabet_for(cfg.in_alphabet_size);
    cfg.tree_seed = tree_seed;
    cfg.decoder_exact = false;
    return cfg;
}

ProtocolConfig const_config_relaxed(int T, int N, const Ratio& eps, const Ratio& alpha,
                                    const Ratio& rho, std::uint64_t tree_seed) {
    if (T < 2 || N < 1) throw std::invalid_argument("bad T or N");
    if (eps.num <= 0 || eps.den <= 0) throw std::invalid_argument("bad eps");
    if (rho.num < 0 || 2 * rho.num > rho.den)
        throw std::invalid_argument("rho must lie in [0, 1/2]");
    ProtocolConfig cfg;
    cfg.kind = ProtocolKind::constant;
    cfg.T = T;
    cfg.N = N;
    cfg.eps = eps.reduced();
    cfg.alpha = alpha;
    cfg.rho = rho;
    const std::int64_t p = cfg.eps.num, q = cfg.eps.den;
    cfg.page_capacity = static_cast<int>(ceil_div(q * q, p * p));
    cfg.live_boost = static_cast<int>(ceil_div(q, p));
    cfg.output_round = output_deadline(N, rho);
    const int bits = 1 + 4 * cfg.page_capacity;
    if (bits > 31)
        throw std::invalid_argument("page symbol exceeds 31 bits; use a larger eps");
    cfg.in_alphabet_size = 1u << bits;
    cfg.out_alphabet_size = out_alphabet_for(cfg.in_alphabet_size);
    cfg.tree_seed = tree_seed;
    cfg.decoder_exact = false;
    return cfg;
}

TreeCode make_const_tree(const ProtocolConfig& config) {
    if (config.in_alphabet_size == 0)
        throw std::invalid_argument("config is not materializable at this scale");
    return make_lazy_tree(config.in_alphabet_size, config.N, config.out_alphabet_size,
                          config.tree_seed);
}

ConstParty::ConstParty(PartyId id, const PjpInstance& instance, TreeCode tree,
                       const ProtocolConfig& config, Decoder decoder)
    : id_(id), instance_(instance), tree_(std::move(tree)), config_(config),
      decoder_(std::move(decoder)) {
    if (config_.kind != ProtocolKind::constant)
        throw std::invalid_argument("config is not for the constant scheme");
}

Symbol ConstParty::step(std::optional<Symbol> received) {
    if (round_ >= config_.N) throw std::runtime_error("party stepped past round N");
    ++round_;
    if (received) received_.push_back(*received);
    info_ = StepInfo{};
    info_.cycle_boundary = false;

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
        MirrorTable mirror = mirror_apply(decoded.message, config_, !is_alice);
        info_.decode_valid = mirror.valid;
        if (mirror.valid) edges = std::move(mirror.completed_edges);
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
                if (completed_start_.count(grandparent)) chosen = walk.deepest;
            }
        }
    }

    if (round_ == 1 || page_idx_ == pages_total_) {
        update_table(table_, chosen, config_.live_boost, round_,
                     [&](const EdgeId& e) {
                         int n = 0;
                         if (e.depth() > 2) {
                             const EdgeId grandparent{
                                 {e.path.begin(), e.path.end() - 2}};
                             n = completed_start_.at(grandparent);
                         }
                         return encode_edge_description(round_ - n,
                                                        edge_grandchild_s(e));
                     });
        cycle_first_round_ = round_;
        pages_total_ = table_.pages_total(config_.page_capacity);
        page_idx_ = 0;
        info_.cycle_boundary = true;
    }

    const Symbol page = emit_page(table_, page_idx_, round_, cycle_first_round_,
                                  config_.page_capacity, info_.full_page,
                                  &info_.progress_edges);
    ++page_idx_;
    for (const auto& [edge, len] : info_.progress_edges) {
        for (const auto& entry : table_.entries) {
            if (entry.edge == edge &&
                entry.sent_length == static_cast<int>(entry.description.size())) {
                completed_start_.try_emplace(edge, entry.start_round);
                break;
            }
        }
    }

    sent_message_.push_back(page);
    info_.sent = encode_step(tree_, sent_message_);

    for (const auto& [leaf, count] : votes_) {
        if (count > info_.votes_max) {
            info_.votes_max = count;
            info_.votes_leader = leaf;
        }
    }
    if (round_ == config_.output_round) {
        output_ = info_.votes_leader;
        info_.output_leaf = output_;
    }
    return info_.sent;
}

} // namespace edcode
