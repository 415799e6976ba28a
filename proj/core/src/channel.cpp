#include "edcode/channel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "edcode/util.hpp"

namespace edcode {

namespace {

class NoneAdversary final : public Adversary {
public:
    CorruptionAction act(const Transmission&, const NoiseBudget&) override {
        return {};
    }
};

class RandomAdversary final : public Adversary {
public:
    RandomAdversary(double rate, std::uint64_t seed, std::uint32_t out_size)
        : rate_(rate), rng_(seed), out_size_(out_size) {}

    CorruptionAction act(const Transmission&, const NoiseBudget& budget) override {
        if (budget.left() <= 0 || rng_.unit() >= rate_) return {};
        CorruptionAction action;
        action.kind = rng_.below(2) == 0 ? ActionKind::substitute : ActionKind::out_of_sync;
        action.forged = static_cast<Symbol>(rng_.below(out_size_));
        return action;
    }

private:
    double rate_;
    Rng rng_;
    std::uint32_t out_size_;
};

class BurstAdversary final : public Adversary {
public:
    BurstAdversary(int start, int length, ActionKind kind, std::uint32_t out_size)
        : start_(start), length_(length), kind_(kind), out_size_(out_size) {}

    CorruptionAction act(const Transmission& tx, const NoiseBudget& budget) override {
        if (budget.left() <= 0) return {};
        if (tx.global_index < start_ || tx.global_index >= start_ + length_) return {};
        return {kind_, static_cast<Symbol>((tx.symbol + 1) % out_size_)};
    }

private:
    int start_;
    int length_;
    ActionKind kind_;
    std::uint32_t out_size_;
};

class SpoofInputAdversary final : public Adversary {
public:
    SpoofInputAdversary(PartyId victim, int window_start, int window_length,
                        std::unique_ptr<PartyMachine> simulated)
        : victim_(victim), window_start_(window_start), window_length_(window_length),
          simulated_(std::move(simulated)) {}

    CorruptionAction act(const Transmission& tx, const NoiseBudget& budget) override {
        if (tx.from != victim_ || tx.sender_round < window_start_ ||
            tx.sender_round >= window_start_ + window_length_)
            return {};
        if (budget.left() <= 0) throw SessionError("spoof adversary budget shortfall");
        const Symbol reply = simulated_->step(tx.symbol);
        return {ActionKind::out_of_sync, reply};
    }

private:
    PartyId victim_;
    int window_start_;
    int window_length_;
    std::unique_ptr<PartyMachine> simulated_;
};

void push_column(StringMatching& m, std::int64_t sent, std::int64_t received) {
    m.tau1.push_back(sent);
    m.tau2.push_back(received);
}

std::int64_t star_count(const std::vector<std::int64_t>& side) {
    return static_cast<std::int64_t>(
        std::count(side.begin(), side.end(), StringMatching::kStar));
}

std::uint64_t leaf_code(const std::vector<std::uint8_t>& path) {
    std::uint64_t code = 0;
    for (auto bit : path) code = code * 2 + bit;
    return code;
}

} // namespace

std::unique_ptr<Adversary> adversary_none() { return std::make_unique<NoneAdversary>(); }

std::unique_ptr<Adversary> adversary_random(double rate, std::uint64_t seed,
                                            std::uint32_t out_alphabet_size) {
    return std::make_unique<RandomAdversary>(rate, seed, out_alphabet_size);
}

std::unique_ptr<Adversary> adversary_burst(int start, int length, ActionKind kind,
                                           std::uint32_t out_alphabet_size) {
    return std::make_unique<BurstAdversary>(start, length, kind, out_alphabet_size);
}

std::unique_ptr<Adversary> adversary_spoof_input(PartyId victim, int window_start,
                                                 int window_length,
                                                 std::unique_ptr<PartyMachine> simulated) {
    return std::make_unique<SpoofInputAdversary>(victim, window_start, window_length,
                                                 std::move(simulated));
}

RunLog run_session(PartyMachine& alice, PartyMachine& bob, Adversary& adversary,
                   const ProtocolConfig& config, const PjpInstance& instance) {
    RunLog log;
    log.config = config;
    log.instance = instance;
    log.budget.total = config.budget_total();

    auto machine = [&](PartyId p) -> PartyMachine& {
        return p == PartyId::alice ? alice : bob;
    };
    // Direction Bob->Alice is tau_a (sent side = Bob), Alice->Bob is tau_b.
    auto matching_for_sender = [&](PartyId sender) -> StringMatching& {
        return sender == PartyId::bob ? log.tau_a : log.tau_b;
    };

    int t = 0;
    int global_tx = 0;

    auto record_event = [&](PartyId who, bool received_present, Symbol received,
                            ActionKind action) {
        PartyMachine& self = machine(who);
        PartyMachine& peer = machine(other(who));
        LogEvent ev;
        ev.t = ++t;
        ev.party = who;
        ev.round = self.round();
        ev.received_present = received_present;
        ev.received = received;
        ev.action = action;
        ev.received_inserted = received_present && action != ActionKind::deliver;
        ev.info = self.last_step();
        ev.decoded_full_prefix = ev.info.decoded == peer.sent_message();
        const bool cycle_ok =
            config.kind == ProtocolKind::poly || ev.info.cycle_boundary;
        ev.good_decoding = ev.decoded_full_prefix && !ev.received_inserted && cycle_ok;
        if (ev.info.output_leaf) {
            auto& out = who == PartyId::alice ? log.output_a : log.output_b;
            out = ev.info.output_leaf;
        }
        log.events.push_back(std::move(ev));
    };

    Symbol first = alice.step(std::nullopt);
    record_event(PartyId::alice, false, 0, ActionKind::deliver);
    Transmission pending{PartyId::alice, first, alice.round(), ++global_tx};

    while (true) {
        const CorruptionAction action = adversary.act(pending, log.budget);
        // The receiver induced by the action (out_of_sync bounces the forgery
        // back to the sender). Once that party has completed its N-th send
        // the transmission cannot be consumed and the session ends.
        const PartyId induced =
            action.kind == ActionKind::out_of_sync ? pending.from : other(pending.from);
        if (machine(induced).round() >= config.N) break;
        if (action.cost() > 0) {
            if (log.budget.left() <= 0) throw SessionError("corruption budget exceeded");
            ++log.budget.spent;
        }
        PartyId receiver;
        Symbol received;
        switch (action.kind) {
            case ActionKind::deliver:
                receiver = other(pending.from);
                received = pending.symbol;
                push_column(matching_for_sender(pending.from), pending.symbol,
                            pending.symbol);
                break;
            case ActionKind::substitute:
                receiver = other(pending.from);
                received = action.forged;
                push_column(matching_for_sender(pending.from), pending.symbol,
                            StringMatching::kStar);
                push_column(matching_for_sender(pending.from), StringMatching::kStar,
                            action.forged);
                break;
            case ActionKind::out_of_sync:
                receiver = pending.from;
                received = action.forged;
                // The genuine symbol is deleted in its own direction; the
                // forgery is an insertion in the opposite direction.
                push_column(matching_for_sender(pending.from), pending.symbol,
                            StringMatching::kStar);
                push_column(matching_for_sender(other(pending.from)),
                            StringMatching::kStar, action.forged);
                break;
            default:
                throw SessionError("unknown corruption action");
        }
        const Symbol reply = machine(receiver).step(received);
        record_event(receiver, true, received, action.kind);
        pending = Transmission{receiver, reply, machine(receiver).round(), ++global_tx};
    }

    log.n_a = alice.round();
    log.n_b = bob.round();
    return log;
}

AnalysisReport analyze_log(const RunLog& log) {
    AnalysisReport rep;
    rep.n_a = log.n_a;
    rep.n_b = log.n_b;
    rep.spent = log.budget.spent;
    rep.sc1 = star_count(log.tau_a.tau1);
    rep.sc2 = star_count(log.tau_a.tau2);
    rep.sc3 = star_count(log.tau_b.tau1);
    rep.sc4 = star_count(log.tau_b.tau2);

    const int T = log.config.T;
    const auto& path = log.instance.correct_path;

    // Progress l(t): longest correct-path prefix whose edges have all been
    // counted (sent / fully communicated) by time t.
    std::vector<bool> covered(static_cast<std::size_t>(T) + 1, false);
    std::vector<int> first_desc_len(static_cast<std::size_t>(T) + 1, -1);
    int l = 0;
    rep.milestones.assign(static_cast<std::size_t>(T) + 1, -1);
    rep.milestones[0] = 0;
    for (const auto& ev : log.events) {
        for (const auto& [edge, desc_len] : ev.info.progress_edges) {
            const std::size_t depth = edge.path.size();
            if (depth == 0 || depth > static_cast<std::size_t>(T)) continue;
            if (!std::equal(edge.path.begin(), edge.path.end(), path.begin())) continue;
            if (!covered[depth]) {
                covered[depth] = true;
                first_desc_len[depth] = desc_len;
            }
        }
        while (l < T && covered[static_cast<std::size_t>(l) + 1]) {
            ++l;
            rep.milestones[static_cast<std::size_t>(l)] = ev.t;
        }
        rep.l_of_t.push_back(l);
        if (ev.party == PartyId::alice) {
            ++(ev.good_decoding ? rep.g_a : rep.b_a);
        } else {
            ++(ev.good_decoding ? rep.g_b : rep.b_b);
        }
    }
    rep.l_final = l;

    // Good-decoding lower bound, cleared of denominators. With alpha = a/b:
    //   poly:      g * a >= N_party * a + (a-2b)*sc_del - (a+2b)*sc_ins
    //   constant:  additionally scaled by eps = p/q: N_party * a * (q-p).
    const std::int64_t a = log.config.alpha.num;
    const std::int64_t b = log.config.alpha.den;
    const std::int64_t p = log.config.eps.num;
    const std::int64_t q = log.config.eps.den;
    const bool constant = log.config.kind == ProtocolKind::constant;
    auto good_slack = [&](std::int64_t g, std::int64_t n_party, std::int64_t sc_ins,
                          std::int64_t sc_del) {
        if (constant)
            return g * a * q - (n_party * a * (q - p) + q * (a - 2 * b) * sc_del -
                                q * (a + 2 * b) * sc_ins);
        return g * a - (n_party * a + (a - 2 * b) * sc_del - (a + 2 * b) * sc_ins);
    };
    rep.good_bound_slack_a = good_slack(rep.g_a, rep.n_a, rep.sc1, rep.sc2);
    rep.good_bound_slack_b = good_slack(rep.g_b, rep.n_b, rep.sc3, rep.sc4);
    rep.good_bound_ok_a = rep.good_bound_slack_a >= 0;
    rep.good_bound_ok_b = rep.good_bound_slack_b >= 0;

    // Milestone-interval inequalities. For the window between reaching depth
    // i and depth i+1, the party owing edge i+1 is Bob when i is odd, Alice
    // when i is even (edge depth i+1 is odd iff i is even, and odd depths are
    // Alice's).
    auto window_counts = [&](int lo, int hi, int& ga, int& ba, int& gb, int& bb) {
        ga = ba = gb = bb = 0;
        for (const auto& ev : log.events) {
            if (ev.t < lo || ev.t > hi) continue;
            if (ev.party == PartyId::alice) {
                ++(ev.good_decoding ? ga : ba);
            } else {
                ++(ev.good_decoding ? gb : bb);
            }
        }
    };
    for (int i = 0; i + 1 <= T && rep.milestone_bound_ok; ++i) {
        const int mi = rep.milestones[static_cast<std::size_t>(i)];
        const int mnext = rep.milestones[static_cast<std::size_t>(i) + 1];
        if (mi < 0 || mnext < 0) break;  // no claim past the last milestone
        std::ostringstream why;
        int ga, ba, gb, bb;
        if (!constant) {
            if (mnext == mi + 1) continue;
            window_counts(mi + 1, mnext - 1, ga, ba, gb, bb);
            // owing party has no good decodings; the other's good decodings
            // are at most the owing party's bad decodings.
            const bool odd = i % 2 == 1;
            const int g_owing = odd ? gb : ga;
            const int b_owing = odd ? bb : ba;
            const int g_other = odd ? ga : gb;
            if (g_owing != 0 || g_other > b_owing) {
                why << "interval " << i << ": g_owing=" << g_owing
                    << " g_other=" << g_other << " b_owing=" << b_owing;
                rep.milestone_bound_ok = false;
                rep.milestone_violation = why.str();
            }
        } else {
            window_counts(mi + 1, mnext, ga, ba, gb, bb);
            const std::int64_t li =
                first_desc_len[static_cast<std::size_t>(i) + 1];
            const bool odd = i % 2 == 1;
            const std::int64_t g_owing = odd ? gb : ga;
            const std::int64_t b_owing = odd ? bb : ba;
            const std::int64_t g_other = odd ? ga : gb;
            // g_owing <= l + eps*b_owing ; g_other <= l + (1+eps)*b_owing.
            if (g_owing * q > li * q + p * b_owing ||
                g_other * q > li * q + (q + p) * b_owing) {
                why << "interval " << i << ": l=" << li << " g_owing=" << g_owing
                    << " g_other=" << g_other << " b_owing=" << b_owing;
                rep.milestone_bound_ok = false;
                rep.milestone_violation = why.str();
            }
        }
    }

    if (constant) {
        for (const auto& ev : log.events) {
            if (!ev.info.full_page) continue;
            ++(ev.party == PartyId::alice ? rep.full_pages_a : rep.full_pages_b);
        }
        rep.full_page_bound_ok = rep.full_pages_a * q <= p * rep.n_a &&
                                 rep.full_pages_b * q <= p * rep.n_b;
        for (int i = 1; i <= T; ++i) {
            const int len = first_desc_len[static_cast<std::size_t>(i)];
            if (len > 0) rep.description_sum += len;
        }
        rep.description_budget =
            T * (std::log2(static_cast<double>(rep.n_a + rep.n_b) / T) + 4.0);
        rep.description_sum_ok =
            static_cast<double>(rep.description_sum) <= rep.description_budget;
    }

    const std::uint64_t correct = leaf_code(log.instance.correct_path);
    rep.output_correct_a = log.output_a && *log.output_a == correct;
    rep.output_correct_b = log.output_b && *log.output_b == correct;

    rep.budget_identities_ok = rep.spent == rep.sc1 + rep.sc3 &&
                               rep.spent == rep.sc2 + rep.sc4 &&
                               rep.spent <= log.budget.total &&
                               std::abs(rep.n_a - rep.n_b) <= rep.spent;
    return rep;
}

namespace {

const char* action_name(ActionKind k) {
    switch (k) {
        case ActionKind::deliver: return "deliver";
        case ActionKind::substitute: return "substitute";
        case ActionKind::out_of_sync: return "out_of_sync";
    }
    return "?";
}

ActionKind parse_action(const std::string& s) {
    if (s == "deliver") return ActionKind::deliver;
    if (s == "substitute") return ActionKind::substitute;
    if (s == "out_of_sync") return ActionKind::out_of_sync;
    throw std::invalid_argument("bad action kind: " + s);
}

void write_matching(std::ostream& out, const char* tag, const StringMatching& m) {
    out << tag << ' ' << m.tau1.size() << '\n';
    for (std::size_t i = 0; i < m.tau1.size(); ++i)
        out << m.tau1[i] << (i + 1 == m.tau1.size() ? '\n' : ' ');
    if (m.tau1.empty()) out << '\n';
    for (std::size_t i = 0; i < m.tau2.size(); ++i)
        out << m.tau2[i] << (i + 1 == m.tau2.size() ? '\n' : ' ');
    if (m.tau2.empty()) out << '\n';
}

StringMatching read_matching(std::istream& in, const char* tag) {
    std::string word;
    std::size_t count = 0;
    if (!(in >> word >> count) || word != tag)
        throw std::invalid_argument("bad matching block");
    StringMatching m;
    m.tau1.resize(count);
    m.tau2.resize(count);
    for (auto& v : m.tau1)
        if (!(in >> v)) throw std::invalid_argument("bad matching data");
    for (auto& v : m.tau2)
        if (!(in >> v)) throw std::invalid_argument("bad matching data");
    return m;
}

} // namespace

std::string serialize_runlog(const RunLog& log) {
    std::ostringstream out;
    const auto& c = log.config;
    out << "edcode-trace 1\n";
    out << "config " << (c.kind == ProtocolKind::poly ? "poly" : "constant") << ' '
        << c.T << ' ' << c.N << ' ' << c.alpha.num << ' ' << c.alpha.den << ' '
        << c.rho.num << ' ' << c.rho.den << ' ' << c.eps.num << ' ' << c.eps.den
        << ' ' << c.page_capacity << ' ' << c.live_boost << ' ' << c.output_round
        << ' ' << c.in_alphabet_size << ' ' << c.out_alphabet_size << ' '
        << c.tree_seed << ' ' << (c.decoder_exact ? 1 : 0) << '\n';
    out << "budget " << log.budget.total << ' ' << log.budget.spent << '\n';
    out << "instance\n" << serialize_instance(log.instance);
    out << "rounds " << log.n_a << ' ' << log.n_b << '\n';
    out << "outputs " << (log.output_a ? 1 : 0) << ' ' << (log.output_a ? *log.output_a : 0)
        << ' ' << (log.output_b ? 1 : 0) << ' ' << (log.output_b ? *log.output_b : 0)
        << '\n';
    write_matching(out, "tau_a", log.tau_a);
    write_matching(out, "tau_b", log.tau_b);
    out << "events " << log.events.size() << '\n';
    for (const auto& ev : log.events) {
        out << "e " << ev.t << ' ' << party_name(ev.party) << ' ' << ev.round << ' '
            << (ev.received_present ? 1 : 0) << ' ' << ev.received << ' '
            << action_name(ev.action) << ' ' << (ev.received_inserted ? 1 : 0) << ' '
            << (ev.good_decoding ? 1 : 0) << ' ' << (ev.decoded_full_prefix ? 1 : 0)
            << ' ' << ev.info.sent << ' ' << (ev.info.decode_performed ? 1 : 0) << ' '
            << (ev.info.decode_valid ? 1 : 0) << ' ' << (ev.info.cycle_boundary ? 1 : 0)
            << ' ' << (ev.info.full_page ? 1 : 0) << ' ' << ev.info.votes_leader << ' '
            << ev.info.votes_max << ' ' << (ev.info.output_leaf ? 1 : 0) << ' '
            << (ev.info.output_leaf ? *ev.info.output_leaf : 0) << ' '
            << ev.info.progress_edges.size();
        for (const auto& [edge, len] : ev.info.progress_edges) {
            out << ' ';
            for (auto bit : edge.path) out << static_cast<int>(bit);
            out << ':' << len;
        }
        out << '\n';
    }
    return out.str();
}

RunLog parse_runlog(const std::string& text) {
    std::istringstream in(text);
    std::string word;
    int version = 0;
    if (!(in >> word >> version) || word != "edcode-trace" || version != 1)
        throw std::invalid_argument("bad trace header");

    RunLog log;
    auto& c = log.config;
    std::string kind;
    int exact = 0;
    if (!(in >> word >> kind >> c.T >> c.N >> c.alpha.num >> c.alpha.den >> c.rho.num >>
          c.rho.den >> c.eps.num >> c.eps.den >> c.page_capacity >> c.live_boost >>
          c.output_round >> c.in_alphabet_size >> c.out_alphabet_size >> c.tree_seed >>
          exact) ||
        word != "config")
        throw std::invalid_argument("bad trace config");
    if (kind == "poly") {
        c.kind = ProtocolKind::poly;
    } else if (kind == "constant") {
        c.kind = ProtocolKind::constant;
    } else {
        throw std::invalid_argument("bad protocol kind: " + kind);
    }
    c.decoder_exact = exact != 0;

    if (!(in >> word >> log.budget.total >> log.budget.spent) || word != "budget")
        throw std::invalid_argument("bad trace budget");

    if (!(in >> word) || word != "instance")
        throw std::invalid_argument("bad trace instance");
    {
        int t = 0;
        std::uint64_t seed = 0;
        std::string bits_a, bits_b;
        if (!(in >> t >> seed >> bits_a >> bits_b))
            throw std::invalid_argument("bad trace instance");
        std::ostringstream inst;
        inst << t << ' ' << seed << '\n' << bits_a << '\n' << bits_b << '\n';
        log.instance = parse_instance(inst.str());
    }

    if (!(in >> word >> log.n_a >> log.n_b) || word != "rounds")
        throw std::invalid_argument("bad trace rounds");

    int has_a = 0, has_b = 0;
    std::uint64_t out_a = 0, out_b = 0;
    if (!(in >> word >> has_a >> out_a >> has_b >> out_b) || word != "outputs")
        throw std::invalid_argument("bad trace outputs");
    if (has_a) log.output_a = out_a;
    if (has_b) log.output_b = out_b;

    log.tau_a = read_matching(in, "tau_a");
    log.tau_b = read_matching(in, "tau_b");

    std::size_t count = 0;
    if (!(in >> word >> count) || word != "events")
        throw std::invalid_argument("bad trace events");
    log.events.resize(count);
    for (auto& ev : log.events) {
        std::string party, action;
        int recv_present = 0, inserted = 0, good = 0, full_prefix = 0, dec_perf = 0,
            dec_valid = 0, cycle = 0, full_page = 0, out_set = 0;
        std::uint64_t out_leaf = 0;
        std::size_t nprog = 0;
        if (!(in >> word >> ev.t >> party >> ev.round >> recv_present >> ev.received >>
              action >> inserted >> good >> full_prefix >> ev.info.sent >> dec_perf >>
              dec_valid >> cycle >> full_page >> ev.info.votes_leader >>
              ev.info.votes_max >> out_set >> out_leaf >> nprog) ||
            word != "e")
            throw std::invalid_argument("bad trace event");
        if (party != "alice" && party != "bob")
            throw std::invalid_argument("bad trace party: " + party);
        ev.party = party == "alice" ? PartyId::alice : PartyId::bob;
        ev.received_present = recv_present != 0;
        ev.action = parse_action(action);
        ev.received_inserted = inserted != 0;
        ev.good_decoding = good != 0;
        ev.decoded_full_prefix = full_prefix != 0;
        ev.info.decode_performed = dec_perf != 0;
        ev.info.decode_valid = dec_valid != 0;
        ev.info.cycle_boundary = cycle != 0;
        ev.info.full_page = full_page != 0;
        if (out_set) ev.info.output_leaf = out_leaf;
        ev.info.progress_edges.resize(nprog);
        for (auto& [edge, len] : ev.info.progress_edges) {
            std::string item;
            if (!(in >> item)) throw std::invalid_argument("bad trace edge");
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("bad trace edge: " + item);
            for (std::size_t i = 0; i < colon; ++i) {
                if (item[i] != '0' && item[i] != '1')
                    throw std::invalid_argument("bad trace edge bits: " + item);
                edge.path.push_back(static_cast<std::uint8_t>(item[i] - '0'));
            }
            len = std::stoi(item.substr(colon + 1));
        }
    }
    return log;
}

} // namespace edcode
