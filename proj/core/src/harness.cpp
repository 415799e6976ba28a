#include "edcode/harness.hpp"

#include <algorithm>
#include <chrono>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace edcode {

namespace {

std::uint64_t leaf_code(const std::vector<std::uint8_t>& path) {
    std::uint64_t code = 0;
    for (auto bit : path) code = code * 2 + bit;
    return code;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) parts.push_back(trim(item));
    return parts;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    const auto range_pos = text.find("..");
    if (range_pos != std::string::npos) {
        const std::uint64_t lo = std::stoull(trim(text.substr(0, range_pos)));
        const std::uint64_t hi = std::stoull(trim(text.substr(range_pos + 2)));
        if (hi < lo) throw std::invalid_argument("empty seed range");
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        return seeds;
    }
    for (const auto& part : split(text, ','))
        if (!part.empty()) seeds.push_back(std::stoull(part));
    if (seeds.empty()) throw std::invalid_argument("no seeds given");
    return seeds;
}

std::uint64_t adversary_seed(std::uint64_t session_seed) {
    return session_seed * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull;
}

std::unique_ptr<Adversary> make_adversary(const ExperimentConfig& exp,
                                          const ProtocolConfig& cfg,
                                          std::uint64_t seed) {
    if (exp.adversary == "none") return adversary_none();
    if (exp.adversary == "random")
        return adversary_random(exp.adversary_rate, adversary_seed(seed),
                                cfg.out_alphabet_size);
    if (exp.adversary == "burst-substitute")
        return adversary_burst(exp.burst_start, exp.burst_length,
                               ActionKind::substitute, cfg.out_alphabet_size);
    if (exp.adversary == "burst-out-of-sync")
        return adversary_burst(exp.burst_start, exp.burst_length,
                               ActionKind::out_of_sync, cfg.out_alphabet_size);
    throw std::invalid_argument("unknown adversary: " + exp.adversary);
}

} // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("empty config key");
        kv[key] = value;
    }
    return kv;
}

Ratio parse_ratio(const std::string& text) {
    const std::string t = trim(text);
    std::size_t used = 0;
    const auto slash = t.find('/');
    if (slash != std::string::npos) {
        const Ratio r{std::stoll(t.substr(0, slash)),
                      std::stoll(t.substr(slash + 1), &used)};
        if (used != t.size() - slash - 1)
            throw std::invalid_argument("bad ratio: " + text);
        return r;
    }
    const auto dot = t.find('.');
    if (dot != std::string::npos) {
        const std::string frac = t.substr(dot + 1);
        std::int64_t den = 1;
        for (char c : frac) {
            if (c < '0' || c > '9') throw std::invalid_argument("bad ratio: " + text);
            den *= 10;
        }
        const std::int64_t whole = dot == 0 ? 0 : std::stoll(t.substr(0, dot));
        const bool negative = !t.empty() && t[0] == '-';
        const std::int64_t frac_num = frac.empty() ? 0 : std::stoll(frac);
        const std::int64_t magnitude = std::abs(whole) * den + frac_num;
        return Ratio{negative ? -magnitude : magnitude, den}.reduced();
    }
    const Ratio r{std::stoll(t, &used), 1};
    if (used != t.size()) throw std::invalid_argument("bad ratio: " + text);
    return r;
}

ExperimentConfig experiment_from_key_values(
    const std::map<std::string, std::string>& kv) {
    ExperimentConfig exp;
    for (const auto& [key, value] : kv) {
        if (key == "protocol") {
            if (value == "poly") exp.kind = ProtocolKind::poly;
            else if (value == "const") exp.kind = ProtocolKind::constant;
            else throw std::invalid_argument("protocol must be poly or const");
        } else if (key == "T") {
            exp.T = std::stoi(value);
        } else if (key == "N") {
            exp.N = std::stoi(value);
        } else if (key == "eps") {
            exp.eps = parse_ratio(value);
        } else if (key == "alpha") {
            exp.alpha = parse_ratio(value);
        } else if (key == "rho") {
            exp.rhos.clear();
            for (const auto& part : split(value, ','))
                if (!part.empty()) exp.rhos.push_back(parse_ratio(part));
            if (exp.rhos.empty()) throw std::invalid_argument("no rho values");
        } else if (key == "adversary") {
            exp.adversary = value;
        } else if (key == "adversary_rate") {
            exp.adversary_rate = std::stod(value);
        } else if (key == "burst_start") {
            exp.burst_start = std::stoi(value);
        } else if (key == "burst_length") {
            exp.burst_length = std::stoi(value);
        } else if (key == "seeds") {
            exp.seeds = parse_seed_list(value);
        } else if (key == "tree_seed") {
            exp.tree_seed = std::stoull(value);
        } else {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
    return exp;
}

ProtocolConfig make_protocol_config(const ExperimentConfig& exp, const Ratio& rho) {
    if (exp.kind == ProtocolKind::poly)
        return poly_config_relaxed(exp.T, exp.effective_n(), exp.alpha, rho, 0,
                                   exp.tree_seed);
    return const_config_relaxed(exp.T, exp.effective_n(), exp.eps, exp.alpha, rho,
                                exp.tree_seed);
}

SessionArtifacts run_configured_session(const ExperimentConfig& exp, const Ratio& rho,
                                        std::uint64_t seed) {
    SessionArtifacts art;
    art.config = make_protocol_config(exp, rho);
    art.instance = generate_instance(exp.T, seed);
    const TreeCode tree = exp.kind == ProtocolKind::poly ? make_poly_tree(art.config)
                                                         : make_const_tree(art.config);
    auto adversary = make_adversary(exp, art.config, seed);

    if (exp.kind == ProtocolKind::poly) {
        PolyParty alice(PartyId::alice, art.instance, tree, art.config, Decoder{});
        PolyParty bob(PartyId::bob, art.instance, tree, art.config, Decoder{});
        if (art.config.decoder_exact) {
            alice.set_decoder(make_exact_decoder(tree, art.config.alpha));
            bob.set_decoder(make_exact_decoder(tree, art.config.alpha));
        } else {
            alice.set_decoder(make_shortcut_decoder(tree, art.config.alpha, bob));
            bob.set_decoder(make_shortcut_decoder(tree, art.config.alpha, alice));
        }
        art.log = run_session(alice, bob, *adversary, art.config, art.instance);
    } else {
        ConstParty alice(PartyId::alice, art.instance, tree, art.config, Decoder{});
        ConstParty bob(PartyId::bob, art.instance, tree, art.config, Decoder{});
        alice.set_decoder(make_shortcut_decoder(tree, art.config.alpha, bob));
        bob.set_decoder(make_shortcut_decoder(tree, art.config.alpha, alice));
        art.log = run_session(alice, bob, *adversary, art.config, art.instance);
    }
    art.report = analyze_log(art.log);
    return art;
}

std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
    std::string quoted = "\"";
    for (char c : raw) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string sweep_csv_header() {
    return "seed,rho,protocol,N,N_A,N_B,spent,g_A,b_A,g_B,b_B,alice_correct,"
           "bob_correct,lemma5_slack,lemma8_slack,runtime_ms";
}

std::string sweep_csv_row(const SweepRow& row) {
    std::ostringstream out;
    out << row.seed << ',' << row.rho.num << '/' << row.rho.den << ','
        << (row.kind == ProtocolKind::poly ? "poly" : "const") << ',' << row.n << ','
        << row.n_a << ',' << row.n_b << ',' << row.spent << ',' << row.g_a << ','
        << row.b_a << ',' << row.g_b << ',' << row.b_b << ','
        << (row.alice_correct ? 1 : 0) << ',' << (row.bob_correct ? 1 : 0) << ','
        << row.good_slack << ',' << row.page_slack << ',' << row.runtime_ms;
    return out.str();
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& exp, bool measure_time) {
    std::vector<SweepRow> rows;
    for (const auto& rho : exp.rhos) {
        for (const auto seed : exp.seeds) {
            const auto begin = std::chrono::steady_clock::now();
            const SessionArtifacts art = run_configured_session(exp, rho, seed);
            const auto end = std::chrono::steady_clock::now();
            const auto& rep = art.report;
            SweepRow row;
            row.seed = seed;
            row.rho = rho;
            row.kind = exp.kind;
            row.n = art.config.N;
            row.n_a = rep.n_a;
            row.n_b = rep.n_b;
            row.spent = rep.spent;
            row.g_a = rep.g_a;
            row.b_a = rep.b_a;
            row.g_b = rep.g_b;
            row.b_b = rep.b_b;
            row.alice_correct = rep.output_correct_a;
            row.bob_correct = rep.output_correct_b;
            row.good_slack = std::min(rep.good_bound_slack_a, rep.good_bound_slack_b);
            if (exp.kind == ProtocolKind::constant) {
                const std::int64_t p = art.config.eps.num, q = art.config.eps.den;
                row.page_slack = std::min(p * rep.n_a - q * rep.full_pages_a,
                                          p * rep.n_b - q * rep.full_pages_b);
            }
            if (measure_time)
                row.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                     end - begin)
                                     .count();
            row.audits_ok = rep.good_bound_ok_a && rep.good_bound_ok_b &&
                            rep.milestone_bound_ok && rep.full_page_bound_ok &&
                            rep.description_sum_ok && rep.budget_identities_ok;
            rows.push_back(row);
        }
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string csv = sweep_csv_header() + "\n";
    for (const auto& row : rows) csv += sweep_csv_row(row) + "\n";
    return csv;
}

std::string sweep_summary(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "rho        sessions  both_correct  rate\n";
    std::size_t i = 0;
    while (i < rows.size()) {
        const Ratio rho = rows[i].rho;
        int total = 0, good = 0;
        while (i < rows.size() && rows[i].rho == rho) {
            ++total;
            if (rows[i].alice_correct && rows[i].bob_correct) ++good;
            ++i;
        }
        std::ostringstream label;
        label << rho.num << '/' << rho.den;
        out << label.str();
        for (std::size_t pad = label.str().size(); pad < 11; ++pad) out << ' ';
        out << total << "         " << good << "             "
            << (total ? 100.0 * good / total : 0.0) << "%\n";
    }
    return out.str();
}

PjpInstance flip_last_choice(const PjpInstance& instance) {
    PjpInstance twin = instance;
    const int depth = instance.T - 1;
    std::uint64_t vertex = 0;
    for (int k = 0; k < depth; ++k)
        vertex = vertex * 2 + instance.correct_path[static_cast<std::size_t>(k)];
    twin.choice[static_cast<std::size_t>(depth)][vertex] ^= 1;
    twin.correct_path = forced_path(twin);
    return twin;
}

SpoofDemo run_spoof_demo(int N, const Ratio& alpha, std::uint64_t seed) {
    if (N % 3 != 0 || N > 24)
        throw std::invalid_argument(
            "the paired-world demo needs N divisible by 3 and desk-scale");
    const int T = 2;  // twin inputs differ in Bob's only choice
    const Ratio rho{1, 6};
    const auto cfg = poly_config_relaxed(T, N, alpha, rho, 0, seed + 101);
    const TreeCode tree = make_poly_tree(cfg);
    const PjpInstance inst1 = generate_instance(T, seed);
    const PjpInstance inst2 = flip_last_choice(inst1);
    const int window = N / 3;

    auto run_world = [&](const PjpInstance& real,
                         const PjpInstance& simulated_input, int window_start) {
        // Every machine decodes with the same deterministic function of its
        // received string alone (no ground-truth peeking), which is what makes
        // the two worlds indistinguishable to the victim.
        PolyParty alice(PartyId::alice, real, tree, cfg, make_greedy_decoder(tree));
        PolyParty bob(PartyId::bob, real, tree, cfg, make_greedy_decoder(tree));
        auto simulated = std::make_unique<PolyParty>(
            PartyId::bob, simulated_input, tree, cfg, make_greedy_decoder(tree));
        auto adversary = adversary_spoof_input(PartyId::alice, window_start, window,
                                               std::move(simulated));
        return run_session(alice, bob, *adversary, cfg, real);
    };

    SpoofDemo demo;
    demo.compare_round = cfg.output_round;  // ceil(2N/3) at rho = 1/6
    demo.log1 = run_world(inst1, inst2, 1);
    demo.log2 = run_world(inst2, inst1, window + 1);
    demo.correct_leaf1 = leaf_code(inst1.correct_path);
    demo.correct_leaf2 = leaf_code(inst2.correct_path);

    auto alice_view = [&](const RunLog& log) {
        std::pair<SymbolString, SymbolString> view;  // receipts, sends
        for (const auto& ev : log.events) {
            if (ev.party != PartyId::alice || ev.round > demo.compare_round) continue;
            if (ev.received_present) view.first.push_back(ev.received);
            view.second.push_back(ev.info.sent);
        }
        return view;
    };
    const auto view1 = alice_view(demo.log1);
    const auto view2 = alice_view(demo.log2);
    demo.views_identical = view1.first == view2.first;
    demo.sent_identical = view1.second == view2.second;
    demo.output_world1 = demo.log1.output_a.value_or(~0ull);
    demo.output_world2 = demo.log2.output_a.value_or(~0ull);
    demo.outputs_equal = demo.output_world1 == demo.output_world2;
    demo.wrong_in_some_world = demo.output_world1 != demo.correct_leaf1 ||
                               demo.output_world2 != demo.correct_leaf2;
    return demo;
}

} // namespace edcode
