#pragma once

// Named, reproducible experiments. Each scenario runs one headline result,
// carries a built-in acceptance predicate, and emits a machine-readable
// report; the CLI is a thin shell around this catalog.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qonline/bits.hpp"
#include "qonline/errors.hpp"
#include "qonline/game.hpp"
#include "qonline/paging.hpp"
#include "qonline/pneh.hpp"
#include "qonline/pnh.hpp"
#include "qonline/report.hpp"

namespace qonline::scenarios {

using report::Json;
using report::Report;
using report::round12;

struct ScenarioParams {
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) > 0; }

    std::string get(const std::string& key, const std::string& fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        try {
            std::size_t used = 0;
            const double v = std::stod(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument(it->second);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("parameter '" + key + "' is not a number: " + it->second);
        }
    }

    int get_int(const std::string& key, int fallback) const {
        const double v = get_double(key, fallback);
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v) {
            throw ConfigError("parameter '" + key + "' must be an integer");
        }
        return i;
    }

    game::ChannelKind get_channel(const std::string& key,
                                  game::ChannelKind fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        const std::string& v = it->second;
        if (v == "classical" || v == "classical-bits") return game::ChannelKind::ClassicalBits;
        if (v == "private" || v == "private-qubits") return game::ChannelKind::PrivateQubits;
        if (v == "epr" || v == "shared-epr") return game::ChannelKind::SharedEpr;
        throw ConfigError("unknown channel '" + v + "' (classical|private|epr)");
    }
};

struct RunOptions {
    std::string mode = "exact";  // exact | mc
    long trials = 100000;
    std::uint64_t seed = 1;
    std::string instances_path;  // optional instance file
};

struct ScenarioDef {
    std::string id;
    std::string annotation;
    std::function<Report(const ScenarioParams&, const RunOptions&)> run;
};

// --- File formats ------------------------------------------------------------

// One instance per non-empty line, symbols over {0,1,2}, whitespace ignored.
inline std::vector<std::vector<int>> load_symbol_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open instance file: " + path);
    std::vector<std::vector<int>> out;
    std::string line;
    while (std::getline(in, line)) {
        bool blank = true;
        for (char c : line) {
            if (c != ' ' && c != '\t' && c != '\r') blank = false;
        }
        if (blank) continue;
        out.push_back(pnh::parse_pnh_symbols(line));
    }
    if (out.empty()) throw ConfigError("instance file is empty: " + path);
    return out;
}

// Instances come in two-line stanzas: "N cache_size" then the request ids.
inline std::vector<paging::PagingInstance> load_paging_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open instance file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        bool blank = true;
        for (char c : line) {
            if (c != ' ' && c != '\t' && c != '\r') blank = false;
        }
        if (!blank) lines.push_back(line);
    }
    if (lines.empty() || lines.size() % 2 != 0) {
        throw ConfigError("paging instance file needs header/request line pairs");
    }
    std::vector<paging::PagingInstance> out;
    for (std::size_t i = 0; i < lines.size(); i += 2) {
        paging::PagingInstance inst;
        std::istringstream header(lines[i]);
        if (!(header >> inst.num_pages >> inst.cache_size)) {
            throw ConfigError("bad paging header line: " + lines[i]);
        }
        std::istringstream reqs(lines[i + 1]);
        int page;
        while (reqs >> page) inst.requests.push_back(page);
        out.push_back(std::move(inst));
    }
    return out;
}

inline Json fingerprint_config_json(const pneh::FingerprintConfig& config) {
    Json j = Json::object();
    j["schema_version"] = report::kSchemaVersion;
    j["L"] = config.L;
    j["epsilon"] = round12(config.epsilon);
    j["t"] = config.t;
    j["K"] = config.coefficients;
    j["seed"] = config.seed;
    return j;
}

inline pneh::FingerprintConfig load_fingerprint_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    pneh::FingerprintConfig config;
    try {
        config.L = j.at("L").get<int>();
        config.epsilon = j.at("epsilon").get<double>();
        config.t = j.at("t").get<int>();
        config.coefficients = j.at("K").get<std::vector<std::uint32_t>>();
        config.seed = j.value("seed", std::uint64_t{0});
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config is missing fields: ") + e.what());
    }
    if (config.L < 1 || config.L > 16) throw ValidationError("config L out of [1, 16]");
    config.q = 1u << config.L;
    config.tau = 0;
    while ((1 << config.tau) < config.t && config.tau < 30) ++config.tau;
    return config;
}

// --- Shared helpers ----------------------------------------------------------

namespace detail {

inline void require_exact(const std::string& id, const RunOptions& options) {
    if (options.mode != "exact") {
        throw ConfigError("scenario '" + id + "' runs in exact mode only");
    }
}

inline void forbid_instance_file(const std::string& id, const RunOptions& options) {
    if (!options.instances_path.empty()) {
        throw ConfigError("scenario '" + id + "' does not take an instance file");
    }
}

inline Json transcript_json(const game::AdviceTranscript& t) {
    Json j = Json::object();
    j["channel"] = game::to_string(t.kind);
    j["adviser_bits"] = t.adviser_bits;
    j["adviser_qubits"] = t.adviser_qubits;
    j["algorithm_qubits"] = t.algorithm_qubits;
    return j;
}

template <class Problem>
double mc_mean_cost(const Problem& problem, const typename Problem::Instance& inst,
                    const game::OnlineAlgorithm& algorithm,
                    const std::optional<game::AdviceSetup<Problem>>& advice, long trials,
                    std::uint64_t seed) {
    if (trials < 1) throw ConfigError("trials must be positive");
    double total = 0.0;
    for (long trial = 0; trial < trials; ++trial) {
        const auto run = game::run_game_sampled(problem, inst, algorithm,
                                                mix_seed(seed, static_cast<std::uint64_t>(trial)),
                                                advice);
        total += run.cost;
    }
    return total / static_cast<double>(trials);
}

// Common body of the competitive-ratio scenarios: evaluates the algorithm on
// the family, checks every per-instance ratio against the formula value.
template <class Problem>
void fill_ratio_report(Report& rep, const Problem& problem,
                       const std::vector<typename Problem::Instance>& family,
                       const game::OnlineAlgorithm& algorithm,
                       const std::optional<game::AdviceSetup<Problem>>& advice,
                       double formula_value, const RunOptions& options) {
    const bool exact = options.mode == "exact";
    const double tolerance = exact ? 1e-9 : 0.05;

    double strict_ratio = 0.0;
    std::string witness;
    double max_deviation = 0.0;
    int peak_qubits = 0;
    long total_adviser_bits = 0;
    long total_adviser_qubits = 0;
    game::ChannelKind channel = advice ? advice->channel : game::ChannelKind::ClassicalBits;

    for (std::size_t i = 0; i < family.size(); ++i) {
        const auto& inst = family[i];
        Json rec = Json::object();
        rec["digest"] = game::digest_of(problem.requests(inst));
        double expected = 0.0;
        if (exact) {
            const auto game_result = game::run_game_exact(problem, inst, algorithm, advice);
            expected = game::expected_cost(game_result.distribution);
            rec["branch_count"] = game_result.distribution.branches.size();
            peak_qubits = std::max(peak_qubits, game_result.peak_qubits);
            if (game_result.advice) {
                total_adviser_bits += game_result.advice->adviser_bits;
                total_adviser_qubits += game_result.advice->adviser_qubits;
            }
        } else {
            expected = mc_mean_cost(problem, inst, algorithm, advice, options.trials,
                                    mix_seed(options.seed, i));
            rec["trials"] = options.trials;
        }
        const double opt = problem.opt_cost(inst);
        const double ratio = expected / opt;
        rec["expected_cost"] = round12(expected);
        rec["opt_cost"] = round12(opt);
        rec["ratio"] = round12(ratio);
        rep.instances.push_back(std::move(rec));

        max_deviation = std::max(max_deviation, std::abs(ratio - formula_value));
        if (i == 0 || ratio > strict_ratio) {
            strict_ratio = ratio;
            witness = rep.instances.back()["digest"].get<std::string>();
        }
    }

    rep.aggregate["strict_ratio"] = round12(strict_ratio);
    rep.aggregate["witness_digest"] = witness;
    rep.aggregate["expected_ratio"] = round12(formula_value);
    rep.aggregate["tolerance"] = tolerance;
    rep.aggregate["max_ratio_deviation"] = round12(max_deviation);
    rep.resources["peak_working_qubits"] = peak_qubits;
    if (advice) {
        rep.resources["advice_channel"] = game::to_string(channel);
        rep.resources["total_adviser_bits"] = total_adviser_bits;
        rep.resources["total_adviser_qubits"] = total_adviser_qubits;
    }
    rep.pass = max_deviation <= tolerance;
}

inline std::vector<pnh::PnhProblem::Instance> pnh_family_for(
    const pnh::PnhParams& params, const RunOptions& options) {
    if (!options.instances_path.empty()) {
        return load_symbol_lines(options.instances_path);
    }
    pnh::PnhFamilyOptions fam;
    fam.seed = options.seed;
    return pnh::enumerate_pnh_family(params, fam);
}

inline pnh::PnhParams pnh_params_from(const ScenarioParams& params) {
    pnh::PnhParams p;
    p.k = params.get_int("k", 1);
    p.r = params.get_double("r", 1.0);
    p.w = params.get_double("w", 3.0);
    pnh::validate_params(p);
    return p;
}

inline Json pnh_params_json(const pnh::PnhParams& p) {
    Json j = Json::object();
    j["k"] = p.k;
    j["r"] = round12(p.r);
    j["w"] = round12(p.w);
    return j;
}

inline double distribution_max_delta(const game::OutcomeDistribution& a,
                                     const game::OutcomeDistribution& b) {
    if (a.branches.size() != b.branches.size()) {
        return std::numeric_limits<double>::infinity();
    }
    double max_delta = 0.0;
    for (std::size_t i = 0; i < a.branches.size(); ++i) {
        if (a.branches[i].output != b.branches[i].output ||
            a.branches[i].cost != b.branches[i].cost) {
            return std::numeric_limits<double>::infinity();
        }
        max_delta = std::max(
            max_delta, std::abs(a.branches[i].probability - b.branches[i].probability));
    }
    return max_delta;
}

}  // namespace detail

// --- Scenario runners ----------------------------------------------------------

namespace detail {

inline Report run_pnh_ratio(const std::string& id, const ScenarioParams& params,
                            const RunOptions& options) {
    const auto p = pnh_params_from(params);
    const pnh::PnhProblem problem(p);
    const auto family = pnh_family_for(p, options);

    std::unique_ptr<game::OnlineAlgorithm> algorithm;
    std::optional<game::AdviceSetup<pnh::PnhProblem>> advice;
    double formula = 0.0;
    if (id == "pnh-alg1") {
        algorithm = pnh::alg1_quantum(p);
        formula = (p.r + p.w) / (2.0 * p.r);
    } else if (id == "pnh-guess-count") {
        algorithm = pnh::alg_guess_count(p);
        formula = (p.r + p.w) / (2.0 * p.r);
    } else if (id == "pnh-blind-guess") {
        algorithm = pnh::alg_blind_guess();
        formula = (p.r + 7.0 * p.w) / (8.0 * p.r);
    } else if (id == "pnh-advice1") {
        algorithm = pnh::alg_advice_1bit(p);
        advice = pnh::pnh_advice_setup(problem, params.get_channel(
                                                    "channel", game::ChannelKind::ClassicalBits));
        formula = 1.0;
    } else if (id == "pnh-advice1-qubit") {
        algorithm = pnh::alg_advice_1qubit(p);
        advice = pnh::pnh_advice_setup(problem, game::ChannelKind::PrivateQubits);
        formula = 1.0;
    } else {
        throw ConfigError("unknown ratio scenario: " + id);
    }

    Report rep;
    rep.scenario = id;
    rep.mode = options.mode;
    rep.seed = options.seed;
    rep.params = pnh_params_json(p);
    fill_ratio_report(rep, problem, family, *algorithm, advice, formula, options);
    return rep;
}

inline Report run_pnh_adversary(const ScenarioParams& params, const RunOptions& options) {
    require_exact("pnh-adversary", options);
    forbid_instance_file("pnh-adversary", options);
    const auto p = pnh_params_from(params);
    const pnh::PnhProblem problem(p);

    Report rep;
    rep.scenario = "pnh-adversary";
    rep.mode = options.mode;
    rep.seed = options.seed;
    rep.params = pnh_params_json(p);

    bool all_forced = true;
    double witnessed = 0.0;
    for (const auto& strategy : pnh::deterministic_strategies()) {
        const auto instance = pnh::adversary_unrestricted(*strategy, p);
        const auto result = game::run_game_exact(problem, instance, *strategy);
        const double cost = game::expected_cost(result.distribution);
        const double ratio = cost / problem.opt_cost(instance);
        witnessed = std::max(witnessed, ratio);
        all_forced = all_forced && (cost == p.w);
        Json rec = Json::object();
        rec["strategy"] = strategy->info().id;
        rec["digest"] = game::digest_of(instance);
        rec["cost"] = round12(cost);
        rec["ratio"] = round12(ratio);
        rec["forced_worst"] = (cost == p.w);
        rep.instances.push_back(std::move(rec));
    }
    rep.aggregate["witnessed_ratio"] = round12(witnessed);
    rep.aggregate["expected_ratio"] = round12(p.w / p.r);
    rep.pass = all_forced && std::abs(witnessed - p.w / p.r) <= 1e-12;
    return rep;
}

inline Report run_pnh_emulation(const ScenarioParams& params, const RunOptions& options) {
    require_exact("pnh-emulation", options);
    const auto p = pnh_params_from(params);
    const pnh::PnhProblem problem(p);
    const auto family = pnh_family_for(p, options);

    Report rep;
    rep.scenario = "pnh-emulation";
    rep.mode = options.mode;
    rep.seed = options.seed;
    rep.params = pnh_params_json(p);

    bool all_match = true;
    double worst_delta = 0.0;
    for (int which = 0; which < 2; ++which) {
        auto original = which == 0 ? pnh::alg_guess_count(p) : pnh::alg_blind_guess();
        auto wrapped = game::wrap_randomized_as_quantum(
            which == 0 ? pnh::alg_guess_count(p) : pnh::alg_blind_guess());
        for (const auto& inst : family) {
            const auto base = game::run_game_exact(problem, inst, *original);
            const auto emulated = game::run_game_exact(problem, inst, *wrapped);
            const double delta =
                distribution_max_delta(base.distribution, emulated.distribution);
            const bool match = delta <= 1e-12;
            all_match = all_match && match;
            if (std::isfinite(delta)) worst_delta = std::max(worst_delta, delta);
            Json rec = Json::object();
            rec["algorithm"] = original->info().id;
            rec["digest"] = game::digest_of(inst);
            rec["branch_count"] = base.distribution.branches.size();
            rec["max_probability_delta"] = std::isfinite(delta) ? round12(delta) : -1.0;
            rec["match"] = match;
            rep.instances.push_back(std::move(rec));
        }
    }
    rep.aggregate["tolerance"] = 1e-12;
    rep.aggregate["max_probability_delta"] = round12(worst_delta);
    rep.pass = all_match;
    return rep;
}

inline Report run_pnh_fooling(const ScenarioParams& params, const RunOptions& options) {
    require_exact("pnh-fooling", options);
    forbid_instance_file("pnh-fooling", options);
    const int k = params.get_int("k", 1);
    if (k < 0 || k > 10) throw ConfigError("k must be in [0, 10]");
    const int m = params.get_int("m", 3 << k);

    Report rep;
    rep.scenario = "pnh-fooling";
    rep.mode = options.mode;
    rep.seed = options.seed;
    rep.params["k"] = k;
    rep.params["m"] = m;

    struct Case {
        std::string name;
        pnh::TransitionTable machine;
        bool expect_pair;
    };
    const std::vector<Case> cases = {
        {"stateless", pnh::stateless_machine(), true},
        {"ones-parity", pnh::ones_parity_machine(), k >= 1},
        {"ones-counter-mod-2^(k+1)", pnh::ones_counter_machine(1 << (k + 1)), false},
    };

    bool ok = true;
    for (const auto& c : cases) {
        const auto found = pnh::fooling_pair_search(c.machine, k, m);
        Json rec = Json::object();
        rec["machine"] = c.name;
        rec["states"] = c.machine.num_states;
        rec["expected_pair"] = c.expect_pair;
        rec["found_pair"] = found.has_value();
        if (found) {
            rec["block_parity_0"] = bits_to_string(found->first);
            rec["block_parity_1"] = bits_to_string(found->second);
            const bool parities_differ = pnh::partial_mod(found->first, k) == 0 &&
                                         pnh::partial_mod(found->second, k) == 1;
            rec["parities_differ"] = parities_differ;
            ok = ok && parities_differ;
        }
        ok = ok && (found.has_value() == c.expect_pair);
        rep.instances.push_back(std::move(rec));
    }
    rep.pass = ok;
    return rep;
}

inline pneh::PnehParams pneh_params_from(const ScenarioParams& params) {
    pneh::PnehParams p;
    p.r = params.get_double("r", 1.0);
    p.w = params.get_double("w", 3.0);
    pneh::validate_params(p);
    return p;
}

inline Report run_pneh_alg2(const ScenarioParams& params, const RunOptions& options) {
    require_exact("pneh-alg2", options);
    const auto p = pneh_params_from(params);
    const double epsilon = params.get_double("epsilon", 0.25);
    const pneh::PnehProblem problem(p);

    std::vector<pneh::PnehProblem::Instance> family;
    if (!options.instances_path.empty()) {
        family = load_symbol_lines(options.instances_path);
    } else {
        const int m = params.get_int("m", 2);
        family = pneh::enumerate_pneh_family({m, m, m}, options.seed);
    }

    Report rep;
    rep.scenario = "pneh-alg2";
    rep.mode = options.mode;
    rep.seed = options.seed;
    rep.params["r"] = round12(p.r);
    rep.params["w"] = round12(p.w);
    rep.params["epsilon"] = round12(epsilon);

    auto algorithm = pneh::alg2_quantum(pneh::Alg2Mode::idealized(epsilon));
    bool ok = true;
    double max_class_ratio = 0.0;
    for (const auto& inst : family) {
        const auto eq = problem.eq_values(inst);
        const int eq_class = (eq[0] << 2) | (eq[1] << 1) | eq[2];
        const auto result = game::run_game_exact(problem, inst, *algorithm);
        const double expected = game::expected_cost(result.distribution);
        const double closed = pneh::pneh_expected_cost_closed_form(eq_class, p.r, p.w, epsilon);
        const double delta = std::abs(expected - closed);
        ok = ok && delta <= 1e-9;
        max_class_ratio = std::max(max_class_ratio, expected / p.r);
        Json rec = Json::object();
        char label[4] = {static_cast<char>('0' + eq[0]), static_cast<char>('0' + eq[1]),
                         static_cast<char>('0' + eq[2]), 0};
        rec["eq_class"] = label;
        rec["digest"] = game::digest_of(inst);
        rec["expected_cost"] = round12(expected);
        rec["closed_form_cost"] = round12(closed);
        rec["abs_delta"] = round12(delta);
        rec["ratio"] = round12(expected / p.r);
        rep.instances.push_back(std::move(rec));
    }
    // Headline aggregate uses the two-error-prone-block class; the worst case
    // over classes is reported alongside.
    rep.aggregate["headline_ratio"] =
        round12(pneh::pneh_expected_cost_closed_form(0, p.r, p.w, epsilon) / p.r);
    rep.aggregate["max_class_ratio"] = round12(max_class_ratio);
    rep.aggregate["tolerance"] = 1e-9;
    rep.pass = ok;
    return rep;
}

inline Report run_pneh_table1(const ScenarioParams& params, const RunOptions& options) {
    require_exact("pneh-table1", options);
    forbid_instance_file("pneh-table1", options);
    const auto p = pneh_params_from(params);
    const double epsilon = params.get_double("epsilon", 0.25);
    const int m = params.get_int("m", 2);
    const pneh::PnehProblem problem(p);
    const auto family = pneh::enumerate_pneh_family({m, m, m}, options.seed);

    Report rep;
    rep.scenario = "pneh-table1";
    rep.mode = options.mode;
    rep.seed = options.seed;
    rep.params["r"] = round12(p.r);
    rep.params["w"] = round12(p.w);
    rep.params["epsilon"] = round12(epsilon);

    auto algorithm = pneh::alg2_quantum(pneh::Alg2Mode::idealized(epsilon));
    double max_delta = 0.0;
    bool costs_ok = true;
    for (const auto& inst : family) {
        const auto eq = problem.eq_values(inst);
        const int eq_class = (eq[0] << 2) | (eq[1] << 1) | eq[2];
        const auto pos = pnh::PnhProblem::guardian_positions(inst);
        const auto result = game::run_game_exact(problem, inst, *algorithm);

        std::array<double, 8> simulated{};
        std::array<double, 8> sim_cost{};
        sim_cost.fill(-1.0);
        for (const auto& branch : result.distribution.branches) {
            const int y = (branch.output[pos[0]] << 2) | (branch.output[pos[1]] << 1) |
                          branch.output[pos[2]];
            simulated[static_cast<std::size_t>(y)] += branch.probability;
            sim_cost[static_cast<std::size_t>(y)] = branch.cost;
        }

        double class_delta = 0.0;
        for (int y = 0; y < 8; ++y) {
            const double model = pneh::table_cell_probability(eq_class, y, epsilon);
            class_delta = std::max(class_delta,
                                   std::abs(model - simulated[static_cast<std::size_t>(y)]));
            if (model > 1e-9 && sim_cost[static_cast<std::size_t>(y)] >= 0.0) {
                costs_ok = costs_ok && sim_cost[static_cast<std::size_t>(y)] ==
                                           pneh::table_cell_cost(eq_class, y, p.r, p.w);
            }
        }
        max_delta = std::max(max_delta, class_delta);
        Json rec = Json::object();
        char label[4] = {static_cast<char>('0' + eq[0]), static_cast<char>('0' + eq[1]),
                         static_cast<char>('0' + eq[2]), 0};
        rec["eq_class"] = label;
        rec["digest"] = game::digest_of(inst);
        rec["max_cell_delta"] = round12(class_delta);
        rep.instances.push_back(std::move(rec));
    }
    rep.aggregate["cells_checked"] = 64;
    rep.aggregate["max_cell_delta"] = round12(max_delta);
    rep.aggregate["costs_match"] = costs_ok;
    rep.aggregate["tolerance"] = 1e-9;
    rep.pass = max_delta <= 1e-9 && costs_ok;
    return rep;
}

inline Report run_pneh_real_fp(const ScenarioParams& params, const RunOptions& options) {
    require_exact("pneh-real-fp", options);
    forbid_instance_file("pneh-real-fp", options);
    const auto p = pneh_params_from(params);
    const int L = params.get_int("L", 3);
    const int t = params.get_int("t", 8);
    const double epsilon = params.get_double("epsilon", 0.25);
    const int retries = params.get_int("retries", 10);
    const auto config =
        pneh::build_fingerprint_config(L, epsilon, t, options.seed, retries);
    const pneh::PnehProblem problem(p);
    const auto family = pneh::enumerate_pneh_family({2 * L, 2 * L, 2}, options.seed);

    Report rep;
    rep.scenario = "pneh-real-fp";
    rep.mode = options.mode;
    rep.seed = options.seed;
    rep.params["r"] = round12(p.r);
    rep.params["w"] = round12(p.w);
    rep.params["epsilon"] = round12(epsilon);
    rep.params["L"] = L;
    rep.params["t"] = t;
    rep.resources["fingerprint_config"] = fingerprint_config_json(config);

    auto algorithm = pneh::alg2_quantum(pneh::Alg2Mode::real(config));
    bool ok = true;
    for (const auto& inst : family) {
        const auto eq = problem.eq_values(inst);
        const int eq_class = (eq[0] << 2) | (eq[1] << 1) | eq[2];
        const auto result = game::run_game_exact(problem, inst, *algorithm);
        const double expected = game::expected_cost(result.distribution);
        const double bound = pneh::pneh_expected_cost_closed_form(eq_class, p.r, p.w, epsilon);
        const bool within = expected <= bound + 1e-9;
        ok = ok && within;
        Json rec = Json::object();
        char label[4] = {static_cast<char>('0' + eq[0]), static_cast<char>('0' + eq[1]),
                         static_cast<char>('0' + eq[2]), 0};
        rec["eq_class"] = label;
        rec["digest"] = game::digest_of(inst);
        rec["expected_cost"] = round12(expected);
        rec["idealized_bound"] = round12(bound);
        rec["within_bound"] = within;
        rec["branch_count"] = result.distribution.branches.size();
        rep.instances.push_back(std::move(rec));
    }
    rep.pass = ok;
    return rep;
}

inline Report run_pneh_fingerprint(const ScenarioParams& params,
                                   const RunOptions& options) {
    require_exact("pneh-fingerprint", options);
    forbid_instance_file("pneh-fingerprint", options);
    const int L = params.get_int("L", 12);
    const int t = params.get_int("t", 128);
    const double epsilon = params.get_double("epsilon", 0.25);
    const int retries = params.get_int("retries", 10);

    const auto config = pneh::build_fingerprint_config(L, epsilon, t, options.seed, retries);
    const auto verification = pneh::verify_fingerprint_config(config);

    Report rep;
    rep.scenario = "pneh-fingerprint";
    rep.mode = options.mode;
    rep.seed = options.seed;
    rep.params["L"] = L;
    rep.params["t"] = t;
    rep.params["epsilon"] = round12(epsilon);
    rep.params["retries"] = retries;
    rep.resources["fingerprint_config"] = fingerprint_config_json(config);

    // Equal halves must accept with certainty; a few simulated unequal blocks
    // must match the closed form the verifier exhausted.
    std::mt19937_64 rng(options.seed);
    bool equal_ok = true;
    bool sim_matches = true;
    for (int sample = 0; sample < 5; ++sample) {
        const auto equal_block = pneh::make_eq_block(1, 2 * L, rng);
        const double accept = pneh::fingerprint_accept_probability(config, equal_block);
        equal_ok = equal_ok && std::abs(accept - 1.0) <= 1e-9;

        const auto unequal_block = pneh::make_eq_block(0, 2 * L, rng);
        std::uint32_t first = 0;
        std::uint32_t second = 0;
        for (int j = 0; j < L; ++j) {
            first |= static_cast<std::uint32_t>(unequal_block[j]) << j;
            second |= static_cast<std::uint32_t>(unequal_block[L + j]) << j;
        }
        const std::uint32_t d = (first + config.q - second) % config.q;
        const double sim = pneh::fingerprint_accept_probability(config, unequal_block);
        const double closed = pneh::accept_probability_closed_form(config, d);
        sim_matches = sim_matches && std::abs(sim - closed) <= 1e-9;
        Json rec = Json::object();
        rec["sample"] = sample;
        rec["equal_accept"] = round12(accept);
        rec["unequal_accept_simulated"] = round12(sim);
        rec["unequal_accept_closed_form"] = round12(closed);
        rep.instances.push_back(std::move(rec));
    }

    rep.aggregate["max_accept_over_d"] = round12(verification.max_accept);
    rep.aggregate["worst_d"] = verification.worst_d;
    rep.aggregate["nonzero_d_checked"] = config.q - 1;
    rep.aggregate["equal_halves_accept_is_one"] = equal_ok;
    rep.aggregate["simulation_matches_closed_form"] = sim_matches;
    rep.pass = verification.max_accept <= epsilon && equal_ok && sim_matches;
    return rep;
}

inline Report run_superdense(const ScenarioParams& params, const RunOptions& options) {
    require_exact("superdense", options);
    forbid_instance_file("superdense", options);
    const int max_bits = params.get_int("maxbits", 64);

    Report rep;
    rep.scenario = "superdense";
    rep.mode = options.mode;
    rep.seed = options.seed;
    rep.params["maxbits"] = max_bits;

    bool ok = true;
    for (int pair = 0; pair < 4; ++pair) {
        auto state = qcore::apply_gates(qcore::make_epr_pair(),
                                        qcore::superdense_encode(pair >> 1, pair & 1));
        const auto [b0, b1] = qcore::superdense_decode(state);
        const bool match = b0 == (pair >> 1) && b1 == (pair & 1);
        ok = ok && match;
        Json rec = Json::object();
        rec["bit_pair"] = std::string{static_cast<char>('0' + (pair >> 1)),
                                      static_cast<char>('0' + (pair & 1))};
        rec["round_trip"] = match;
        rep.instances.push_back(std::move(rec));
    }

    std::mt19937_64 rng(options.seed);
    for (int b = 0; b <= max_bits; ++b) {
        BitString bits(static_cast<std::size_t>(b));
        for (auto& bit : bits) bit = static_cast<int>(rng() & 1);
        const auto result = game::advice_transmit(game::ChannelKind::SharedEpr, bits);
        const bool lossless = result.received == bits;
        const bool qubits_ok = result.transcript.adviser_qubits == (b + 1) / 2;
        ok = ok && lossless && qubits_ok;
        Json rec = Json::object();
        rec["bits"] = b;
        rec["lossless"] = lossless;
        rec["adviser_qubits"] = result.transcript.adviser_qubits;
        rep.instances.push_back(std::move(rec));
    }
    rep.aggregate["round_trips_checked"] = 4;
    rep.aggregate["strings_checked"] = max_bits + 1;
    rep.pass = ok;
    return rep;
}

inline Report run_paging(const std::string& id, const ScenarioParams& params,
                         const RunOptions& options) {
    require_exact(id, options);
    const game::ChannelKind channel =
        id == "paging-epr" ? game::ChannelKind::SharedEpr
                           : params.get_channel("channel", game::ChannelKind::ClassicalBits);

    std::vector<paging::PagingInstance> corpus;
    if (!options.instances_path.empty()) {
        corpus = load_paging_file(options.instances_path);
    } else {
        corpus = paging::paging_corpus(params.get_int("count", 200), options.seed,
                                       params.get_int("maxpages", 8),
                                       params.get_int("maxcache", 4),
                                       params.get_int("maxrequests", 24));
    }

    Report rep;
    rep.scenario = id;
    rep.mode = options.mode;
    rep.seed = options.seed;
    rep.params["count"] = corpus.size();
    rep.params["channel"] = game::to_string(channel);

    const paging::PagingProblem problem;
    bool ok = true;
    long total_qubits = 0;
    long total_bits = 0;
    for (const auto& inst : corpus) {
        const auto opt_run = paging::belady(inst);
        const auto algorithm = paging::alg_paging_with_advice(inst.cache_size);
        const auto advice = paging::paging_advice_setup(channel);
        const auto result = game::run_game_exact(problem, inst, *algorithm,
                                                 std::optional{advice});
        const double faults = game::expected_cost(result.distribution);
        const int n = static_cast<int>(inst.requests.size());
        bool transcript_ok = true;
        if (result.advice) {
            total_qubits += result.advice->adviser_qubits;
            total_bits += result.advice->adviser_bits;
            if (channel == game::ChannelKind::SharedEpr) {
                transcript_ok = result.advice->adviser_qubits == (n + 1) / 2;
            } else if (channel == game::ChannelKind::PrivateQubits) {
                transcript_ok = result.advice->adviser_qubits == n;
            } else {
                transcript_ok = result.advice->adviser_bits == n;
            }
        }
        const bool optimal = faults == static_cast<double>(opt_run.fault_count);
        ok = ok && optimal && transcript_ok;
        Json rec = Json::object();
        rec["digest"] = game::digest_of(inst.requests);
        rec["requests"] = n;
        rec["cache_size"] = inst.cache_size;
        rec["faults"] = faults;
        rec["optimal_faults"] = opt_run.fault_count;
        rec["optimal"] = optimal;
        rec["transcript_ok"] = transcript_ok;
        rep.instances.push_back(std::move(rec));
    }
    rep.aggregate["all_optimal"] = ok;
    rep.resources["advice_channel"] = game::to_string(channel);
    rep.resources["total_adviser_bits"] = total_bits;
    rep.resources["total_adviser_qubits"] = total_qubits;
    rep.pass = ok;
    return rep;
}

}  // namespace detail

inline const std::vector<ScenarioDef>& catalog() {
    static const std::vector<ScenarioDef> defs = {
        {"pnh-alg1",
         "PNH, single-qubit rotation algorithm; expected strict ratio (r+w)/(2r)",
         [](const ScenarioParams& p, const RunOptions& o) {
             return detail::run_pnh_ratio("pnh-alg1", p, o);
         }},
        {"pnh-guess-count",
         "PNH, randomized guess-and-count baseline; expected strict ratio (r+w)/(2r)",
         [](const ScenarioParams& p, const RunOptions& o) {
             return detail::run_pnh_ratio("pnh-guess-count", p, o);
         }},
        {"pnh-blind-guess",
         "PNH, memoryless blind guessing; expected strict ratio (r+7w)/(8r)",
         [](const ScenarioParams& p, const RunOptions& o) {
             return detail::run_pnh_ratio("pnh-blind-guess", p, o);
         }},
        {"pnh-advice1",
         "PNH with 1 classical advice bit; expected strict ratio 1.0",
         [](const ScenarioParams& p, const RunOptions& o) {
             return detail::run_pnh_ratio("pnh-advice1", p, o);
         }},
        {"pnh-advice1-qubit",
         "PNH with 1 advice qubit; expected strict ratio 1.0",
         [](const ScenarioParams& p, const RunOptions& o) {
             return detail::run_pnh_ratio("pnh-advice1-qubit", p, o);
         }},
        {"pnh-adversary",
         "PNH adversary forcing cost w on deterministic strategies; witnessed ratio w/r",
         [](const ScenarioParams& p, const RunOptions& o) {
             return detail::run_pnh_adversary(p, o);
         }},
        {"pnh-emulation",
         "PNH randomized baselines replayed with quantum coins; identical distributions",
         [](const ScenarioParams& p, const RunOptions& o) {
             return detail::run_pnh_emulation(p, o);
         }},
        {"pnh-fooling",
         "fooling pairs against small deterministic readers of PartialMOD blocks",
         [](const ScenarioParams& p, const RunOptions& o) {
             return detail::run_pnh_fooling(p, o);
         }},
        {"pneh-alg2",
         "PNEH fingerprint algorithm, idealized error; class costs match closed forms",
         [](const ScenarioParams& p, const RunOptions& o) {
             return detail::run_pneh_alg2(p, o);
         }},
        {"pneh-table1",
         "PNEH full 64-cell answer/class probability table at exact epsilon",
         [](const ScenarioParams& p, const RunOptions& o) {
             return detail::run_pneh_table1(p, o);
         }},
        {"pneh-real-fp",
         "PNEH with a verified fingerprint; cost bounded by the idealized closed form",
         [](const ScenarioParams& p, const RunOptions& o) {
             return detail::run_pneh_real_fp(p, o);
         }},
        {"pneh-fingerprint",
         "streaming equality fingerprint; one-sided error at most epsilon",
         [](const ScenarioParams& p, const RunOptions& o) {
             return detail::run_pneh_fingerprint(p, o);
         }},
        {"superdense",
         "dense-coding advice channel; b bits in ceil(b/2) adviser qubits",
         [](const ScenarioParams& p, const RunOptions& o) {
             return detail::run_superdense(p, o);
         }},
        {"paging-advice",
         "paging with keep-bit advice; fault count equals the offline optimum",
         [](const ScenarioParams& p, const RunOptions& o) {
             return detail::run_paging("paging-advice", p, o);
         }},
        {"paging-epr",
         "paging advice over shared EPR pairs; ⌈n/2⌉ advice qubits, optimal faults",
         [](const ScenarioParams& p, const RunOptions& o) {
             return detail::run_paging("paging-epr", p, o);
         }},
    };
    return defs;
}

inline Report run_scenario(const std::string& id, const ScenarioParams& params,
                           const RunOptions& options) {
    if (options.mode != "exact" && options.mode != "mc") {
        throw ConfigError("mode must be 'exact' or 'mc'");
    }
    for (const auto& def : catalog()) {
        if (def.id == id) return def.run(params, options);
    }
    throw ConfigError("unknown scenario '" + id + "'; see the list subcommand");
}

// Re-verifies a serialized coefficient set against its declared epsilon.
inline Report verify_fingerprint_file(const std::string& path) {
    const auto config = load_fingerprint_config(path);
    const auto verification = pneh::verify_fingerprint_config(config);
    Report rep;
    rep.scenario = "verify-fingerprint";
    rep.params["path"] = path;
    rep.params["L"] = config.L;
    rep.params["t"] = config.t;
    rep.params["epsilon"] = round12(config.epsilon);
    rep.aggregate["max_accept_over_d"] = round12(verification.max_accept);
    rep.aggregate["worst_d"] = verification.worst_d;
    rep.aggregate["nonzero_d_checked"] = config.q - 1;
    rep.pass = verification.max_accept <= config.epsilon;
    return rep;
}

}  // namespace qonline::scenarios
