// Command-line runner for the scenario catalog.
//
//   qonline list
//   qonline run <scenario> [--params k=v ...] [--mode exact|mc] [--trials N]
//               [--seed S] [--instances FILE] [--out FILE]
//   qonline verify-fingerprint <config.json> [--out FILE]
//
// `run` exits 0 iff the scenario's built-in acceptance predicate holds.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qonline/scenarios.hpp"

namespace {

qonline::scenarios::ScenarioParams parse_params(const std::vector<std::string>& pairs) {
    qonline::scenarios::ScenarioParams params;
    for (const auto& pair : pairs) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw qonline::ConfigError("--params expects key=value, got '" + pair + "'");
        }
        params.values[pair.substr(0, eq)] = pair.substr(eq + 1);
    }
    return params;
}

void emit(const qonline::report::Report& rep, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << rep.to_string();
    } else {
        rep.write(out_path);
        std::cout << (rep.pass ? "pass" : "FAIL") << ": " << rep.scenario
                  << " -> " << out_path << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact simulation and competitive analysis of quantum online algorithms"};
    app.require_subcommand(1);

    auto* list_cmd = app.add_subcommand("list", "list registered scenarios");

    std::string scenario_id;
    std::vector<std::string> param_pairs;
    qonline::scenarios::RunOptions options;
    std::string out_path;
    auto* run_cmd = app.add_subcommand("run", "run one scenario and write its report");
    run_cmd->add_option("scenario", scenario_id, "scenario id (see list)")->required();
    run_cmd->add_option("--params", param_pairs, "scenario parameter key=value")
        ->take_all();
    run_cmd->add_option("--mode", options.mode, "exact or mc")
        ->check(CLI::IsMember({"exact", "mc"}));
    run_cmd->add_option("--trials", options.trials, "samples per instance in mc mode");
    run_cmd->add_option("--seed", options.seed, "root seed");
    run_cmd->add_option("--instances", options.instances_path,
                        "instance file (format depends on the scenario)");
    run_cmd->add_option("--out", out_path, "report path (default: stdout)");

    std::string config_path;
    std::string verify_out_path;
    auto* verify_cmd = app.add_subcommand(
        "verify-fingerprint", "re-verify a serialized fingerprint coefficient set");
    verify_cmd->add_option("config", config_path, "fingerprint config JSON file")
        ->required();
    verify_cmd->add_option("--out", verify_out_path, "report path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_cmd->parsed()) {
            for (const auto& def : qonline::scenarios::catalog()) {
                std::cout << def.id << "\n    " << def.annotation << "\n";
            }
            return 0;
        }
        if (run_cmd->parsed()) {
            const auto rep = qonline::scenarios::run_scenario(
                scenario_id, parse_params(param_pairs), options);
            emit(rep, out_path);
            return rep.pass ? 0 : 1;
        }
        if (verify_cmd->parsed()) {
            const auto rep = qonline::scenarios::verify_fingerprint_file(config_path);
            emit(rep, verify_out_path);
            return rep.pass ? 0 : 1;
        }
    } catch (const qonline::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
