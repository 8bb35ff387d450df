#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qfluct/report.hpp"

namespace qfluct::cli {

/// Process exit statuses.
enum Status : int {
    ok = 0,
    tolerance_failure = 1,
    parse_failure = 2,
    validity_failure = 3,
    io_failure = 4,
};

/// Every knob of a scenario run. Fields unused by a command keep their defaults
/// and are left out of the canonical form.
struct ScenarioConfig {
    std::string command;

    std::size_t nodes = 0;
    double hbar = 1.0;
    double tol = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string format;

    std::string state;
    std::string pair = "Lz,phi";
    std::string ops;
    double delta_e = 0.0;

    double x0 = 0.0;
    double sigma = 1.0;
    double k = 1.0;
    double gamma = 0.0;
    double lambda = 0.0;
    double upsilon = 0.0;
    double mass = 1.0;
    double omega = 1.0;

    std::string dist = "gaussian";
    double s = 1.0;
    double width = 1.0;
    int max_order = 4;

    int n = 3;
    double spin_gamma = 1.0;
    int cases = 0;

    std::string kind = "entropy";
};

/// Option keys accepted by `command`, global flags included.
const std::vector<std::string>& command_keys(const std::string& command);

/// Canonical JSON form: `command` plus the command's keys in a fixed order.
Json to_json(const ScenarioConfig& config);
/// Rebuilds a config from its canonical (or hand-written) JSON form.
ScenarioConfig config_from_json(const Json& doc);

/// Parses argv (program name first) into a config; `--config <path>` JSON
/// values are applied first, explicit flags override them. Throws
/// ParseError on bad input and std::ios_base::failure on unreadable config.
ScenarioConfig parse_command_line(const std::vector<std::string>& args);

/// Runs a parsed scenario, writing the report to `out` (or to config.out).
int run_scenario(const ScenarioConfig& config, std::ostream& out, std::ostream& err);

/// Full entry point: parse, run, map failures to exit statuses.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qfluct::cli
