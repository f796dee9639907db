#pragma once

#include "bayesmerton/strategy.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bayesmerton::cli {

/// Fully resolved run configuration. After resolve() every field holds an
/// explicit value; nothing is defaulted later.
struct RunConfig {
    double r = 0.0;
    double sigma = 1.0;
    std::vector<double> mus;
    std::vector<double> prior;
    double alpha = 0.5;
    double t = 0.0;
    double T = 1.0;
    double y = 0.0;
    QuadratureConfig quad;
    std::vector<double> horizons;      ///< empty = 1, 2, 4, ..., 1024
    double sim_step = 0.0;             ///< 0 = 1e-3 * T
    std::size_t n_paths = 100000;
    std::uint64_t seed = 1;
    double filter_horizon = 5.0;
    double filter_step = 1e-3;
    std::size_t theta_index = 0;
    std::vector<double> perturbations{0.5, 0.8, 1.25, 2.0};
    double reference_scale = 1.0;
    std::string out_dir = ".";
};

/// Command-line values that take precedence over the file.
struct Overrides {
    std::optional<double> alpha, t, T, y, step, rel_tol;
    std::optional<std::size_t> n_paths, nodes;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

/// Parses the JSON document. Unknown keys and wrong types throw InvalidConfig.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Applies overrides, fills derived defaults and validates (market, alpha,
/// query, quadrature). Throws Error on any violation.
RunConfig resolve(RunConfig config, const Overrides& overrides);

/// Resolved configuration as JSON (same schema as the input file).
std::string to_json(const RunConfig& config);

enum class Command { Eval, Sweep, FilterDemo, OptCheck };

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitDominated = 4;

/// Runs one command. Errors are reported on `err` as a single JSON line
/// {"error": <name>, "message": <text>} and mapped to exit codes.
int run_command(Command command, const RunConfig& config, std::ostream& out, std::ostream& err);

int cmd_eval(const RunConfig& config, std::ostream& out);
int cmd_sweep(const RunConfig& config, std::ostream& out);
int cmd_filter_demo(const RunConfig& config, std::ostream& out);
int cmd_optcheck(const RunConfig& config, std::ostream& out);

}  // namespace bayesmerton::cli
