#pragma once

#include "bayesmerton/model.hpp"
#include "bayesmerton/strategy.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace bayesmerton {

/// Fraction of wealth in the stock as a function of (t, Y_t).
using FeedbackStrategy = std::function<double(double t, double y)>;

struct SimulationSettings {
    double T = 1.0;
    double step = 1e-3;  ///< the last step is shortened to end exactly at T
    std::size_t n_paths = 100000;
    std::uint64_t seed = 1;
    double s0 = 1.0;
    unsigned threads = 0;  ///< 0 = hardware concurrency

    void validate() const;
    std::size_t n_steps() const;
};

/// One simulated trajectory. Wealth is per unit of initial capital.
struct PathBundle {
    std::uint64_t seed = 0;  ///< per-path seed, derive_seed(master, path index)
    double step = 0.0;
    std::size_t theta_index = 0;
    std::string strategy_name;
    std::vector<double> times;
    std::vector<double> stock;
    std::vector<double> y;
    std::vector<double> wealth;
    std::vector<double> fraction;  ///< fraction held over [t_i, t_{i+1}); last entry repeats
};

struct UtilityEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
};

struct PairedDifference {
    double mean = 0.0;  ///< mean of U(candidate) - U(reference)
    double std_error = 0.0;
};

/// Path p draws one uniform (hidden drift from the prior) and then one
/// standard normal per step from mt19937_64(derive_seed(seed, p)). Log stock
/// and log wealth are advanced exactly for a strategy frozen over each step:
///   log X += (r + (theta - r) pi - sigma^2 pi^2 / 2) h + sigma pi dW,
///   Y     += dW + gamma_theta h.
std::vector<PathBundle> simulate_paths(const MarketModel& model, const FeedbackStrategy& strategy,
                                       const std::string& name, const SimulationSettings& settings);

/// Terminal wealth only (same random numbers as simulate_paths), one vector per strategy.
std::vector<std::vector<double>> simulate_terminal_wealth(const MarketModel& model,
                                                          std::span<const FeedbackStrategy> strategies,
                                                          const SimulationSettings& settings);

/// Terminal wealth for strategies scales[i] * base; base is evaluated once per step.
std::vector<std::vector<double>> simulate_scaled_terminal_wealth(const MarketModel& model,
                                                                 const FeedbackStrategy& base,
                                                                 std::span<const double> scales,
                                                                 const SimulationSettings& settings);

/// Sampled hidden-drift index of every path (first draw of each path stream).
std::vector<std::size_t> sample_theta_indices(const MarketModel& model, const SimulationSettings& settings);

/// U(x) = x^alpha / alpha, or log x for alpha == 0.
double utility(double wealth, double alpha);

/// Mean and standard error of U(x0 * X_T).
UtilityEstimate estimate_utility(std::span<const double> terminal_wealth, double alpha, double x0 = 1.0);
UtilityEstimate estimate_utility(std::span<const PathBundle> bundles, double alpha, double x0 = 1.0);

PairedDifference paired_difference(std::span<const double> candidate, std::span<const double> reference,
                                   double alpha, double x0 = 1.0);

/// u*(t, T, y) tabulated on a (time, y) grid with bicubic (Catmull-Rom) interpolation;
/// time nodes are uniform in 1 - (s + s^2) / 2, s = sqrt((T - t) / T).
/// y outside the grid is clamped to the edge.
class StrategyGrid {
public:
    struct Spec {
        std::size_t time_points = 121;
        std::size_t y_points = 1001;
        double y_half_span = 0.0;  ///< 0 = 10 sqrt(T) + max|gamma| T
    };

    static StrategyGrid build(const MarketModel& model, double alpha, double T, const QuadratureConfig& quad,
                              const Spec& spec);

    double operator()(double t, double y) const;

    /// max |grid(t, y) - u*(t, T, y)| over uniformly drawn probe points.
    double max_probe_error(const MarketModel& model, const QuadratureConfig& quad, std::size_t n_probes,
                           std::uint64_t seed) const;

    double alpha() const noexcept { return alpha_; }
    double horizon() const noexcept { return T_; }
    double y_min() const noexcept { return y_min_; }
    double y_max() const noexcept { return y_max_; }

private:
    double alpha_ = 0.0;
    double T_ = 0.0;
    double y_min_ = 0.0;
    double y_max_ = 0.0;
    std::vector<double> times_;
    std::size_t ny_ = 0;
    std::vector<double> values_;  // row-major [time][y]
};

struct OptimalityOptions {
    double x0 = 1.0;
    double reference_scale = 1.0;  ///< reference strategy is reference_scale * u*
    double z_threshold = 3.0;
    std::size_t probes = 200;
    StrategyGrid::Spec grid;
    QuadratureConfig quad{16, 1024, 12.0, 1e-10};
    unsigned threads = 0;
};

struct OptimalityEntry {
    double scale = 1.0;  ///< multiple of the reference strategy
    UtilityEstimate utility;
    PairedDifference delta;  ///< vs the reference (scale 1)
    bool dominates_reference = false;
};

struct OptimalityReport {
    double alpha = 0.0;
    double T = 0.0;
    double step = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    double x0 = 1.0;
    double reference_scale = 1.0;
    double z_threshold = 3.0;
    double interpolation_error = 0.0;  ///< grid probe error; 0 for the closed-form log case
    std::vector<OptimalityEntry> entries;  ///< reference first, then perturbations in input order
    bool undominated = true;
};

/// Compares c * (reference_scale * u*) for c in perturbations against c = 1
/// under common random numbers. c = 1 is undominated unless some alternative
/// beats it by more than z_threshold paired standard errors.
OptimalityReport optimality_check(const MarketModel& model, double alpha, double T,
                                  std::span<const double> perturbations, double step, std::size_t n_paths,
                                  std::uint64_t seed, const OptimalityOptions& options = {});

/// CSV with header time,stock,y,wealth,fraction.
void write_path_csv(std::ostream& out, const PathBundle& path);

/// JSON report: settings, per-strategy mean/std_error/paired deltas, verdict.
void write_optimality_json(std::ostream& out, const OptimalityReport& report);

}  // namespace bayesmerton
