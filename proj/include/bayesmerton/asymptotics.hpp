#pragma once

#include "bayesmerton/model.hpp"
#include "bayesmerton/strategy.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bayesmerton {

/// Long-horizon limit of u*: gamma_d / (sigma (1 - alpha)) for alpha in (0, 1),
/// gamma_1 / (sigma (1 - alpha)) for alpha < 0. Prior and state do not enter.
/// Throws HypothesisViolated if r >= mu_1, InvalidAlpha for alpha == 0 or alpha >= 1.
double limit_fraction(const MarketModel& model, double alpha);

/// Closed-form lower bound on f_d(T, alpha) for alpha in (0, 1):
///   p_d^b e_d / sum_k p_k e_k,  e_k = exp(g_k^2 b (b-1) T / 2 + g_k b y - g_k^2 t b^2 / 2),  b = 1/(1-alpha).
double jensen_lower_bound_fd(const MarketModel& model, double alpha, double t, double T, double y);

/// T -> infinity value of the bound above, p_d^(b - 1).
double jensen_bound_limit(const MarketModel& model, double alpha);

/// Admissible open interval (1, (gamma_2 / gamma_1 + 1) / 2) for lambda.
/// Throws InvalidArgument for d < 2 and HypothesisViolated unless gamma_1 > 0.
std::pair<double, double> admissible_lambda(const MarketModel& model);
double default_lambda(const MarketModel& model);

struct PessimistBound {
    double value = 0.0;
    double log_value = 0.0;
    double weight_factor = 0.0;  ///< p-hat_1(T)^(1/(1-alpha))
    double ratio_factor = 0.0;   ///< g(gamma_1 lambda sqrt(T-t), T)
    double tail_factor = 0.0;    ///< Phi(gamma_1 sqrt(T-t) (lambda - 1/(1-alpha)) sqrt(1-alpha))
};

/// Three-factor lower bound on f_1(T, alpha) for alpha < 0.
///
/// One step of the underlying inequality chain uses that the first mixture
/// component's density never exceeds 1, i.e. sqrt((1-alpha)/(2 pi)) <= 1;
/// for alpha < 1 - 2 pi the product is still computed but is no longer a bound.
PessimistBound pessimist_lower_bound_f1(const MarketModel& model, double alpha, double t, double T, double y,
                                        double lambda);

struct SweepResult {
    std::vector<double> horizons;
    std::vector<double> u_values;  ///< NaN on failed rows
    double limit = 0.0;
    std::vector<double> gaps;      ///< |u - limit|, NaN on failed rows
    std::vector<bool> ok;
    std::vector<std::string> errors;          ///< empty string on success
    std::vector<bool> within_threshold;       ///< gap / |limit| < threshold
    std::optional<std::size_t> first_within;  ///< first row meeting the threshold
    double threshold = 0.05;

    std::size_t succeeded() const;
};

/// u*(t, T, y) across increasing horizons. Numerical failures are recorded
/// per row; invalid input throws.
SweepResult horizon_sweep(const MarketModel& model, double alpha, double t, double y,
                          std::span<const double> horizons, const QuadratureConfig& quad = {},
                          double threshold = 0.05);

/// 1, 2, 4, ..., 2^max_exponent.
std::vector<double> geometric_horizons(int max_exponent = 10);

/// CSV with header T,u_star,limit,gap,converged_flag (flag is 0/1).
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

}  // namespace bayesmerton
