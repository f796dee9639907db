#pragma once

#include "bayesmerton/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace bayesmerton {

/// Conditional drift distribution p_k(t) = P(theta = mu_k | F^S_t).
struct Posterior {
    double t = 0.0;
    std::vector<double> probs;
};

/// log L_t(mu_k, y) = gamma_k y - gamma_k^2 t / 2, and exactly 0 at t = 0.
double log_likelihood(const MarketModel& model, std::size_t k, double t, double y);
double likelihood(const MarketModel& model, std::size_t k, double t, double y);

/// log F(t, y) = log sum_k p_k L_t(mu_k, y), by max-shifted exponential sum.
double log_normalizer(const MarketModel& model, double t, double y);
double normalizer(const MarketModel& model, double t, double y);

/// Closed-form posterior p_k L_t(mu_k, y) / F(t, y), computed in log space.
Posterior posterior(const MarketModel& model, double t, double y);
/// log p_k(t, y); finite even where p_k underflows.
std::vector<double> log_posterior(const MarketModel& model, double t, double y);

/// sum_k mu_k p_k(t, y), clamped into [mu_1, mu_d] against rounding.
double posterior_mean(const MarketModel& model, double t, double y);
double posterior_mean(const MarketModel& model, const Posterior& post);

struct FilterTrajectory {
    std::size_t theta_index = 0;
    std::vector<double> times;
    std::vector<double> y;                ///< observation process Y on `times`
    std::vector<Posterior> posteriors;    ///< Euler filter state on `times`
};

/// Euler scheme for the posterior SDE dp_k = (gamma_k - gamma_hat) p_k dW_hat,
/// driven by a simulated observation path with hidden drift mus[theta_index].
///
/// One RNG stream per call: the n-th draw is the n-th Brownian increment.
/// After each step probabilities are clipped to [1e-12, 1] and renormalized.
/// Throws StepTooLarge if a pre-clip probability leaves [-0.1, 1.1].
FilterTrajectory simulate_filter_sde(const MarketModel& model, std::size_t theta_index, double horizon,
                                     double step, std::uint64_t seed);

/// Closed-form posterior evaluated along the trajectory's own Y path.
std::vector<Posterior> closed_form_along(const MarketModel& model, const FilterTrajectory& traj);

/// max over grid points and states of |p_k^Euler(t) - p_k(t, Y_t)|.
double max_filter_discrepancy(const MarketModel& model, const FilterTrajectory& traj);

/// CSV with header time,y,p_1..p_d,posterior_mean.
void write_trajectory_csv(std::ostream& out, const MarketModel& model, const std::vector<double>& times,
                          const std::vector<double>& y, const std::vector<Posterior>& posteriors);

}  // namespace bayesmerton
