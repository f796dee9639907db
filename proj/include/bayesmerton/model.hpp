#pragma once

#include <span>
#include <vector>

namespace bayesmerton {

/// One bond, one stock with unknown drift taking finitely many values.
///
/// Construction validates the instance and precomputes the market prices
/// of risk gamma_k = (mu_k - r) / sigma. Immutable afterwards.
class MarketModel {
public:
    /// Throws Error with NonPositiveSigma, EmptySupport, UnorderedDrifts or
    /// InvalidPrior. A prior whose sum is within 1e-9 of one is renormalized.
    static MarketModel create(double r, double sigma, std::vector<double> mus,
                              std::vector<double> prior);

    double r() const noexcept { return r_; }
    double sigma() const noexcept { return sigma_; }
    std::size_t size() const noexcept { return mus_.size(); }
    std::span<const double> mus() const noexcept { return mus_; }
    std::span<const double> prior() const noexcept { return prior_; }
    std::span<const double> log_prior() const noexcept { return log_prior_; }
    std::span<const double> gammas() const noexcept { return gammas_; }
    double gamma(std::size_t k) const { return gammas_.at(k); }

    /// r < mu_1: the hypothesis of the long-horizon limit results.
    bool asymptotics_valid() const noexcept { return r_ < mus_.front(); }

private:
    MarketModel() = default;

    double r_ = 0.0;
    double sigma_ = 1.0;
    std::vector<double> mus_;
    std::vector<double> prior_;
    std::vector<double> log_prior_;
    std::vector<double> gammas_;
};

/// Power utility x^alpha / alpha (alpha < 1); alpha == 0 means log utility.
struct UtilitySpec {
    double alpha = 0.5;
    double beta = 2.0;  ///< 1 / (1 - alpha)

    /// Throws InvalidAlpha unless alpha is finite and < 1.
    static UtilitySpec create(double alpha);

    bool is_log() const noexcept { return alpha == 0.0; }
};

/// Evaluation point (t, T, y) of the feedback strategy.
struct StrategyQuery {
    double t = 0.0;
    double T = 1.0;
    double y = 0.0;

    /// Throws InvalidQuery unless 0 <= t <= T and all values are finite.
    void validate() const;
};

/// Known-drift optimal fraction (mu - r) / (sigma^2 (1 - alpha)).
double merton_fraction(const MarketModel& model, double mu, double alpha);

/// Throws InvalidAlpha for alpha >= 1, alpha == 0 or non-finite alpha.
void require_power_alpha(double alpha);

}  // namespace bayesmerton
