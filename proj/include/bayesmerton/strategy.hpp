#pragma once

#include "bayesmerton/model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace bayesmerton {

/// Controls the Gaussian-integral engine behind optimal_fraction.
struct QuadratureConfig {
    std::size_t nodes = 64;        ///< starting Gauss-Hermite order, doubled until converged
    std::size_t max_nodes = 1024;  ///< doubling cap before the adaptive fallback
    double half_width = 12.0;      ///< fallback window beyond the outer components, in unit std devs
    double rel_tol = 1e-9;

    /// Throws InvalidArgument unless nodes >= 8, max_nodes >= nodes, rel_tol > 0, half_width > 0.
    void validate() const;
};

enum class QuadratureMethod { ClosedForm, GaussHermite, AdaptiveKronrod };

struct StrategyValue {
    double u_star = 0.0;    ///< optimal fraction of wealth in the stock
    double v_star = 0.0;    ///< sum_k gamma_k f_k, i.e. u_star * sigma * (1 - alpha)
    std::vector<double> f;  ///< state weights f_k, a probability vector
    std::vector<double> log_f;  ///< log f_k; finite where f_k underflows (may be -inf on the adaptive fallback)
    double myopic = 0.0;    ///< posterior-mean Merton ratio at (t, y)
    double hedging = 0.0;   ///< u_star - myopic
    QuadratureMethod method = QuadratureMethod::ClosedForm;
    std::size_t nodes_used = 0;
};

/// Normal-mixture form of the integrand in z = x / sqrt(T - t).
///
/// F(T, y + z sqrt(T-t))^(1/(1-alpha)) phi(z) is proportional to
/// (sum_k w_k N(z; m_k, v))^(1/(1-alpha)) with m_k = gamma_k sqrt(T-t)/(1-alpha),
/// v = 1/(1-alpha) and
///   log w_k = log p_k + gamma_k^2 (T alpha - t) / (2(1-alpha)) + gamma_k y - logsumexp(...).
/// Every quantity stays O(1) on the log scale however large T is.
struct MixtureLayout {
    std::vector<double> log_weights;  ///< normalized, log p-hat_k(T)
    std::vector<double> means;        ///< m_k
    double variance = 1.0;            ///< shared component variance v
    double power = 1.0;               ///< beta = 1/(1-alpha)
};

/// Throws DegenerateHorizon when t == T, InvalidAlpha for alpha == 0 or alpha >= 1.
MixtureLayout stable_integrand_weights(const MarketModel& model, double alpha, double t, double T, double y);

/// Optimal feedback fraction u*(t, T, y) for power utility with coefficient alpha.
///
/// f_k is the weight of drift state k in u* = sum_k gamma_k f_k / (sigma (1 - alpha)).
/// With the mixture layout above, f_k = int a_k mix^(beta-1) / int mix^beta where
/// a_k is the k-th weighted component and mix their sum; a_k / mix is the time-T
/// posterior of state k. The integrals are split by the partition of unity
/// a_j^beta / sum_i a_i^beta, and since a_j^beta is a unit-variance Gaussian
/// bump at m_j, piece j is a Gauss-Hermite expectation centered at m_j.
///
/// t == T and d == 1 return closed forms. If node doubling up to max_nodes
/// does not settle u* and f to rel_tol, an adaptive Gauss-Kronrod pass over the
/// truncated window is tried before throwing QuadratureNotConverged.
StrategyValue optimal_fraction(const MarketModel& model, double alpha, const StrategyQuery& query,
                               const QuadratureConfig& quad = {});

/// Log-utility optimal fraction (mu_hat(t, y) - r) / sigma^2; no horizon dependence.
double log_utility_fraction(const MarketModel& model, double t, double y);

/// Dispatches alpha == 0 to the log-utility closed form and everything else
/// to optimal_fraction.
StrategyValue strategy_value(const MarketModel& model, const UtilitySpec& utility, const StrategyQuery& query,
                             const QuadratureConfig& quad = {});

struct FkProfile {
    std::vector<double> alphas;
    std::vector<std::vector<double>> f;  ///< f[i][k] = f_k(T, alphas[i])
};

FkProfile fk_profile(const MarketModel& model, std::span<const double> alpha_grid, double T, double t, double y,
                     const QuadratureConfig& quad = {});

namespace detail {

/// f_k from a single Gauss-Hermite level with n nodes per component.
std::vector<double> mixture_weights_gauss_hermite(const MixtureLayout& layout, std::size_t n);
/// Normalized log f_k from the same rule.
std::vector<double> mixture_log_weights_gauss_hermite(const MixtureLayout& layout, std::size_t n);

/// f_k from adaptive Gauss-Kronrod on unit panels; `rel_error` receives the
/// summed error estimate relative to the total mass.
std::vector<double> mixture_weights_adaptive(const MixtureLayout& layout, double half_width, double rel_tol,
                                             double* rel_error);

}  // namespace detail

}  // namespace bayesmerton
