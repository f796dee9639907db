#include "bayesmerton/asymptotics.hpp"

#include "bayesmerton/error.hpp"
#include "bayesmerton/filter.hpp"
#include "bayesmerton/numeric.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace bayesmerton {

namespace {

void require_hypothesis(const MarketModel& model) {
    if (!model.asymptotics_valid())
        throw Error(ErrorCode::HypothesisViolated,
                    "long-horizon results need r < mu_1 (r=" + format_shortest(model.r()) +
                        ", mu_1=" + format_shortest(model.mus().front()) + ")");
}

}  // namespace

double limit_fraction(const MarketModel& model, double alpha) {
    require_power_alpha(alpha);
    require_hypothesis(model);
    const double g = alpha > 0.0 ? model.gammas().back() : model.gammas().front();
    return g / (model.sigma() * (1.0 - alpha));
}

double jensen_lower_bound_fd(const MarketModel& model, double alpha, double t, double T, double y) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(ErrorCode::InvalidAlpha, "Jensen bound needs alpha in (0, 1), got " + format_shortest(alpha));
    StrategyQuery{t, T, y}.validate();
    const double b = 1.0 / (1.0 - alpha);
    const std::size_t d = model.size();
    // exponents relative to k = d, so the leading term is exact however large T is
    const double gd = model.gamma(d - 1);
    std::vector<double> log_terms(d);
    for (std::size_t k = 0; k < d; ++k) {
        const double g = model.gamma(k);
        const double dg2 = (g - gd) * (g + gd);
        log_terms[k] = model.log_prior()[k] + 0.5 * dg2 * b * (b - 1.0) * T + (g - gd) * b * y - 0.5 * dg2 * t * b * b;
    }
    log_terms[d - 1] = model.log_prior()[d - 1];
    return std::exp(b * model.log_prior()[d - 1] - log_sum_exp(log_terms));
}

double jensen_bound_limit(const MarketModel& model, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(ErrorCode::InvalidAlpha, "Jensen bound needs alpha in (0, 1), got " + format_shortest(alpha));
    const double b = 1.0 / (1.0 - alpha);
    return std::exp((b - 1.0) * model.log_prior().back());
}

std::pair<double, double> admissible_lambda(const MarketModel& model) {
    if (model.size() < 2) throw Error(ErrorCode::InvalidArgument, "lambda interval needs at least two drift values");
    const double g1 = model.gamma(0);
    if (!(g1 > 0.0)) throw Error(ErrorCode::HypothesisViolated, "lambda interval needs gamma_1 > 0 (r < mu_1)");
    return {1.0, 0.5 * (model.gamma(1) / g1 + 1.0)};
}

double default_lambda(const MarketModel& model) {
    const auto [lo, hi] = admissible_lambda(model);
    return 0.5 * (lo + hi);
}

PessimistBound pessimist_lower_bound_f1(const MarketModel& model, double alpha, double t, double T, double y,
                                        double lambda) {
    if (!(alpha < 0.0) || !std::isfinite(alpha))
        throw Error(ErrorCode::InvalidAlpha, "pessimist bound needs alpha < 0, got " + format_shortest(alpha));
    const auto [lo, hi] = admissible_lambda(model);
    if (!(lambda > lo && lambda < hi))
        throw Error(ErrorCode::InvalidLambda, "lambda=" + format_shortest(lambda) + " outside (" +
                                                  format_shortest(lo) + ", " + format_shortest(hi) + ")");
    const MixtureLayout layout = stable_integrand_weights(model, alpha, t, T, y);

    const double one_minus = 1.0 - alpha;
    const double tau = T - t;
    const double g1 = model.gamma(0);

    PessimistBound bound;
    const double log_weight = layout.log_weights.front() / one_minus;
    // g at x = gamma_1 lambda sqrt(tau) observes y + gamma_1 lambda tau.
    const double y_star = y + g1 * lambda * tau;
    const double log_ratio = model.log_prior()[0] + log_likelihood(model, 0, T, y_star) - log_normalizer(model, T, y_star);
    const double log_tail = log_normal_cdf(g1 * std::sqrt(tau) * (lambda - 1.0 / one_minus) * std::sqrt(one_minus));

    bound.weight_factor = std::exp(log_weight);
    bound.ratio_factor = std::exp(log_ratio);
    bound.tail_factor = std::exp(log_tail);
    bound.log_value = log_weight + log_ratio + log_tail;
    bound.value = std::exp(bound.log_value);
    return bound;
}

std::size_t SweepResult::succeeded() const {
    std::size_t n = 0;
    for (bool b : ok) n += b ? 1 : 0;
    return n;
}

SweepResult horizon_sweep(const MarketModel& model, double alpha, double t, double y,
                          std::span<const double> horizons, const QuadratureConfig& quad, double threshold) {
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        if (!(horizons[i] > 0.0) || (i > 0 && !(horizons[i] > horizons[i - 1])))
            throw Error(ErrorCode::InvalidArgument, "sweep horizons must be positive and strictly increasing");
        if (horizons[i] < t) throw Error(ErrorCode::InvalidQuery, "sweep horizon below current time t");
    }
    SweepResult res;
    res.threshold = threshold;
    res.limit = limit_fraction(model, alpha);
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    for (double T : horizons) {
        res.horizons.push_back(T);
        try {
            const double u = optimal_fraction(model, alpha, {t, T, y}, quad).u_star;
            const double gap = std::abs(u - res.limit);
            res.u_values.push_back(u);
            res.gaps.push_back(gap);
            res.ok.push_back(true);
            res.errors.emplace_back();
            const bool within = gap < threshold * std::abs(res.limit);
            res.within_threshold.push_back(within);
            if (within && !res.first_within) res.first_within = res.horizons.size() - 1;
        } catch (const Error& e) {
            if (!is_numerical(e.code())) throw;
            res.u_values.push_back(kNaN);
            res.gaps.push_back(kNaN);
            res.ok.push_back(false);
            res.errors.emplace_back(e.what());
            res.within_threshold.push_back(false);
        }
    }
    return res;
}

std::vector<double> geometric_horizons(int max_exponent) {
    std::vector<double> out;
    for (int e = 0; e <= max_exponent; ++e) out.push_back(std::ldexp(1.0, e));
    return out;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
    out << "T,u_star,limit,gap,converged_flag\n";
    for (std::size_t i = 0; i < sweep.horizons.size(); ++i) {
        out << format_shortest(sweep.horizons[i]) << ',' << format_shortest(sweep.u_values[i]) << ','
            << format_shortest(sweep.limit) << ',' << format_shortest(sweep.gaps[i]) << ','
            << (sweep.within_threshold[i] ? 1 : 0) << '\n';
    }
}

}  // namespace bayesmerton
