#include "bayesmerton/strategy.hpp"

#include "bayesmerton/error.hpp"
#include "bayesmerton/filter.hpp"
#include "bayesmerton/gauss_hermite.hpp"
#include "bayesmerton/numeric.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace bayesmerton {

namespace {

constexpr double kNegligibleLog = -745.0;

std::vector<double> softmax(std::span<const double> logs) {
    const double lse = log_sum_exp(logs);
    std::vector<double> out(logs.size());
    for (std::size_t k = 0; k < logs.size(); ++k) out[k] = std::exp(logs[k] - lse);
    const double total = pairwise_sum(out);
    for (double& v : out) v /= total;
    return out;
}

std::vector<double> log_of(std::span<const double> values) {
    std::vector<double> out(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) out[k] = std::log(values[k]);
    return out;
}

double weighted_gamma(const MarketModel& model, std::span<const double> weights) {
    std::vector<double> terms(model.size());
    for (std::size_t k = 0; k < model.size(); ++k) terms[k] = model.gammas()[k] * weights[k];
    return std::clamp(pairwise_sum(terms), model.gammas().front(), model.gammas().back());
}

// Per-point quantities shared by both quadrature routes.
struct PointEval {
    double log_mix = 0.0;
    double log_pow = 0.0;  // log sum_i a_i^beta
};

PointEval eval_point(const MixtureLayout& layout, double z, std::span<double> log_a) {
    const double precision = 1.0 / layout.variance;
    const std::size_t d = layout.means.size();
    double buf[64];
    std::vector<double> heap;
    double* pow_terms = buf;
    if (d > 64) {
        heap.resize(d);
        pow_terms = heap.data();
    }
    for (std::size_t k = 0; k < d; ++k) {
        const double dz = z - layout.means[k];
        log_a[k] = layout.log_weights[k] - 0.5 * precision * dz * dz;
        pow_terms[k] = layout.power * log_a[k];
    }
    return {log_sum_exp(log_a), log_sum_exp({pow_terms, d})};
}

}  // namespace

void QuadratureConfig::validate() const {
    if (nodes < 8) throw Error(ErrorCode::InvalidArgument, "quadrature needs at least 8 nodes");
    if (max_nodes < nodes) throw Error(ErrorCode::InvalidArgument, "max_nodes must be >= nodes");
    if (!(rel_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "rel_tol must be > 0");
    if (!(half_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "half_width must be > 0");
}

MixtureLayout stable_integrand_weights(const MarketModel& model, double alpha, double t, double T, double y) {
    require_power_alpha(alpha);
    StrategyQuery{t, T, y}.validate();
    if (t == T)
        throw Error(ErrorCode::DegenerateHorizon, "t == T leaves no remaining horizon; use the closed form");

    const double one_minus = 1.0 - alpha;
    const double root_tau = std::sqrt(T - t);
    MixtureLayout layout;
    layout.variance = 1.0 / one_minus;
    layout.power = 1.0 / one_minus;
    layout.means.resize(model.size());
    layout.log_weights.resize(model.size());
    for (std::size_t k = 0; k < model.size(); ++k) {
        const double g = model.gamma(k);
        layout.means[k] = g * root_tau / one_minus;
        layout.log_weights[k] = model.log_prior()[k] + 0.5 * g * g * (T * alpha - t) / one_minus + g * y;
    }
    const double lse = log_sum_exp(layout.log_weights);
    for (double& w : layout.log_weights) w -= lse;
    return layout;
}

namespace detail {

std::vector<double> mixture_weights_gauss_hermite(const MixtureLayout& layout, std::size_t n) {
    return softmax(mixture_log_weights_gauss_hermite(layout, n));
}

std::vector<double> mixture_log_weights_gauss_hermite(const MixtureLayout& layout, std::size_t n) {
    const GaussHermiteRule& rule = gauss_hermite_rule(n);
    const std::size_t d = layout.means.size();
    const double beta = layout.power;
    const double top = beta * *std::max_element(layout.log_weights.begin(), layout.log_weights.end());

    std::vector<std::vector<double>> terms(d);
    for (auto& v : terms) v.reserve(d * n);
    std::vector<double> log_a(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double piece_weight = beta * layout.log_weights[j];
        if (piece_weight - top < kNegligibleLog) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = layout.means[j] + rule.nodes[i];
            const PointEval pe = eval_point(layout, z, log_a);
            const double base = piece_weight + rule.log_weights[i] - pe.log_pow + (beta - 1.0) * pe.log_mix;
            for (std::size_t k = 0; k < d; ++k) terms[k].push_back(base + log_a[k]);
        }
    }
    std::vector<double> log_num(d);
    for (std::size_t k = 0; k < d; ++k) log_num[k] = log_sum_exp(terms[k]);
    const double lse = log_sum_exp(log_num);
    for (double& v : log_num) v -= lse;
    return log_num;
}

std::vector<double> mixture_weights_adaptive(const MixtureLayout& layout, double half_width, double rel_tol,
                                             double* rel_error) {
    using boost::math::quadrature::gauss_kronrod;
    const std::size_t d = layout.means.size();
    const double beta = layout.power;
    const double lo = layout.means.front() - half_width;
    const double hi = layout.means.back() + half_width;

    std::vector<double> log_a(d);
    double shift = -std::numeric_limits<double>::infinity();
    for (double m : layout.means) shift = std::max(shift, beta * eval_point(layout, m, log_a).log_mix);

    const auto n_panels = static_cast<std::size_t>(std::ceil(hi - lo));
    const double width = (hi - lo) / static_cast<double>(n_panels);
    std::vector<double> mass(d, 0.0);
    double err_total = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        std::vector<double> panels(n_panels);
        std::vector<double> errs(n_panels);
        auto integrand = [&](double z) {
            std::vector<double> la(d);
            const PointEval pe = eval_point(layout, z, la);
            return std::exp(la[k] + (beta - 1.0) * pe.log_mix - shift);
        };
        for (std::size_t p = 0; p < n_panels; ++p) {
            const double a = lo + width * static_cast<double>(p);
            double err = 0.0;
            panels[p] = gauss_kronrod<double, 31>::integrate(integrand, a, a + width, 10, rel_tol * 1e-2, &err);
            errs[p] = err;
        }
        mass[k] = pairwise_sum(panels);
        err_total += pairwise_sum(errs);
    }
    const double total = pairwise_sum(mass);
    if (rel_error) *rel_error = total > 0.0 ? err_total / total : std::numeric_limits<double>::infinity();
    if (!(total > 0.0) || !std::isfinite(total))
        throw Error(ErrorCode::QuadratureNotConverged, "adaptive quadrature produced no mass");
    for (double& m : mass) m /= total;
    return mass;
}

}  // namespace detail

StrategyValue optimal_fraction(const MarketModel& model, double alpha, const StrategyQuery& query,
                               const QuadratureConfig& quad) {
    require_power_alpha(alpha);
    query.validate();
    quad.validate();

    const double scale = 1.0 / (model.sigma() * (1.0 - alpha));
    StrategyValue out;
    const Posterior now = posterior(model, query.t, query.y);
    out.myopic = weighted_gamma(model, now.probs) * scale;

    if (query.t == query.T || model.size() == 1) {
        out.f = (model.size() == 1) ? std::vector<double>{1.0} : now.probs;
        out.log_f = (model.size() == 1) ? std::vector<double>{0.0} : log_posterior(model, query.t, query.y);
        out.v_star = weighted_gamma(model, out.f);
        out.u_star = out.v_star * scale;
        if (model.size() == 1) out.myopic = out.u_star;
        out.hedging = out.u_star - out.myopic;
        out.method = QuadratureMethod::ClosedForm;
        return out;
    }

    const MixtureLayout layout = stable_integrand_weights(model, alpha, query.t, query.T, query.y);
    const double v_scale = std::max(std::abs(model.gammas().front()), std::abs(model.gammas().back()));

    std::vector<double> prev_log = detail::mixture_log_weights_gauss_hermite(layout, quad.nodes);
    std::vector<double> prev = softmax(prev_log);
    double prev_v = weighted_gamma(model, prev);
    bool converged = false;
    std::size_t n = quad.nodes;
    while (2 * n <= quad.max_nodes) {
        n *= 2;
        std::vector<double> cur_log = detail::mixture_log_weights_gauss_hermite(layout, n);
        std::vector<double> cur = softmax(cur_log);
        const double cur_v = weighted_gamma(model, cur);
        double df = 0.0;
        for (std::size_t k = 0; k < cur.size(); ++k) df = std::max(df, std::abs(cur[k] - prev[k]));
        prev = std::move(cur);
        prev_log = std::move(cur_log);
        const bool settled = df <= quad.rel_tol && std::abs(cur_v - prev_v) <= quad.rel_tol * v_scale;
        prev_v = cur_v;
        if (settled) {
            converged = true;
            break;
        }
    }

    if (converged) {
        out.f = std::move(prev);
        out.log_f = std::move(prev_log);
        out.method = QuadratureMethod::GaussHermite;
        out.nodes_used = n;
    } else {
        double rel_error = 0.0;
        out.f = detail::mixture_weights_adaptive(layout, quad.half_width, quad.rel_tol, &rel_error);
        if (!(rel_error <= quad.rel_tol))
            throw Error(ErrorCode::QuadratureNotConverged,
                        "no convergence to rel_tol=" + format_shortest(quad.rel_tol) + " at t=" +
                            format_shortest(query.t) + " T=" + format_shortest(query.T) +
                            " y=" + format_shortest(query.y) + " (adaptive error " + format_shortest(rel_error) + ")");
        out.log_f = log_of(out.f);
        out.method = QuadratureMethod::AdaptiveKronrod;
    }
    out.v_star = weighted_gamma(model, out.f);
    out.u_star = out.v_star * scale;
    out.hedging = out.u_star - out.myopic;
    return out;
}

double log_utility_fraction(const MarketModel& model, double t, double y) {
    if (!(t >= 0.0)) throw Error(ErrorCode::InvalidQuery, "t must be >= 0");
    return (posterior_mean(model, t, y) - model.r()) / (model.sigma() * model.sigma());
}

StrategyValue strategy_value(const MarketModel& model, const UtilitySpec& utility, const StrategyQuery& query,
                             const QuadratureConfig& quad) {
    if (!utility.is_log()) return optimal_fraction(model, utility.alpha, query, quad);
    query.validate();
    StrategyValue out;
    out.f = posterior(model, query.t, query.y).probs;
    out.log_f = log_posterior(model, query.t, query.y);
    out.v_star = weighted_gamma(model, out.f);
    out.u_star = log_utility_fraction(model, query.t, query.y);
    out.myopic = out.u_star;
    out.hedging = 0.0;
    out.method = QuadratureMethod::ClosedForm;
    return out;
}

FkProfile fk_profile(const MarketModel& model, std::span<const double> alpha_grid, double T, double t, double y,
                     const QuadratureConfig& quad) {
    FkProfile profile;
    profile.alphas.assign(alpha_grid.begin(), alpha_grid.end());
    for (double a : alpha_grid) require_power_alpha(a);
    for (double a : alpha_grid) profile.f.push_back(optimal_fraction(model, a, {t, T, y}, quad).f);
    return profile;
}

}  // namespace bayesmerton
