#include "bayesmerton/filter.hpp"

#include "bayesmerton/error.hpp"
#include "bayesmerton/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>

namespace bayesmerton {

namespace {

constexpr double kClipFloor = 1e-12;

std::vector<double> log_terms(const MarketModel& model, double t, double y) {
    std::vector<double> terms(model.size());
    for (std::size_t k = 0; k < model.size(); ++k)
        terms[k] = model.log_prior()[k] + log_likelihood(model, k, t, y);
    return terms;
}

void clip_and_renormalize(std::vector<double>& p) {
    for (double& v : p) v = std::clamp(v, kClipFloor, 1.0);
    const double total = pairwise_sum(p);
    for (double& v : p) v /= total;
}

}  // namespace

double log_likelihood(const MarketModel& model, std::size_t k, double t, double y) {
    if (t == 0.0) return 0.0;
    const double g = model.gamma(k);
    return g * y - 0.5 * g * g * t;
}

double likelihood(const MarketModel& model, std::size_t k, double t, double y) {
    return std::exp(log_likelihood(model, k, t, y));
}

double log_normalizer(const MarketModel& model, double t, double y) {
    return log_sum_exp(log_terms(model, t, y));
}

double normalizer(const MarketModel& model, double t, double y) { return std::exp(log_normalizer(model, t, y)); }

std::vector<double> log_posterior(const MarketModel& model, double t, double y) {
    auto terms = log_terms(model, t, y);
    const double lse = log_sum_exp(terms);
    for (double& v : terms) v -= lse;
    return terms;
}

Posterior posterior(const MarketModel& model, double t, double y) {
    auto terms = log_terms(model, t, y);
    const double lse = log_sum_exp(terms);
    for (double& v : terms) v = std::exp(v - lse);
    const double total = pairwise_sum(terms);
    for (double& v : terms) v /= total;
    return Posterior{t, std::move(terms)};
}

double posterior_mean(const MarketModel& model, const Posterior& post) {
    std::vector<double> weighted(model.size());
    for (std::size_t k = 0; k < model.size(); ++k) weighted[k] = model.mus()[k] * post.probs[k];
    return std::clamp(pairwise_sum(weighted), model.mus().front(), model.mus().back());
}

double posterior_mean(const MarketModel& model, double t, double y) {
    return posterior_mean(model, posterior(model, t, y));
}

FilterTrajectory simulate_filter_sde(const MarketModel& model, std::size_t theta_index, double horizon,
                                     double step, std::uint64_t seed) {
    if (!(step > 0.0) || !(horizon > 0.0))
        throw Error(ErrorCode::InvalidArgument, "filter simulation needs step > 0 and horizon > 0");
    if (theta_index >= model.size())
        throw Error(ErrorCode::InvalidArgument, "theta index " + std::to_string(theta_index) + " out of range");

    const auto n_steps = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
    const std::size_t d = model.size();
    const double gamma_true = model.gamma(theta_index);

    FilterTrajectory traj;
    traj.theta_index = theta_index;
    traj.times.reserve(n_steps + 1);
    traj.y.reserve(n_steps + 1);
    traj.posteriors.reserve(n_steps + 1);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    double t = 0.0;
    double y = 0.0;
    std::vector<double> p(model.prior().begin(), model.prior().end());
    traj.times.push_back(t);
    traj.y.push_back(y);
    traj.posteriors.push_back(Posterior{t, p});

    std::vector<double> buf(d);
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double h = std::min(step, horizon - t);
        const double dw = std::sqrt(h) * normal(rng);
        const double dy = dw + gamma_true * h;

        for (std::size_t k = 0; k < d; ++k) buf[k] = model.gamma(k) * p[k];
        const double gamma_hat = pairwise_sum(buf);
        const double innovation = dy - gamma_hat * h;
        for (std::size_t k = 0; k < d; ++k) {
            p[k] += (model.gamma(k) - gamma_hat) * p[k] * innovation;
            if (p[k] < -0.1 || p[k] > 1.1)
                throw Error(ErrorCode::StepTooLarge, "Euler posterior left [-0.1, 1.1] at t=" +
                                                         format_shortest(t + h) + "; reduce the step");
        }
        clip_and_renormalize(p);

        t = (i + 1 == n_steps) ? horizon : t + h;
        y += dy;
        traj.times.push_back(t);
        traj.y.push_back(y);
        traj.posteriors.push_back(Posterior{t, p});
    }
    return traj;
}

std::vector<Posterior> closed_form_along(const MarketModel& model, const FilterTrajectory& traj) {
    std::vector<Posterior> out;
    out.reserve(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) out.push_back(posterior(model, traj.times[i], traj.y[i]));
    return out;
}

double max_filter_discrepancy(const MarketModel& model, const FilterTrajectory& traj) {
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const Posterior exact = posterior(model, traj.times[i], traj.y[i]);
        for (std::size_t k = 0; k < model.size(); ++k)
            worst = std::max(worst, std::abs(traj.posteriors[i].probs[k] - exact.probs[k]));
    }
    return worst;
}

void write_trajectory_csv(std::ostream& out, const MarketModel& model, const std::vector<double>& times,
                          const std::vector<double>& y, const std::vector<Posterior>& posteriors) {
    out << "time,y";
    for (std::size_t k = 0; k < model.size(); ++k) out << ",p_" << (k + 1);
    out << ",posterior_mean\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        out << format_shortest(times[i]) << ',' << format_shortest(y[i]);
        for (double p : posteriors[i].probs) out << ',' << format_shortest(p);
        out << ',' << format_shortest(posterior_mean(model, posteriors[i])) << '\n';
    }
}

}  // namespace bayesmerton
