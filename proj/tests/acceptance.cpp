// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include "bayesmerton/asymptotics.hpp"
#include "bayesmerton/error.hpp"
#include "bayesmerton/filter.hpp"
#include "bayesmerton/simkit.hpp"
#include "bayesmerton/strategy.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace bayesmerton;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

double random_alpha(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    double a = u(rng);
    while (std::abs(a) < 1e-3) a = u(rng);
    return a;
}

Outcome example_limits() {
    const auto m = oracle::toy_model();
    const double pos = limit_fraction(m, 0.5);
    const double neg = limit_fraction(m, -0.5);
    const bool ok = pos == 6.0 && std::abs(neg - 2.0 / 3.0) <= 1e-12;
    return {ok, fmt("alpha=0.5 -> %.17g, alpha=-0.5 -> %.17g", pos, neg)};
}

Outcome sweep_reproduction() {
    const auto m = oracle::toy_model();
    const auto start = std::chrono::steady_clock::now();
    const auto horizons = geometric_horizons();
    bool ok = true;
    std::string detail;
    for (double alpha : {0.5, -0.5}) {
        const auto s = horizon_sweep(m, alpha, 0.0, 0.0, horizons);
        bool monotone = s.succeeded() == horizons.size();
        for (std::size_t i = 1; monotone && i < s.gaps.size(); ++i) monotone = s.gaps[i] <= s.gaps[i - 1] + 1e-12;
        const double final_rel = s.gaps.back() / std::abs(s.limit);
        ok = ok && monotone && final_rel < 0.05;
        detail += fmt("alpha=%g: u(1)=%.6f u(1024)=%.12f limit=%.6f final gap %.2e%s; ", alpha, s.u_values.front(),
                      s.u_values.back(), s.limit, final_rel, monotone ? "" : " NOT MONOTONE");
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ok = ok && secs < 300.0;
    return {ok, detail + fmt("%.3f s", secs)};
}

Outcome convex_combination() {
    std::mt19937_64 rng(3001);
    std::uniform_real_distribution<double> ulogT(std::log(0.01), std::log(200.0)), u01(0.0, 1.0), uz(-3.0, 3.0);
    int violations = 0, underflowed = 0;
    double worst_sum = 0.0;
    for (int i = 0; i < 200; ++i) {
        const auto m = oracle::random_model(rng, 5, 5.0);
        const double alpha = random_alpha(rng, -5.0, 0.95);
        const double T = std::exp(ulogT(rng));
        const double t = u01(rng) * T;
        const double y = uz(rng) * std::sqrt(T);
        try {
            const auto v = optimal_fraction(m, alpha, {t, T, y});
            const double scaled = v.u_star * m.sigma() * (1.0 - alpha);
            const double slack = 1e-12 * std::max(std::abs(m.gammas().front()), std::abs(m.gammas().back()));
            double s = 0.0;
            bool positive = true;
            for (std::size_t k = 0; k < v.f.size(); ++k) {
                s += v.f[k];
                // strict positivity is checked on the log scale: weights below 1e-308 are still > 0
                positive = positive && v.f[k] >= 0.0 && std::isfinite(v.log_f[k]);
                if (v.f[k] == 0.0) ++underflowed;
            }
            worst_sum = std::max(worst_sum, std::abs(s - 1.0));
            if (scaled < m.gammas().front() - slack || scaled > m.gammas().back() + slack || !positive ||
                std::abs(s - 1.0) >= 1e-8)
                ++violations;
        } catch (const Error& e) {
            ++violations;
        }
    }
    return {violations == 0, fmt("200 models, %d violations, max |sum f - 1| = %.2e, %d weights below double range "
                                 "(positive on the log scale)",
                                 violations, worst_sum, underflowed)};
}

Outcome weight_monotonicity() {
    std::mt19937_64 rng(4001);
    std::uniform_real_distribution<double> ulogT(std::log(0.05), std::log(100.0)), u01(0.0, 1.0), uz(-2.0, 2.0);
    const std::vector<double> alphas{-4.0, -1.0, -0.3, 0.3, 0.8};
    int violations = 0, checked = 0;
    for (int i = 0; i < 50; ++i) {
        // the ordering argument needs F(T, .) increasing, i.e. r < mu_1
        const auto m = oracle::random_model(rng, 5, 5.0, true);
        const double T = std::exp(ulogT(rng));
        const double t = u01(rng) * T * 0.9;
        const double y = uz(rng) * std::sqrt(T);
        const auto prof = fk_profile(m, alphas, T, t, y);
        for (std::size_t a = 1; a < alphas.size(); ++a) {
            ++checked;
            if (prof.f[a].back() < prof.f[a - 1].back() - 1e-9) ++violations;
            if (prof.f[a].front() > prof.f[a - 1].front() + 1e-9) ++violations;
        }
    }
    return {violations == 0, fmt("50 models x 5 alphas, %d adjacent pairs, %d violations", checked, violations)};
}

Outcome bound_sandwiches() {
    const auto m = oracle::toy_model();
    int violations = 0, checked = 0;
    double min_gap_j = 1e300, min_gap_p = 1e300;
    for (double T : {2.0, 10.0, 50.0}) {
        for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double fd = optimal_fraction(m, alpha, {0.0, T, 0.0}).f.back();
            const double b = jensen_lower_bound_fd(m, alpha, 0.0, T, 0.0);
            ++checked;
            if (b > fd) ++violations;
            min_gap_j = std::min(min_gap_j, fd - b);
        }
        const auto [lo, hi] = admissible_lambda(m);
        for (double alpha : {-0.25, -0.5, -1.0, -2.0, -5.0}) {
            const double f1 = optimal_fraction(m, alpha, {0.0, T, 0.0}).f.front();
            for (double w : {0.1, 0.5, 0.9}) {
                const double b = pessimist_lower_bound_f1(m, alpha, 0.0, T, 0.0, lo + w * (hi - lo)).value;
                ++checked;
                if (b > f1) ++violations;
                min_gap_p = std::min(min_gap_p, f1 - b);
            }
        }
    }
    double limit_err = 0.0;
    for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double at_inf = jensen_lower_bound_fd(m, alpha, 0.0, 1e12, 0.0);
        const double expected = std::pow(m.prior().back(), 1.0 / (1.0 - alpha) - 1.0);
        limit_err = std::max({limit_err, std::abs(at_inf - expected), std::abs(jensen_bound_limit(m, alpha) - expected)});
    }
    const bool ok = violations == 0 && limit_err <= 1e-10;
    return {ok, fmt("%d bound checks, %d violations (min slack Jensen %.2e, pessimist %.2e); T->inf error %.2e", checked,
                    violations, min_gap_j, min_gap_p, limit_err)};
}

Outcome oracle_equivalence() {
    std::mt19937_64 rng(6001);
    std::uniform_real_distribution<double> u01(0.0, 1.0), uy(-1.5, 1.5);
    int failures = 0, pinned = 0;
    double worst_z = 0.0;
    for (int i = 0; i < 20; ++i) {
        const auto m = oracle::random_model(rng, 4, 3.0);
        const double alpha = random_alpha(rng, -3.0, 0.9);
        const double t = 2.0 * u01(rng);
        const double tau = 0.05 + 1.95 * u01(rng);
        const double y = uy(rng);
        const double u = optimal_fraction(m, alpha, {t, t + tau, y}).u_star;
        const auto mc = oracle::mc_fraction(m, alpha, t, t + tau, y, 1000000, 7000 + i, oracle::Proposal::Tilted);
        // floor for instances where the ratio is pinned to a constant and the SE is pure rounding
        const double tol = std::max(3.0 * mc.std_error, 1e-12 * std::abs(u));
        if (std::abs(u - mc.u) > tol) ++failures;
        if (3.0 * mc.std_error < tol)
            ++pinned;
        else
            worst_z = std::max(worst_z, std::abs(u - mc.u) / mc.std_error);
    }
    return {failures == 0, fmt("20 instances, 1e6 draws each, %d outside 3 SE, max |z| = %.2f over %d; %d with SE at "
                               "rounding level compared to 1e-12 relative",
                               failures, worst_z, 20 - pinned, pinned)};
}

Outcome degenerate_closed_forms() {
    std::mt19937_64 rng(7001);
    std::uniform_real_distribution<double> u01(0.0, 1.0), uy(-5.0, 5.0);
    double worst = 0.0, worst_hedge = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double sigma = 0.1 + u01(rng), r = 0.05 * u01(rng), mu = r + 0.5 * (u01(rng) - 0.3);
        const auto single = MarketModel::create(r, sigma, {mu}, {1.0});
        const double alpha = random_alpha(rng, -5.0, 0.95);
        const double T = 100.0 * u01(rng) + 1e-3;
        const double t = u01(rng) * T;
        const auto v = optimal_fraction(single, alpha, {t, T, uy(rng)});
        const double merton = merton_fraction(single, mu, alpha);
        worst = std::max(worst, std::abs(v.u_star - merton) / std::max(1.0, std::abs(merton)));

        const auto m = oracle::random_model(rng, 5, 5.0);
        const double alpha2 = random_alpha(rng, -5.0, 0.95);
        const double y = uy(rng);
        const auto at_t = optimal_fraction(m, alpha2, {T, T, y});
        double mean = posterior_mean(m, T, y);
        const double myopic = (mean - m.r()) / (m.sigma() * m.sigma() * (1.0 - alpha2));
        worst = std::max(worst, std::abs(at_t.u_star - myopic) / std::max(1.0, std::abs(myopic)));
        worst_hedge = std::max(worst_hedge, std::abs(at_t.hedging));
    }
    const bool ok = worst <= 1e-12 && worst_hedge <= 1e-12;
    return {ok, fmt("200 probes, max deviation %.2e, max |hedging| at t=T %.2e", worst, worst_hedge)};
}

Outcome log_utility_limit() {
    const auto m = oracle::toy_model();
    const double log_u = log_utility_fraction(m, 0.0, 0.0);
    const double up = optimal_fraction(m, 1e-3, {0.0, 1.0, 0.0}).u_star;
    const double down = optimal_fraction(m, -1e-3, {0.0, 1.0, 0.0}).u_star;
    const double err = std::max(std::abs(up - log_u), std::abs(down - log_u));
    return {err < 1e-2, fmt("log utility %.6f, alpha=+1e-3 %.6f, alpha=-1e-3 %.6f, max diff %.2e", log_u, up, down, err)};
}

Outcome filter_agreement() {
    const auto m = oracle::toy_model();
    double coarse = 0.0, fine = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::size_t theta = seed % m.size();
        coarse += max_filter_discrepancy(m, simulate_filter_sde(m, theta, 5.0, 1e-3, seed)) / 20.0;
        fine += max_filter_discrepancy(m, simulate_filter_sde(m, theta, 5.0, 2.5e-4, seed)) / 20.0;
    }
    const double ratio = coarse / fine;
    return {ratio >= 1.5, fmt("mean max error h=1e-3: %.3e, h=2.5e-4: %.3e, ratio %.2f", coarse, fine, ratio)};
}

Outcome optimality_mc() {
    const auto m = oracle::toy_model();
    const std::vector<double> c{0.5, 0.8, 1.25, 2.0};
    bool ok = true;
    std::string detail;
    for (double alpha : {0.5, -0.5}) {
        OptimalityOptions opt;
        const auto rep = optimality_check(m, alpha, 1.0, c, 1e-3, 100000, 2024, opt);
        double best_z = -1e300;
        for (std::size_t i = 1; i < rep.entries.size(); ++i)
            best_z = std::max(best_z, rep.entries[i].delta.mean / rep.entries[i].delta.std_error);
        ok = ok && rep.undominated && rep.interpolation_error < 1e-4;
        detail += fmt("alpha=%g undominated=%d (max z %.2f, grid err %.1e); ", alpha, rep.undominated ? 1 : 0, best_z,
                      rep.interpolation_error);

        opt.reference_scale = 2.0;
        const auto wrong = optimality_check(m, alpha, 1.0, c, 1e-3, 100000, 2024, opt);
        ok = ok && !wrong.undominated;
        detail += fmt("wrong fixture detected=%d; ", wrong.undominated ? 0 : 1);
    }
    return {ok, detail};
}

Outcome numerical_stability() {
    const auto m = oracle::toy_model();
    bool finite = true;
    std::string detail;
    for (double alpha : {0.9, 0.5, -0.5, -5.0}) {
        const auto v = optimal_fraction(m, alpha, {0.0, 1000.0, 0.0});
        bool ok = std::isfinite(v.u_star);
        for (double f : v.f) ok = ok && std::isfinite(f) && f >= 0.0;
        finite = finite && ok;
        detail += fmt("alpha=%g u=%.12g; ", alpha, v.u_star);
    }
    double worst_rel = 0.0;
    int compared = 0;
    for (double alpha : {0.9, 0.5, -0.5, -5.0}) {
        for (double T : {0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 1000.0}) {
            const auto naive = oracle::naive_fraction(m, alpha, 0.0, T, 0.0);
            if (!naive) continue;
            ++compared;
            const double u = optimal_fraction(m, alpha, {0.0, T, 0.0}).u_star;
            worst_rel = std::max(worst_rel, std::abs(u - *naive) / std::abs(*naive));
        }
    }
    const bool ok = finite && worst_rel <= 1e-8 && compared > 0;
    return {ok, detail + fmt("naive comparisons %d, max rel diff %.2e", compared, worst_rel)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"example limits", example_limits},
        {"horizon sweep reproduction", sweep_reproduction},
        {"convex-combination bound", convex_combination},
        {"state-weight monotonicity in alpha", weight_monotonicity},
        {"bound sandwiches", bound_sandwiches},
        {"Monte Carlo oracle equivalence", oracle_equivalence},
        {"degenerate closed forms", degenerate_closed_forms},
        {"log-utility consistency", log_utility_limit},
        {"filter agreement", filter_agreement},
        {"optimality by simulation", optimality_mc},
        {"numerical stability", numerical_stability},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
