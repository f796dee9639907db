#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bayesmerton/error.hpp"
#include "bayesmerton/filter.hpp"
#include "oracles.hpp"

#include <cmath>
#include <sstream>

using namespace bayesmerton;

TEST_CASE("closed-form posterior against 50-digit reference") {
    const auto m = oracle::toy_model();
    // exact values at t = 1, y = 0
    CHECK(likelihood(m, 2, 1.0, 0.0) == doctest::Approx(0.011108996538242306496).epsilon(1e-15));
    CHECK(normalizer(m, 1.0, 0.0) == doctest::Approx(0.22700338150007075725).epsilon(1e-15));
    const auto post = posterior(m, 1.0, 0.0);
    CHECK(post.probs[0] == doctest::Approx(0.8015704290895477703).epsilon(1e-15));
    CHECK(post.probs[1] == doctest::Approx(0.17885453821299640998).epsilon(1e-14));
    CHECK(post.probs[2] == doctest::Approx(0.019575032697455819719).epsilon(1e-14));
    CHECK(posterior_mean(m, 1.0, 0.0) == doctest::Approx(1.2180046036079080494).epsilon(1e-15));
}

TEST_CASE("posterior at t = 0 is the prior") {
    const auto m = oracle::toy_model();
    for (std::size_t k = 0; k < m.size(); ++k) CHECK(log_likelihood(m, k, 0.0, 0.0) == 0.0);
    const auto post = posterior(m, 0.0, 0.0);
    for (std::size_t k = 0; k < m.size(); ++k) CHECK(post.probs[k] == doctest::Approx(m.prior()[k]).epsilon(1e-15));
    CHECK(posterior_mean(m, 0.0, 0.0) == doctest::Approx(2.1).epsilon(1e-15));
}

TEST_CASE("extreme observations stay finite and concentrate") {
    const auto m = oracle::toy_model();
    const auto hi = posterior(m, 1e4, 3e4);
    CHECK(hi.probs[2] == doctest::Approx(1.0));
    CHECK(std::isfinite(log_normalizer(m, 1e4, 3e4)));
    const auto lo = posterior(m, 1e4, -1e6);
    CHECK(lo.probs[0] == 1.0);
    CHECK(posterior_mean(m, 1e4, -1e6) == 1.0);
    CHECK(posterior_mean(m, 1e4, 1e6) == 3.0);
}

TEST_CASE("Euler filter: deterministic, converges, concentrates on the truth") {
    const auto m = oracle::toy_model();
    const auto a = simulate_filter_sde(m, 0, 5.0, 1e-3, 42);
    const auto b = simulate_filter_sde(m, 0, 5.0, 1e-3, 42);
    REQUIRE(a.times.size() == 5001);
    CHECK(a.y == b.y);
    CHECK(a.posteriors.back().probs == b.posteriors.back().probs);
    CHECK(a.times.back() == 5.0);
    for (const auto& p : a.posteriors) {
        double s = 0.0;
        for (double v : p.probs) s += v;
        CHECK(std::abs(s - 1.0) < 1e-12);
    }
    // log-odds against the truth grow like t / 2 per unit gap in gamma
    const auto longer = simulate_filter_sde(m, 0, 60.0, 1e-2, 42);
    CHECK(closed_form_along(m, longer).back().probs[0] > 0.9);
    CHECK(longer.posteriors.back().probs[0] > 0.9);

    double coarse = 0.0, fine = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        coarse += max_filter_discrepancy(m, simulate_filter_sde(m, 1, 5.0, 4e-3, s));
        fine += max_filter_discrepancy(m, simulate_filter_sde(m, 1, 5.0, 1e-3, s));
    }
    CHECK(fine < coarse);
    CHECK(fine / 10.0 < 0.05);
}

TEST_CASE("oversized step is reported") {
    const auto m = MarketModel::create(0.0, 0.1, {-5.0, 5.0}, {0.5, 0.5});
    CHECK_THROWS_AS(simulate_filter_sde(m, 1, 10.0, 1.0, 3), Error);
    try {
        simulate_filter_sde(m, 1, 10.0, 1.0, 3);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StepTooLarge);
    }
    CHECK_THROWS_AS(simulate_filter_sde(m, 2, 1.0, 0.01, 3), Error);
    CHECK_THROWS_AS(simulate_filter_sde(m, 0, 1.0, 0.0, 3), Error);
}

TEST_CASE("trajectory csv") {
    const auto m = oracle::toy_model();
    const auto tr = simulate_filter_sde(m, 2, 0.002, 1e-3, 1);
    std::ostringstream os;
    write_trajectory_csv(os, m, tr.times, tr.y, tr.posteriors);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "time,y,p_1,p_2,p_3,posterior_mean");
    std::getline(is, line);
    CHECK(line == "0,0,0.3,0.3,0.4,2.1");
    int rows = 1;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 3);
}
