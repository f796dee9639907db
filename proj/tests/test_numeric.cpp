#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bayesmerton/numeric.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

using namespace bayesmerton;

TEST_CASE("pairwise_sum matches exact sums and is order-stable") {
    std::vector<double> v(1000);
    std::iota(v.begin(), v.end(), 1.0);
    CHECK(pairwise_sum(v) == 500500.0);
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);

    std::vector<double> tiny(1 << 20, 0.1);
    CHECK(std::abs(pairwise_sum(tiny) - 0.1 * static_cast<double>(tiny.size())) < 1e-8);
}

TEST_CASE("log_sum_exp") {
    const std::vector<double> v{1000.0, 1000.0};
    CHECK(log_sum_exp(v) == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
    const double ninf = -std::numeric_limits<double>::infinity();
    CHECK(log_sum_exp(std::vector<double>{}) == ninf);
    CHECK(log_sum_exp(std::vector<double>{ninf, ninf}) == ninf);
    CHECK(log_sum_exp(std::vector<double>{ninf, 0.0}) == 0.0);
}

TEST_CASE("normal cdf and its log") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
    // log Phi(-40) = -804.608442013754...; the direct form underflows
    CHECK(log_normal_cdf(-37.0 - 1e-12) == doctest::Approx(log_normal_cdf(-37.0 + 1e-12)).epsilon(1e-12));
    CHECK(log_normal_cdf(-40.0) == doctest::Approx(-804.6084420137538).epsilon(1e-13));
    for (double x : {-36.9, -20.0, -6.0, -2.0, 0.0, 3.0})
        CHECK(log_normal_cdf(x) == doctest::Approx(std::log(normal_cdf(x))).epsilon(1e-12));
}

TEST_CASE("seed derivation") {
    // reference values of the SplitMix64 finalizer
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("number formatting") {
    CHECK(format_shortest(0.1) == "0.1");
    CHECK(format_shortest(6.0) == "6");
    CHECK(std::stod(format_shortest(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_shortest(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_significant(2.0 / 3.0, 12) == "0.666666666667");
}
