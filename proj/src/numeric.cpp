#include "bayesmerton/numeric.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <vector>

namespace bayesmerton {

namespace {

double pairwise_sum_impl(const double* data, std::size_t n) {
    constexpr std::size_t kBlock = 16;
    if (n <= kBlock) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum_impl(data, half) + pairwise_sum_impl(data + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
    return pairwise_sum_impl(values.data(), values.size());
}

double log_sum_exp(std::span<const double> log_values) {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    if (log_values.empty()) return kNegInf;
    const double top = *std::max_element(log_values.begin(), log_values.end());
    if (top == kNegInf) return kNegInf;
    if (std::isinf(top)) return top;
    // Small inputs (the common d-term case) avoid the heap.
    if (log_values.size() <= 64) {
        double buf[64];
        for (std::size_t i = 0; i < log_values.size(); ++i) buf[i] = std::exp(log_values[i] - top);
        return top + std::log(pairwise_sum({buf, log_values.size()}));
    }
    std::vector<double> shifted(log_values.size());
    for (std::size_t i = 0; i < log_values.size(); ++i) shifted[i] = std::exp(log_values[i] - top);
    return top + std::log(pairwise_sum(shifted));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_normal_cdf(double x) {
    // erfc keeps full relative accuracy until it nears the subnormal range
    if (x > -37.0) return std::log(normal_cdf(x));
    // Asymptotic series for the Mills ratio; the truncation error is below 1e-20 here.
    const double x2 = x * x;
    double term = 1.0;
    double series = 1.0;
    for (int k = 1; k <= 6; ++k) {
        term *= -(2.0 * k - 1.0) / x2;
        series += term;
    }
    return -0.5 * x2 - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

std::string format_shortest(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string format_significant(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
    return buf;
}

}  // namespace bayesmerton
