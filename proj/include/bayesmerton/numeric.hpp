#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace bayesmerton {

/// Pairwise (cascade) summation. The reduction tree depends only on the
/// length of the input, so results are reproducible bit for bit.
double pairwise_sum(std::span<const double> values);

/// log(sum(exp(v))) with max-shift; returns -inf for empty input or when
/// every entry is -inf.
double log_sum_exp(std::span<const double> log_values);

/// Standard normal CDF and its logarithm (accurate deep in the lower tail).
double normal_cdf(double x);
double log_normal_cdf(double x);

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of stream `index` under `master`: splitmix64(master + (index+1) * 0x9E3779B97F4A7C15).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Shortest decimal representation that round-trips to the same double.
std::string format_shortest(double value);

/// Fixed count of significant digits (printf %.Ng).
std::string format_significant(double value, int digits);

}  // namespace bayesmerton
