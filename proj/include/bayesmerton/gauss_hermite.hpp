#pragma once

#include <cstddef>
#include <vector>

namespace bayesmerton {

/// n-point Gauss-Hermite rule for E[f(Z)], Z ~ N(0, 1).
///
/// Weights are stored as logarithms: for n in the hundreds the outer
/// weights are far below the smallest double.
struct GaussHermiteRule {
    std::vector<double> nodes;        ///< ascending, symmetric about 0
    std::vector<double> log_weights;  ///< log w_i, sum_i w_i = 1
};

/// Nodes from the eigenvalues of the Jacobi matrix, polished by Newton
/// steps on the orthonormal recurrence; weights from the Christoffel sum
/// evaluated with running rescaling. Rules are memoized per n (thread-safe).
const GaussHermiteRule& gauss_hermite_rule(std::size_t n);

}  // namespace bayesmerton
