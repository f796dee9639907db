#include "bayesmerton/gauss_hermite.hpp"

#include "bayesmerton/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace bayesmerton {

namespace {

struct Recurrence {
    double psi_n = 0.0;      // orthonormal psi_n(x), scaled
    double psi_nm1 = 0.0;    // psi_{n-1}(x), same scale
    double log_christoffel = 0.0;  // log sum_{k<n} psi_k(x)^2, unscaled
};

// psi_{k+1} = (x psi_k - sqrt(k) psi_{k-1}) / sqrt(k+1), psi_0 = 1.
Recurrence run_recurrence(double x, std::size_t n) {
    double prev = 0.0;
    double cur = 1.0;
    double log_scale = 0.0;  // true value = stored * exp(log_scale)
    double sum_sq = 0.0;     // in units of exp(2 * log_scale)
    for (std::size_t k = 0; k < n; ++k) {
        sum_sq += cur * cur;
        const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(static_cast<double>(k + 1));
        prev = cur;
        cur = next;
        if (std::abs(cur) > 1e100) {
            prev *= 1e-100;
            cur *= 1e-100;
            sum_sq *= 1e-200;
            log_scale += 100.0 * std::log(10.0);
        }
    }
    return {cur, prev, std::log(sum_sq) + 2.0 * log_scale};
}

GaussHermiteRule build_rule(std::size_t n) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(n > 0 ? n - 1 : 0));
    for (std::size_t k = 1; k < n; ++k) sub[static_cast<Eigen::Index>(k - 1)] = std::sqrt(static_cast<double>(k));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::QuadratureNotConverged, "Jacobi eigenvalue solve failed for n=" + std::to_string(n));

    GaussHermiteRule rule;
    rule.nodes.resize(n);
    rule.log_weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
        for (int it = 0; it < 3; ++it) {
            const Recurrence rec = run_recurrence(x, n);
            // psi_n'(x) = sqrt(n) psi_{n-1}(x)
            x -= rec.psi_n / (std::sqrt(static_cast<double>(n)) * rec.psi_nm1);
        }
        rule.nodes[i] = x;
    }
    // Exact symmetry removes a source of odd-moment bias.
    for (std::size_t i = 0; i < n / 2; ++i) {
        const double a = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
        rule.nodes[i] = -a;
        rule.nodes[n - 1 - i] = a;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    for (std::size_t i = 0; i < n; ++i) rule.log_weights[i] = -run_recurrence(rule.nodes[i], n).log_christoffel;
    return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite_rule(std::size_t n) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "Gauss-Hermite rule needs n >= 1");
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<GaussHermiteRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<GaussHermiteRule>(build_rule(n));
    return *slot;
}

}  // namespace bayesmerton
