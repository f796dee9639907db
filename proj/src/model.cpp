#include "bayesmerton/model.hpp"

#include "bayesmerton/error.hpp"
#include "bayesmerton/numeric.hpp"

#include <cmath>
#include <string>

namespace bayesmerton {

MarketModel MarketModel::create(double r, double sigma, std::vector<double> mus,
                                std::vector<double> prior) {
    if (!std::isfinite(r)) throw Error(ErrorCode::InvalidArgument, "interest rate must be finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw Error(ErrorCode::NonPositiveSigma, "sigma must be > 0, got " + std::to_string(sigma));
    if (mus.empty()) throw Error(ErrorCode::EmptySupport, "drift support must be non-empty");
    if (prior.size() != mus.size())
        throw Error(ErrorCode::InvalidPrior, "prior has " + std::to_string(prior.size()) +
                                                 " weights for " + std::to_string(mus.size()) +
                                                 " drift values");
    for (std::size_t k = 0; k < mus.size(); ++k) {
        if (!std::isfinite(mus[k])) throw Error(ErrorCode::UnorderedDrifts, "drift values must be finite");
        if (k > 0 && !(mus[k] > mus[k - 1]))
            throw Error(ErrorCode::UnorderedDrifts, "drift values must be strictly increasing (index " +
                                                        std::to_string(k) + ")");
    }
    for (std::size_t k = 0; k < prior.size(); ++k) {
        if (!(prior[k] > 0.0) || !std::isfinite(prior[k]))
            throw Error(ErrorCode::InvalidPrior,
                        "prior weight " + std::to_string(k) + " must be > 0, got " + std::to_string(prior[k]));
    }
    const double total = pairwise_sum(prior);
    if (std::abs(total - 1.0) > 1e-9)
        throw Error(ErrorCode::InvalidPrior, "prior sums to " + format_shortest(total) + ", expected 1");
    for (double& p : prior) p /= total;

    MarketModel m;
    m.r_ = r;
    m.sigma_ = sigma;
    m.mus_ = std::move(mus);
    m.prior_ = std::move(prior);
    m.log_prior_.reserve(m.prior_.size());
    m.gammas_.reserve(m.mus_.size());
    for (std::size_t k = 0; k < m.mus_.size(); ++k) {
        m.log_prior_.push_back(std::log(m.prior_[k]));
        m.gammas_.push_back((m.mus_[k] - r) / sigma);
    }
    return m;
}

UtilitySpec UtilitySpec::create(double alpha) {
    if (!std::isfinite(alpha) || !(alpha < 1.0))
        throw Error(ErrorCode::InvalidAlpha, "alpha must be finite and < 1, got " + std::to_string(alpha));
    return UtilitySpec{alpha, 1.0 / (1.0 - alpha)};
}

void StrategyQuery::validate() const {
    if (!std::isfinite(t) || !std::isfinite(T) || !std::isfinite(y))
        throw Error(ErrorCode::InvalidQuery, "query values must be finite");
    if (t < 0.0 || t > T)
        throw Error(ErrorCode::InvalidQuery,
                    "need 0 <= t <= T, got t=" + format_shortest(t) + " T=" + format_shortest(T));
}

void require_power_alpha(double alpha) {
    if (!std::isfinite(alpha) || !(alpha < 1.0))
        throw Error(ErrorCode::InvalidAlpha, "alpha must be finite and < 1, got " + format_shortest(alpha));
    if (alpha == 0.0)
        throw Error(ErrorCode::InvalidAlpha, "alpha = 0 is the logarithmic case; use log_utility_fraction");
}

double merton_fraction(const MarketModel& model, double mu, double alpha) {
    if (!std::isfinite(alpha) || !(alpha < 1.0))
        throw Error(ErrorCode::InvalidAlpha, "alpha must be finite and < 1, got " + format_shortest(alpha));
    return (mu - model.r()) / (model.sigma() * model.sigma() * (1.0 - alpha));
}

}  // namespace bayesmerton
