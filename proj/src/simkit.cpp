#include "bayesmerton/simkit.hpp"

#include "bayesmerton/error.hpp"
#include "bayesmerton/numeric.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <cmath>
#include <ostream>
#include <random>
#include <memory>
#include <thread>
#include <utility>

namespace bayesmerton {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t sample_index(std::span<const double> prior, double u) {
    double cum = 0.0;
    for (std::size_t k = 0; k + 1 < prior.size(); ++k) {
        cum += prior[k];
        if (u < cum) return k;
    }
    return prior.size() - 1;
}

unsigned resolve_threads(unsigned requested, std::size_t work) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(work, 1)));
}

// Runs body(p) for p in [0, n) on contiguous chunks; output slots are indexed
// by p so the result does not depend on the thread count.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    const unsigned workers = resolve_threads(threads, n);
    if (workers <= 1) {
        for (std::size_t p = 0; p < n; ++p) body(p);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t p = lo; p < hi; ++p) body(p);
        });
    }
    for (auto& th : pool) th.join();
}

struct PathState {
    std::size_t theta_index = 0;
    double theta = 0.0;
    double gamma = 0.0;
};

// Simulates one path; `fractions(t, y, out)` fills the fraction of each
// tracked strategy, `log_wealth` accumulates per strategy. `on_step` sees the
// state after every step (used to record full bundles).
template <class Fractions, class OnStep>
PathState run_path(const MarketModel& model, const SimulationSettings& s, std::size_t path, Fractions&& fractions,
                   std::span<double> log_wealth, std::span<double> pis, OnStep&& on_step) {
    std::mt19937_64 rng(derive_seed(s.seed, path));
    std::normal_distribution<double> normal(0.0, 1.0);
    PathState st;
    st.theta_index = sample_index(model.prior(), uniform01(rng));
    st.theta = model.mus()[st.theta_index];
    st.gamma = model.gamma(st.theta_index);

    const double r = model.r();
    const double sigma = model.sigma();
    const std::size_t n_steps = s.n_steps();
    double t = 0.0;
    double y = 0.0;
    double log_s = std::log(s.s0);
    std::fill(log_wealth.begin(), log_wealth.end(), 0.0);
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double h = (i + 1 == n_steps) ? s.T - t : s.step;
        fractions(t, y, pis);
        const double dw = std::sqrt(h) * normal(rng);
        for (std::size_t k = 0; k < log_wealth.size(); ++k) {
            const double pi = pis[k];
            log_wealth[k] += (r + (st.theta - r) * pi - 0.5 * sigma * sigma * pi * pi) * h + sigma * pi * dw;
        }
        log_s += (st.theta - 0.5 * sigma * sigma) * h + sigma * dw;
        y += dw + st.gamma * h;
        t = (i + 1 == n_steps) ? s.T : t + h;
        on_step(t, y, log_s, log_wealth, pis);
    }
    return st;
}

constexpr auto kNoRecord = [](double, double, double, std::span<const double>, std::span<const double>) {};

}  // namespace

void SimulationSettings::validate() const {
    if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorCode::InvalidArgument, "simulation horizon must be > 0");
    if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorCode::InvalidArgument, "simulation step must be > 0");
    if (n_paths < 1) throw Error(ErrorCode::InvalidArgument, "need at least one path");
    if (!(s0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "initial stock price must be > 0");
}

std::size_t SimulationSettings::n_steps() const {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(T / step - 1e-9)));
}

std::vector<PathBundle> simulate_paths(const MarketModel& model, const FeedbackStrategy& strategy,
                                       const std::string& name, const SimulationSettings& settings) {
    settings.validate();
    std::vector<PathBundle> bundles(settings.n_paths);
    parallel_for(settings.n_paths, settings.threads, [&](std::size_t p) {
        PathBundle& b = bundles[p];
        b.seed = derive_seed(settings.seed, p);
        b.step = settings.step;
        b.strategy_name = name;
        const std::size_t n = settings.n_steps() + 1;
        b.times.reserve(n);
        b.stock.reserve(n);
        b.y.reserve(n);
        b.wealth.reserve(n);
        b.fraction.reserve(n);
        b.times.push_back(0.0);
        b.stock.push_back(settings.s0);
        b.y.push_back(0.0);
        b.wealth.push_back(1.0);
        double lw = 0.0;
        double pi = 0.0;
        const PathState st = run_path(
            model, settings, p, [&](double t, double y, std::span<double> out) { out[0] = strategy(t, y); },
            std::span<double>(&lw, 1), std::span<double>(&pi, 1),
            [&](double t, double y, double log_s, std::span<const double> log_w, std::span<const double> pis) {
                b.fraction.push_back(pis[0]);
                b.times.push_back(t);
                b.stock.push_back(std::exp(log_s));
                b.y.push_back(y);
                b.wealth.push_back(std::exp(log_w[0]));
            });
        b.fraction.push_back(b.fraction.empty() ? 0.0 : b.fraction.back());
        b.theta_index = st.theta_index;
    });
    return bundles;
}

std::vector<std::vector<double>> simulate_terminal_wealth(const MarketModel& model,
                                                          std::span<const FeedbackStrategy> strategies,
                                                          const SimulationSettings& settings) {
    settings.validate();
    const std::size_t m = strategies.size();
    std::vector<std::vector<double>> out(m, std::vector<double>(settings.n_paths));
    parallel_for(settings.n_paths, settings.threads, [&](std::size_t p) {
        std::vector<double> lw(m), pis(m);
        run_path(
            model, settings, p,
            [&](double t, double y, std::span<double> o) {
                for (std::size_t k = 0; k < m; ++k) o[k] = strategies[k](t, y);
            },
            lw, pis, kNoRecord);
        for (std::size_t k = 0; k < m; ++k) out[k][p] = std::exp(lw[k]);
    });
    return out;
}

std::vector<std::vector<double>> simulate_scaled_terminal_wealth(const MarketModel& model,
                                                                 const FeedbackStrategy& base,
                                                                 std::span<const double> scales,
                                                                 const SimulationSettings& settings) {
    settings.validate();
    const std::size_t m = scales.size();
    std::vector<std::vector<double>> out(m, std::vector<double>(settings.n_paths));
    parallel_for(settings.n_paths, settings.threads, [&](std::size_t p) {
        std::vector<double> lw(m), pis(m);
        run_path(
            model, settings, p,
            [&](double t, double y, std::span<double> o) {
                const double u = base(t, y);
                for (std::size_t k = 0; k < m; ++k) o[k] = scales[k] * u;
            },
            lw, pis, kNoRecord);
        for (std::size_t k = 0; k < m; ++k) out[k][p] = std::exp(lw[k]);
    });
    return out;
}

std::vector<std::size_t> sample_theta_indices(const MarketModel& model, const SimulationSettings& settings) {
    std::vector<std::size_t> out(settings.n_paths);
    for (std::size_t p = 0; p < settings.n_paths; ++p) {
        std::mt19937_64 rng(derive_seed(settings.seed, p));
        out[p] = sample_index(model.prior(), uniform01(rng));
    }
    return out;
}

double utility(double wealth, double alpha) {
    if (alpha == 0.0) return std::log(wealth);
    return std::pow(wealth, alpha) / alpha;
}

UtilityEstimate estimate_utility(std::span<const double> terminal_wealth, double alpha, double x0) {
    if (!(alpha < 1.0)) throw Error(ErrorCode::InvalidAlpha, "alpha must be < 1");
    if (!(x0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "initial wealth must be > 0");
    const std::size_t n = terminal_wealth.size();
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "no paths to estimate from");
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = utility(x0 * terminal_wealth[i], alpha);
    UtilityEstimate est;
    est.n_paths = n;
    est.mean = pairwise_sum(u) / static_cast<double>(n);
    if (n > 1) {
        for (double& v : u) v = (v - est.mean) * (v - est.mean);
        est.std_error = std::sqrt(pairwise_sum(u) / static_cast<double>(n - 1) / static_cast<double>(n));
    }
    return est;
}

UtilityEstimate estimate_utility(std::span<const PathBundle> bundles, double alpha, double x0) {
    std::vector<double> terminal;
    terminal.reserve(bundles.size());
    for (const auto& b : bundles) terminal.push_back(b.wealth.back());
    return estimate_utility(terminal, alpha, x0);
}

PairedDifference paired_difference(std::span<const double> candidate, std::span<const double> reference,
                                   double alpha, double x0) {
    if (candidate.size() != reference.size() || candidate.empty())
        throw Error(ErrorCode::InvalidArgument, "paired comparison needs equal, non-empty samples");
    const std::size_t n = candidate.size();
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = utility(x0 * candidate[i], alpha) - utility(x0 * reference[i], alpha);
    PairedDifference out;
    out.mean = pairwise_sum(diff) / static_cast<double>(n);
    if (n > 1) {
        for (double& v : diff) v = (v - out.mean) * (v - out.mean);
        out.std_error = std::sqrt(pairwise_sum(diff) / static_cast<double>(n - 1) / static_cast<double>(n));
    }
    return out;
}

StrategyGrid StrategyGrid::build(const MarketModel& model, double alpha, double T, const QuadratureConfig& quad,
                                 const Spec& spec) {
    if (spec.time_points < 2 || spec.y_points < 2)
        throw Error(ErrorCode::InvalidArgument, "strategy grid needs at least 2 points per axis");
    if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "strategy grid needs T > 0");
    const UtilitySpec utility_spec = UtilitySpec::create(alpha);
    const double max_gamma = std::max(std::abs(model.gammas().front()), std::abs(model.gammas().back()));
    const double half = spec.y_half_span > 0.0 ? spec.y_half_span : 10.0 * std::sqrt(T) + max_gamma * T;

    StrategyGrid g;
    g.alpha_ = alpha;
    g.T_ = T;
    g.y_min_ = -half;
    g.y_max_ = half;
    g.ny_ = spec.y_points;
    g.times_.resize(spec.time_points);
    // Nodes uniform in q = 1 - (s + s^2) / 2 with s = sqrt((T - t) / T): u* depends on
    // sqrt(T - t) and bends sharply near T, while the t-linear half keeps t = 0 resolved.
    for (std::size_t i = 0; i < spec.time_points; ++i) {
        const double q = static_cast<double>(i) / static_cast<double>(spec.time_points - 1);
        const double s = 0.5 * (std::sqrt(1.0 + 8.0 * (1.0 - q)) - 1.0);
        g.times_[i] = (i + 1 == spec.time_points) ? T : T * (1.0 - s * s);
    }
    g.values_.resize(spec.time_points * spec.y_points);
    for (std::size_t i = 0; i < spec.time_points; ++i) {
        for (std::size_t j = 0; j < spec.y_points; ++j) {
            const double y = g.y_min_ + (g.y_max_ - g.y_min_) * static_cast<double>(j) / static_cast<double>(g.ny_ - 1);
            g.values_[i * g.ny_ + j] = strategy_value(model, utility_spec, {g.times_[i], T, y}, quad).u_star;
        }
    }
    return g;
}

namespace {

// Catmull-Rom weights at fractional position w in [0, 1] between nodes 0 and 1.
std::array<double, 4> cubic_weights(double w) {
    const double w2 = w * w, w3 = w2 * w;
    return {0.5 * (-w3 + 2.0 * w2 - w), 0.5 * (3.0 * w3 - 5.0 * w2 + 2.0), 0.5 * (-3.0 * w3 + 4.0 * w2 + w),
            0.5 * (w3 - w2)};
}

// Cell index and offset; stencil points outside [0, n) are extrapolated quadratically.
std::pair<std::size_t, double> locate(double pos, std::size_t n) {
    const std::size_t i = std::min(static_cast<std::size_t>(pos), n - 2);
    return {i, pos - static_cast<double>(i)};
}

double stencil_value(const double* row, std::size_t n, std::ptrdiff_t j) {
    const auto last = static_cast<std::ptrdiff_t>(n) - 1;
    if (n < 3) return row[std::clamp<std::ptrdiff_t>(j, 0, last)];
    if (j < 0) return 3.0 * row[0] - 3.0 * row[1] + row[2];
    if (j > last) return 3.0 * row[last] - 3.0 * row[last - 1] + row[last - 2];
    return row[j];
}

}  // namespace

double StrategyGrid::operator()(double t, double y) const {
    const std::size_t nt = times_.size();
    const double s = std::sqrt(std::clamp(1.0 - t / T_, 0.0, 1.0));
    const auto [i, wt] = locate((1.0 - 0.5 * (s + s * s)) * static_cast<double>(nt - 1), nt);
    const double yp = std::clamp((y - y_min_) / (y_max_ - y_min_), 0.0, 1.0) * static_cast<double>(ny_ - 1);
    const auto [j, wy] = locate(yp, ny_);
    const auto cy = cubic_weights(wy);
    const auto ct = cubic_weights(wt);
    std::array<double, 4> rows{};
    for (int a = 0; a < 4; ++a) {
        const auto ti = static_cast<std::ptrdiff_t>(i) + a - 1;
        const auto tc = std::clamp<std::ptrdiff_t>(ti, 0, static_cast<std::ptrdiff_t>(nt) - 1);
        const double* row = &values_[static_cast<std::size_t>(tc) * ny_];
        double v = 0.0;
        for (int b = 0; b < 4; ++b) v += cy[b] * stencil_value(row, ny_, static_cast<std::ptrdiff_t>(j) + b - 1);
        rows[a] = v;
    }
    // time ghost rows, extrapolated the same way as in y
    if (nt >= 3 && i == 0) rows[0] = 3.0 * rows[1] - 3.0 * rows[2] + rows[3];
    if (nt >= 3 && i + 2 == nt) rows[3] = 3.0 * rows[2] - 3.0 * rows[1] + rows[0];
    return ct[0] * rows[0] + ct[1] * rows[1] + ct[2] * rows[2] + ct[3] * rows[3];
}

double StrategyGrid::max_probe_error(const MarketModel& model, const QuadratureConfig& quad, std::size_t n_probes,
                                     std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    const UtilitySpec utility_spec = UtilitySpec::create(alpha_);
    double worst = 0.0;
    for (std::size_t p = 0; p < n_probes; ++p) {
        const double t = T_ * uniform01(rng);
        const double y = y_min_ + (y_max_ - y_min_) * uniform01(rng);
        const double exact = strategy_value(model, utility_spec, {t, T_, y}, quad).u_star;
        worst = std::max(worst, std::abs((*this)(t, y) - exact));
    }
    return worst;
}

OptimalityReport optimality_check(const MarketModel& model, double alpha, double T,
                                  std::span<const double> perturbations, double step, std::size_t n_paths,
                                  std::uint64_t seed, const OptimalityOptions& options) {
    UtilitySpec::create(alpha);
    if (!(options.reference_scale > 0.0) && !(options.reference_scale < 0.0))
        throw Error(ErrorCode::InvalidArgument, "reference scale must be non-zero");
    SimulationSettings settings;
    settings.T = T;
    settings.step = step;
    settings.n_paths = n_paths;
    settings.seed = seed;
    settings.threads = options.threads;
    settings.validate();

    OptimalityReport report;
    report.alpha = alpha;
    report.T = T;
    report.step = step;
    report.n_paths = n_paths;
    report.seed = seed;
    report.x0 = options.x0;
    report.reference_scale = options.reference_scale;
    report.z_threshold = options.z_threshold;

    std::vector<double> scales{1.0};
    for (double c : perturbations) {
        if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "perturbations must be finite");
        if (c != 1.0) scales.push_back(c);
    }
    std::vector<double> absolute(scales);
    for (double& c : absolute) c *= options.reference_scale;

    FeedbackStrategy base;
    if (alpha == 0.0) {
        base = [&model](double t, double y) { return log_utility_fraction(model, t, y); };
    } else {
        auto grid = std::make_shared<StrategyGrid>(StrategyGrid::build(model, alpha, T, options.quad, options.grid));
        report.interpolation_error = grid->max_probe_error(model, options.quad, options.probes, derive_seed(seed, ~0ULL));
        base = [grid](double t, double y) { return (*grid)(t, y); };
    }

    const auto wealth = simulate_scaled_terminal_wealth(model, base, absolute, settings);
    for (std::size_t i = 0; i < scales.size(); ++i) {
        OptimalityEntry e;
        e.scale = scales[i];
        e.utility = estimate_utility(wealth[i], alpha, options.x0);
        if (i > 0) {
            e.delta = paired_difference(wealth[i], wealth[0], alpha, options.x0);
            e.dominates_reference = e.delta.mean > 0.0 && e.delta.mean > options.z_threshold * e.delta.std_error;
            if (e.dominates_reference) report.undominated = false;
        }
        report.entries.push_back(e);
    }
    return report;
}

void write_path_csv(std::ostream& out, const PathBundle& path) {
    out << "time,stock,y,wealth,fraction\n";
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        out << format_shortest(path.times[i]) << ',' << format_shortest(path.stock[i]) << ','
            << format_shortest(path.y[i]) << ',' << format_shortest(path.wealth[i]) << ','
            << format_shortest(path.fraction[i]) << '\n';
    }
}

void write_optimality_json(std::ostream& out, const OptimalityReport& report) {
    nlohmann::ordered_json j;
    j["alpha"] = report.alpha;
    j["T"] = report.T;
    j["step"] = report.step;
    j["n_paths"] = report.n_paths;
    j["seed"] = report.seed;
    j["x0"] = report.x0;
    j["reference_scale"] = report.reference_scale;
    j["z_threshold"] = report.z_threshold;
    j["interpolation_error"] = report.interpolation_error;
    j["strategies"] = nlohmann::ordered_json::array();
    for (const auto& e : report.entries) {
        nlohmann::ordered_json s;
        s["scale"] = e.scale;
        s["mean"] = e.utility.mean;
        s["std_error"] = e.utility.std_error;
        s["paired_delta"] = e.delta.mean;
        s["paired_std_error"] = e.delta.std_error;
        s["dominates_reference"] = e.dominates_reference;
        j["strategies"].push_back(s);
    }
    j["undominated"] = report.undominated;
    out << j.dump(2) << '\n';
}

}  // namespace bayesmerton
