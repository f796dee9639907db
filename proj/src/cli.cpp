#include "bayesmerton/cli.hpp"

#include "bayesmerton/asymptotics.hpp"
#include "bayesmerton/error.hpp"
#include "bayesmerton/filter.hpp"
#include "bayesmerton/io.hpp"
#include "bayesmerton/numeric.hpp"
#include "bayesmerton/simkit.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace bayesmerton::cli {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) config_error(where + " must be an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) config_error("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const json& obj, const char* key, T& dst, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        dst = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        config_error(where + "." + key + ": " + e.what());
    }
}

MarketModel make_model(const RunConfig& c) { return MarketModel::create(c.r, c.sigma, c.mus, c.prior); }

std::filesystem::path output_path(const RunConfig& c, const std::string& name) {
    std::filesystem::create_directories(c.out_dir);
    return std::filesystem::path(c.out_dir) / name;
}

std::ofstream open_output(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    return f;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        config_error(std::string("malformed JSON: ") + e.what());
    }
    check_keys(doc, "config", {"market", "alpha", "query", "quadrature", "sweep", "sim", "filter", "optcheck", "out_dir"});
    if (!doc.contains("market")) config_error("missing 'market' section");

    RunConfig c;
    const json& market = doc.at("market");
    check_keys(market, "market", {"r", "sigma", "mus", "prior"});
    for (const char* key : {"r", "sigma", "mus", "prior"})
        if (!market.contains(key)) config_error(std::string("missing market.") + key);
    read(market, "r", c.r, "market");
    read(market, "sigma", c.sigma, "market");
    read(market, "mus", c.mus, "market");
    read(market, "prior", c.prior, "market");
    read(doc, "alpha", c.alpha, "config");
    read(doc, "out_dir", c.out_dir, "config");

    if (doc.contains("query")) {
        const json& q = doc.at("query");
        check_keys(q, "query", {"t", "T", "y"});
        read(q, "t", c.t, "query");
        read(q, "T", c.T, "query");
        read(q, "y", c.y, "query");
    }
    if (doc.contains("quadrature")) {
        const json& q = doc.at("quadrature");
        check_keys(q, "quadrature", {"nodes", "max_nodes", "half_width", "rel_tol"});
        read(q, "nodes", c.quad.nodes, "quadrature");
        read(q, "max_nodes", c.quad.max_nodes, "quadrature");
        read(q, "half_width", c.quad.half_width, "quadrature");
        read(q, "rel_tol", c.quad.rel_tol, "quadrature");
    }
    if (doc.contains("sweep")) {
        const json& s = doc.at("sweep");
        check_keys(s, "sweep", {"horizons"});
        read(s, "horizons", c.horizons, "sweep");
    }
    if (doc.contains("sim")) {
        const json& s = doc.at("sim");
        check_keys(s, "sim", {"step", "n_paths", "seed"});
        read(s, "step", c.sim_step, "sim");
        read(s, "n_paths", c.n_paths, "sim");
        read(s, "seed", c.seed, "sim");
    }
    if (doc.contains("filter")) {
        const json& f = doc.at("filter");
        check_keys(f, "filter", {"horizon", "step", "theta_index"});
        read(f, "horizon", c.filter_horizon, "filter");
        read(f, "step", c.filter_step, "filter");
        read(f, "theta_index", c.theta_index, "filter");
    }
    if (doc.contains("optcheck")) {
        const json& o = doc.at("optcheck");
        check_keys(o, "optcheck", {"perturbations", "reference_scale"});
        read(o, "perturbations", c.perturbations, "optcheck");
        read(o, "reference_scale", c.reference_scale, "optcheck");
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) config_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

RunConfig resolve(RunConfig c, const Overrides& o) {
    if (o.alpha) c.alpha = *o.alpha;
    if (o.t) c.t = *o.t;
    if (o.T) c.T = *o.T;
    if (o.y) c.y = *o.y;
    if (o.step) c.sim_step = *o.step;
    if (o.rel_tol) c.quad.rel_tol = *o.rel_tol;
    if (o.n_paths) c.n_paths = *o.n_paths;
    if (o.nodes) c.quad.nodes = *o.nodes;
    if (o.seed) c.seed = *o.seed;
    if (o.out_dir) c.out_dir = *o.out_dir;

    if (c.horizons.empty()) c.horizons = geometric_horizons(10);
    if (c.sim_step == 0.0) c.sim_step = 1e-3 * c.T;

    const MarketModel model = make_model(c);
    UtilitySpec::create(c.alpha);
    StrategyQuery{c.t, c.T, c.y}.validate();
    try {
        c.quad.validate();
    } catch (const Error& e) {
        config_error(e.what());
    }
    if (!(c.sim_step > 0.0)) config_error("sim.step must be > 0");
    if (c.n_paths < 1) config_error("sim.n_paths must be >= 1");
    if (!(c.filter_horizon > 0.0) || !(c.filter_step > 0.0)) config_error("filter horizon and step must be > 0");
    if (c.theta_index >= model.size()) config_error("filter.theta_index out of range");
    if (!(c.reference_scale != 0.0)) config_error("optcheck.reference_scale must be non-zero");
    return c;
}

std::string to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["market"] = {{"r", c.r}, {"sigma", c.sigma}, {"mus", c.mus}, {"prior", c.prior}};
    j["alpha"] = c.alpha;
    j["query"] = {{"t", c.t}, {"T", c.T}, {"y", c.y}};
    j["quadrature"] = {{"nodes", c.quad.nodes},
                       {"max_nodes", c.quad.max_nodes},
                       {"half_width", c.quad.half_width},
                       {"rel_tol", c.quad.rel_tol}};
    j["sweep"] = {{"horizons", c.horizons}};
    j["sim"] = {{"step", c.sim_step}, {"n_paths", c.n_paths}, {"seed", c.seed}};
    j["filter"] = {{"horizon", c.filter_horizon}, {"step", c.filter_step}, {"theta_index", c.theta_index}};
    j["optcheck"] = {{"perturbations", c.perturbations}, {"reference_scale", c.reference_scale}};
    j["out_dir"] = c.out_dir;
    return j.dump(2);
}

int cmd_eval(const RunConfig& c, std::ostream& out) {
    const MarketModel model = make_model(c);
    const StrategyValue v = strategy_value(model, UtilitySpec::create(c.alpha), {c.t, c.T, c.y}, c.quad);
    auto line = [&](const std::string& name, double value) {
        out << name << " = " << format_significant(value, 12) << '\n';
    };
    line("u_star", v.u_star);
    line("v_star", v.v_star);
    for (std::size_t k = 0; k < v.f.size(); ++k) line("f_" + std::to_string(k + 1), v.f[k]);
    line("myopic", v.myopic);
    line("hedging", v.hedging);
    return kExitOk;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
    const MarketModel model = make_model(c);
    const SweepResult sweep = horizon_sweep(model, c.alpha, c.t, c.y, c.horizons, c.quad);
    {
        auto f = open_output(output_path(c, "sweep.csv"));
        write_sweep_csv(f, sweep);
    }
    {
        auto f = open_output(output_path(c, "sweep.svg"));
        write_sweep_svg(f, sweep,
                        "u*(" + format_significant(c.t, 6) + ", T, " + format_significant(c.y, 6) +
                            "), alpha = " + format_significant(c.alpha, 6));
    }
    out << "limit = " << format_significant(sweep.limit, 12) << '\n';
    out << "rows = " << sweep.horizons.size() << ", succeeded = " << sweep.succeeded() << '\n';
    if (sweep.first_within)
        out << "first T within " << format_significant(100.0 * sweep.threshold, 3)
            << "% of limit = " << format_shortest(sweep.horizons[*sweep.first_within]) << '\n';
    else
        out << "no horizon within " << format_significant(100.0 * sweep.threshold, 3) << "% of limit\n";
    return sweep.succeeded() > 0 ? kExitOk : kExitNumerical;
}

int cmd_filter_demo(const RunConfig& c, std::ostream& out) {
    const MarketModel model = make_model(c);
    const FilterTrajectory traj = simulate_filter_sde(model, c.theta_index, c.filter_horizon, c.filter_step, c.seed);
    {
        auto f = open_output(output_path(c, "filter_euler.csv"));
        write_trajectory_csv(f, model, traj.times, traj.y, traj.posteriors);
    }
    {
        auto f = open_output(output_path(c, "filter_closed.csv"));
        write_trajectory_csv(f, model, traj.times, traj.y, closed_form_along(model, traj));
    }
    out << "max_discrepancy = " << format_significant(max_filter_discrepancy(model, traj), 12) << '\n';
    return kExitOk;
}

int cmd_optcheck(const RunConfig& c, std::ostream& out) {
    const MarketModel model = make_model(c);
    OptimalityOptions opts;
    opts.reference_scale = c.reference_scale;
    const OptimalityReport report =
        optimality_check(model, c.alpha, c.T, c.perturbations, c.sim_step, c.n_paths, c.seed, opts);
    {
        auto f = open_output(output_path(c, "optcheck.json"));
        write_optimality_json(f, report);
    }
    for (const auto& e : report.entries) {
        out << "c = " << format_shortest(e.scale) << ": mean = " << format_significant(e.utility.mean, 12)
            << ", std_error = " << format_significant(e.utility.std_error, 6);
        if (e.scale != 1.0 || &e != &report.entries.front())
            out << ", delta = " << format_significant(e.delta.mean, 6) << " +- "
                << format_significant(e.delta.std_error, 6) << (e.dominates_reference ? " DOMINATES" : "");
        out << '\n';
    }
    out << "undominated = " << (report.undominated ? "true" : "false") << '\n';
    return report.undominated ? kExitOk : kExitDominated;
}

int run_command(Command command, const RunConfig& config, std::ostream& out, std::ostream& err) {
    auto report = [&err](std::string_view name, const std::string& message) {
        err << nlohmann::json{{"error", name}, {"message", message}}.dump() << '\n';
    };
    try {
        switch (command) {
        case Command::Eval: return cmd_eval(config, out);
        case Command::Sweep: return cmd_sweep(config, out);
        case Command::FilterDemo: return cmd_filter_demo(config, out);
        case Command::OptCheck: return cmd_optcheck(config, out);
        }
    } catch (const Error& e) {
        report(e.name(), e.what());
        return is_numerical(e.code()) ? kExitNumerical : kExitConfig;
    } catch (const std::exception& e) {
        report("IoError", e.what());
        return kExitConfig;
    }
    return kExitConfig;
}

}  // namespace bayesmerton::cli
