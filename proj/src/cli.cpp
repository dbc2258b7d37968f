#include "epictl/cli.hpp"

#include "epictl/errors.hpp"
#include "epictl/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <set>

namespace epictl::cli {

namespace fs = std::filesystem;

namespace {

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object())
        throw ConfigError("config: '" + where + "' must be an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& item : obj.items())
        if (!keys.contains(item.key()))
            throw ConfigError("config: unknown field '" + (where.empty() ? "" : where + ".") + item.key() + "'");
}

template <class T>
void read(const json& obj, const char* key, T& target, const std::string& where)
{
    if (!obj.contains(key))
        return;
    try {
        obj.at(key).get_to(target);
    } catch (const json::exception&) {
        throw ConfigError("config: field '" + (where.empty() ? "" : where + ".") + key + "' has the wrong type");
    }
}

void require(bool ok, const std::string& field, const std::string& what)
{
    if (!ok)
        throw ConfigError("config: field '" + field + "' " + what);
}

DegreeDistribution parse_network(const json& j, const fs::path& base_dir)
{
    if (j.contains("file")) {
        reject_unknown(j, "network", {"file"});
        fs::path file = j.at("file").get<std::string>();
        if (file.is_relative())
            file = base_dir / file;
        if (!fs::exists(file))
            throw ConfigError("config: field 'network.file' refers to missing file '" + file.string() + "'");
        return load_degree_distribution(file.string());
    }
    if (j.contains("degrees")) {
        reject_unknown(j, "network", {"degrees", "probabilities"});
        return degree_distribution_from_json(j);
    }
    reject_unknown(j, "network", {"scale_free"});
    double exponent = kDefaultScaleFreeExponent;
    int k_min = kDefaultKMin;
    int k_max = kDefaultKMax;
    if (j.contains("scale_free")) {
        const auto& sf = j.at("scale_free");
        reject_unknown(sf, "network.scale_free", {"exponent", "k_min", "k_max"});
        read(sf, "exponent", exponent, "network.scale_free");
        read(sf, "k_min", k_min, "network.scale_free");
        read(sf, "k_max", k_max, "network.scale_free");
    }
    require(exponent > 1.0, "network.scale_free.exponent", "must be > 1");
    require(k_min >= 1 && k_min <= k_max, "network.scale_free.k_min", "must satisfy 1 <= k_min <= k_max");
    return make_scale_free(exponent, k_min, k_max);
}

void validate(const ExperimentConfig& cfg)
{
    for (std::size_t i = 0; i < 2; ++i) {
        const std::string idx = "[" + std::to_string(i) + "]";
        require(cfg.strains.zeta[i] > 0.0 && std::isfinite(cfg.strains.zeta[i]), "strains.zeta" + idx,
                "must be positive");
        require(cfg.strains.gamma[i] > 0.0 && std::isfinite(cfg.strains.gamma[i]), "strains.gamma" + idx,
                "must be positive");
    }
    require(cfg.control.u1 >= 0.0 && std::isfinite(cfg.control.u1), "control[0]", "must be nonnegative");
    require(cfg.control.u2 >= 0.0 && std::isfinite(cfg.control.u2), "control[1]", "must be nonnegative");
    require(cfg.cost.a1 >= 0.0, "cost.a1", "must be nonnegative");
    require(cfg.cost.a2 >= 0.0, "cost.a2", "must be nonnegative");
    require(cfg.cost.b >= 0.0, "cost.b", "must be nonnegative");

    const auto& sim = cfg.simulate;
    require(sim.t_end > 0.0, "simulate.t_end", "must be positive");
    require(sim.dt > 0.0 && sim.dt <= sim.t_end, "simulate.dt", "must satisfy 0 < dt <= t_end");
    require(sim.record_every >= 1, "simulate.record_every", "must be >= 1");
    require(sim.initial[0] >= 0.0 && sim.initial[1] >= 0.0 && sim.initial[0] + sim.initial[1] <= 1.0,
            "simulate.initial", "must be nonnegative with sum <= 1");
    require(sim.steady_tol > 0.0, "simulate.steady_tol", "must be positive");

    require(cfg.fixed_point.tol > 0.0, "fixed_point.tol", "must be positive");
    require(cfg.fixed_point.max_iter >= 1, "fixed_point.max_iter", "must be >= 1");
    require(cfg.stability.n_starts >= 1, "equilibrium.n_starts", "must be >= 1");
    require(cfg.stability.tolerance > 0.0, "equilibrium.tolerance", "must be positive");
    require(cfg.stability.oracle.max_time > 0.0, "equilibrium.max_time", "must be positive");

    const auto& opt = cfg.optimizer;
    require(opt.n_starts >= 0, "optimize.n_starts", "must be >= 0");
    require(opt.tol > 0.0, "optimize.tol", "must be positive");
    require(opt.max_iter >= 1, "optimize.max_iter", "must be >= 1");
    require(opt.epsilon >= 0.0, "optimize.epsilon", "must be nonnegative");
    require(opt.initial_step > 0.0, "optimize.initial_step", "must be positive");
    require(opt.armijo > 0.0 && opt.armijo < 1.0, "optimize.armijo", "must lie in (0, 1)");
    require(opt.box_margin > 0.0, "optimize.box_margin", "must be positive");
    require(opt.threads >= 1, "threads", "must be >= 1");

    const auto& sw = cfg.sweep;
    require(!sw.directions.empty(), "sweep.directions", "must not be empty");
    for (const auto& d : sw.directions)
        require(d[0] >= 0.0 && d[1] >= 0.0 && (d[0] > 0.0 || d[1] > 0.0), "sweep.directions",
                "entries must be nonnegative and nonzero");
    require(sw.max_effort > 0.0, "sweep.max_effort", "must be positive");
    require(sw.n_points >= 2, "sweep.n_points", "must be >= 2");
}

void write_json(const fs::path& path, const json& j)
{
    std::ofstream out(path);
    out << j.dump(2) << '\n';
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
}

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

} // namespace

ExperimentConfig parse_config(const json& doc, const fs::path& base_dir)
{
    reject_unknown(doc, "",
                   {"network", "strains", "control", "cost", "simulate", "fixed_point", "equilibrium", "optimize",
                    "sweep", "seed", "threads", "out"});
    ExperimentConfig cfg;
    if (doc.contains("network"))
        cfg.network = parse_network(doc.at("network"), base_dir);

    if (!doc.contains("strains"))
        throw ConfigError("config: missing required field 'strains'");
    const auto& strains = doc.at("strains");
    reject_unknown(strains, "strains", {"zeta", "gamma"});
    require(strains.contains("zeta") && strains.contains("gamma"), "strains", "needs both 'zeta' and 'gamma'");
    read(strains, "zeta", cfg.strains.zeta, "strains");
    read(strains, "gamma", cfg.strains.gamma, "strains");

    read(doc, "control", cfg.control, "");
    if (doc.contains("cost")) {
        reject_unknown(doc.at("cost"), "cost", {"a1", "a2", "b"});
        read(doc.at("cost"), "a1", cfg.cost.a1, "cost");
        read(doc.at("cost"), "a2", cfg.cost.a2, "cost");
        read(doc.at("cost"), "b", cfg.cost.b, "cost");
    }
    if (doc.contains("simulate")) {
        const auto& s = doc.at("simulate");
        reject_unknown(s, "simulate", {"t_end", "dt", "record_every", "initial", "steady_tol"});
        read(s, "t_end", cfg.simulate.t_end, "simulate");
        read(s, "dt", cfg.simulate.dt, "simulate");
        read(s, "record_every", cfg.simulate.record_every, "simulate");
        read(s, "initial", cfg.simulate.initial, "simulate");
        read(s, "steady_tol", cfg.simulate.steady_tol, "simulate");
    }
    if (doc.contains("fixed_point")) {
        const auto& s = doc.at("fixed_point");
        reject_unknown(s, "fixed_point", {"tol", "max_iter"});
        read(s, "tol", cfg.fixed_point.tol, "fixed_point");
        read(s, "max_iter", cfg.fixed_point.max_iter, "fixed_point");
    }
    if (doc.contains("equilibrium")) {
        const auto& s = doc.at("equilibrium");
        reject_unknown(s, "equilibrium", {"verify", "n_starts", "tolerance", "max_time"});
        read(s, "verify", cfg.verify, "equilibrium");
        read(s, "n_starts", cfg.stability.n_starts, "equilibrium");
        read(s, "tolerance", cfg.stability.tolerance, "equilibrium");
        read(s, "max_time", cfg.stability.oracle.max_time, "equilibrium");
    }
    if (doc.contains("optimize")) {
        const auto& s = doc.at("optimize");
        reject_unknown(s, "optimize",
                       {"n_starts", "tol", "max_iter", "epsilon", "initial_step", "armijo", "box_margin"});
        read(s, "n_starts", cfg.optimizer.n_starts, "optimize");
        read(s, "tol", cfg.optimizer.tol, "optimize");
        read(s, "max_iter", cfg.optimizer.max_iter, "optimize");
        read(s, "epsilon", cfg.optimizer.epsilon, "optimize");
        read(s, "initial_step", cfg.optimizer.initial_step, "optimize");
        read(s, "armijo", cfg.optimizer.armijo, "optimize");
        read(s, "box_margin", cfg.optimizer.box_margin, "optimize");
    }
    if (doc.contains("sweep")) {
        const auto& s = doc.at("sweep");
        reject_unknown(s, "sweep", {"directions", "max_effort", "n_points"});
        read(s, "directions", cfg.sweep.directions, "sweep");
        read(s, "max_effort", cfg.sweep.max_effort, "sweep");
        read(s, "n_points", cfg.sweep.n_points, "sweep");
    }
    read(doc, "seed", cfg.optimizer.seed, "");
    read(doc, "threads", cfg.optimizer.threads, "");
    std::string out_dir;
    read(doc, "out", out_dir, "");
    if (!out_dir.empty())
        cfg.out_dir = out_dir;

    cfg.stability.seed = cfg.optimizer.seed;
    cfg.stability.oracle.tol = cfg.simulate.steady_tol;
    cfg.optimizer.fixed_point = cfg.fixed_point;
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const fs::path& path, const FlagOverrides& flags)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("config: '" + path.string() + "' is not valid JSON: " + e.what());
    }
    ExperimentConfig cfg = parse_config(doc, path.parent_path());
    if (flags.out_dir)
        cfg.out_dir = *flags.out_dir;
    if (flags.seed) {
        cfg.optimizer.seed = *flags.seed;
        cfg.stability.seed = *flags.seed;
    }
    if (flags.threads) {
        require(*flags.threads >= 1, "--threads", "must be >= 1");
        cfg.optimizer.threads = *flags.threads;
    }
    if (flags.verify)
        cfg.verify = true;
    return cfg;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log)
{
    const auto& sim = cfg.simulate;
    const auto initial = NetworkState::uniform(cfg.network.size(), sim.initial[0], sim.initial[1]);
    const Trajectory traj =
        integrate(initial, cfg.network, cfg.strains, cfg.control, sim.t_end, sim.dt, sim.record_every);

    fs::create_directories(cfg.out_dir);
    {
        auto out = open_output(cfg.out_dir / "trajectory.csv");
        write_trajectory_csv(out, traj, cfg.network);
    }

    const NetworkState& final_state = traj.back().state;
    const double residual = sup_norm(rhs(final_state, cfg.network, cfg.strains, cfg.control));
    const EquilibriumReport predicted = classify(cfg.network, cfg.strains, cfg.control, cfg.fixed_point);
    std::string matched = "none";
    if (predicted.class_label != EquilibriumClass::Degenerate) {
        const NetworkState target = equilibrium_state(cfg.network, cfg.strains, cfg.control, predicted.theta_star);
        double distance = 0.0;
        for (std::size_t k = 0; k < target.i1.size(); ++k)
            distance = std::max({distance, std::abs(final_state.i1[k] - target.i1[k]),
                                 std::abs(final_state.i2[k] - target.i2[k])});
        if (distance <= cfg.stability.tolerance)
            matched = std::string(to_string(predicted.class_label));
    }

    const json summary{
        {"final_time", traj.back().time},
        {"prevalence",
         {prevalence(final_state, cfg.network, Strain::One), prevalence(final_state, cfg.network, Strain::Two)}},
        {"theta", {theta(final_state, cfg.network, Strain::One), theta(final_state, cfg.network, Strain::Two)}},
        {"rhs_sup_norm", residual},
        {"converged", residual < sim.steady_tol},
        {"predicted_class", predicted.class_label},
        {"matched_equilibrium", matched},
    };
    write_json(cfg.out_dir / "summary.json", summary);
    log << "simulate: t=" << traj.back().time << " Ibar=(" << summary["prevalence"][0] << ", "
        << summary["prevalence"][1] << ") matched=" << matched << '\n';
    return kSuccess;
}

int cmd_equilibrium(const ExperimentConfig& cfg, std::ostream& log)
{
    EquilibriumReport report = classify(cfg.network, cfg.strains, cfg.control, cfg.fixed_point);
    json j = report;
    if (cfg.verify) {
        const StabilityVerdict verdict = verify_stability(cfg.network, cfg.strains, cfg.control, report, cfg.stability);
        report.stable = verdict == StabilityVerdict::Stable;
        j = report;
        j["verification"] = std::string(to_string(verdict));
    }
    fs::create_directories(cfg.out_dir);
    write_json(cfg.out_dir / "equilibrium.json", j);
    log << j.dump() << '\n';
    return kSuccess;
}

int cmd_optimize(const ExperimentConfig& cfg, std::ostream& log)
{
    const GlobalSolution solution = optimize_global(cfg.network, cfg.strains, cfg.cost, cfg.optimizer);
    fs::create_directories(cfg.out_dir);
    write_json(cfg.out_dir / "solution.json", solution);
    {
        auto out = open_output(cfg.out_dir / "regimes.csv");
        write_regimes_csv(out, solution);
    }
    const auto& best = solution.best;
    log << "optimize: regime=" << to_string(best.regime) << " u=(" << format_number(best.control.u1) << ", "
        << format_number(best.control.u2) << ") objective=" << format_number(best.objective)
        << (best.converged ? "" : " [not converged]") << '\n';
    return solution.any_converged ? kSuccess : kSolverNonConvergence;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log)
{
    fs::create_directories(cfg.out_dir);
    json summary = json::array();
    for (std::size_t i = 0; i < cfg.sweep.directions.size(); ++i) {
        const SweepResult sweep = switching_sweep(cfg.network, cfg.strains, cfg.sweep.directions[i],
                                                  cfg.sweep.max_effort, cfg.sweep.n_points, cfg.fixed_point);
        const std::string csv_name = "sweep_" + std::to_string(i) + ".csv";
        {
            auto out = open_output(cfg.out_dir / csv_name);
            write_sweep_csv(out, sweep);
        }
        summary.push_back({{"direction", sweep.direction},
                           {"csv", csv_name},
                           {"n_transitions", sweep.transitions.size()},
                           {"transitions", sweep.transitions}});
        log << "sweep " << i << ": direction=(" << format_number(sweep.direction[0]) << ", "
            << format_number(sweep.direction[1]) << ") transitions=" << sweep.transitions.size();
        for (const auto& t : sweep.transitions)
            log << ' ' << to_string(t.from) << "->" << to_string(t.to) << '@' << format_number(t.effort_hi);
        log << '\n';
    }
    write_json(cfg.out_dir / "transitions.json", summary);
    return kSuccess;
}

int run_command(const std::string& command, const fs::path& config_path, const FlagOverrides& flags,
                std::ostream& log, std::ostream& err)
{
    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path, flags);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    }

    try {
        if (command == "simulate")
            return cmd_simulate(cfg, log);
        if (command == "equilibrium")
            return cmd_equilibrium(cfg, log);
        if (command == "optimize")
            return cmd_optimize(cfg, log);
        if (command == "sweep")
            return cmd_sweep(cfg, log);
        err << "error: unknown command '" << command << "'\n";
        return kValidationFailure;
    } catch (const IntegrationError& e) {
        err << "integration failure: " << e.what() << '\n';
        return kIntegrationFailure;
    } catch (const ConvergenceError& e) {
        err << "solver did not converge: " << e.what() << '\n';
        return kSolverNonConvergence;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    }
}

} // namespace epictl::cli
