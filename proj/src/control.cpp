#include "epictl/control.hpp"

#include "epictl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace epictl {

void CostModel::validate() const
{
    for (auto [name, v] : {std::pair{"a1", a1}, std::pair{"a2", a2}, std::pair{"b", b}})
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ParameterError(std::string("cost weight ") + name + " must be nonnegative and finite");
}

// ---------------------------------------------------------------------------
// Regions

RegimeRegion::RegimeRegion(EquilibriumClass regime, std::vector<HalfPlane> constraints, bool feasible)
    : regime_(regime), constraints_(std::move(constraints)), feasible_(feasible)
{
}

bool RegimeRegion::contains(const ControlPair& u, double tol) const
{
    return std::all_of(constraints_.begin(), constraints_.end(), [&](const HalfPlane& h) {
        return h.slack(u) >= -tol * (1.0 + std::abs(h.rhs));
    });
}

bool RegimeRegion::on_open_boundary(const ControlPair& u, double tol) const
{
    return std::any_of(constraints_.begin(), constraints_.end(),
                       [&](const HalfPlane& h) { return h.strict && std::abs(h.slack(u)) <= tol * (1.0 + std::abs(h.rhs)); });
}

namespace {

double distance2(const ControlPair& a, const ControlPair& b)
{
    const double d1 = a.u1 - b.u1;
    const double d2 = a.u2 - b.u2;
    return d1 * d1 + d2 * d2;
}

std::optional<ControlPair> intersect(const HalfPlane& p, const HalfPlane& q)
{
    const double det = p.a1 * q.a2 - p.a2 * q.a1;
    if (std::abs(det) < 1e-14)
        return std::nullopt;
    return ControlPair{(p.rhs * q.a2 - p.a2 * q.rhs) / det, (p.a1 * q.rhs - p.rhs * q.a1) / det};
}

std::vector<ControlPair> polygon_vertices(const std::vector<HalfPlane>& planes, const RegimeRegion& check_region)
{
    std::vector<ControlPair> out;
    for (std::size_t i = 0; i < planes.size(); ++i)
        for (std::size_t j = i + 1; j < planes.size(); ++j) {
            auto v = intersect(planes[i], planes[j]);
            if (!v || !check_region.contains(*v, 1e-10))
                continue;
            const bool duplicate =
                std::any_of(out.begin(), out.end(), [&](const ControlPair& w) { return distance2(*v, w) < 1e-24; });
            if (!duplicate)
                out.push_back(*v);
        }
    return out;
}

} // namespace

ControlPair RegimeRegion::project(const ControlPair& u) const
{
    if (!feasible_)
        throw InfeasibleRegime(std::string("cannot project onto empty region of ") + std::string(to_string(regime_)));
    if (contains(u, 0.0))
        return u;

    // Projection onto a convex polygon lands on an edge or a vertex.
    std::optional<ControlPair> best;
    double best_d2 = std::numeric_limits<double>::infinity();
    auto consider = [&](const ControlPair& c) {
        if (!contains(c))
            return;
        const double d2 = distance2(u, c);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = c;
        }
    };
    for (const auto& h : constraints_) {
        const double n2 = h.a1 * h.a1 + h.a2 * h.a2;
        const double t = (h.a1 * u.u1 + h.a2 * u.u2 - h.rhs) / n2;
        consider({u.u1 - t * h.a1, u.u2 - t * h.a2});
    }
    for (std::size_t i = 0; i < constraints_.size(); ++i)
        for (std::size_t j = i + 1; j < constraints_.size(); ++j)
            if (auto v = intersect(constraints_[i], constraints_[j]))
                consider(*v);
    if (!best)
        throw InfeasibleRegime(std::string("projection failed for region of ") + std::string(to_string(regime_)));
    return *best;
}

std::vector<ControlPair> RegimeRegion::vertices(const ControlPair& box) const
{
    if (!feasible_)
        return {};
    auto planes = constraints_;
    planes.push_back({1.0, 0.0, box.u1, false});
    planes.push_back({0.0, 1.0, box.u2, false});
    const RegimeRegion boxed(regime_, planes, true);
    return polygon_vertices(planes, boxed);
}

ControlPair RegimeRegion::sample(std::mt19937_64& rng, const ControlPair& box) const
{
    const auto corners = vertices(box);
    if (corners.empty())
        throw InfeasibleRegime(std::string("no feasible point of ") + std::string(to_string(regime_)) + " inside the box");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& c : corners) {
        lo = std::min(lo, c.u1);
        hi = std::max(hi, c.u1);
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int attempt = 0; attempt < 64; ++attempt) {
        const double u1 = lo + (hi - lo) * unit(rng);
        double u2_lo = 0.0;
        double u2_hi = box.u2;
        bool ok = true;
        for (const auto& h : constraints_) {
            if (h.a2 > 0.0)
                u2_hi = std::min(u2_hi, (h.rhs - h.a1 * u1) / h.a2);
            else if (h.a2 < 0.0)
                u2_lo = std::max(u2_lo, (h.rhs - h.a1 * u1) / h.a2);
            else if (h.a1 * u1 > h.rhs)
                ok = false;
        }
        if (!ok || u2_lo > u2_hi)
            continue;
        const ControlPair p{u1, u2_lo + (u2_hi - u2_lo) * unit(rng)};
        if (contains(p))
            return p;
    }
    ControlPair centroid;
    for (const auto& c : corners) {
        centroid.u1 += c.u1 / static_cast<double>(corners.size());
        centroid.u2 += c.u2 / static_cast<double>(corners.size());
    }
    return centroid;
}

RegimeRegion regime_feasible_region(const DegreeDistribution& dist, const StrainParams& params,
                                    EquilibriumClass regime, double epsilon)
{
    params.validate();
    if (!(epsilon >= 0.0))
        throw ParameterError("interior epsilon must be nonnegative");
    const double ratio = dist.moment_ratio();

    std::vector<HalfPlane> planes{{-1.0, 0.0, 0.0, false}, {0.0, -1.0, 0.0, false}};
    switch (regime) {
    case EquilibriumClass::E1: {
        // T_i <= 1  <=>  u_i >= zeta_i <k^2>/<k> - gamma_i
        for (Strain s : {Strain::One, Strain::Two}) {
            const double bound = params.spreading(s) * ratio - params.recovery(s);
            if (bound > 0.0) {
                HalfPlane h{0.0, 0.0, -(bound + epsilon), false};
                (s == Strain::One ? h.a1 : h.a2) = -1.0;
                planes.push_back(h);
            }
        }
        return RegimeRegion(regime, std::move(planes), true);
    }
    case EquilibriumClass::E2:
    case EquilibriumClass::E3: {
        const Strain s = surviving_strain(regime);
        const Strain o = other(s);
        const double zs = params.spreading(s), gs = params.recovery(s);
        const double zo = params.spreading(o), go = params.recovery(o);
        // T_s > 1: u_s < zeta_s <k^2>/<k> - gamma_s
        const double upper = zs * ratio - gs - epsilon;
        HalfPlane cap{0.0, 0.0, upper, true};
        // T_s > T_o: u_o > zeta_o (gamma_s + u_s)/zeta_s - gamma_o, i.e. (zo/zs) u_s - u_o <= gamma_o - zo gs/zs - eps
        HalfPlane dominance{0.0, 0.0, go - zo * gs / zs - epsilon, true};
        if (s == Strain::One) {
            cap.a1 = 1.0;
            dominance.a1 = zo / zs;
            dominance.a2 = -1.0;
        } else {
            cap.a2 = 1.0;
            dominance.a2 = zo / zs;
            dominance.a1 = -1.0;
        }
        planes.push_back(cap);
        planes.push_back(dominance);
        return RegimeRegion(regime, std::move(planes), upper >= 0.0);
    }
    case EquilibriumClass::Degenerate:
        break;
    }
    throw ParameterError("no control region for the Degenerate class");
}

ControlPair control_box(const DegreeDistribution& dist, const StrainParams& params, double margin)
{
    const double ratio = dist.moment_ratio();
    return {std::max(params.zeta[0] * ratio - params.gamma[0], 0.0) + margin,
            std::max(params.zeta[1] * ratio - params.gamma[1], 0.0) + margin};
}

// ---------------------------------------------------------------------------
// Objective and gradient

ObjectiveValue evaluate_objective(const DegreeDistribution& dist, const StrainParams& params,
                                  const ControlPair& control, const CostModel& cost, const FixedPointOptions& fp)
{
    cost.validate();
    EquilibriumReport report = classify(dist, params, control, fp);
    if (report.class_label == EquilibriumClass::Degenerate)
        throw EvaluationError("objective undefined: T1 and T2 tie above 1 at u = (" + std::to_string(control.u1) +
                              ", " + std::to_string(control.u2) + ")");
    const double value =
        cost.control_cost(control) + cost.severity_cost(report.prevalence[0] + report.prevalence[1]);
    return {value, std::move(report)};
}

namespace {

struct RegimePoint {
    double value = 0.0;
    double theta = 0.0;      // Theta* of the surviving strain (0 in E1)
    double prevalence = 0.0; // Ibar* of the surviving strain
};

// Objective restricted to one regime: only the surviving strain's fixed point is solved.
RegimePoint regime_objective(const DegreeDistribution& dist, const StrainParams& params, const ControlPair& u,
                             const CostModel& cost, EquilibriumClass regime, const FixedPointOptions& fp)
{
    RegimePoint p;
    p.value = cost.control_cost(u);
    if (regime == EquilibriumClass::E1)
        return p;
    const double psi = effective_ratio(params, u, surviving_strain(regime));
    p.theta = solve_theta(dist, psi, fp);
    p.prevalence = steady_state_prevalence(dist, psi, p.theta);
    p.value += cost.severity_cost(p.prevalence);
    return p;
}

} // namespace

std::array<double, 2> gradient(const DegreeDistribution& dist, const StrainParams& params, const ControlPair& control,
                               const CostModel& cost, EquilibriumClass regime, const FixedPointOptions& fp)
{
    std::array<double, 2> g{cost.a1, cost.a2};
    if (regime == EquilibriumClass::E1 || cost.b == 0.0)
        return g;
    if (regime == EquilibriumClass::Degenerate)
        throw ParameterError("gradient undefined for the Degenerate class");

    const Strain s = surviving_strain(regime);
    const double psi = effective_ratio(params, control, s);
    const double theta = solve_theta(dist, psi, fp);
    if (theta == 0.0)
        return g;

    const auto degrees = dist.degrees();
    const auto probs = dist.probabilities();
    double df_dtheta = 0.0;
    double df_dpsi = 0.0;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        const double k = degrees[i];
        const double x = 1.0 + psi * k * theta;
        const double w = k * k * probs[i] / (x * x);
        df_dtheta += w;
        df_dpsi += w * theta;
    }
    df_dtheta *= psi / dist.mean_degree();
    df_dpsi /= dist.mean_degree();

    const double denom = 1.0 - df_dtheta;
    if (!(denom > 1e-12))
        throw IllConditionedGradient("1 - df/dTheta = " + std::to_string(denom) + " at the threshold");
    const double dtheta_dpsi = df_dpsi / denom;

    double dprev_dpsi = 0.0;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        const double k = degrees[i];
        const double x = 1.0 + psi * k * theta;
        dprev_dpsi += probs[i] * k * (theta + psi * dtheta_dpsi) / (x * x);
    }
    const double removal = params.recovery(s) + control[s];
    const double dpsi_du = -params.spreading(s) / (removal * removal);
    g[index_of(s)] += cost.b * dprev_dpsi * dpsi_du;
    return g;
}

// ---------------------------------------------------------------------------
// Optimizers

ControlSolution optimize_regime(const DegreeDistribution& dist, const StrainParams& params, const CostModel& cost,
                                EquilibriumClass regime, const ControlPair& start, const OptimizerSettings& settings)
{
    cost.validate();
    if (!(settings.initial_step > 0.0) || !(settings.tol > 0.0) || settings.max_iter < 1)
        throw ParameterError("optimizer needs positive initial_step, tol and max_iter");
    const RegimeRegion region = regime_feasible_region(dist, params, regime, settings.epsilon);
    if (!region.feasible())
        throw InfeasibleRegime(std::string("regime ") + std::string(to_string(regime)) +
                               " admits no nonnegative control");

    const auto& fp = settings.fixed_point;
    ControlPair u = region.project(start);
    RegimePoint current = regime_objective(dist, params, u, cost, regime, fp);
    double theta_change = std::numeric_limits<double>::infinity();

    ControlSolution sol;
    sol.regime = regime;
    // Accepted steps whose decrease is lost in round-off; enough of them in a row means
    // the objective cannot resolve further progress.
    int stalled = 0;
    constexpr int kMaxStalled = 20;
    long it = 0;
    for (; it < settings.max_iter; ++it) {
        const auto g = gradient(dist, params, u, cost, regime, fp);
        const double s0 = settings.initial_step;
        const ControlPair probe = region.project({u.u1 - s0 * g[0], u.u2 - s0 * g[1]});
        const double stationarity = std::sqrt(distance2(probe, u)) / s0;
        if (stationarity < settings.tol && theta_change < settings.tol) {
            sol.converged = true;
            break;
        }

        double step = s0;
        bool accepted = false;
        ControlPair candidate = u;
        RegimePoint next = current;
        for (; step > 1e-20; step *= 0.5) {
            candidate = region.project({u.u1 - step * g[0], u.u2 - step * g[1]});
            const double moved2 = distance2(candidate, u);
            if (moved2 == 0.0)
                break;
            next = regime_objective(dist, params, candidate, cost, regime, fp);
            if (next.value <= current.value - settings.armijo / step * moved2) {
                accepted = true;
                break;
            }
        }
        const bool negligible =
            accepted && current.value - next.value <= 1e-15 * std::max(1.0, std::abs(current.value));
        stalled = negligible ? stalled + 1 : 0;
        if (!accepted || stalled >= kMaxStalled) {
            // Stationary up to what the objective can resolve.
            sol.converged = stationarity < std::sqrt(settings.tol);
            if (accepted) {
                u = candidate;
                current = next;
            }
            break;
        }
        theta_change = std::abs(next.theta - current.theta);
        u = candidate;
        current = next;
    }

    sol.control = u;
    sol.iterations = it;
    sol.objective = current.value;
    if (regime != EquilibriumClass::E1) {
        const auto idx = index_of(surviving_strain(regime));
        sol.theta_star[idx] = current.theta;
        sol.prevalence[idx] = current.prevalence;
    }
    sol.on_open_boundary = region.on_open_boundary(u);
    return sol;
}

namespace {

template <class Fn>
void run_parallel(std::size_t n_jobs, int threads, Fn&& job)
{
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || n_jobs < 2) {
        for (std::size_t i = 0; i < n_jobs; ++i)
            job(i);
        return;
    }
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, n_jobs); ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n_jobs; i += workers)
                job(i);
        });
}

bool better(const ControlSolution& a, const ControlSolution& b)
{
    if (a.converged != b.converged)
        return a.converged;
    return a.objective < b.objective;
}

} // namespace

GlobalSolution optimize_global(const DegreeDistribution& dist, const StrainParams& params, const CostModel& cost,
                               const OptimizerSettings& settings)
{
    params.validate();
    cost.validate();
    if (settings.n_starts < 0)
        throw ParameterError("n_starts must be nonnegative");

    constexpr std::array kRegimes{EquilibriumClass::E1, EquilibriumClass::E2, EquilibriumClass::E3};
    const ControlPair box = control_box(dist, params, settings.box_margin);

    struct Job {
        std::size_t regime;
        ControlPair start;
    };
    std::vector<Job> jobs;
    GlobalSolution out;
    for (std::size_t r = 0; r < kRegimes.size(); ++r) {
        const RegimeRegion region = regime_feasible_region(dist, params, kRegimes[r], settings.epsilon);
        out.regimes.push_back({kRegimes[r], region.feasible(), std::nullopt, {}});
        if (!region.feasible())
            continue;
        for (const auto& v : region.vertices(box))
            jobs.push_back({r, v});
        std::seed_seq seq{static_cast<std::uint32_t>(settings.seed), static_cast<std::uint32_t>(settings.seed >> 32),
                          static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(seq);
        for (int i = 0; i < settings.n_starts; ++i)
            jobs.push_back({r, region.sample(rng, box)});
    }

    std::vector<std::optional<ControlSolution>> results(jobs.size());
    std::vector<std::string> errors(jobs.size());
    run_parallel(jobs.size(), settings.threads, [&](std::size_t i) {
        try {
            results[i] = optimize_regime(dist, params, cost, kRegimes[jobs[i].regime], jobs[i].start, settings);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto& outcome = out.regimes[jobs[i].regime];
        if (!results[i]) {
            if (outcome.error.empty())
                outcome.error = errors[i];
            continue;
        }
        if (!outcome.best || better(*results[i], *outcome.best))
            outcome.best = results[i];
    }

    bool have_best = false;
    for (const auto& outcome : out.regimes) {
        if (!outcome.best)
            continue;
        out.any_converged = out.any_converged || outcome.best->converged;
        if (!have_best || better(*outcome.best, out.best)) {
            out.best = *outcome.best;
            have_best = true;
        }
    }
    if (!have_best)
        throw ConvergenceError("every regime solve failed", std::numeric_limits<double>::quiet_NaN());
    return out;
}

// ---------------------------------------------------------------------------
// Sweep

SweepResult switching_sweep(const DegreeDistribution& dist, const StrainParams& params,
                            std::array<double, 2> direction, double max_effort, int n_points,
                            const FixedPointOptions& fp)
{
    params.validate();
    if (n_points < 2)
        throw ParameterError("sweep needs at least 2 points");
    if (!(max_effort > 0.0) || !std::isfinite(max_effort))
        throw ParameterError("sweep max_effort must be positive");
    if (!(direction[0] >= 0.0) || !(direction[1] >= 0.0) || (direction[0] == 0.0 && direction[1] == 0.0))
        throw ParameterError("sweep direction must be componentwise nonnegative and nonzero");
    const double norm = std::hypot(direction[0], direction[1]);
    direction = {direction[0] / norm, direction[1] / norm};

    SweepResult out;
    out.direction = direction;
    out.points.reserve(static_cast<std::size_t>(n_points));
    std::optional<SweepPoint> last_labeled;
    for (int j = 0; j < n_points; ++j) {
        const double effort = max_effort * static_cast<double>(j) / static_cast<double>(n_points - 1);
        const ControlPair u{effort * direction[0], effort * direction[1]};
        SweepPoint point{effort, u, classify(dist, params, u, fp)};
        if (point.report.class_label != EquilibriumClass::Degenerate) {
            if (last_labeled && last_labeled->report.class_label != point.report.class_label)
                out.transitions.push_back(
                    {last_labeled->report.class_label, point.report.class_label, last_labeled->effort, effort});
            last_labeled = point;
        }
        out.points.push_back(std::move(point));
    }
    return out;
}

} // namespace epictl
