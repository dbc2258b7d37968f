#include "epictl/equilibrium.hpp"

#include "epictl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace epictl {

Thresholds thresholds(const DegreeDistribution& dist, const StrainParams& params, const ControlPair& control)
{
    const double ratio = dist.moment_ratio();
    return {effective_ratio(params, control, Strain::One) * ratio, effective_ratio(params, control, Strain::Two) * ratio};
}

double fixed_point_map(const DegreeDistribution& dist, double psi, double theta)
{
    const auto degrees = dist.degrees();
    const auto probs = dist.probabilities();
    double sum = 0.0;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        const double k = degrees[i];
        sum += k * k * probs[i] * theta / (1.0 + psi * k * theta);
    }
    return psi * sum / dist.mean_degree();
}

namespace {

// d f / d theta at theta.
double map_slope(const DegreeDistribution& dist, double psi, double theta)
{
    const auto degrees = dist.degrees();
    const auto probs = dist.probabilities();
    double sum = 0.0;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        const double k = degrees[i];
        const double x = 1.0 + psi * k * theta;
        sum += k * k * probs[i] / (x * x);
    }
    return psi * sum / dist.mean_degree();
}

constexpr double kSlowContraction = 0.99;

} // namespace

FixedPointResult iterate_theta(const DegreeDistribution& dist, double psi, const FixedPointOptions& opts)
{
    if (!(opts.tol > 0.0))
        throw ParameterError("fixed-point tolerance must be positive");
    if (!(psi > 0.0) || !std::isfinite(psi))
        throw ParameterError("psi must be positive and finite");
    if (psi * dist.moment_ratio() <= 1.0)
        return {0.0, 0.0, 0};

    double theta = 1.0;
    double image = fixed_point_map(dist, psi, theta);
    double last_step = std::numeric_limits<double>::infinity();
    bool newton = false;
    for (long it = 0; it < opts.max_iter; ++it) {
        const double residual = std::abs(theta - image);
        double slope = std::numeric_limits<double>::quiet_NaN();
        if (residual < opts.tol) {
            // Concavity bounds the distance to the root by residual / (1 - f'(theta)).
            slope = map_slope(dist, psi, theta);
            if (residual < opts.tol * (1.0 - slope))
                return {theta, residual, it};
            newton = true;
        }

        double next = image;
        if (newton) {
            if (std::isnan(slope))
                slope = map_slope(dist, psi, theta);
            const double candidate = theta - (image - theta) / (slope - 1.0);
            // Newton stays above the root; fall back to the plain map if round-off says otherwise.
            if (candidate > 0.0 && candidate < theta)
                next = candidate;
            else if (residual < opts.tol)
                return {theta, residual, it};
        }
        const double step = theta - next;
        if (!newton && step > kSlowContraction * last_step)
            newton = true;
        last_step = step;
        theta = next;
        image = fixed_point_map(dist, psi, theta);
    }
    throw ConvergenceError("fixed-point iteration for theta hit max_iter", std::abs(theta - image));
}

double steady_state_prevalence(const DegreeDistribution& dist, double psi, double theta_star)
{
    const auto degrees = dist.degrees();
    const auto probs = dist.probabilities();
    double sum = 0.0;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        const double x = psi * degrees[i] * theta_star;
        sum += probs[i] * x / (1.0 + x);
    }
    return sum;
}

NetworkState equilibrium_state(const DegreeDistribution& dist, const StrainParams& params,
                               const ControlPair& control, const std::array<double, 2>& theta_star)
{
    const double psi1 = effective_ratio(params, control, Strain::One);
    const double psi2 = effective_ratio(params, control, Strain::Two);
    const auto degrees = dist.degrees();
    NetworkState state = NetworkState::uniform(dist.size(), 0.0, 0.0);
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        const double x1 = psi1 * degrees[i] * theta_star[0];
        const double x2 = psi2 * degrees[i] * theta_star[1];
        state.i1[i] = x1 / (1.0 + x1 + x2);
        state.i2[i] = x2 / (1.0 + x1 + x2);
    }
    return state;
}

EquilibriumReport classify(const DegreeDistribution& dist, const StrainParams& params, const ControlPair& control,
                           const FixedPointOptions& opts)
{
    params.validate();
    control.validate();
    const Thresholds t = thresholds(dist, params, control);
    EquilibriumReport report;
    report.t1 = t.t1;
    report.t2 = t.t2;

    if (t.t1 <= 1.0 && t.t2 <= 1.0) {
        report.class_label = EquilibriumClass::E1;
        report.stable = true;
        return report;
    }
    if (std::abs(t.t1 - t.t2) <= kTieTolerance * std::max(t.t1, t.t2)) {
        report.class_label = EquilibriumClass::Degenerate;
        report.stable = false;
        return report;
    }

    report.class_label = t.t1 > t.t2 ? EquilibriumClass::E2 : EquilibriumClass::E3;
    const Strain s = surviving_strain(report.class_label);
    const double psi = effective_ratio(params, control, s);
    const double th = solve_theta(dist, psi, opts);
    report.theta_star[index_of(s)] = th;
    report.prevalence[index_of(s)] = steady_state_prevalence(dist, psi, th);
    report.stable = true;
    return report;
}

std::string_view to_string(StabilityVerdict v) noexcept
{
    switch (v) {
    case StabilityVerdict::Stable: return "stable";
    case StabilityVerdict::Unstable: return "unstable";
    case StabilityVerdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

StabilityVerdict verify_stability(const DegreeDistribution& dist, const StrainParams& params,
                                  const ControlPair& control, const EquilibriumReport& report,
                                  const StabilityCheckOptions& opts)
{
    if (report.class_label == EquilibriumClass::Degenerate)
        return StabilityVerdict::Inconclusive;
    if (opts.n_starts < 1)
        throw ParameterError("stability check needs at least one initial state");

    const NetworkState target = equilibrium_state(dist, params, control, report.theta_star);
    std::mt19937_64 rng(opts.seed);
    // Each strain gets at most half of every degree class, so I1 + I2 < 1 stays interior.
    std::uniform_real_distribution<double> draw(0.01, 0.49);

    bool all_match = true;
    for (int run = 0; run < opts.n_starts; ++run) {
        NetworkState initial = NetworkState::uniform(dist.size(), 0.0, 0.0);
        for (std::size_t k = 0; k < dist.size(); ++k) {
            initial.i1[k] = draw(rng);
            initial.i2[k] = draw(rng);
        }
        const SteadyStateResult result = simulate_to_steady_state(initial, dist, params, control, opts.oracle);
        if (!result.converged)
            return StabilityVerdict::Inconclusive;
        double distance = 0.0;
        for (std::size_t k = 0; k < dist.size(); ++k) {
            distance = std::max(distance, std::abs(result.state.i1[k] - target.i1[k]));
            distance = std::max(distance, std::abs(result.state.i2[k] - target.i2[k]));
        }
        if (distance > opts.tolerance)
            all_match = false;
    }
    return all_match ? StabilityVerdict::Stable : StabilityVerdict::Unstable;
}

} // namespace epictl
