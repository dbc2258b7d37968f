#pragma once

#include "epictl/dynamics.hpp"
#include "epictl/model.hpp"
#include "epictl/network.hpp"

#include <array>
#include <cstdint>
#include <string_view>

namespace epictl {

struct Thresholds {
    double t1 = 0.0;
    double t2 = 0.0;

    double operator[](Strain s) const noexcept { return s == Strain::One ? t1 : t2; }
};

/// T_i = psi_i <k^2>/<k>; strain i can only persist when T_i > 1.
Thresholds thresholds(const DegreeDistribution& dist, const StrainParams& params, const ControlPair& control);

/// Relative tolerance under which T1 and T2 count as tied.
inline constexpr double kTieTolerance = 1e-10;

struct EquilibriumReport {
    double t1 = 0.0;
    double t2 = 0.0;
    EquilibriumClass class_label = EquilibriumClass::E1;
    std::array<double, 2> theta_star{};
    std::array<double, 2> prevalence{};
    bool stable = false;

    friend bool operator==(const EquilibriumReport&, const EquilibriumReport&) = default;
};

struct FixedPointOptions {
    double tol = 1e-12;
    long max_iter = 1'000'000;
};

struct FixedPointResult {
    double theta = 0.0;
    double residual = 0.0; ///< |theta - f(theta)| at exit
    long iterations = 0;
};

/// f(theta) = (psi/<k>) sum_k k^2 P(k) theta / (1 + psi k theta).
double fixed_point_map(const DegreeDistribution& dist, double psi, double theta);

/**
 * Stationary edge-infection probability of a lone strain with ratio psi.
 *
 * Returns 0 when psi <k^2>/<k> <= 1. Otherwise iterates theta <- f(theta)
 * from theta = 1 until |theta - f(theta)| < tol and the concavity bound
 * on the distance to the root, |theta - f(theta)| / (1 - f'(theta)), is
 * also below tol. The sequence decreases monotonically onto the unique
 * positive root. When the observed
 * contraction factor exceeds 0.99 (close to the threshold) the iteration
 * switches to Newton steps on f(theta) - theta, which by concavity also
 * approach the root monotonically from above.
 *
 * Throws ConvergenceError (carrying the residual) after max_iter steps.
 */
FixedPointResult iterate_theta(const DegreeDistribution& dist, double psi, const FixedPointOptions& opts = {});

inline double solve_theta(const DegreeDistribution& dist, double psi, const FixedPointOptions& opts = {})
{
    return iterate_theta(dist, psi, opts).theta;
}

/// Ibar* = sum_k P(k) psi k theta / (1 + psi k theta).
double steady_state_prevalence(const DegreeDistribution& dist, double psi, double theta_star);

/// Per-degree stationary densities I_{i,k} = psi_i k Theta_i / (1 + psi_1 k Theta_1 + psi_2 k Theta_2).
NetworkState equilibrium_state(const DegreeDistribution& dist, const StrainParams& params,
                               const ControlPair& control, const std::array<double, 2>& theta_star);

/**
 * Stable equilibrium at the given control.
 *
 * E1 if T1 <= 1 and T2 <= 1; E2 if T1 > 1 and T1 > T2; E3 if T2 > 1 and
 * T2 > T1; Degenerate when T1 and T2 tie above 1. Theta and prevalence
 * are filled for the surviving strain only; a Degenerate report carries
 * zeros and stable = false.
 */
EquilibriumReport classify(const DegreeDistribution& dist, const StrainParams& params, const ControlPair& control,
                           const FixedPointOptions& opts = {});

enum class StabilityVerdict { Stable, Unstable, Inconclusive };

std::string_view to_string(StabilityVerdict v) noexcept;

struct StabilityCheckOptions {
    int n_starts = 5;
    std::uint64_t seed = 0;
    double tolerance = 1e-4; ///< sup-norm distance to the predicted per-degree equilibrium
    SteadyStateOptions oracle{};
};

/// Runs the ODE oracle from randomized interior initial states and checks that
/// every run settles on the report's equilibrium. Oracle non-convergence and
/// Degenerate reports give Inconclusive.
StabilityVerdict verify_stability(const DegreeDistribution& dist, const StrainParams& params,
                                  const ControlPair& control, const EquilibriumReport& report,
                                  const StabilityCheckOptions& opts = {});

} // namespace epictl
