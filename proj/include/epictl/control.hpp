#pragma once

#include "epictl/equilibrium.hpp"
#include "epictl/model.hpp"
#include "epictl/network.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace epictl {

/// Linear costs c1(u) = a1 u1 + a2 u2 and c2(x) = b x.
struct CostModel {
    double a1 = 0.0;
    double a2 = 0.0;
    double b = 0.0;

    double control_cost(const ControlPair& u) const noexcept { return a1 * u.u1 + a2 * u.u2; }
    double severity_cost(double total_prevalence) const noexcept { return b * total_prevalence; }
    double weight(Strain s) const noexcept { return s == Strain::One ? a1 : a2; }

    void validate() const;

    friend bool operator==(const CostModel&, const CostModel&) = default;
};

/// a1 u1 + a2 u2 <= rhs. `strict` marks constraints that come from an open
/// inequality and were tightened by the interior epsilon.
struct HalfPlane {
    double a1 = 0.0;
    double a2 = 0.0;
    double rhs = 0.0;
    bool strict = false;

    double slack(const ControlPair& u) const noexcept { return rhs - (a1 * u.u1 + a2 * u.u2); }
};

/**
 * Closed, epsilon-shrunk control set on which a given equilibrium class is
 * the stable one. Always includes u >= 0.
 */
class RegimeRegion {
public:
    RegimeRegion(EquilibriumClass regime, std::vector<HalfPlane> constraints, bool feasible);

    EquilibriumClass regime() const noexcept { return regime_; }
    bool feasible() const noexcept { return feasible_; }
    const std::vector<HalfPlane>& constraints() const noexcept { return constraints_; }

    bool contains(const ControlPair& u, double tol = 1e-12) const;
    /// True when some strict constraint is active at u.
    bool on_open_boundary(const ControlPair& u, double tol = 1e-10) const;

    /// Euclidean projection onto the region. Requires feasible().
    ControlPair project(const ControlPair& u) const;

    /// Corners of the region clipped to [0, box.u1] x [0, box.u2].
    std::vector<ControlPair> vertices(const ControlPair& box) const;

    /// Random point of the region inside the box. Requires feasible().
    ControlPair sample(std::mt19937_64& rng, const ControlPair& box) const;

private:
    EquilibriumClass regime_;
    std::vector<HalfPlane> constraints_;
    bool feasible_;
};

inline constexpr double kDefaultInteriorEpsilon = 1e-6;

/**
 * Control set of a regime.
 *
 * E1: u_i >= zeta_i <k^2>/<k> - gamma_i (+ epsilon when that bound is
 * positive). E2: u1 < zeta1 <k^2>/<k> - gamma1 and
 * u2 > zeta2 (gamma1 + u1)/zeta1 - gamma2, both tightened by epsilon. E3 is
 * E2 with the strains swapped. An empty region is returned with
 * feasible() == false.
 */
RegimeRegion regime_feasible_region(const DegreeDistribution& dist, const StrainParams& params,
                                    EquilibriumClass regime, double epsilon = kDefaultInteriorEpsilon);

/// Box that contains every regime's interesting part: u_i in [0, max(zeta_i <k^2>/<k> - gamma_i, 0) + margin].
ControlPair control_box(const DegreeDistribution& dist, const StrainParams& params, double margin = 1.0);

struct ObjectiveValue {
    double value = 0.0;
    EquilibriumReport report;
};

/// c1(u) + c2(Ibar1* + Ibar2*) at the stable equilibrium under u.
/// Throws EvaluationError at a Degenerate tie.
ObjectiveValue evaluate_objective(const DegreeDistribution& dist, const StrainParams& params,
                                  const ControlPair& control, const CostModel& cost,
                                  const FixedPointOptions& fp = {});

inline double objective(const DegreeDistribution& dist, const StrainParams& params, const ControlPair& control,
                        const CostModel& cost, const FixedPointOptions& fp = {})
{
    return evaluate_objective(dist, params, control, cost, fp).value;
}

/**
 * Gradient of the objective within a regime.
 *
 * For the surviving strain s: dJ/du_s = a_s + b (dIbar/dpsi)(dpsi/du_s),
 * with dTheta/dpsi = (df/dpsi) / (1 - df/dTheta) from implicit
 * differentiation of Theta = f(Theta; psi). The other component is its
 * linear weight. In E1 the gradient is (a1, a2).
 *
 * Throws IllConditionedGradient when 1 - df/dTheta vanishes.
 */
std::array<double, 2> gradient(const DegreeDistribution& dist, const StrainParams& params, const ControlPair& control,
                               const CostModel& cost, EquilibriumClass regime, const FixedPointOptions& fp = {});

struct OptimizerSettings {
    double epsilon = kDefaultInteriorEpsilon;
    double initial_step = 0.1;
    double armijo = 1e-4;
    double tol = 1e-9;
    long max_iter = 20'000;
    int n_starts = 8;
    std::uint64_t seed = 0;
    int threads = 1;
    double box_margin = 1.0;
    FixedPointOptions fixed_point{};
};

struct ControlSolution {
    ControlPair control;
    EquilibriumClass regime = EquilibriumClass::E1;
    double objective = 0.0;
    std::array<double, 2> theta_star{};
    std::array<double, 2> prevalence{};
    bool converged = false;
    long iterations = 0;
    bool on_open_boundary = false;

    friend bool operator==(const ControlSolution&, const ControlSolution&) = default;
};

/**
 * Projected gradient descent on one regime's closed epsilon-shrunk set.
 *
 * Each step moves along the negative gradient with backtracking (halving,
 * Armijo constant settings.armijo) and projects back. The inner fixed
 * point is re-solved at every trial control. Stops once the projected
 * gradient at step initial_step and the change in Theta* both fall below
 * settings.tol. Throws InfeasibleRegime for an empty region.
 */
ControlSolution optimize_regime(const DegreeDistribution& dist, const StrainParams& params, const CostModel& cost,
                                EquilibriumClass regime, const ControlPair& start,
                                const OptimizerSettings& settings = {});

struct RegimeOutcome {
    EquilibriumClass regime = EquilibriumClass::E1;
    bool feasible = false;
    std::optional<ControlSolution> best;
    std::string error; ///< first solver failure in this regime, if any

    friend bool operator==(const RegimeOutcome&, const RegimeOutcome&) = default;
};

struct GlobalSolution {
    ControlSolution best;
    std::vector<RegimeOutcome> regimes; ///< E1, E2, E3 in that order
    bool any_converged = false;

    friend bool operator==(const GlobalSolution&, const GlobalSolution&) = default;
};

/// Multi-start optimize_regime over every feasible regime; returns the
/// lowest objective. Starts are the region's box corners plus n_starts
/// seeded random feasible points, so results do not depend on threads.
GlobalSolution optimize_global(const DegreeDistribution& dist, const StrainParams& params, const CostModel& cost,
                               const OptimizerSettings& settings = {});

struct SweepPoint {
    double effort = 0.0;
    ControlPair control;
    EquilibriumReport report;

    friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

struct Transition {
    EquilibriumClass from = EquilibriumClass::E1;
    EquilibriumClass to = EquilibriumClass::E1;
    double effort_lo = 0.0; ///< last grid effort with the old label
    double effort_hi = 0.0; ///< first grid effort with the new label

    friend bool operator==(const Transition&, const Transition&) = default;
};

struct SweepResult {
    std::array<double, 2> direction{}; ///< normalized
    std::vector<SweepPoint> points;
    std::vector<Transition> transitions;

    friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

/// Classifies the equilibrium at u = effort * direction on a uniform grid of
/// n_points efforts in [0, max_effort]. The direction is normalized to unit
/// length. Degenerate points keep their label and never count as transitions.
SweepResult switching_sweep(const DegreeDistribution& dist, const StrainParams& params,
                            std::array<double, 2> direction, double max_effort, int n_points,
                            const FixedPointOptions& fp = {});

} // namespace epictl
