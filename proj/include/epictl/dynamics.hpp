#pragma once

#include "epictl/model.hpp"
#include "epictl/network.hpp"

#include <vector>

namespace epictl {

/// Degree-indexed infection densities I_{1,k}, I_{2,k}, aligned with DegreeDistribution::degrees().
struct NetworkState {
    std::vector<double> i1;
    std::vector<double> i2;

    /// Same value v in every degree class for both strains.
    static NetworkState uniform(std::size_t n, double v1, double v2)
    {
        return {std::vector<double>(n, v1), std::vector<double>(n, v2)};
    }

    const std::vector<double>& density(Strain s) const noexcept { return s == Strain::One ? i1 : i2; }
    std::vector<double>& density(Strain s) noexcept { return s == Strain::One ? i1 : i2; }

    friend bool operator==(const NetworkState&, const NetworkState&) = default;
};

/// Throws DimensionError if the state does not line up with dist.
void check_aligned(const NetworkState& state, const DegreeDistribution& dist);

/// Edge-weighted infection aggregate Theta_i = sum_k k P(k) I_{i,k} / <k>.
double theta(const NetworkState& state, const DegreeDistribution& dist, Strain strain);

/// Node prevalence Ibar_i = sum_k P(k) I_{i,k}.
double prevalence(const NetworkState& state, const DegreeDistribution& dist, Strain strain);

/// Right-hand side of the controlled two-strain mean-field system.
NetworkState rhs(const NetworkState& state, const DegreeDistribution& dist, const StrainParams& params,
                 const ControlPair& control);

/// Largest |dI/dt| over all degree classes and both strains.
double sup_norm(const NetworkState& derivative);

struct TrajectoryPoint {
    double time = 0.0;
    NetworkState state;
};

using Trajectory = std::vector<TrajectoryPoint>;

inline constexpr double kDefaultTimeStep = 0.05;

/**
 * Fixed-step classical RK4 from t = 0 to t_end.
 *
 * The initial state and every `record_every`-th step (plus the final one)
 * are recorded. After each step the state is clipped back onto
 * {I >= 0, I1 + I2 <= 1}; a clip larger than 1e-9 raises IntegrationError,
 * and so does any excursion beyond [-1e-6, 1 + 1e-6] (step too coarse).
 */
Trajectory integrate(const NetworkState& initial, const DegreeDistribution& dist, const StrainParams& params,
                     const ControlPair& control, double t_end, double dt = kDefaultTimeStep, int record_every = 1);

struct SteadyStateOptions {
    double tol = 1e-10;       ///< sup-norm of the right-hand side
    double max_time = 2.0e4;
    double dt = kDefaultTimeStep;
};

struct SteadyStateResult {
    NetworkState state;
    double time = 0.0;
    bool converged = false;
};

/// Integrates until the rhs sup-norm drops below opts.tol or opts.max_time is reached.
/// Non-convergence is reported through the flag, not thrown.
SteadyStateResult simulate_to_steady_state(const NetworkState& initial, const DegreeDistribution& dist,
                                           const StrainParams& params, const ControlPair& control,
                                           const SteadyStateOptions& opts = {});

} // namespace epictl
