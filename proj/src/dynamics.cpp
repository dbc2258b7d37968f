#include "epictl/dynamics.hpp"

#include "epictl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace epictl {

namespace {

constexpr double kClipTolerance = 1e-9;
constexpr double kInstabilityBound = 1e-6;

void validate_state(const NetworkState& state)
{
    for (std::size_t k = 0; k < state.i1.size(); ++k) {
        const double a = state.i1[k];
        const double b = state.i2[k];
        if (!(a >= 0.0) || !(b >= 0.0) || a + b > 1.0 + kClipTolerance)
            throw ParameterError("network state must satisfy I1 >= 0, I2 >= 0, I1 + I2 <= 1");
    }
}

// Stage-wise workspace for one RK4 step; reused across steps.
class Rk4Stepper {
public:
    Rk4Stepper(const DegreeDistribution& dist, const StrainParams& params, const ControlPair& control)
        : dist_(dist), params_(params), control_(control)
    {
        const auto n = dist.size();
        for (auto* s : {&k1_, &k2_, &k3_, &k4_, &tmp_}) {
            s->i1.assign(n, 0.0);
            s->i2.assign(n, 0.0);
        }
    }

    // k1 is the derivative at the current state; exposed for steady-state checks.
    const NetworkState& eval_start(const NetworkState& y)
    {
        eval(y, k1_);
        return k1_;
    }

    // Advances y by h; eval_start(y) must have been called first.
    void advance(NetworkState& y, double h)
    {
        axpy(y, 0.5 * h, k1_, tmp_);
        eval(tmp_, k2_);
        axpy(y, 0.5 * h, k2_, tmp_);
        eval(tmp_, k3_);
        axpy(y, h, k3_, tmp_);
        eval(tmp_, k4_);
        const double w = h / 6.0;
        for (std::size_t k = 0; k < y.i1.size(); ++k) {
            y.i1[k] += w * (k1_.i1[k] + 2.0 * k2_.i1[k] + 2.0 * k3_.i1[k] + k4_.i1[k]);
            y.i2[k] += w * (k1_.i2[k] + 2.0 * k2_.i2[k] + 2.0 * k3_.i2[k] + k4_.i2[k]);
        }
    }

private:
    static void axpy(const NetworkState& y, double a, const NetworkState& x, NetworkState& out)
    {
        for (std::size_t k = 0; k < y.i1.size(); ++k) {
            out.i1[k] = y.i1[k] + a * x.i1[k];
            out.i2[k] = y.i2[k] + a * x.i2[k];
        }
    }

    void eval(const NetworkState& y, NetworkState& out) const
    {
        const auto degrees = dist_.degrees();
        const double th1 = theta(y, dist_, Strain::One);
        const double th2 = theta(y, dist_, Strain::Two);
        const double r1 = params_.recovery(Strain::One) + control_.u1;
        const double r2 = params_.recovery(Strain::Two) + control_.u2;
        const double z1 = params_.spreading(Strain::One) * th1;
        const double z2 = params_.spreading(Strain::Two) * th2;
        for (std::size_t k = 0; k < degrees.size(); ++k) {
            const double susceptible_k = degrees[k] * (1.0 - y.i1[k] - y.i2[k]);
            out.i1[k] = -r1 * y.i1[k] + z1 * susceptible_k;
            out.i2[k] = -r2 * y.i2[k] + z2 * susceptible_k;
        }
    }

    const DegreeDistribution& dist_;
    const StrainParams& params_;
    const ControlPair& control_;
    NetworkState k1_, k2_, k3_, k4_, tmp_;
};

// Pulls a freshly stepped state back onto the simplex, refusing anything
// that is more than round-off away from it.
void clip_to_simplex(NetworkState& y, double time)
{
    double violation = 0.0;
    for (std::size_t k = 0; k < y.i1.size(); ++k) {
        if (!std::isfinite(y.i1[k]) || !std::isfinite(y.i2[k]))
            throw IntegrationError("non-finite density at t=" + std::to_string(time) + "; reduce dt");
        violation = std::max({violation, -y.i1[k], -y.i2[k], y.i1[k] + y.i2[k] - 1.0});
    }
    if (violation > kInstabilityBound)
        throw IntegrationError("step-size instability at t=" + std::to_string(time) + ": state left the simplex by " +
                               std::to_string(violation) + "; reduce dt");
    if (violation > kClipTolerance)
        throw IntegrationError("accuracy loss at t=" + std::to_string(time) + ": clip of " +
                               std::to_string(violation) + " exceeds 1e-9; reduce dt");
    if (violation <= 0.0)
        return;
    for (std::size_t k = 0; k < y.i1.size(); ++k) {
        y.i1[k] = std::max(y.i1[k], 0.0);
        y.i2[k] = std::max(y.i2[k], 0.0);
        const double total = y.i1[k] + y.i2[k];
        if (total > 1.0) {
            y.i1[k] /= total;
            y.i2[k] /= total;
        }
    }
}

} // namespace

void check_aligned(const NetworkState& state, const DegreeDistribution& dist)
{
    if (state.i1.size() != dist.size() || state.i2.size() != dist.size())
        throw DimensionError("network state has " + std::to_string(state.i1.size()) + "/" +
                             std::to_string(state.i2.size()) + " entries, distribution has " +
                             std::to_string(dist.size()) + " degree classes");
}

double theta(const NetworkState& state, const DegreeDistribution& dist, Strain strain)
{
    check_aligned(state, dist);
    const auto& density = state.density(strain);
    const auto degrees = dist.degrees();
    const auto probs = dist.probabilities();
    double sum = 0.0;
    for (std::size_t k = 0; k < degrees.size(); ++k)
        sum += degrees[k] * probs[k] * density[k];
    return sum / dist.mean_degree();
}

double prevalence(const NetworkState& state, const DegreeDistribution& dist, Strain strain)
{
    check_aligned(state, dist);
    const auto& density = state.density(strain);
    const auto probs = dist.probabilities();
    double sum = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k)
        sum += probs[k] * density[k];
    return sum;
}

NetworkState rhs(const NetworkState& state, const DegreeDistribution& dist, const StrainParams& params,
                 const ControlPair& control)
{
    check_aligned(state, dist);
    Rk4Stepper stepper(dist, params, control);
    return stepper.eval_start(state);
}

double sup_norm(const NetworkState& derivative)
{
    double m = 0.0;
    for (double v : derivative.i1)
        m = std::max(m, std::abs(v));
    for (double v : derivative.i2)
        m = std::max(m, std::abs(v));
    return m;
}

Trajectory integrate(const NetworkState& initial, const DegreeDistribution& dist, const StrainParams& params,
                     const ControlPair& control, double t_end, double dt, int record_every)
{
    check_aligned(initial, dist);
    validate_state(initial);
    params.validate();
    control.validate();
    if (!(t_end > 0.0) || !(dt > 0.0) || dt > t_end)
        throw ParameterError("integrate requires 0 < dt <= t_end");
    if (record_every < 1)
        throw ParameterError("record_every must be >= 1");

    const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    Trajectory out;
    out.reserve(static_cast<std::size_t>(steps / record_every + 2));
    out.push_back({0.0, initial});

    Rk4Stepper stepper(dist, params, control);
    NetworkState y = initial;
    double t = 0.0;
    for (long n = 1; n <= steps; ++n) {
        const double h = (n == steps) ? t_end - t : dt;
        stepper.eval_start(y);
        stepper.advance(y, h);
        t = (n == steps) ? t_end : static_cast<double>(n) * dt;
        clip_to_simplex(y, t);
        if (n % record_every == 0 || n == steps)
            out.push_back({t, y});
    }
    return out;
}

SteadyStateResult simulate_to_steady_state(const NetworkState& initial, const DegreeDistribution& dist,
                                           const StrainParams& params, const ControlPair& control,
                                           const SteadyStateOptions& opts)
{
    check_aligned(initial, dist);
    validate_state(initial);
    params.validate();
    control.validate();
    if (!(opts.tol > 0.0) || !(opts.dt > 0.0) || !(opts.max_time > 0.0))
        throw ParameterError("steady-state search requires positive tol, dt and max_time");

    Rk4Stepper stepper(dist, params, control);
    SteadyStateResult result{initial, 0.0, false};
    const auto max_steps = static_cast<long>(std::ceil(opts.max_time / opts.dt));
    for (long n = 0;; ++n) {
        if (sup_norm(stepper.eval_start(result.state)) < opts.tol) {
            result.converged = true;
            break;
        }
        if (n == max_steps)
            break;
        stepper.advance(result.state, opts.dt);
        result.time = static_cast<double>(n + 1) * opts.dt;
        clip_to_simplex(result.state, result.time);
    }
    return result;
}

} // namespace epictl
