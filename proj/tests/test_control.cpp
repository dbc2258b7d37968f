#include "oracles.hpp"

#include "epictl/control.hpp"
#include "epictl/errors.hpp"

#include <doctest.h>

#include <random>

using namespace epictl;

namespace {

const StrainParams kCaseOne{{0.2, 0.15}, {0.4, 0.4}};
const StrainParams kCaseTwo{{0.1, 0.15}, {0.1, 0.2}};
const CostModel kCost{15.0, 10.0, 50.0};

double rel_error(std::array<double, 2> a, std::array<double, 2> b)
{
    return std::hypot(a[0] - b[0], a[1] - b[1]) / std::max(std::hypot(b[0], b[1]), 1e-300);
}

std::array<double, 2> fd_gradient(const DegreeDistribution& d, const StrainParams& p, ControlPair u,
                                  const CostModel& c, double h)
{
    auto f1 = [&](double x) { return objective(d, p, {x, u.u2}, c); };
    auto f2 = [&](double x) { return objective(d, p, {u.u1, x}, c); };
    return {oracle::central_difference(f1, u.u1, h), oracle::central_difference(f2, u.u2, h)};
}

} // namespace

TEST_CASE("regime regions")
{
    const auto d = make_scale_free();
    const double ratio = d.moment_ratio();

    SUBCASE("E1 of a subcritical network contains the origin")
    {
        const StrainParams p{{0.1 / ratio, 0.2 / ratio}, {0.4, 0.4}};
        const auto region = regime_feasible_region(d, p, EquilibriumClass::E1);
        CHECK(region.feasible());
        CHECK(region.contains({0.0, 0.0}));
    }
    SUBCASE("E2 infeasible when the moment ratio is too small")
    {
        const DegreeDistribution small({1, 2}, {0.5, 0.5}); // <k^2>/<k> = 5/3 < 2
        const auto region = regime_feasible_region(small, kCaseOne, EquilibriumClass::E2);
        CHECK_FALSE(region.feasible());
        CHECK_THROWS_AS(optimize_regime(small, kCaseOne, kCost, EquilibriumClass::E2, {}), InfeasibleRegime);
    }
    SUBCASE("switching case one: origin lies in E2")
    {
        CHECK(regime_feasible_region(d, kCaseOne, EquilibriumClass::E2).contains({0.0, 0.0}));
        CHECK_FALSE(regime_feasible_region(d, kCaseOne, EquilibriumClass::E3).contains({0.0, 0.0}));
        CHECK_FALSE(regime_feasible_region(d, kCaseOne, EquilibriumClass::E1).contains({0.0, 0.0}));
    }
    SUBCASE("region membership agrees with classify")
    {
        std::mt19937_64 rng(5);
        const ControlPair box = control_box(d, kCaseTwo);
        std::uniform_real_distribution<double> u1(0.0, box.u1), u2(0.0, box.u2);
        for (int i = 0; i < 500; ++i) {
            const ControlPair u{u1(rng), u2(rng)};
            const auto label = classify(d, kCaseTwo, u).class_label;
            if (label == EquilibriumClass::Degenerate)
                continue;
            for (auto regime : {EquilibriumClass::E1, EquilibriumClass::E2, EquilibriumClass::E3}) {
                const auto region = regime_feasible_region(d, kCaseTwo, regime, 0.0);
                if (region.contains(u, 0.0) && label != regime)
                    FAIL_CHECK("u in region ", to_string(regime), " but classified ", to_string(label));
            }
        }
    }
    SUBCASE("projection lands in the region and is idempotent")
    {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> coord(-2.0, 4.0);
        for (auto regime : {EquilibriumClass::E1, EquilibriumClass::E2, EquilibriumClass::E3}) {
            const auto region = regime_feasible_region(d, kCaseTwo, regime);
            REQUIRE(region.feasible());
            for (int i = 0; i < 200; ++i) {
                const ControlPair u{coord(rng), coord(rng)};
                const ControlPair p = region.project(u);
                CHECK(region.contains(p));
                const ControlPair q = region.project(p);
                CHECK(q.u1 == doctest::Approx(p.u1));
                CHECK(q.u2 == doctest::Approx(p.u2));
                // no sampled feasible point is closer than the projection
                for (int j = 0; j < 5; ++j) {
                    const ControlPair s = region.sample(rng, control_box(d, kCaseTwo));
                    CHECK(std::hypot(s.u1 - u.u1, s.u2 - u.u2) >= std::hypot(p.u1 - u.u1, p.u2 - u.u2) - 1e-12);
                }
            }
        }
    }
}

TEST_CASE("objective")
{
    const auto d = make_scale_free();

    SUBCASE("E1 objective is pure control cost")
    {
        const ControlPair u{2.0, 2.0};
        REQUIRE(classify(d, kCaseOne, u).class_label == EquilibriumClass::E1);
        CHECK(objective(d, kCaseOne, u, kCost) == doctest::Approx(15.0 * 2.0 + 10.0 * 2.0).epsilon(1e-15));
    }
    SUBCASE("subcritical network costs nothing at zero control")
    {
        const StrainParams p{{0.01, 0.02}, {0.4, 0.4}};
        CHECK(objective(d, p, {}, kCost) == 0.0);
    }
    SUBCASE("switching case one at zero control")
    {
        const double j = objective(d, kCaseOne, {}, kCost);
        CHECK(std::abs(j - 50.0 * 0.3923974698360859684) < 1e-8);
        const auto steady = simulate_to_steady_state(NetworkState::uniform(d.size(), 0.1, 0.1), d, kCaseOne, {});
        const double simulated = 50.0 * (prevalence(steady.state, d, Strain::One) + prevalence(steady.state, d, Strain::Two));
        CHECK(std::abs(j - simulated) < 50.0 * 1e-4);
    }
    SUBCASE("tie is not evaluable")
    {
        CHECK_THROWS_AS(objective(d, {{0.2, 0.2}, {0.4, 0.4}}, {}, kCost), EvaluationError);
    }
}

TEST_CASE("gradient")
{
    const auto d = make_scale_free();

    SUBCASE("E1 and b = 0 give the linear weights")
    {
        auto g = gradient(d, kCaseOne, {3.0, 3.0}, kCost, EquilibriumClass::E1);
        CHECK(g == std::array<double, 2>{15.0, 10.0});
        g = gradient(d, kCaseOne, {0.1, 0.5}, {15.0, 10.0, 0.0}, EquilibriumClass::E2);
        CHECK(g == std::array<double, 2>{15.0, 10.0});
    }
    SUBCASE("matches finite differences at interior points")
    {
        std::mt19937_64 rng(21);
        for (auto regime : {EquilibriumClass::E2, EquilibriumClass::E3}) {
            const auto region = regime_feasible_region(d, kCaseTwo, regime, 1e-3);
            int checked = 0;
            while (checked < 20) {
                const ControlPair u = region.sample(rng, control_box(d, kCaseTwo));
                if (u.u1 < 1e-3 || u.u2 < 1e-3)
                    continue;
                ++checked;
                const auto g = gradient(d, kCaseTwo, u, kCost, regime);
                CHECK(rel_error(g, fd_gradient(d, kCaseTwo, u, kCost, 1e-6)) < 1e-4);
            }
        }
    }
}

TEST_CASE("regime optimizer")
{
    const auto d = make_scale_free();
    const double ratio = d.moment_ratio();

    SUBCASE("E1 optimum is the threshold corner")
    {
        const auto sol = optimize_regime(d, kCaseOne, kCost, EquilibriumClass::E1, {3.0, 0.5});
        CHECK(sol.converged);
        CHECK(std::abs(sol.control.u1 - (0.2 * ratio - 0.4 + 1e-6)) < 1e-9);
        CHECK(std::abs(sol.control.u2 - (0.15 * ratio - 0.4 + 1e-6)) < 1e-9);
        CHECK(sol.objective == doctest::Approx(kCost.control_cost(sol.control)));
        CHECK(classify(d, kCaseOne, sol.control).class_label == EquilibriumClass::E1);
    }
    SUBCASE("E2 without severity cost goes to the cheapest admissible control")
    {
        const auto sol =
            optimize_regime(d, kCaseOne, {15.0, 10.0, 0.0}, EquilibriumClass::E2, {0.5, 0.8});
        CHECK(sol.converged);
        CHECK(sol.control.u1 == doctest::Approx(0.0));
        CHECK(sol.control.u2 == doctest::Approx(0.0));
        CHECK(sol.objective == doctest::Approx(0.0));
    }
    SUBCASE("E2 result beats random feasible points")
    {
        const StrainParams p{{0.2, 0.2}, {0.5, 0.3}};
        const auto regime = classify(d, p, {}).class_label == EquilibriumClass::E3 ? EquilibriumClass::E3
                                                                                   : EquilibriumClass::E2;
        const auto region = regime_feasible_region(d, p, regime);
        std::mt19937_64 start_rng(1);
        const auto sol = optimize_regime(d, p, kCost, regime, region.sample(start_rng, control_box(d, p)));
        CHECK(sol.converged);
        CHECK(classify(d, p, sol.control).class_label == regime);
        std::mt19937_64 rng(2);
        for (int i = 0; i < 20; ++i) {
            const ControlPair u = region.sample(rng, control_box(d, p));
            CHECK(sol.objective <= objective(d, p, u, kCost) + 1e-9);
        }
    }
}

TEST_CASE("global optimizer")
{
    const auto d = make_scale_free();
    const auto s = oracle::support_of(d);

    SUBCASE("subcritical network: zero control")
    {
        const StrainParams p{{0.01, 0.02}, {0.4, 0.4}};
        const auto g = optimize_global(d, p, kCost);
        CHECK(g.best.control == ControlPair{0.0, 0.0});
        CHECK(g.best.objective == 0.0);
        CHECK(g.best.regime == EquilibriumClass::E1);
    }
    SUBCASE("no severity cost: zero control in the uncontrolled regime")
    {
        const auto g = optimize_global(d, kCaseOne, {15.0, 10.0, 0.0});
        CHECK(g.best.control.u1 == doctest::Approx(0.0));
        CHECK(g.best.control.u2 == doctest::Approx(0.0));
        CHECK(g.best.regime == EquilibriumClass::E2);
    }
    SUBCASE("matches the one-dimensional level oracle")
    {
        for (const StrainParams& p :
             {StrainParams{{0.2, 0.2}, {0.5, 0.3}}, StrainParams{{0.2, 0.2}, {0.5, 0.8}}, kCaseOne, kCaseTwo}) {
            for (const CostModel& c : {kCost, CostModel{1.0, 1.0, 50.0}, CostModel{15.0, 10.0, 5.0}}) {
                const auto g = optimize_global(d, p, c);
                const double reference = oracle::global_min_by_level(s, p, c.a1, c.a2, c.b);
                CHECK(g.best.objective == doctest::Approx(reference).epsilon(1e-6));
                CHECK(classify(d, p, g.best.control).class_label == g.best.regime);
                CHECK(std::abs(objective(d, p, g.best.control, c) - g.best.objective) < 1e-9);
            }
        }
    }
    SUBCASE("scaling all weights scales the objective and keeps the argmin")
    {
        const StrainParams p{{0.2, 0.2}, {0.5, 0.8}};
        const auto base = optimize_global(d, p, kCost);
        const auto scaled = optimize_global(d, p, {15.0 * 3.0, 10.0 * 3.0, 50.0 * 3.0});
        CHECK(scaled.best.objective == doctest::Approx(3.0 * base.best.objective).epsilon(1e-7));
        CHECK(std::abs(scaled.best.control.u1 - base.best.control.u1) < 1e-5);
        CHECK(std::abs(scaled.best.control.u2 - base.best.control.u2) < 1e-5);
    }
    SUBCASE("thread count does not change the result")
    {
        OptimizerSettings one, four;
        four.threads = 4;
        CHECK(optimize_global(d, kCaseTwo, kCost, one) == optimize_global(d, kCaseTwo, kCost, four));
    }
}

TEST_CASE("switching sweep")
{
    const auto d = make_scale_free();
    const double ratio = d.moment_ratio();

    SUBCASE("subcritical network never switches")
    {
        const StrainParams p{{0.01, 0.02}, {0.4, 0.4}};
        const auto sw = switching_sweep(d, p, {1.0, 1.0}, 2.0, 50);
        CHECK(sw.transitions.empty());
        for (const auto& pt : sw.points)
            CHECK(pt.report.class_label == EquilibriumClass::E1);
    }
    SUBCASE("case one along u1: strain 2 takes over")
    {
        const auto sw = switching_sweep(d, kCaseOne, {1.0, 0.0}, 2.0, 500);
        REQUIRE(sw.transitions.size() == 1);
        CHECK(sw.transitions[0].from == EquilibriumClass::E2);
        CHECK(sw.transitions[0].to == EquilibriumClass::E3);
        const auto c = oracle::crossings(kCaseOne, ratio, {1.0, 0.0});
        CHECK(sw.transitions[0].effort_lo <= c.tie);
        CHECK(sw.transitions[0].effort_hi >= c.tie);
    }
    SUBCASE("case two along the diagonal switches twice")
    {
        const auto sw = switching_sweep(d, kCaseTwo, {1.0, 1.0}, 2.0, 500);
        REQUIRE(sw.transitions.size() == 2);
        CHECK(sw.transitions[0].to == EquilibriumClass::E3);
        CHECK(sw.transitions[1].to == EquilibriumClass::E1);
        CHECK(sw.direction[0] == doctest::Approx(std::sqrt(0.5)));
    }
    SUBCASE("degenerate grid points are not transitions")
    {
        // tie exactly at effort 1 on a grid of step 0.5: zeta1 = zeta2, gamma1 = gamma2 + 1
        const StrainParams p{{0.3, 0.3}, {1.2, 0.2}};
        const auto sw = switching_sweep(d, p, {0.0, 1.0}, 2.0, 5);
        CHECK(sw.points[2].report.class_label == EquilibriumClass::Degenerate);
        REQUIRE(sw.transitions.size() == 1);
        CHECK(sw.transitions[0].effort_lo == 0.5);
        CHECK(sw.transitions[0].effort_hi == 1.5);
    }
    SUBCASE("argument checks")
    {
        CHECK_THROWS_AS(switching_sweep(d, kCaseOne, {0.0, 0.0}, 1.0, 10), ParameterError);
        CHECK_THROWS_AS(switching_sweep(d, kCaseOne, {-1.0, 1.0}, 1.0, 10), ParameterError);
        CHECK_THROWS_AS(switching_sweep(d, kCaseOne, {1.0, 0.0}, 1.0, 1), ParameterError);
    }
}
