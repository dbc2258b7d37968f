#include "oracles.hpp"

#include "epictl/dynamics.hpp"
#include "epictl/errors.hpp"

#include <doctest.h>

#include <random>

using namespace epictl;

namespace {

const StrainParams kCaseOne{{0.2, 0.15}, {0.4, 0.4}};

} // namespace

TEST_CASE("theta aggregate")
{
    const DegreeDistribution d({2, 4}, {0.5, 0.5});
    CHECK(theta(NetworkState::uniform(2, 0.0, 0.0), d, Strain::One) == 0.0);
    CHECK(theta(NetworkState::uniform(2, 1.0, 0.0), d, Strain::One) == doctest::Approx(1.0).epsilon(1e-15));
    const NetworkState s{{0.5, 0.25}, {0.0, 0.0}};
    CHECK(theta(s, d, Strain::One) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(theta(NetworkState::uniform(3, 0.0, 0.0), d, Strain::One), DimensionError);
}

TEST_CASE("right-hand side")
{
    const auto d = make_scale_free();
    const StrainParams params{{0.3, 0.2}, {0.4, 0.5}};

    SUBCASE("disease-free state is a fixed point")
    {
        CHECK(sup_norm(rhs(NetworkState::uniform(d.size(), 0.0, 0.0), d, params, {})) == 0.0);
    }
    SUBCASE("absent strain has zero derivative")
    {
        const auto der = rhs(NetworkState::uniform(d.size(), 0.2, 0.0), d, params, {0.1, 0.3});
        for (double v : der.i2)
            CHECK(v == 0.0);
    }
    SUBCASE("single class hand arithmetic")
    {
        const DegreeDistribution k4({4}, {1.0});
        const StrainParams p{{0.2, 0.1}, {0.1, 0.1}};
        const auto der = rhs(NetworkState{{0.5}, {0.0}}, k4, p, {});
        CHECK(der.i1[0] == doctest::Approx(0.15).epsilon(1e-14));
        CHECK(der.i2[0] == 0.0);
    }
}

TEST_CASE("integrate")
{
    const auto d = make_scale_free();

    SUBCASE("zero stays zero")
    {
        const auto traj = integrate(NetworkState::uniform(d.size(), 0.0, 0.0), d, kCaseOne, {}, 10.0);
        CHECK(traj.size() == 201);
        CHECK(traj.back().time == 10.0);
        for (const auto& pt : traj)
            CHECK(sup_norm(pt.state) == 0.0);
    }
    SUBCASE("subcritical decay")
    {
        // T_i = zeta_i / gamma_i * 6.594 < 1
        const StrainParams sub{{0.05, 0.04}, {0.5, 0.4}};
        const auto traj = integrate(NetworkState::uniform(d.size(), 0.1, 0.1), d, sub, {}, 2000.0, 0.05, 1000);
        const auto& last = traj.back().state;
        CHECK(prevalence(last, d, Strain::One) + prevalence(last, d, Strain::Two) < 1e-4);
    }
    SUBCASE("lone supercritical strain approaches the fixed point")
    {
        // strain 2 absent; psi1 = 0.5 so Theta* comes from bisection
        const auto traj = integrate(NetworkState::uniform(d.size(), 0.1, 0.0), d, kCaseOne, {}, 500.0, 0.05, 10000);
        const auto s = oracle::support_of(d);
        const double predicted = oracle::prevalence_of(s, 0.5, oracle::bisect_theta(s, 0.5));
        CHECK(std::abs(predicted - 0.3923974698360859684) < 1e-12);
        CHECK(std::abs(prevalence(traj.back().state, d, Strain::One) - predicted) < 1e-4);
    }
    SUBCASE("simplex is preserved and the recording stride is honoured")
    {
        const StrainParams strong{{0.35, 0.3}, {0.1, 0.2}};
        const auto traj = integrate(NetworkState::uniform(d.size(), 0.45, 0.45), d, strong, {}, 50.0, 0.05, 7);
        CHECK(traj.size() == 1 + 1000 / 7 + 1);
        for (const auto& pt : traj)
            for (std::size_t k = 0; k < d.size(); ++k) {
                CHECK(pt.state.i1[k] >= 0.0);
                CHECK(pt.state.i2[k] >= 0.0);
                CHECK(pt.state.i1[k] + pt.state.i2[k] <= 1.0 + 1e-9);
            }
    }
    SUBCASE("coarse steps are rejected")
    {
        const StrainParams strong{{0.9, 0.9}, {0.1, 0.1}};
        CHECK_THROWS_AS(integrate(NetworkState::uniform(d.size(), 0.3, 0.3), d, strong, {}, 50.0, 1.0),
                        IntegrationError);
    }
    SUBCASE("argument checks")
    {
        const auto zero = NetworkState::uniform(d.size(), 0.0, 0.0);
        CHECK_THROWS_AS(integrate(zero, d, kCaseOne, {}, 1.0, 2.0), ParameterError);
        CHECK_THROWS_AS(integrate(zero, d, kCaseOne, {}, -1.0, 0.1), ParameterError);
        CHECK_THROWS_AS(integrate(NetworkState::uniform(d.size(), 0.6, 0.6), d, kCaseOne, {}, 1.0), ParameterError);
        CHECK_THROWS_AS(integrate(NetworkState::uniform(3, 0.0, 0.0), d, kCaseOne, {}, 1.0), DimensionError);
    }
}

TEST_CASE("steady state")
{
    const auto d = make_scale_free();

    SUBCASE("zero state converges immediately")
    {
        const auto r = simulate_to_steady_state(NetworkState::uniform(d.size(), 0.0, 0.0), d, kCaseOne, {});
        CHECK(r.converged);
        CHECK(r.time == 0.0);
    }
    SUBCASE("switching case one ends in strain-1 exclusivity")
    {
        const auto r = simulate_to_steady_state(NetworkState::uniform(d.size(), 0.1, 0.1), d, kCaseOne, {});
        CHECK(r.converged);
        CHECK(prevalence(r.state, d, Strain::Two) < 1e-6);
        CHECK(std::abs(prevalence(r.state, d, Strain::One) - 0.3923974698360859684) < 1e-4);
    }
    SUBCASE("symmetric strains stay symmetric")
    {
        const StrainParams sym{{0.2, 0.2}, {0.4, 0.4}};
        const auto traj = integrate(NetworkState::uniform(d.size(), 0.1, 0.1), d, sym, {}, 100.0, 0.05, 50);
        for (const auto& pt : traj)
            CHECK(pt.state.i1 == pt.state.i2);
    }
    SUBCASE("non-convergence is a flag")
    {
        const auto r = simulate_to_steady_state(NetworkState::uniform(d.size(), 0.1, 0.1), d, kCaseOne, {},
                                                {1e-10, 1.0, 0.05});
        CHECK_FALSE(r.converged);
        CHECK(r.time == doctest::Approx(1.0));
    }
}

TEST_CASE("absent strain stays exactly zero")
{
    const auto d = make_scale_free();
    const StrainParams p{{0.3, 0.9}, {0.4, 0.1}};
    const auto traj = integrate(NetworkState::uniform(d.size(), 0.2, 0.0), d, p, {0.05, 0.0}, 200.0, 0.05, 100);
    for (const auto& pt : traj)
        for (double v : pt.state.i2)
            REQUIRE(v == 0.0);
}

TEST_CASE("no coexistence on random supercritical draws")
{
    const auto d = make_scale_free();
    const double ratio = d.moment_ratio();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> gamma(0.2, 1.0);
    std::uniform_real_distribution<double> level(1.3, 4.0);
    int tested = 0;
    while (tested < 10) {
        StrainParams p;
        for (int i = 0; i < 2; ++i) {
            p.gamma[i] = gamma(rng);
            p.zeta[i] = level(rng) * p.gamma[i] / ratio;
        }
        const double t1 = p.zeta[0] / p.gamma[0] * ratio;
        const double t2 = p.zeta[1] / p.gamma[1] * ratio;
        if (std::abs(t1 - t2) < 0.3)
            continue;
        ++tested;
        const auto r = simulate_to_steady_state(NetworkState::uniform(d.size(), 0.1, 0.1), d, p, {});
        CHECK(r.converged);
        CHECK(std::min(prevalence(r.state, d, Strain::One), prevalence(r.state, d, Strain::Two)) < 1e-6);
    }
}

TEST_CASE("more control never raises steady prevalence")
{
    const auto d = make_scale_free();
    for (double zeta1 : {0.15, 0.3}) {
        const StrainParams p{{zeta1, 0.1}, {0.4, 0.5}};
        double previous = 1.0;
        for (double u1 = 0.0; u1 <= 2.0; u1 += 0.25) {
            const auto r = simulate_to_steady_state(NetworkState::uniform(d.size(), 0.1, 0.1), d, p, {u1, 0.0});
            const double ibar = prevalence(r.state, d, Strain::One);
            CHECK(ibar <= previous + 1e-9);
            previous = ibar;
        }
    }
}
