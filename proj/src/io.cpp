#include "epictl/io.hpp"

#include "epictl/errors.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <ostream>

namespace epictl {

void to_json(json& j, const DegreeDistribution& d)
{
    j = json{{"degrees", std::vector<int>(d.degrees().begin(), d.degrees().end())},
             {"probabilities", std::vector<double>(d.probabilities().begin(), d.probabilities().end())}};
}

DegreeDistribution degree_distribution_from_json(const json& j)
{
    try {
        return DegreeDistribution(j.at("degrees").get<std::vector<int>>(),
                                  j.at("probabilities").get<std::vector<double>>());
    } catch (const json::exception& e) {
        throw ParameterError(std::string("degree distribution JSON: ") + e.what());
    }
}

DegreeDistribution load_degree_distribution(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParameterError("cannot open degree distribution file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParameterError("degree distribution file '" + path + "': " + e.what());
    }
    return degree_distribution_from_json(j);
}

void to_json(json& j, const StrainParams& p) { j = json{{"zeta", p.zeta}, {"gamma", p.gamma}}; }

void from_json(const json& j, StrainParams& p)
{
    j.at("zeta").get_to(p.zeta);
    j.at("gamma").get_to(p.gamma);
}

void to_json(json& j, const ControlPair& u) { j = json::array({u.u1, u.u2}); }

void from_json(const json& j, ControlPair& u)
{
    const auto v = j.get<std::array<double, 2>>();
    u = {v[0], v[1]};
}

void to_json(json& j, const CostModel& c) { j = json{{"a1", c.a1}, {"a2", c.a2}, {"b", c.b}}; }

void from_json(const json& j, CostModel& c)
{
    j.at("a1").get_to(c.a1);
    j.at("a2").get_to(c.a2);
    j.at("b").get_to(c.b);
}

void to_json(json& j, EquilibriumClass c) { j = std::string(to_string(c)); }

void from_json(const json& j, EquilibriumClass& c) { c = equilibrium_class_from_string(j.get<std::string>()); }

void to_json(json& j, const EquilibriumReport& r)
{
    j = json{{"class", r.class_label},       {"T1", r.t1},
             {"T2", r.t2},                   {"theta_star", r.theta_star},
             {"prevalence", r.prevalence},   {"stable", r.stable}};
}

void from_json(const json& j, EquilibriumReport& r)
{
    j.at("class").get_to(r.class_label);
    j.at("T1").get_to(r.t1);
    j.at("T2").get_to(r.t2);
    j.at("theta_star").get_to(r.theta_star);
    j.at("prevalence").get_to(r.prevalence);
    j.at("stable").get_to(r.stable);
}

void to_json(json& j, const ControlSolution& s)
{
    j = json{{"control", s.control},
             {"regime", s.regime},
             {"objective", s.objective},
             {"theta_star", s.theta_star},
             {"prevalence", s.prevalence},
             {"converged", s.converged},
             {"iterations", s.iterations},
             {"on_open_boundary", s.on_open_boundary}};
}

void from_json(const json& j, ControlSolution& s)
{
    j.at("control").get_to(s.control);
    j.at("regime").get_to(s.regime);
    j.at("objective").get_to(s.objective);
    j.at("theta_star").get_to(s.theta_star);
    j.at("prevalence").get_to(s.prevalence);
    j.at("converged").get_to(s.converged);
    j.at("iterations").get_to(s.iterations);
    j.at("on_open_boundary").get_to(s.on_open_boundary);
}

void to_json(json& j, const RegimeOutcome& r)
{
    j = json{{"regime", r.regime}, {"feasible", r.feasible}, {"error", r.error}};
    j["best"] = r.best ? json(*r.best) : json(nullptr);
}

void from_json(const json& j, RegimeOutcome& r)
{
    j.at("regime").get_to(r.regime);
    j.at("feasible").get_to(r.feasible);
    j.at("error").get_to(r.error);
    if (j.at("best").is_null())
        r.best.reset();
    else
        r.best = j.at("best").get<ControlSolution>();
}

void to_json(json& j, const GlobalSolution& g)
{
    j = json{{"best", g.best}, {"regimes", g.regimes}, {"any_converged", g.any_converged}};
}

void from_json(const json& j, GlobalSolution& g)
{
    j.at("best").get_to(g.best);
    j.at("regimes").get_to(g.regimes);
    j.at("any_converged").get_to(g.any_converged);
}

void to_json(json& j, const Transition& t)
{
    j = json{{"from", t.from}, {"to", t.to}, {"effort_lo", t.effort_lo}, {"effort_hi", t.effort_hi}};
}

void from_json(const json& j, Transition& t)
{
    j.at("from").get_to(t.from);
    j.at("to").get_to(t.to);
    j.at("effort_lo").get_to(t.effort_lo);
    j.at("effort_hi").get_to(t.effort_hi);
}

void to_json(json& j, const SweepPoint& p)
{
    j = json{{"effort", p.effort}, {"control", p.control}, {"report", p.report}};
}

void from_json(const json& j, SweepPoint& p)
{
    j.at("effort").get_to(p.effort);
    j.at("control").get_to(p.control);
    j.at("report").get_to(p.report);
}

void to_json(json& j, const SweepResult& s)
{
    j = json{{"direction", s.direction}, {"points", s.points}, {"transitions", s.transitions}};
}

void from_json(const json& j, SweepResult& s)
{
    j.at("direction").get_to(s.direction);
    j.at("points").get_to(s.points);
    j.at("transitions").get_to(s.transitions);
}

std::string format_number(double v)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const DegreeDistribution& dist)
{
    const auto degrees = dist.degrees();
    os << "time";
    for (int strain = 1; strain <= 2; ++strain)
        for (int k : degrees)
            os << ",I" << strain << "_k" << k;
    os << ",Ibar1,Ibar2,Theta1,Theta2\n";
    for (const auto& point : traj) {
        os << format_number(point.time);
        for (double v : point.state.i1)
            os << ',' << format_number(v);
        for (double v : point.state.i2)
            os << ',' << format_number(v);
        os << ',' << format_number(prevalence(point.state, dist, Strain::One)) << ','
           << format_number(prevalence(point.state, dist, Strain::Two)) << ','
           << format_number(theta(point.state, dist, Strain::One)) << ','
           << format_number(theta(point.state, dist, Strain::Two)) << '\n';
    }
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep)
{
    os << "effort,u1,u2,T1,T2,label,Ibar1,Ibar2\n";
    for (const auto& p : sweep.points)
        os << format_number(p.effort) << ',' << format_number(p.control.u1) << ',' << format_number(p.control.u2)
           << ',' << format_number(p.report.t1) << ',' << format_number(p.report.t2) << ','
           << to_string(p.report.class_label) << ',' << format_number(p.report.prevalence[0]) << ','
           << format_number(p.report.prevalence[1]) << '\n';
}

void write_regimes_csv(std::ostream& os, const GlobalSolution& solution)
{
    os << "regime,feasible,u1,u2,objective,Ibar1,Ibar2,converged,iterations,on_open_boundary\n";
    for (const auto& r : solution.regimes) {
        os << to_string(r.regime) << ',' << (r.feasible ? "true" : "false");
        if (r.best) {
            const auto& s = *r.best;
            os << ',' << format_number(s.control.u1) << ',' << format_number(s.control.u2) << ','
               << format_number(s.objective) << ',' << format_number(s.prevalence[0]) << ','
               << format_number(s.prevalence[1]) << ',' << (s.converged ? "true" : "false") << ',' << s.iterations
               << ',' << (s.on_open_boundary ? "true" : "false");
        } else {
            os << ",,,,,,,,";
        }
        os << '\n';
    }
}

} // namespace epictl
