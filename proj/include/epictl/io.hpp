#pragma once

#include "epictl/control.hpp"
#include "epictl/dynamics.hpp"
#include "epictl/equilibrium.hpp"
#include "epictl/network.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace epictl {

using json = nlohmann::json;

// JSON schemas. Every to_json has a matching from_json so emitted files re-parse
// into the originating type.

void to_json(json& j, const DegreeDistribution& d);
DegreeDistribution degree_distribution_from_json(const json& j);
/// Reads {"degrees": [...], "probabilities": [...]} from a file.
DegreeDistribution load_degree_distribution(const std::string& path);

void to_json(json& j, const StrainParams& p);
void from_json(const json& j, StrainParams& p);
void to_json(json& j, const ControlPair& u);
void from_json(const json& j, ControlPair& u);
void to_json(json& j, const CostModel& c);
void from_json(const json& j, CostModel& c);
void to_json(json& j, EquilibriumClass c);
void from_json(const json& j, EquilibriumClass& c);
void to_json(json& j, const EquilibriumReport& r);
void from_json(const json& j, EquilibriumReport& r);
void to_json(json& j, const ControlSolution& s);
void from_json(const json& j, ControlSolution& s);
void to_json(json& j, const RegimeOutcome& r);
void from_json(const json& j, RegimeOutcome& r);
void to_json(json& j, const GlobalSolution& g);
void from_json(const json& j, GlobalSolution& g);
void to_json(json& j, const Transition& t);
void from_json(const json& j, Transition& t);
void to_json(json& j, const SweepPoint& p);
void from_json(const json& j, SweepPoint& p);
void to_json(json& j, const SweepResult& s);
void from_json(const json& j, SweepResult& s);

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double v);

/// Header: time, I1_k<d>..., I2_k<d>..., Ibar1, Ibar2, Theta1, Theta2.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const DegreeDistribution& dist);
/// Header: effort, u1, u2, T1, T2, label, Ibar1, Ibar2.
void write_sweep_csv(std::ostream& os, const SweepResult& sweep);
/// One row per regime: regime, feasible, u1, u2, objective, Ibar1, Ibar2, converged, iterations, on_open_boundary.
void write_regimes_csv(std::ostream& os, const GlobalSolution& solution);

} // namespace epictl
