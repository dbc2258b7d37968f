#pragma once

#include "epictl/control.hpp"
#include "epictl/dynamics.hpp"
#include "epictl/equilibrium.hpp"
#include "epictl/errors.hpp"
#include "epictl/io.hpp"
#include "epictl/network.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace epictl::cli {

/// Config-file problem; the message names the offending field.
class ConfigError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

enum ExitCode : int {
    kSuccess = 0,
    kValidationFailure = 2,
    kSolverNonConvergence = 3,
    kIntegrationFailure = 4,
};

struct SimulateSettings {
    double t_end = 200.0;
    double dt = kDefaultTimeStep;
    int record_every = 20;
    std::array<double, 2> initial{0.1, 0.1};
    double steady_tol = 1e-10;
};

struct SweepSettings {
    std::vector<std::array<double, 2>> directions{{1.0, 0.0}, {0.0, 1.0}};
    double max_effort = 2.0;
    int n_points = 500;
};

struct ExperimentConfig {
    DegreeDistribution network = make_scale_free();
    StrainParams strains{};
    ControlPair control{};
    CostModel cost{15.0, 10.0, 50.0};
    SimulateSettings simulate{};
    FixedPointOptions fixed_point{};
    StabilityCheckOptions stability{};
    OptimizerSettings optimizer{};
    SweepSettings sweep{};
    bool verify = false;
    std::filesystem::path out_dir = ".";
};

/// Overrides given on the command line; these win over file values.
struct FlagOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool verify = false;
};

/// Parses and validates a config document. `base_dir` resolves relative network file paths.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path, const FlagOverrides& flags = {});

/// Each command writes its files under cfg.out_dir, a short summary to `log`,
/// and returns an ExitCode. Solver exceptions propagate; run_command maps them.
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log);
int cmd_equilibrium(const ExperimentConfig& cfg, std::ostream& log);
int cmd_optimize(const ExperimentConfig& cfg, std::ostream& log);
int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log);

/// Loads the config, dispatches `command` and converts failures into exit codes.
int run_command(const std::string& command, const std::filesystem::path& config_path, const FlagOverrides& flags,
                std::ostream& log, std::ostream& err);

} // namespace epictl::cli
