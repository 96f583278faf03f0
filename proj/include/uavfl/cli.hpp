#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uavfl/scenario.hpp"

namespace uavfl::cli {

enum class ExitStatus : int {
  success = 0,
  runtime_error = 1,
  config_error = 2,
  infeasible = 3,
  validation_failed = 4,
};

struct CommandOutcome {
  ExitStatus status = ExitStatus::success;
  std::vector<std::filesystem::path> artifacts;
  std::string summary;

  int exit_code() const { return static_cast<int>(status); }
};

// Ground-truth Monte-Carlo radio map.
CommandOutcome cmd_truth(const ScenarioConfig& config, std::size_t resolution,
                         std::size_t n_mc, const std::filesystem::path& out);

// Federated training; writes the model and the per-round metrics.
CommandOutcome cmd_map(const ScenarioConfig& config, const std::filesystem::path& out_model,
                       const std::filesystem::path& out_metrics);

// Plans one path on a trained model. `plan_index` selects the random stream.
CommandOutcome cmd_plan(const ScenarioConfig& config, const std::filesystem::path& model_file,
                        const Coord2& start, const Coord2& goal, double p0,
                        const std::filesystem::path& out, std::size_t plan_index = 0);

// Checks a path file against the model and the channel ground truth.
CommandOutcome cmd_validate(const ScenarioConfig& config,
                            const std::filesystem::path& path_file,
                            const std::filesystem::path& model_file, const Coord2& start,
                            const Coord2& goal, double p0, std::size_t n_mc);

// Truth map, training, planning over every request and P0 value, validation.
CommandOutcome cmd_run(const ScenarioConfig& config, const std::filesystem::path& out_dir);

std::string describe(const ValidationReport& report, const PlannerConfig& config);

// Entry point shared by the executable and the tests.
int run_main(int argc, char** argv);

}  // namespace uavfl::cli
