#include "uavfl/cli.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

namespace uavfl::cli {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string p0_tag(double p0) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", p0);
  return buf;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::vector<double> model_outages(const OutageFn& outage, const Path& path,
                                  const AreaBounds& bounds) {
  std::vector<double> values;
  for (const auto& q : path.waypoints) values.push_back(bounds.contains(q) ? outage(q) : 1.0);
  return values;
}

const char* status_name(PlanStatus s) {
  switch (s) {
    case PlanStatus::found: return "found";
    case PlanStatus::infeasible_endpoint: return "infeasible_endpoint";
    case PlanStatus::no_connection: return "no_connection";
  }
  return "unknown";
}

Coord2 parse_point(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError("expected X,Y but got '" + text + "'");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ConfigError("expected X,Y but got '" + text + "'");
  }
}

}  // namespace

std::string describe(const ValidationReport& report, const PlannerConfig& config) {
  std::ostringstream out;
  out << "waypoints: " << report.model_outage.size() << "\n";
  out << "C1 model outage <= " << config.outage_threshold << ": "
      << (report.connectivity_ok ? "pass" : "FAIL") << "\n";
  out << "C2 max step " << fixed(report.max_step) << " m <= " << fixed(config.step_radius)
      << " m: " << (report.step_ok ? "pass" : "FAIL") << "\n";
  out << "C3 endpoints: " << (report.endpoints_ok ? "pass" : "FAIL") << "\n";
  if (!report.ground_truth_outage.empty()) {
    out << "ground truth: " << report.ground_truth_violations
        << " waypoints above P0, longest run " << report.longest_violation_run
        << ", max disconnection " << fixed(report.max_disconnection_s, 1) << " s\n";
  }
  out << "verdict: " << (report.passed() ? "pass" : "FAIL");
  return out.str();
}

CommandOutcome cmd_truth(const ScenarioConfig& config, std::size_t resolution,
                         std::size_t n_mc, const fs::path& out) {
  config.validate();
  const auto grid = evaluate_truth_map(config.scene(), resolution, n_mc,
                                       derive_stream(config.master_seed, "truth-map", 0));
  ensure_parent(out);
  save_grid(out, grid);
  return {ExitStatus::success, {out},
          "truth map " + std::to_string(resolution) + "x" + std::to_string(resolution) +
              " written to " + out.string()};
}

CommandOutcome cmd_map(const ScenarioConfig& config, const fs::path& out_model,
                       const fs::path& out_metrics) {
  config.validate();
  const auto result = train(config.training, config.model, config.scene(), config.flight,
                            config.master_seed);
  ensure_parent(out_model);
  ensure_parent(out_metrics);
  save_model(out_model, {result.params, config.area});
  save_metrics(out_metrics, result.history);
  std::string summary = "trained " + std::to_string(config.training.rounds) + " rounds";
  if (!result.history.empty()) {
    summary += ", final loss " + fixed(result.history.back().global_loss, 5) + " over " +
               std::to_string(result.history.back().total_samples) + " samples";
  }
  return {ExitStatus::success, {out_model, out_metrics}, summary};
}

CommandOutcome cmd_plan(const ScenarioConfig& config, const fs::path& model_file,
                        const Coord2& start, const Coord2& goal, double p0,
                        const fs::path& out, std::size_t plan_index) {
  config.validate();
  if (!config.area.contains(start) || !config.area.contains(goal)) {
    return {ExitStatus::config_error, {}, "start or goal outside the area"};
  }
  const auto model = load_model(model_file);
  const auto outage = learned_outage(model.params, model.bounds);
  const PlannerConfig pc = config.planner_config(p0);
  Rng rng(derive_stream(config.master_seed, "plan", plan_index));
  const auto result = plan(pc, outage, start, goal, rng);
  if (!result.found()) {
    return {ExitStatus::infeasible, {},
            std::string("infeasible (") + status_name(result.status) + "), tree size " +
                std::to_string(result.tree_size)};
  }
  ensure_parent(out);
  save_path(out, *result.path, model_outages(outage, *result.path, pc.bounds));
  return {ExitStatus::success, {out},
          "path with " + std::to_string(result.path->waypoints.size()) + " waypoints, length " +
              fixed(result.path->length, 1) + " m, flight time " +
              fixed(result.path->flight_time, 1) + " s"};
}

CommandOutcome cmd_validate(const ScenarioConfig& config, const fs::path& path_file,
                            const fs::path& model_file, const Coord2& start,
                            const Coord2& goal, double p0, std::size_t n_mc) {
  config.validate();
  const PlannerConfig pc = config.planner_config(p0);
  const Path path = load_path(path_file, pc.v_max);
  const auto model = load_model(model_file);
  Rng rng(derive_stream(config.master_seed, "validate", 0));
  const auto report = validate_path(path, start, goal, learned_outage(model.params, model.bounds),
                                    pc, config.scene(), n_mc, rng);
  return {report.passed() ? ExitStatus::success : ExitStatus::validation_failed, {},
          describe(report, pc)};
}

CommandOutcome cmd_run(const ScenarioConfig& config, const fs::path& out_dir) {
  config.validate();
  fs::create_directories(out_dir);
  CommandOutcome outcome;

  const fs::path config_out = out_dir / "config.json";
  save_config(config_out, config);
  outcome.artifacts.push_back(config_out);

  const fs::path truth_out = out_dir / "truth_map.csv";
  auto stage = cmd_truth(config, config.map.resolution, config.map.n_mc, truth_out);
  outcome.artifacts.insert(outcome.artifacts.end(), stage.artifacts.begin(), stage.artifacts.end());

  const fs::path model_out = out_dir / "model.json";
  const fs::path metrics_out = out_dir / "metrics.csv";
  stage = cmd_map(config, model_out, metrics_out);
  outcome.artifacts.insert(outcome.artifacts.end(), stage.artifacts.begin(), stage.artifacts.end());
  std::string summary = stage.summary;

  const auto model = load_model(model_out);
  const fs::path model_map_out = out_dir / "model_map.csv";
  save_grid(model_map_out, evaluate_model_map(model.params, model.bounds, config.map.resolution));
  outcome.artifacts.push_back(model_map_out);

  const auto outage = learned_outage(model.params, model.bounds);
  const RadioScene scene = config.scene();
  std::string table =
      "plan,p0,status,length_m,flight_time_s,waypoints,c1,c2,c3,gt_violations,"
      "max_disconnection_s\n";
  std::size_t stream = 0;
  std::size_t found = 0;
  for (std::size_t i = 0; i < config.plans.size(); ++i) {
    const auto& req = config.plans[i];
    for (double p0 : config.p0_sweep) {
      const PlannerConfig pc = config.planner_config(p0);
      Rng rng(derive_stream(config.master_seed, "plan", stream));
      Rng mc_rng(derive_stream(config.master_seed, "validate", stream));
      ++stream;
      const auto result = plan(pc, outage, req.start, req.goal, rng);
      table += std::to_string(i) + "," + format_double(p0) + "," + status_name(result.status);
      if (!result.found()) {
        table += ",,,,,,,,\n";
        continue;
      }
      ++found;
      const Path& path = *result.path;
      const fs::path path_out =
          out_dir / ("path_" + std::to_string(i) + "_p" + p0_tag(p0) + ".csv");
      save_path(path_out, path, model_outages(outage, path, pc.bounds));
      outcome.artifacts.push_back(path_out);

      const auto report =
          validate_path(path, req.start, req.goal, outage, pc, scene, config.map.n_mc, mc_rng);
      table += "," + format_double(path.length) + "," + format_double(path.flight_time) + "," +
               std::to_string(path.waypoints.size()) + "," + (report.connectivity_ok ? "1" : "0") +
               "," + (report.step_ok ? "1" : "0") + "," + (report.endpoints_ok ? "1" : "0") + "," +
               std::to_string(report.ground_truth_violations) + "," +
               format_double(report.max_disconnection_s) + "\n";
      if (!report.passed()) {
        outcome.status = ExitStatus::validation_failed;
        outcome.summary = "planned path failed validation:\n" + describe(report, pc);
        write_file(out_dir / "plans.csv", table);
        outcome.artifacts.push_back(out_dir / "plans.csv");
        return outcome;
      }
    }
  }
  const fs::path table_out = out_dir / "plans.csv";
  write_file(table_out, table);
  outcome.artifacts.push_back(table_out);
  outcome.summary = summary + "; " + std::to_string(found) + "/" + std::to_string(stream) +
                    " plans found; artifacts in " + out_dir.string();
  return outcome;
}

int run_main(int argc, char** argv) {
  CLI::App app{"Federated radio mapping and connectivity-constrained UAV path planning"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;

  auto add_common = [&](CLI::App* sub, bool out_required) {
    sub->add_option("--config", config_path, "Scenario config (JSON)");
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    auto* o = sub->add_option("--out", out, "Output file or directory");
    if (out_required) o->required();
  };

  auto* truth = app.add_subcommand("truth", "Monte-Carlo ground-truth outage map");
  add_common(truth, true);
  std::optional<std::size_t> resolution;
  std::optional<std::size_t> n_mc;
  truth->add_option("--resolution", resolution, "Cells per axis");
  truth->add_option("--n-mc", n_mc, "Fading realizations per cell");

  auto* map = app.add_subcommand("map", "Federated training of the outage model");
  add_common(map, true);
  std::string metrics_path;
  map->add_option("--metrics", metrics_path, "Metrics CSV (default: <out>.metrics.csv)");
  std::optional<std::size_t> rounds;
  map->add_option("--rounds", rounds, "Training rounds");

  auto* planc = app.add_subcommand("plan", "RRT* path on a trained model");
  add_common(planc, true);
  std::string model_path;
  std::string start_text;
  std::string goal_text;
  std::optional<double> p0;
  planc->add_option("--model", model_path, "Model file")->required();
  planc->add_option("--start", start_text, "Start X,Y in meters")->required();
  planc->add_option("--goal", goal_text, "Goal X,Y in meters")->required();
  planc->add_option("--p0", p0, "Outage threshold");

  auto* validate = app.add_subcommand("validate", "Check a path against the constraints");
  add_common(validate, false);
  std::string path_file;
  validate->add_option("--path", path_file, "Path CSV")->required();
  validate->add_option("--model", model_path, "Model file")->required();
  validate->add_option("--start", start_text, "Expected start X,Y (default: first plan)");
  validate->add_option("--goal", goal_text, "Expected goal X,Y (default: first plan)");
  validate->add_option("--p0", p0, "Outage threshold");
  validate->add_option("--n-mc", n_mc, "Fading realizations per waypoint");

  auto* run = app.add_subcommand("run", "End-to-end pipeline");
  add_common(run, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitStatus::config_error);
  }

  CommandOutcome outcome;
  try {
    ScenarioConfig config = default_config();
    if (!config_path.empty()) {
      try {
        config = load_config(config_path);
      } catch (const FormatError& e) {
        throw ConfigError(e.what());
      }
    }
    if (seed) config.master_seed = *seed;

    if (*truth) {
      outcome = cmd_truth(config, resolution.value_or(config.map.resolution),
                          n_mc.value_or(config.map.n_mc), out);
    } else if (*map) {
      if (rounds) config.training.rounds = *rounds;
      outcome = cmd_map(config, out, metrics_path.empty() ? out + ".metrics.csv" : metrics_path);
    } else if (*planc) {
      outcome = cmd_plan(config, model_path, parse_point(start_text), parse_point(goal_text),
                         p0.value_or(config.connectivity.outage_threshold), out);
    } else if (*validate) {
      Coord2 start;
      Coord2 goal;
      if (!start_text.empty() && !goal_text.empty()) {
        start = parse_point(start_text);
        goal = parse_point(goal_text);
      } else if (!config.plans.empty()) {
        start = config.plans.front().start;
        goal = config.plans.front().goal;
      } else {
        throw ConfigError("validate: give --start and --goal or configure a plan");
      }
      outcome = cmd_validate(config, path_file, model_path, start, goal,
                             p0.value_or(config.connectivity.outage_threshold),
                             n_mc.value_or(config.map.n_mc));
    } else if (*run) {
      outcome = cmd_run(config, out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::config_error);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::runtime_error);
  }

  std::ostream& stream = outcome.status == ExitStatus::success ? std::cout : std::cerr;
  stream << outcome.summary << "\n";
  for (const auto& a : outcome.artifacts) std::cout << "wrote " << a.string() << "\n";
  return outcome.exit_code();
}

}  // namespace uavfl::cli
