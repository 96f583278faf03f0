// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "uavfl/cli.hpp"

using namespace uavfl;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

// Paths returned anywhere in the suite; criterion 9 audits all of them.
struct PlannedPath {
  Path path;
  Coord2 start;
  Coord2 goal;
  OutageFn outage;
  PlannerConfig config;
};
std::vector<PlannedPath> g_paths;

std::optional<Path> plan_and_record(const PlannerConfig& pc, const OutageFn& outage,
                                    const Coord2& start, const Coord2& goal, Rng& rng) {
  auto result = plan(pc, outage, start, goal, rng);
  if (!result.found()) return std::nullopt;
  g_paths.push_back({*result.path, start, goal, outage, pc});
  return result.path;
}

// Trained once, shared by criteria 7, 10 and 11.
const TrainingResult& ring_model() {
  static const TrainingResult result = [] {
    const ScenarioConfig c = desk_ring_config();
    return train(c.training, c.model, c.scene(), c.flight, c.master_seed);
  }();
  return result;
}

double final_loss(ScenarioConfig c, std::size_t h, std::size_t u, std::uint64_t seed) {
  c.training.local_steps = h;
  c.training.num_clients = u;
  return train(c.training, c.model, c.scene(), c.flight, seed).history.back().global_loss;
}

Verdict gradient_check() {
  const MlpArchitecture arch{{2, 8, 8, 2}};
  Rng rng(derive_stream(2024, "gradient", 0));
  const double h = 1e-5;
  double worst = 0.0;
  for (int draw = 0; draw < 50; ++draw) {
    ParamVector theta = init_params(arch, rng);
    for (auto& v : theta.values) v += 0.1 * rng.normal();
    std::vector<LabeledSample> batch;
    for (int i = 0; i < 4; ++i) {
      batch.push_back({{rng.uniform(), rng.uniform()}, rng.uniform() < 0.5 ? 0 : 1});
    }
    const auto g = gradient(theta, batch);
    for (std::size_t k = 0; k < theta.size(); ++k) {
      ParamVector plus = theta;
      ParamVector minus = theta;
      plus.values[k] += h;
      minus.values[k] -= h;
      const double fd = (loss(plus, batch) - loss(minus, batch)) / (2.0 * h);
      const double scale = std::max({std::abs(fd), std::abs(g[k]), 1e-6});
      worst = std::max(worst, std::abs(fd - g[k]) / scale);
    }
  }
  return {worst < 1e-5, fmt("max relative error %.2e < 1e-5", worst)};
}

Verdict rayleigh_oracle() {
  ChannelParams params;
  params.noise_power_mw = dbm_to_mw(-75.0);
  const GbsSite site{{0.0, 0.0, 0.0}, 200.0};
  const std::vector<GbsSite> sites{site};
  Rng pos_rng(derive_stream(2024, "rayleigh-pos", 0));
  const std::size_t n = 1000000;
  double worst_sigmas = 0.0;
  double p_min = 1.0;
  double p_max = 0.0;
  bool pass = true;
  for (int i = 0; i < 10; ++i) {
    const double r = pos_rng.uniform(500.0, 1600.0);
    const double phi = pos_rng.uniform(0.0, 2.0 * M_PI);
    const Position q{r * std::cos(phi), r * std::sin(phi), 100.0};
    const double x = params.sinr_threshold * params.noise_power_mw *
                     average_path_loss(q, site.position, params) / site.tx_power_mw;
    const double p = 1.0 - std::exp(-x * x / 2.0);
    Rng rng(derive_stream(2024, "rayleigh", i));
    const double est = monte_carlo_outage(q, sites, params, n, rng);
    const double sd = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    worst_sigmas = std::max(worst_sigmas, std::abs(est - p) / sd);
    pass = pass && std::abs(est - p) <= 3.0 * sd;
    p_min = std::min(p_min, p);
    p_max = std::max(p_max, p);
  }
  return {pass, fmt("worst deviation %.2f sigma <= 3 (p in [%.3f, %.3f])", worst_sigmas,
                    p_min, p_max)};
}

Verdict fedavg_degeneracy() {
  const ScenarioConfig c = desk_config();
  const RadioScene scene = c.scene();
  const MlpArchitecture arch{{2, 16, 16, 2}};

  UavClient client = make_client(0, c.area, derive_stream(7, "flight", 0));
  FlightPolicy collect = c.flight;
  collect.samples_per_round = 200;
  Rng label_rng(derive_stream(7, "label", 0));
  const auto data = collect_data(client, collect, scene, label_rng);

  TrainingConfig tc;
  tc.rounds = 1;
  tc.local_steps = 1;
  tc.num_clients = 1;
  tc.full_batch = true;
  tc.step_size = 0.3;
  FlightPolicy idle = c.flight;
  idle.samples_per_round = 0;

  Rng init_rng(derive_stream(7, "init", 0));
  const ParamVector start = init_params(arch, init_rng);
  ParamVector fed = start;
  ParamVector central = start;
  std::vector<UavClient> clients{client};
  double worst = 0.0;
  for (int step = 0; step < 100; ++step) {
    fed = train_from(tc, fed, clients, scene, idle, 7).params;
    central = sgd_step(central, gradient(central, data), tc.step_size);
    for (std::size_t k = 0; k < fed.size(); ++k) {
      worst = std::max(worst, std::abs(fed.values[k] - central.values[k]));
    }
  }
  // The same 100 rounds in one call.
  tc.rounds = 100;
  const auto one_call = train_from(tc, start, clients, scene, idle, 7).params;
  for (std::size_t k = 0; k < fed.size(); ++k) {
    worst = std::max(worst, std::abs(one_call.values[k] - central.values[k]));
  }
  return {worst <= 1e-12, fmt("max component difference %.2e <= 1e-12 over 100 steps", worst)};
}

Verdict aggregation_exactness() {
  const MlpArchitecture arch{{1, 1}};
  auto pv = [&](double v) { return ParamVector{arch, {v, 0.0}}; };
  Rng rng(11);
  bool pass = true;

  const ParamVector single{arch, {rng.normal(), rng.normal()}};
  const std::vector<ClientUpdate> one{{single, 37}};
  pass = pass && aggregate(one) == single;

  const std::vector<ClientUpdate> equal{{pv(1.0), 50}, {pv(3.0), 50}, {pv(8.0), 50}};
  pass = pass && aggregate(equal).values[0] == 4.0;

  const std::vector<ClientUpdate> weighted{{pv(0.0), 1}, {pv(4.0), 3}};
  pass = pass && aggregate(weighted).values[0] == 3.0;

  return {pass, "single client, equal-size mean and (1,3)-weighted [0],[4] -> [3] exact"};
}

Verdict local_steps_trend() {
  const ScenarioConfig c = desk_config();
  double mean[3] = {0.0, 0.0, 0.0};
  const std::size_t hs[3] = {1, 5, 10};
  for (int i = 0; i < 3; ++i) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) mean[i] += final_loss(c, hs[i], 5, seed) / 3.0;
  }
  const bool pass = mean[2] <= mean[1] && mean[1] <= mean[0] + 0.01;
  return {pass, fmt("mean final loss H=10 %.4f <= H=5 %.4f <= H=1 %.4f + 0.01", mean[2], mean[1],
                    mean[0])};
}

Verdict clients_trend() {
  const ScenarioConfig c = desk_config();
  double u2 = 0.0;
  double u10 = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    u2 += final_loss(c, c.training.local_steps, 2, seed) / 3.0;
    u10 += final_loss(c, c.training.local_steps, 10, seed) / 3.0;
  }
  return {u10 <= u2 + 0.02, fmt("mean final loss U=10 %.4f <= U=2 %.4f + 0.02", u10, u2)};
}

Verdict calibration() {
  const ScenarioConfig c = desk_ring_config();
  const auto& model = ring_model();
  const auto truth = evaluate_truth_map(c.scene(), 50, 2000, derive_stream(2024, "holdout", 0));
  const auto pred = evaluate_model_map(model.params, c.area, 50);
  std::size_t correct = 0;
  std::size_t outage_cells = 0;
  for (std::size_t i = 0; i < truth.cells.size(); ++i) {
    const bool t = truth.cells[i].outage > 0.5;
    const bool p = pred.cells[i].outage > 0.5;
    correct += t == p;
    outage_cells += t;
  }
  const double n = static_cast<double>(truth.cells.size());
  const double acc = static_cast<double>(correct) / n;
  const double baseline =
      static_cast<double>(std::max(outage_cells, truth.cells.size() - outage_cells)) / n;
  return {acc >= baseline + 0.10,
          fmt("accuracy %.3f >= majority baseline %.3f + 0.10", acc, baseline)};
}

Verdict rrt_optimality() {
  PlannerConfig pc;
  pc.bounds = {0.0, 0.0, 500.0, 500.0};
  pc.outage_threshold = 1.0;
  pc.max_iterations = 5000;
  const OutageFn model = learned_outage(ring_model().params, pc.bounds);
  const Coord2 start{50.0, 50.0};
  const Coord2 goal{450.0, 350.0};
  const double d = distance(start, goal);
  int within = 0;
  int found = 0;
  bool lower_ok = true;
  double worst = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(derive_stream(2024, "optimality", seed));
    const auto path = plan_and_record(pc, model, start, goal, rng);
    if (!path) continue;
    ++found;
    const double ratio = path->length / d;
    worst = std::max(worst, ratio);
    lower_ok = lower_ok && path->length >= d;
    within += ratio <= 1.05;
  }
  return {lower_ok && within >= 18,
          fmt("%.0f/20 seeds within [D, 1.05 D] (>= 18), worst ratio %.4f, found %.0f/20", within,
              worst, found)};
}

Verdict feasibility() {
  std::size_t bad = 0;
  for (const auto& p : g_paths) {
    Rng unused(0);
    const RadioScene scene;
    const auto r = validate_path(p.path, p.start, p.goal, p.outage, p.config, scene, 0, unused);
    bad += !r.passed();
  }
  return {!g_paths.empty() && bad == 0,
          fmt("%.0f of %.0f returned paths violate outage, step or endpoint constraints",
              static_cast<double>(bad), static_cast<double>(g_paths.size()))};
}

Verdict tree_invariants() {
  const ScenarioConfig c = desk_ring_config();
  PlannerConfig pc = c.planner_config(0.4);
  pc.max_iterations = 4000;
  const OutageFn model = learned_outage(ring_model().params, c.area);
  const auto& req = c.plans.front();
  Rng rng(derive_stream(2024, "invariants", 0));
  double worst = 0.0;
  std::size_t checks = 0;
  std::size_t largest = 0;
  bool structural = true;
  plan(pc, model, req.start, req.goal, rng, [&](const Tree& tree) {
    ++checks;
    largest = tree.size();
    try {
      worst = std::max(worst, tree.check_invariants(pc.step_radius));
    } catch (const std::logic_error&) {
      structural = false;
    }
  });
  return {structural && largest >= 2000 && worst <= 1e-9,
          fmt("%.0f vertices, %.0f checks, max relative cost error %.2e <= 1e-9",
              static_cast<double>(largest), static_cast<double>(checks), worst)};
}

// Mean over every configured route and 10 seeds per route; per-route means
// are reported alongside.
Verdict threshold_trend() {
  const ScenarioConfig c = desk_ring_config();
  const OutageFn model = learned_outage(ring_model().params, c.area);
  const double p0s[3] = {0.05, 0.30, 0.40};
  double pooled[3] = {0.0, 0.0, 0.0};
  int pooled_found[3] = {0, 0, 0};
  std::string detail;
  for (std::size_t i = 0; i < c.plans.size(); ++i) {
    const auto& req = c.plans[i];
    double means[3];
    for (int k = 0; k < 3; ++k) {
      const PlannerConfig pc = c.planner_config(p0s[k]);
      double sum = 0.0;
      int found = 0;
      for (int seed = 0; seed < 10; ++seed) {
        Rng rng(derive_stream(2024, "threshold", i * 1000 + seed));
        if (const auto path = plan_and_record(pc, model, req.start, req.goal, rng)) {
          sum += path->length;
          ++found;
        }
      }
      pooled[k] += sum;
      pooled_found[k] += found;
      means[k] = found ? sum / found : std::numeric_limits<double>::infinity();
    }
    detail += fmt("; route %.0f: %.0f / %.0f / %.0f", static_cast<double>(i), means[0], means[1],
                  means[2]);
  }
  const int expected = static_cast<int>(c.plans.size()) * 10;
  for (int k = 0; k < 3; ++k) pooled[k] /= std::max(pooled_found[k], 1);
  const bool all_found = pooled_found[0] == expected && pooled_found[1] == expected &&
                         pooled_found[2] == expected;
  const bool pass = all_found && pooled[0] >= pooled[1] && pooled[1] >= pooled[2];
  return {pass, fmt("mean length P0=0.05 %.0f >= P0=0.30 %.0f >= P0=0.40 %.0f m", pooled[0],
                    pooled[1], pooled[2]) +
                    detail + (all_found ? "" : "; some plans not found")};
}

Verdict determinism() {
  ScenarioConfig c = desk_config();
  c.training.rounds = 5;
  c.map.resolution = 10;
  c.map.n_mc = 200;
  c.planner.max_iterations = 2000;
  c.p0_sweep = {0.4, 1.0};
  const fs::path root = fs::temp_directory_path() / "uavfl_acceptance_determinism";
  fs::remove_all(root);
  const auto a = cli::cmd_run(c, root / "a");
  const auto b = cli::cmd_run(c, root / "b");
  bool same = a.exit_code() == 0 && b.exit_code() == 0 &&
              a.artifacts.size() == b.artifacts.size() && !a.artifacts.empty();
  for (std::size_t i = 0; same && i < a.artifacts.size(); ++i) {
    same = a.artifacts[i].filename() == b.artifacts[i].filename() &&
           read_file(a.artifacts[i]) == read_file(b.artifacts[i]);
  }
  fs::remove_all(root);
  return {same, fmt("%.0f artifacts byte-identical across two runs",
                    static_cast<double>(a.artifacts.size()))};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  // Criterion 9 audits the paths produced by 8 and 11, so it runs last.
  const std::vector<Criterion> criteria{
      {1, "gradient correctness", gradient_check},
      {2, "Rayleigh outage oracle", rayleigh_oracle},
      {3, "FedAvg degeneracy", fedavg_degeneracy},
      {4, "aggregation exactness", aggregation_exactness},
      {5, "loss decreases with local steps", local_steps_trend},
      {6, "client count effect", clients_trend},
      {7, "model calibration", calibration},
      {8, "RRT* optimality", rrt_optimality},
      {10, "tree invariants", tree_invariants},
      {11, "longer paths for stricter P0", threshold_trend},
      {12, "determinism", determinism},
      {9, "path feasibility", feasibility},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !v.pass;
    std::printf("[%s] %d: %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", c.id, c.title,
                v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
