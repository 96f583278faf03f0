#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "uavfl/channel.hpp"
#include "uavfl/geometry.hpp"
#include "uavfl/neuralnet.hpp"
#include "uavfl/random.hpp"

namespace uavfl {

// Outage probability at a point in meters.
using OutageFn = std::function<double(const Coord2&)>;

// Outage map backed by a trained model over the given area.
OutageFn learned_outage(ParamVector theta, AreaBounds bounds);

inline constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

// Search tree rooted at vertex 0. Each vertex caches the outage value it was
// admitted with.
class Tree {
 public:
  explicit Tree(const Coord2& root, double root_outage = 0.0);

  std::size_t size() const { return vertices_.size(); }
  const Coord2& vertex(std::size_t i) const { return vertices_[i]; }
  std::size_t parent(std::size_t i) const { return parents_[i]; }
  double cost(std::size_t i) const { return costs_[i]; }
  double outage(std::size_t i) const { return outages_[i]; }
  const std::vector<std::size_t>& children(std::size_t i) const { return children_[i]; }
  const std::vector<Coord2>& vertices() const { return vertices_; }

  std::size_t add(const Coord2& q, std::size_t parent, double outage);

  // Moves vertex `v` under `new_parent` and updates the costs of its subtree.
  void reparent(std::size_t v, std::size_t new_parent);

  // Vertices from the root to `v`, inclusive.
  std::vector<std::size_t> branch(std::size_t v) const;

  // Largest relative mismatch between stored costs and costs recomputed by
  // walking parent links. Throws std::logic_error on a broken tree structure
  // (cycle, bad index, or an edge longer than `max_edge`).
  double check_invariants(double max_edge) const;

 private:
  std::vector<Coord2> vertices_;
  std::vector<std::size_t> parents_;
  std::vector<double> costs_;
  std::vector<double> outages_;
  std::vector<std::vector<std::size_t>> children_;
};

struct PlannerConfig {
  std::size_t max_iterations = 5000;
  double step_radius = 25.0;       // delta * v_max, meters
  double outage_threshold = 0.3;   // P0
  double goal_bias = 0.05;
  double goal_tolerance = 0.0;     // <= 0 means step_radius
  double v_max = 5.0;              // m/s
  AreaBounds bounds;

  double effective_goal_tolerance() const;
  void validate() const;
};

Coord2 sample_point(const AreaBounds& bounds, const Coord2& goal, double goal_bias,
                    Rng& rng);

// Index of the closest vertex, lowest index on ties.
std::size_t nearest(const Tree& tree, const Coord2& q);

// q_rand if it lies within `radius` of q_nearest, otherwise the point at
// distance `radius` along the segment towards it.
Coord2 steer(const Coord2& q_nearest, const Coord2& q_rand, double radius);

// Outage at q is at most P0. Points outside the area are never connected.
bool is_connected(const OutageFn& outage, const AreaBounds& bounds,
                  const Coord2& q, double p0);

// All vertices within the closed ball of `radius` around q.
std::vector<std::size_t> near_set(const Tree& tree, const Coord2& q, double radius);

struct ParentChoice {
  std::size_t parent = kNoParent;
  double cost = 0.0;
};

// Cheapest admissible parent for q_new among q_nearest and the near set.
ParentChoice choose_parent(const Tree& tree, const std::vector<std::size_t>& near,
                           std::size_t nearest_idx, const Coord2& q_new, double p0);

// Reparents near vertices through `new_idx` where that shortens their path.
// Returns the number of vertices rewired.
std::size_t rewire(Tree& tree, const std::vector<std::size_t>& near,
                   std::size_t new_idx, double p0);

struct Path {
  std::vector<Coord2> waypoints;
  double length = 0.0;       // meters
  double flight_time = 0.0;  // seconds at v_max
};

Path make_path(std::vector<Coord2> waypoints, double v_max);

enum class PlanStatus { found, infeasible_endpoint, no_connection };

struct PlanResult {
  PlanStatus status = PlanStatus::no_connection;
  std::optional<Path> path;
  std::size_t tree_size = 0;
  // Best cost-to-goal after each iteration, +inf until the goal is reached.
  std::vector<double> best_cost_history;

  bool found() const { return status == PlanStatus::found; }
};

// Optional hook invoked after every insertion (and its rewiring).
using TreeObserver = std::function<void(const Tree&)>;

PlanResult plan(const PlannerConfig& config, const OutageFn& outage,
                const Coord2& start, const Coord2& goal, Rng& rng,
                const TreeObserver& observer = {});

struct ValidationReport {
  std::vector<double> model_outage;         // per waypoint
  std::vector<double> ground_truth_outage;  // per waypoint, Monte-Carlo
  double max_step = 0.0;
  bool connectivity_ok = false;  // model outage <= P0 at every waypoint
  bool step_ok = false;          // every step <= step_radius
  bool endpoints_ok = false;     // exact start and goal
  std::size_t ground_truth_violations = 0;  // waypoints with true outage > P0
  std::size_t longest_violation_run = 0;    // consecutive waypoints
  double max_disconnection_s = 0.0;

  bool passed() const { return connectivity_ok && step_ok && endpoints_ok; }
};

ValidationReport validate_path(const Path& path, const Coord2& start,
                               const Coord2& goal, const OutageFn& outage,
                               const PlannerConfig& config, const RadioScene& scene,
                               std::size_t n_mc, Rng& rng);

}  // namespace uavfl
