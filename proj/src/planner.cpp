#include "uavfl/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavfl {

OutageFn learned_outage(ParamVector theta, AreaBounds bounds) {
  return [theta = std::move(theta), bounds](const Coord2& q) {
    if (!bounds.contains(q)) return 1.0;
    return outage_probability(theta, normalize_coord(q, bounds));
  };
}

Tree::Tree(const Coord2& root, double root_outage) {
  vertices_.push_back(root);
  parents_.push_back(kNoParent);
  costs_.push_back(0.0);
  outages_.push_back(root_outage);
  children_.emplace_back();
}

std::size_t Tree::add(const Coord2& q, std::size_t parent, double outage) {
  if (parent >= size()) throw std::out_of_range("Tree::add: bad parent index");
  const std::size_t idx = size();
  vertices_.push_back(q);
  parents_.push_back(parent);
  costs_.push_back(costs_[parent] + distance(vertices_[parent], q));
  outages_.push_back(outage);
  children_.emplace_back();
  children_[parent].push_back(idx);
  return idx;
}

void Tree::reparent(std::size_t v, std::size_t new_parent) {
  if (v == 0 || v >= size() || new_parent >= size()) {
    throw std::out_of_range("Tree::reparent: bad index");
  }
  auto& siblings = children_[parents_[v]];
  siblings.erase(std::find(siblings.begin(), siblings.end(), v));
  parents_[v] = new_parent;
  children_[new_parent].push_back(v);

  std::vector<std::size_t> stack{v};
  while (!stack.empty()) {
    const std::size_t c = stack.back();
    stack.pop_back();
    costs_[c] = costs_[parents_[c]] + distance(vertices_[parents_[c]], vertices_[c]);
    for (std::size_t g : children_[c]) stack.push_back(g);
  }
}

std::vector<std::size_t> Tree::branch(std::size_t v) const {
  std::vector<std::size_t> chain;
  for (std::size_t c = v; c != kNoParent; c = parents_[c]) {
    chain.push_back(c);
    if (chain.size() > size()) throw std::logic_error("Tree: cycle detected");
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

double Tree::check_invariants(double max_edge) const {
  if (parents_[0] != kNoParent || costs_[0] != 0.0) {
    throw std::logic_error("Tree: root must have no parent and zero cost");
  }
  for (std::size_t v = 1; v < size(); ++v) {
    const std::size_t p = parents_[v];
    if (p >= size()) throw std::logic_error("Tree: dangling parent index");
    const auto& sib = children_[p];
    if (std::find(sib.begin(), sib.end(), v) == sib.end()) {
      throw std::logic_error("Tree: child list out of sync with parent links");
    }
    if (distance(vertices_[p], vertices_[v]) > max_edge) {
      throw std::logic_error("Tree: edge longer than the step radius");
    }
  }

  // Sum edge lengths from the root downwards; every vertex must be reached
  // exactly once.
  std::vector<double> recomputed(size(), 0.0);
  std::vector<std::size_t> queue{0};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t v = queue[head];
    for (std::size_t c : children_[v]) {
      if (parents_[c] != v) throw std::logic_error("Tree: child list out of sync");
      recomputed[c] = recomputed[v] + distance(vertices_[v], vertices_[c]);
      queue.push_back(c);
      if (queue.size() > size()) throw std::logic_error("Tree: cycle detected");
    }
  }
  if (queue.size() != size()) throw std::logic_error("Tree: unreachable vertices");

  double worst = 0.0;
  for (std::size_t v = 1; v < size(); ++v) {
    const double diff = std::abs(costs_[v] - recomputed[v]);
    if (diff == 0.0) continue;
    worst = std::max(worst, diff / std::max(recomputed[v], std::numeric_limits<double>::min()));
  }
  return worst;
}

double PlannerConfig::effective_goal_tolerance() const {
  return goal_tolerance > 0.0 ? goal_tolerance : step_radius;
}

void PlannerConfig::validate() const {
  if (!(step_radius > 0.0)) throw std::invalid_argument("planner: step_radius must be positive");
  if (!(outage_threshold >= 0.0 && outage_threshold <= 1.0)) {
    throw std::invalid_argument("planner: outage threshold must lie in [0, 1]");
  }
  if (!(goal_bias >= 0.0 && goal_bias < 1.0)) {
    throw std::invalid_argument("planner: goal_bias must lie in [0, 1)");
  }
  if (effective_goal_tolerance() > step_radius) {
    throw std::invalid_argument("planner: goal_tolerance may not exceed step_radius");
  }
  if (!(v_max > 0.0)) throw std::invalid_argument("planner: v_max must be positive");
  if (!(bounds.width() > 0.0 && bounds.height() > 0.0)) {
    throw std::invalid_argument("planner: empty area");
  }
}

Coord2 sample_point(const AreaBounds& bounds, const Coord2& goal, double goal_bias,
                    Rng& rng) {
  if (rng.uniform() < goal_bias) return goal;
  const double x = rng.uniform(bounds.x_min, bounds.x_max);
  const double y = rng.uniform(bounds.y_min, bounds.y_max);
  return {x, y};
}

std::size_t nearest(const Tree& tree, const Coord2& q) {
  if (tree.size() == 0) throw std::invalid_argument("nearest: empty tree");
  std::size_t best = 0;
  double best_d = distance(tree.vertex(0), q);
  for (std::size_t i = 1; i < tree.size(); ++i) {
    const double d = distance(tree.vertex(i), q);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

Coord2 steer(const Coord2& q_nearest, const Coord2& q_rand, double radius) {
  const double d = distance(q_nearest, q_rand);
  if (d <= radius) return q_rand;
  // Shrink the fraction until rounding cannot push the step past the radius.
  double f = radius / d;
  for (;;) {
    const Coord2 q{q_nearest.x + f * (q_rand.x - q_nearest.x),
                   q_nearest.y + f * (q_rand.y - q_nearest.y)};
    if (distance(q_nearest, q) <= radius) return q;
    f = std::nextafter(f, 0.0);
  }
}

bool is_connected(const OutageFn& outage, const AreaBounds& bounds,
                  const Coord2& q, double p0) {
  if (!bounds.contains(q)) return false;
  return outage(q) <= p0;
}

std::vector<std::size_t> near_set(const Tree& tree, const Coord2& q, double radius) {
  std::vector<std::size_t> near;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (distance(tree.vertex(i), q) <= radius) near.push_back(i);
  }
  return near;
}

ParentChoice choose_parent(const Tree& tree, const std::vector<std::size_t>& near,
                           std::size_t nearest_idx, const Coord2& q_new, double p0) {
  ParentChoice best{nearest_idx,
                    tree.cost(nearest_idx) + distance(tree.vertex(nearest_idx), q_new)};
  for (std::size_t v : near) {
    if (!(tree.outage(v) <= p0)) continue;
    const double c = tree.cost(v) + distance(tree.vertex(v), q_new);
    if (c < best.cost) best = {v, c};
  }
  return best;
}

std::size_t rewire(Tree& tree, const std::vector<std::size_t>& near,
                   std::size_t new_idx, double p0) {
  std::size_t changed = 0;
  for (std::size_t v : near) {
    if (v == new_idx || v == 0 || v == tree.parent(new_idx)) continue;
    if (!(tree.outage(v) <= p0)) continue;
    const double through =
        tree.cost(new_idx) + distance(tree.vertex(new_idx), tree.vertex(v));
    if (through < tree.cost(v)) {
      tree.reparent(v, new_idx);
      ++changed;
    }
  }
  return changed;
}

Path make_path(std::vector<Coord2> waypoints, double v_max) {
  Path path;
  path.waypoints = std::move(waypoints);
  for (std::size_t n = 1; n < path.waypoints.size(); ++n) {
    path.length += distance(path.waypoints[n - 1], path.waypoints[n]);
  }
  path.flight_time = path.length / v_max;
  return path;
}

PlanResult plan(const PlannerConfig& config, const OutageFn& outage,
                const Coord2& start, const Coord2& goal, Rng& rng,
                const TreeObserver& observer) {
  config.validate();
  const double p0 = config.outage_threshold;
  const double radius = config.step_radius;
  const double tolerance = config.effective_goal_tolerance();

  PlanResult result;
  if (!is_connected(outage, config.bounds, start, p0) ||
      !is_connected(outage, config.bounds, goal, p0)) {
    result.status = PlanStatus::infeasible_endpoint;
    return result;
  }

  Tree tree(start, outage(start));
  if (start == goal) {
    result.status = PlanStatus::found;
    result.path = make_path({start}, config.v_max);
    result.tree_size = 1;
    return result;
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> goal_candidates;
  if (distance(start, goal) <= tolerance) goal_candidates.push_back(0);
  auto best_goal = [&]() {
    std::pair<std::size_t, double> best{kNoParent, kInf};
    for (std::size_t v : goal_candidates) {
      const double c = tree.cost(v) + distance(tree.vertex(v), goal);
      if (c < best.second) best = {v, c};
    }
    return best;
  };

  result.best_cost_history.reserve(config.max_iterations);
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    const Coord2 q_rand = sample_point(config.bounds, goal, config.goal_bias, rng);
    const std::size_t nearest_idx = nearest(tree, q_rand);
    const Coord2 q_new = steer(tree.vertex(nearest_idx), q_rand, radius);
    if (q_new == tree.vertex(nearest_idx)) {
      result.best_cost_history.push_back(best_goal().second);
      continue;
    }
    const double o = config.bounds.contains(q_new) ? outage(q_new) : 1.0;
    if (!(o <= p0)) {
      result.best_cost_history.push_back(best_goal().second);
      continue;
    }

    const auto near = near_set(tree, q_new, radius);
    const ParentChoice choice = choose_parent(tree, near, nearest_idx, q_new, p0);
    const std::size_t idx = tree.add(q_new, choice.parent, o);
    rewire(tree, near, idx, p0);
    if (distance(q_new, goal) <= tolerance) goal_candidates.push_back(idx);
    if (observer) observer(tree);
    result.best_cost_history.push_back(best_goal().second);
  }

  result.tree_size = tree.size();
  const auto [best_v, best_cost] = best_goal();
  if (best_v == kNoParent) {
    result.status = PlanStatus::no_connection;
    return result;
  }

  std::vector<Coord2> waypoints;
  for (std::size_t v : tree.branch(best_v)) waypoints.push_back(tree.vertex(v));
  if (waypoints.back() != goal) waypoints.push_back(goal);
  result.status = PlanStatus::found;
  result.path = make_path(std::move(waypoints), config.v_max);
  return result;
}

ValidationReport validate_path(const Path& path, const Coord2& start,
                               const Coord2& goal, const OutageFn& outage,
                               const PlannerConfig& config, const RadioScene& scene,
                               std::size_t n_mc, Rng& rng) {
  ValidationReport report;
  const auto& w = path.waypoints;
  if (w.empty()) return report;

  const double p0 = config.outage_threshold;
  report.connectivity_ok = true;
  for (const auto& q : w) {
    const double o = config.bounds.contains(q) ? outage(q) : 1.0;
    report.model_outage.push_back(o);
    if (!(o <= p0)) report.connectivity_ok = false;
  }

  for (std::size_t n = 1; n < w.size(); ++n) {
    report.max_step = std::max(report.max_step, distance(w[n - 1], w[n]));
  }
  report.step_ok = report.max_step <= config.step_radius;
  report.endpoints_ok = w.front() == start && w.back() == goal;

  if (n_mc == 0) return report;

  // Cumulative flight time at each waypoint.
  std::vector<double> t(w.size(), 0.0);
  for (std::size_t n = 1; n < w.size(); ++n) {
    t[n] = t[n - 1] + distance(w[n - 1], w[n]) / config.v_max;
  }

  // A run of waypoints in true outage keeps the UAV disconnected from the
  // last connected waypoint before it until the first connected one after.
  std::size_t run = 0;
  std::size_t last_connected = 0;
  bool seen_connected = false;
  for (std::size_t n = 0; n < w.size(); ++n) {
    const double truth = monte_carlo_outage(scene.at(w[n]), scene.sites, scene.params,
                                            n_mc, rng);
    report.ground_truth_outage.push_back(truth);
    if (truth > p0) {
      ++report.ground_truth_violations;
      ++run;
      report.longest_violation_run = std::max(report.longest_violation_run, run);
      const double since = seen_connected ? t[last_connected] : 0.0;
      const double until = n + 1 < w.size() ? t[n + 1] : t[n];
      report.max_disconnection_s = std::max(report.max_disconnection_s, until - since);
    } else {
      run = 0;
      last_connected = n;
      seen_connected = true;
    }
  }
  return report;
}

}  // namespace uavfl
