#include "uavfl/fedmap.hpp"

#include <numeric>
#include <stdexcept>

namespace uavfl {

namespace {

std::uint64_t round_index(std::size_t client, std::size_t round) {
  return (static_cast<std::uint64_t>(client) << 32) | static_cast<std::uint64_t>(round);
}

Coord2 random_point(const AreaBounds& area, Rng& rng) {
  const double x = rng.uniform(area.x_min, area.x_max);
  const double y = rng.uniform(area.y_min, area.y_max);
  return {x, y};
}

}  // namespace

void ClientDataset::add(const LabeledSample& sample) {
  if (capacity_ == 0 || samples_.size() < capacity_) {
    samples_.push_back(sample);
    return;
  }
  samples_[next_slot_] = sample;
  next_slot_ = (next_slot_ + 1) % capacity_;
}

void FlightPolicy::validate() const {
  if (!(speed_mps > 0.0)) throw std::invalid_argument("flight: speed must be positive");
  if (!(sample_spacing_m > 0.0)) {
    throw std::invalid_argument("flight: sample spacing must be positive");
  }
}

void TrainingConfig::validate() const {
  if (!(step_size > 0.0)) throw std::invalid_argument("training: step size must be positive");
  if (batch_size == 0) throw std::invalid_argument("training: batch size must be positive");
  if (num_clients == 0) throw std::invalid_argument("training: need at least one client");
}

UavClient make_client(std::size_t id, const AreaBounds& area,
                      std::uint64_t flight_seed, std::size_t capacity) {
  UavClient client;
  client.id = id;
  client.flight_rng = Rng(flight_seed);
  client.dataset = ClientDataset(capacity);
  client.position = random_point(area, client.flight_rng);
  client.waypoint = random_point(area, client.flight_rng);
  return client;
}

std::vector<LabeledSample> collect_data(UavClient& client,
                                        const FlightPolicy& policy,
                                        const RadioScene& scene, Rng& rng) {
  policy.validate();
  std::vector<LabeledSample> fresh;
  fresh.reserve(policy.samples_per_round);
  for (std::size_t i = 0; i < policy.samples_per_round; ++i) {
    const double remaining = distance(client.position, client.waypoint);
    double moved = policy.sample_spacing_m;
    if (remaining <= policy.sample_spacing_m) {
      moved = remaining;
      client.position = client.waypoint;
      client.waypoint = random_point(scene.area, client.flight_rng);
    } else {
      const double f = policy.sample_spacing_m / remaining;
      client.position.x += f * (client.waypoint.x - client.position.x);
      client.position.y += f * (client.waypoint.y - client.position.y);
    }
    client.flight_time_s += moved / policy.speed_mps;

    const int label =
        sample_label(scene.at(client.position), scene.sites, scene.params, rng);
    LabeledSample sample{normalize_coord(client.position, scene.area), label};
    client.dataset.add(sample);
    fresh.push_back(sample);
  }
  return fresh;
}

std::optional<ParamVector> local_update(const ParamVector& global,
                                        std::span<const LabeledSample> dataset,
                                        std::size_t local_steps, double step_size,
                                        std::size_t batch_size, bool full_batch,
                                        Rng& rng) {
  if (dataset.empty()) return std::nullopt;
  ParamVector theta = global;
  const std::size_t m = dataset.size();
  const bool whole = full_batch || batch_size >= m;

  std::vector<std::size_t> order(m);
  std::vector<LabeledSample> batch;
  std::vector<double> grad;
  for (std::size_t step = 0; step < local_steps; ++step) {
    std::span<const LabeledSample> view = dataset;
    if (!whole) {
      // Partial Fisher-Yates: the first batch_size slots form a uniform
      // sample without replacement.
      std::iota(order.begin(), order.end(), std::size_t{0});
      batch.resize(batch_size);
      for (std::size_t i = 0; i < batch_size; ++i) {
        const std::size_t j = i + rng.index(m - i);
        std::swap(order[i], order[j]);
        batch[i] = dataset[order[i]];
      }
      view = batch;
    }
    loss_and_gradient(theta, view, grad);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      theta.values[i] -= step_size * grad[i];
    }
  }
  return theta;
}

ParamVector aggregate(std::span<const ClientUpdate> updates) {
  if (updates.empty()) throw std::invalid_argument("aggregate: no client updates");
  const std::size_t n = updates.front().params.size();
  std::size_t total = 0;
  for (const auto& u : updates) {
    if (u.params.size() != n || u.params.arch != updates.front().params.arch) {
      throw std::invalid_argument("aggregate: parameter shape mismatch");
    }
    total += u.num_samples;
  }
  if (total == 0) throw std::invalid_argument("aggregate: all clients have zero samples");

  ParamVector result{updates.front().params.arch, std::vector<double>(n, 0.0)};
  for (const auto& u : updates) {
    const double w =
        static_cast<double>(u.num_samples) / static_cast<double>(total);
    for (std::size_t i = 0; i < n; ++i) result.values[i] += w * u.params.values[i];
  }
  return result;
}

double global_loss(const ParamVector& theta,
                   std::span<const std::span<const LabeledSample>> datasets) {
  std::size_t total = 0;
  for (const auto& d : datasets) total += d.size();
  if (total == 0) throw std::invalid_argument("global_loss: all datasets empty");
  double value = 0.0;
  for (const auto& d : datasets) {
    if (d.empty()) continue;
    value += static_cast<double>(d.size()) / static_cast<double>(total) * loss(theta, d);
  }
  return value;
}

TrainingResult train(const TrainingConfig& config, const MlpArchitecture& arch,
                     const RadioScene& scene, const FlightPolicy& policy,
                     std::uint64_t master_seed) {
  config.validate();
  Rng init_rng(derive_stream(master_seed, "init", 0));
  ParamVector initial = init_params(arch, init_rng);
  std::vector<UavClient> clients;
  clients.reserve(config.num_clients);
  for (std::size_t u = 0; u < config.num_clients; ++u) {
    clients.push_back(make_client(u, scene.area, derive_stream(master_seed, "flight", u),
                                  config.dataset_capacity));
  }
  return train_from(config, std::move(initial), clients, scene, policy, master_seed);
}

TrainingResult train_from(const TrainingConfig& config, ParamVector initial,
                          std::vector<UavClient>& clients,
                          const RadioScene& scene, const FlightPolicy& policy,
                          std::uint64_t master_seed) {
  config.validate();
  TrainingResult result{std::move(initial), {}};
  result.history.reserve(config.rounds);

  for (std::size_t round = 1; round <= config.rounds; ++round) {
    const ParamVector broadcast = result.params;
    std::vector<ClientUpdate> updates;
    updates.reserve(clients.size());
    for (auto& client : clients) {
      if (config.collection == CollectionMode::every_round || round == 1) {
        Rng label_rng(derive_stream(master_seed, "label", round_index(client.id, round)));
        collect_data(client, policy, scene, label_rng);
      }
      Rng sgd_rng(derive_stream(master_seed, "sgd", round_index(client.id, round)));
      auto local = local_update(broadcast, client.dataset.samples(), config.local_steps,
                                config.step_size, config.batch_size, config.full_batch,
                                sgd_rng);
      if (local) updates.push_back({std::move(*local), client.dataset.size()});
    }
    if (updates.empty()) {
      throw std::runtime_error("train: no client holds any data");
    }
    result.params = aggregate(updates);

    RoundMetrics metrics;
    metrics.round = round;
    std::vector<std::span<const LabeledSample>> datasets;
    for (const auto& client : clients) {
      datasets.push_back(client.dataset.samples());
      metrics.client_samples.push_back(client.dataset.size());
      metrics.total_samples += client.dataset.size();
    }
    metrics.global_loss = global_loss(result.params, datasets);
    result.history.push_back(std::move(metrics));
  }
  return result;
}

}  // namespace uavfl
