#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "uavfl/channel.hpp"
#include "uavfl/neuralnet.hpp"
#include "uavfl/random.hpp"

namespace uavfl {

// Labeled connectivity samples owned by one UAV. Unbounded by default; with a
// positive capacity the oldest samples are overwritten.
class ClientDataset {
 public:
  explicit ClientDataset(std::size_t capacity = 0) : capacity_(capacity) {}

  void add(const LabeledSample& sample);
  std::span<const LabeledSample> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  std::size_t capacity() const { return capacity_; }

 private:
  std::vector<LabeledSample> samples_;
  std::size_t capacity_;
  std::size_t next_slot_ = 0;
};

enum class FlightKind { random_waypoint };

struct FlightPolicy {
  FlightKind kind = FlightKind::random_waypoint;
  std::size_t samples_per_round = 100;
  double speed_mps = 5.0;
  double sample_spacing_m = 25.0;

  void validate() const;
};

enum class CollectionMode {
  every_round,  // new samples before each round's local update
  first_round,  // samples gathered once, in round 1
};

struct TrainingConfig {
  std::size_t rounds = 200;       // T_FL
  std::size_t local_steps = 10;   // H
  double step_size = 0.01;        // eta
  std::size_t batch_size = 500;
  std::size_t num_clients = 10;   // U
  bool full_batch = false;        // every local step uses the whole dataset
  std::size_t dataset_capacity = 0;  // 0 = keep everything
  CollectionMode collection = CollectionMode::every_round;

  void validate() const;
};

// Exploration state of one simulated UAV.
struct UavClient {
  std::size_t id = 0;
  Coord2 position;
  Coord2 waypoint;
  double flight_time_s = 0.0;
  ClientDataset dataset;
  Rng flight_rng{0};
};

// Starts a client at a uniformly drawn position with its own flight stream.
UavClient make_client(std::size_t id, const AreaBounds& area,
                      std::uint64_t flight_seed, std::size_t capacity = 0);

// Flies the client along its random-waypoint trajectory, labels each sample
// position with a fresh channel realization drawn from `rng`, appends the
// samples to the client's dataset and returns them.
std::vector<LabeledSample> collect_data(UavClient& client,
                                        const FlightPolicy& policy,
                                        const RadioScene& scene, Rng& rng);

// H local SGD steps from the broadcast parameters. Returns nothing when the
// dataset is empty (the client sits the round out).
std::optional<ParamVector> local_update(const ParamVector& global,
                                        std::span<const LabeledSample> dataset,
                                        std::size_t local_steps, double step_size,
                                        std::size_t batch_size, bool full_batch,
                                        Rng& rng);

struct ClientUpdate {
  ParamVector params;
  std::size_t num_samples = 0;
};

// Sample-count-weighted average of the client parameters.
ParamVector aggregate(std::span<const ClientUpdate> updates);

// Size-weighted mean of the per-client mean losses.
double global_loss(const ParamVector& theta,
                   std::span<const std::span<const LabeledSample>> datasets);

struct RoundMetrics {
  std::size_t round = 0;
  double global_loss = 0.0;
  std::size_t total_samples = 0;
  std::vector<std::size_t> client_samples;
};

struct TrainingResult {
  ParamVector params;
  std::vector<RoundMetrics> history;
};

// Runs the federated rounds: broadcast, collect, local update, aggregate.
// All randomness is derived from `master_seed`.
TrainingResult train(const TrainingConfig& config, const MlpArchitecture& arch,
                     const RadioScene& scene, const FlightPolicy& policy,
                     std::uint64_t master_seed);

// Same, starting from given parameters and client states.
TrainingResult train_from(const TrainingConfig& config, ParamVector initial,
                          std::vector<UavClient>& clients,
                          const RadioScene& scene, const FlightPolicy& policy,
                          std::uint64_t master_seed);

}  // namespace uavfl
