#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavfl/channel.hpp"
#include "uavfl/fedmap.hpp"
#include "uavfl/neuralnet.hpp"
#include "uavfl/planner.hpp"

namespace uavfl {

// Schema violation in a config document; the message names the JSON pointer
// of the offending value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or corrupt artifact file; the message carries a byte offset or
// line number.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Channel settings as written in a config file (noise in dBm).
struct ChannelConfig {
  double carrier_freq_hz = 2.0e9;
  double eta_los = 1.0;
  double eta_nlos = 20.0;
  double los_a = 5.0;
  double los_b = 0.5;
  double noise_power_dbm = -140.0;
  double sinr_threshold = 0.65;
  bool use_full_path_loss = false;
  double fading_scale = 1.0;

  ChannelParams params() const;

  friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

struct ConnectivityConfig {
  double outage_threshold = 0.3;  // P0
  double delta_s = 5.0;           // longest tolerated disconnection
  double v_max = 5.0;             // m/s

  double step_radius() const { return delta_s * v_max; }

  friend bool operator==(const ConnectivityConfig&, const ConnectivityConfig&) = default;
};

struct PlannerSettings {
  std::size_t max_iterations = 5000;
  double goal_bias = 0.05;
  double goal_tolerance = 0.0;  // <= 0 means the step radius

  friend bool operator==(const PlannerSettings&, const PlannerSettings&) = default;
};

struct PlanRequest {
  Coord2 start;
  Coord2 goal;

  friend bool operator==(const PlanRequest&, const PlanRequest&) = default;
};

struct MapSettings {
  std::size_t resolution = 50;
  std::size_t n_mc = 2000;

  friend bool operator==(const MapSettings&, const MapSettings&) = default;
};

struct ScenarioConfig {
  AreaBounds area;
  double uav_altitude = 100.0;
  std::vector<GbsSite> gbs_sites;
  ChannelConfig channel;
  ConnectivityConfig connectivity;
  TrainingConfig training;
  FlightPolicy flight;
  MlpArchitecture model;
  PlannerSettings planner;
  std::vector<PlanRequest> plans;
  std::vector<double> p0_sweep{0.05, 0.30, 0.40};
  MapSettings map;
  std::uint64_t master_seed = 1;

  RadioScene scene() const;
  PlannerConfig planner_config(double p0) const;
  PlannerConfig planner_config() const {
    return planner_config(connectivity.outage_threshold);
  }

  // Throws ConfigError on physically meaningless values.
  void validate() const;
};

// Full-size scenario with the published simulation parameters and an
// illustrative GBS layout.
ScenarioConfig default_config();

// Scaled-down scenario (2 km square, 4 GBSs) that trains in seconds.
ScenarioConfig desk_config();

// 2 km square ringed by 12 GBSs. Interference from the ring leaves a large
// central outage zone, so the learned map has structure worth planning around.
ScenarioConfig desk_ring_config();

nlohmann::json to_json(const ScenarioConfig& config);

// Keys missing from the document keep their defaults; unknown keys and
// wrongly typed values throw ConfigError.
ScenarioConfig config_from_json(const nlohmann::json& doc);

ScenarioConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ScenarioConfig& config);

// Parses text; syntax errors throw FormatError with the byte offset.
nlohmann::json parse_document(const std::string& text, const std::string& origin);

enum class MapProvenance { model, monte_carlo };

struct GridCell {
  double x = 0.0;
  double y = 0.0;
  double outage = 0.0;

  friend bool operator==(const GridCell&, const GridCell&) = default;
};

// Outage probabilities at cell centers, row-major (rows along y).
struct RadioMapGrid {
  std::size_t resolution = 0;
  MapProvenance provenance = MapProvenance::model;
  std::vector<GridCell> cells;

  const GridCell& at(std::size_t row, std::size_t col) const {
    return cells[row * resolution + col];
  }
};

std::vector<Coord2> cell_centers(const AreaBounds& area, std::size_t resolution);

RadioMapGrid evaluate_model_map(const ParamVector& theta, const AreaBounds& area,
                                std::size_t resolution);

// Each cell uses its own stream derived from `seed`, so the result does not
// depend on evaluation order.
RadioMapGrid evaluate_truth_map(const RadioScene& scene, std::size_t resolution,
                                std::size_t n_mc, std::uint64_t seed);

struct ModelFile {
  ParamVector params;
  AreaBounds bounds;
};

void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

void save_grid(const std::filesystem::path& path, const RadioMapGrid& grid);
RadioMapGrid load_grid(const std::filesystem::path& path, MapProvenance provenance);

void save_metrics(const std::filesystem::path& path,
                  const std::vector<RoundMetrics>& history);
std::vector<RoundMetrics> load_metrics(const std::filesystem::path& path);

void save_path(const std::filesystem::path& path, const Path& route,
               const std::vector<double>& model_outage);
Path load_path(const std::filesystem::path& path, double v_max);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace uavfl
