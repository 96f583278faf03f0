#include "uavfl/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace uavfl {

using nlohmann::json;

namespace {

// Strict view of one JSON object: every read key is recorded, and finish()
// rejects whatever is left over.
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string where) : node_(node), where_(std::move(where)) {
    if (!node_.is_object()) fail(where_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config " + (where.empty() ? std::string("/") : where) + ": " + what);
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  std::string path(const std::string& key) const { return where_ + "/" + key; }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(path(key), "expected a number");
      out = v->get<double>();
    }
  }

  void count(const std::string& key, std::size_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(path(key), "expected a non-negative integer");
      out = v->get<std::size_t>();
    }
  }

  void seed(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(path(key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void flag(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(path(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) fail(path(it.key()), "unknown key");
    }
  }

 private:
  const json& node_;
  std::string where_;
  std::set<std::string> seen_;
};

Coord2 read_point(const json& node, const std::string& where) {
  if (!node.is_array() || node.size() != 2 || !node[0].is_number() || !node[1].is_number()) {
    ObjectReader::fail(where, "expected [x, y]");
  }
  return {node[0].get<double>(), node[1].get<double>()};
}

void read_area(ObjectReader& r, const std::string& key, AreaBounds& area) {
  if (const json* v = r.find(key)) {
    ObjectReader a(*v, r.path(key));
    a.number("x_min", area.x_min);
    a.number("y_min", area.y_min);
    a.number("x_max", area.x_max);
    a.number("y_max", area.y_max);
    a.finish();
  }
}

json area_json(const AreaBounds& a) {
  return {{"x_min", a.x_min}, {"y_min", a.y_min}, {"x_max", a.x_max}, {"y_max", a.y_max}};
}

const char* collection_name(CollectionMode mode) {
  return mode == CollectionMode::every_round ? "every_round" : "first_round";
}

// Splits one CSV line on commas.
std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_real(const std::string& text, const std::string& origin, std::size_t line) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw FormatError(origin + ":" + std::to_string(line) + ": bad number '" + text + "'");
  }
  return value;
}

std::size_t parse_count(const std::string& text, const std::string& origin, std::size_t line) {
  std::size_t value = 0;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, value);
  if (ec != std::errc() || ptr != last) {
    throw FormatError(origin + ":" + std::to_string(line) + ": bad integer '" + text + "'");
  }
  return value;
}

// Rows of a CSV file with the expected header, as text fields.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               const std::string& header,
                                               std::size_t columns) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  const std::string origin = path.string();
  if (!std::getline(in, line) || line != header) {
    throw FormatError(origin + ":1: expected header '" + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != columns) {
      throw FormatError(origin + ":" + std::to_string(number) + ": expected " +
                        std::to_string(columns) + " fields");
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

ChannelParams ChannelConfig::params() const {
  ChannelParams p;
  p.carrier_freq_hz = carrier_freq_hz;
  p.eta_los = eta_los;
  p.eta_nlos = eta_nlos;
  p.los_a = los_a;
  p.los_b = los_b;
  p.noise_power_mw = dbm_to_mw(noise_power_dbm);
  p.sinr_threshold = sinr_threshold;
  p.use_full_path_loss = use_full_path_loss;
  p.fading.scale = fading_scale;
  return p;
}

RadioScene ScenarioConfig::scene() const {
  return RadioScene{gbs_sites, channel.params(), area, uav_altitude};
}

PlannerConfig ScenarioConfig::planner_config(double p0) const {
  PlannerConfig pc;
  pc.max_iterations = planner.max_iterations;
  pc.step_radius = connectivity.step_radius();
  pc.outage_threshold = p0;
  pc.goal_bias = planner.goal_bias;
  pc.goal_tolerance = planner.goal_tolerance;
  pc.v_max = connectivity.v_max;
  pc.bounds = area;
  return pc;
}

void ScenarioConfig::validate() const {
  auto positive = [](double v, const char* where) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("config ") + where + ": must be positive");
    }
  };
  if (!(area.width() > 0.0 && area.height() > 0.0)) {
    throw ConfigError("config /area: empty rectangle");
  }
  if (!(uav_altitude >= 0.0)) throw ConfigError("config /uav_altitude: must be >= 0");
  if (gbs_sites.empty()) throw ConfigError("config /gbs_sites: need at least one site");
  for (std::size_t j = 0; j < gbs_sites.size(); ++j) {
    const auto where = "/gbs_sites/" + std::to_string(j);
    if (!(gbs_sites[j].tx_power_mw > 0.0)) {
      throw ConfigError("config " + where + "/tx_power_mw: must be positive");
    }
    if (!(gbs_sites[j].position.z >= 0.0)) {
      throw ConfigError("config " + where + "/z: must be >= 0");
    }
  }
  try {
    channel.params().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config /channel: ") + e.what());
  }
  positive(connectivity.delta_s, "/connectivity/delta_s");
  positive(connectivity.v_max, "/connectivity/v_max");
  if (!(connectivity.outage_threshold >= 0.0 && connectivity.outage_threshold <= 1.0)) {
    throw ConfigError("config /connectivity/outage_threshold: must lie in [0, 1]");
  }
  positive(training.step_size, "/training/step_size");
  if (training.batch_size == 0) throw ConfigError("config /training/batch_size: must be positive");
  if (training.num_clients == 0) throw ConfigError("config /training/num_clients: must be positive");
  positive(flight.speed_mps, "/flight/speed_mps");
  positive(flight.sample_spacing_m, "/flight/sample_spacing_m");
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config /model/layer_sizes: ") + e.what());
  }
  if (!(planner.goal_bias >= 0.0 && planner.goal_bias < 1.0)) {
    throw ConfigError("config /planner/goal_bias: must lie in [0, 1)");
  }
  if (planner.goal_tolerance > connectivity.step_radius()) {
    throw ConfigError("config /planner/goal_tolerance: exceeds delta_s * v_max");
  }
  for (double p0 : p0_sweep) {
    if (!(p0 >= 0.0 && p0 <= 1.0)) throw ConfigError("config /p0_sweep: values must lie in [0, 1]");
  }
  for (std::size_t i = 0; i < plans.size(); ++i) {
    if (!area.contains(plans[i].start) || !area.contains(plans[i].goal)) {
      throw ConfigError("config /plans/" + std::to_string(i) + ": endpoint outside area");
    }
  }
  if (map.resolution < 2) throw ConfigError("config /map/resolution: must be >= 2");
  if (map.n_mc == 0) throw ConfigError("config /map/n_mc: must be positive");
}

ScenarioConfig default_config() {
  ScenarioConfig c;
  // Illustrative layout: an asymmetric cluster leaves the north-east sparsely
  // covered, so both covered and outage regions appear.
  c.gbs_sites = {
      {{1500.0, 2000.0, 0.0}, 200.0}, {{4500.0, 1200.0, 0.0}, 200.0},
      {{2500.0, 5500.0, 0.0}, 200.0}, {{7500.0, 3500.0, 0.0}, 200.0},
      {{5500.0, 8000.0, 0.0}, 200.0},
  };
  c.plans = {{{1500.0, 2000.0}, {7500.0, 3500.0}}, {{2500.0, 5500.0}, {5500.0, 8000.0}}};
  c.planner.max_iterations = 20000;
  return c;
}

ScenarioConfig desk_config() {
  ScenarioConfig c;
  c.area = {0.0, 0.0, 2000.0, 2000.0};
  c.gbs_sites = {
      {{400.0, 500.0, 0.0}, 200.0},
      {{1500.0, 350.0, 0.0}, 200.0},
      {{600.0, 1550.0, 0.0}, 200.0},
      {{1600.0, 1300.0, 0.0}, 200.0},
  };
  c.training.rounds = 50;
  c.training.num_clients = 5;
  c.training.local_steps = 10;
  c.training.batch_size = 500;
  c.training.step_size = 0.3;
  c.flight.samples_per_round = 40;
  c.model.layer_sizes = {2, 64, 64, 2};
  c.plans = {{{400.0, 500.0}, {1600.0, 1300.0}}};
  c.map.resolution = 50;
  c.map.n_mc = 1000;
  return c;
}

ScenarioConfig desk_ring_config() {
  ScenarioConfig c = desk_config();
  c.gbs_sites.clear();
  const double ring[12][2] = {{150, 150},   {700, 100},   {1300, 120},  {1850, 200},
                              {100, 800},   {1900, 700},  {120, 1400},  {1880, 1350},
                              {200, 1850},  {800, 1900},  {1350, 1880}, {1800, 1800}};
  for (const auto& xy : ring) c.gbs_sites.push_back({{xy[0], xy[1], 0.0}, 200.0});
  c.training.num_clients = 10;
  c.training.rounds = 100;
  c.plans = {{{200.0, 1850.0}, {1850.0, 150.0}}, {{1000.0, 60.0}, {1000.0, 1940.0}}};
  c.planner.max_iterations = 20000;
  return c;
}

json to_json(const ScenarioConfig& c) {
  json sites = json::array();
  for (const auto& s : c.gbs_sites) {
    sites.push_back({{"x", s.position.x}, {"y", s.position.y}, {"z", s.position.z},
                     {"tx_power_mw", s.tx_power_mw}});
  }
  json plans = json::array();
  for (const auto& p : c.plans) {
    plans.push_back({{"start", {p.start.x, p.start.y}}, {"goal", {p.goal.x, p.goal.y}}});
  }
  return {
      {"area", area_json(c.area)},
      {"uav_altitude", c.uav_altitude},
      {"gbs_sites", sites},
      {"channel",
       {{"carrier_freq_hz", c.channel.carrier_freq_hz},
        {"eta_los", c.channel.eta_los},
        {"eta_nlos", c.channel.eta_nlos},
        {"los_a", c.channel.los_a},
        {"los_b", c.channel.los_b},
        {"noise_power_dbm", c.channel.noise_power_dbm},
        {"sinr_threshold", c.channel.sinr_threshold},
        {"use_full_path_loss", c.channel.use_full_path_loss},
        {"fading_scale", c.channel.fading_scale}}},
      {"connectivity",
       {{"outage_threshold", c.connectivity.outage_threshold},
        {"delta_s", c.connectivity.delta_s},
        {"v_max", c.connectivity.v_max}}},
      {"training",
       {{"rounds", c.training.rounds},
        {"local_steps", c.training.local_steps},
        {"step_size", c.training.step_size},
        {"batch_size", c.training.batch_size},
        {"num_clients", c.training.num_clients},
        {"full_batch", c.training.full_batch},
        {"dataset_capacity", c.training.dataset_capacity},
        {"collection", collection_name(c.training.collection)}}},
      {"flight",
       {{"samples_per_round", c.flight.samples_per_round},
        {"speed_mps", c.flight.speed_mps},
        {"sample_spacing_m", c.flight.sample_spacing_m}}},
      {"model", {{"layer_sizes", c.model.layer_sizes}}},
      {"planner",
       {{"max_iterations", c.planner.max_iterations},
        {"goal_bias", c.planner.goal_bias},
        {"goal_tolerance", c.planner.goal_tolerance}}},
      {"plans", plans},
      {"p0_sweep", c.p0_sweep},
      {"map", {{"resolution", c.map.resolution}, {"n_mc", c.map.n_mc}}},
      {"master_seed", c.master_seed},
  };
}

ScenarioConfig config_from_json(const json& doc) {
  ScenarioConfig c = default_config();
  ObjectReader root(doc, "");
  read_area(root, "area", c.area);
  root.number("uav_altitude", c.uav_altitude);

  if (const json* v = root.find("gbs_sites")) {
    if (!v->is_array()) ObjectReader::fail("/gbs_sites", "expected an array");
    c.gbs_sites.clear();
    for (std::size_t j = 0; j < v->size(); ++j) {
      ObjectReader s((*v)[j], "/gbs_sites/" + std::to_string(j));
      GbsSite site;
      s.number("x", site.position.x);
      s.number("y", site.position.y);
      s.number("z", site.position.z);
      s.number("tx_power_mw", site.tx_power_mw);
      s.finish();
      c.gbs_sites.push_back(site);
    }
  }

  if (const json* v = root.find("channel")) {
    ObjectReader ch(*v, "/channel");
    ch.number("carrier_freq_hz", c.channel.carrier_freq_hz);
    ch.number("eta_los", c.channel.eta_los);
    ch.number("eta_nlos", c.channel.eta_nlos);
    ch.number("los_a", c.channel.los_a);
    ch.number("los_b", c.channel.los_b);
    ch.number("noise_power_dbm", c.channel.noise_power_dbm);
    ch.number("sinr_threshold", c.channel.sinr_threshold);
    ch.flag("use_full_path_loss", c.channel.use_full_path_loss);
    ch.number("fading_scale", c.channel.fading_scale);
    ch.finish();
  }

  if (const json* v = root.find("connectivity")) {
    ObjectReader cn(*v, "/connectivity");
    cn.number("outage_threshold", c.connectivity.outage_threshold);
    cn.number("delta_s", c.connectivity.delta_s);
    cn.number("v_max", c.connectivity.v_max);
    cn.finish();
  }

  if (const json* v = root.find("training")) {
    ObjectReader t(*v, "/training");
    t.count("rounds", c.training.rounds);
    t.count("local_steps", c.training.local_steps);
    t.number("step_size", c.training.step_size);
    t.count("batch_size", c.training.batch_size);
    t.count("num_clients", c.training.num_clients);
    t.flag("full_batch", c.training.full_batch);
    t.count("dataset_capacity", c.training.dataset_capacity);
    if (const json* mode = t.find("collection")) {
      if (*mode == "every_round") {
        c.training.collection = CollectionMode::every_round;
      } else if (*mode == "first_round") {
        c.training.collection = CollectionMode::first_round;
      } else {
        ObjectReader::fail("/training/collection", "expected \"every_round\" or \"first_round\"");
      }
    }
    t.finish();
  }

  if (const json* v = root.find("flight")) {
    ObjectReader f(*v, "/flight");
    f.count("samples_per_round", c.flight.samples_per_round);
    f.number("speed_mps", c.flight.speed_mps);
    f.number("sample_spacing_m", c.flight.sample_spacing_m);
    f.finish();
  }

  if (const json* v = root.find("model")) {
    ObjectReader m(*v, "/model");
    if (const json* sizes = m.find("layer_sizes")) {
      if (!sizes->is_array()) ObjectReader::fail("/model/layer_sizes", "expected an array");
      c.model.layer_sizes.clear();
      for (std::size_t k = 0; k < sizes->size(); ++k) {
        if (!(*sizes)[k].is_number_unsigned()) {
          ObjectReader::fail("/model/layer_sizes/" + std::to_string(k),
                             "expected a positive integer");
        }
        c.model.layer_sizes.push_back((*sizes)[k].get<std::size_t>());
      }
    }
    m.finish();
  }

  if (const json* v = root.find("planner")) {
    ObjectReader p(*v, "/planner");
    p.count("max_iterations", c.planner.max_iterations);
    p.number("goal_bias", c.planner.goal_bias);
    p.number("goal_tolerance", c.planner.goal_tolerance);
    p.finish();
  }

  if (const json* v = root.find("plans")) {
    if (!v->is_array()) ObjectReader::fail("/plans", "expected an array");
    c.plans.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string where = "/plans/" + std::to_string(i);
      ObjectReader p((*v)[i], where);
      PlanRequest req;
      if (const json* s = p.find("start")) req.start = read_point(*s, where + "/start");
      else ObjectReader::fail(where, "missing start");
      if (const json* g = p.find("goal")) req.goal = read_point(*g, where + "/goal");
      else ObjectReader::fail(where, "missing goal");
      p.finish();
      c.plans.push_back(req);
    }
  }

  if (const json* v = root.find("p0_sweep")) {
    if (!v->is_array()) ObjectReader::fail("/p0_sweep", "expected an array");
    c.p0_sweep.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number()) {
        ObjectReader::fail("/p0_sweep/" + std::to_string(i), "expected a number");
      }
      c.p0_sweep.push_back((*v)[i].get<double>());
    }
  }

  if (const json* v = root.find("map")) {
    ObjectReader m(*v, "/map");
    m.count("resolution", c.map.resolution);
    m.count("n_mc", c.map.n_mc);
    m.finish();
  }

  root.seed("master_seed", c.master_seed);
  root.finish();
  c.validate();
  return c;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

json parse_document(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(origin + ": parse error at byte " + std::to_string(e.byte) + ": " +
                      e.what());
  }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  return config_from_json(parse_document(read_file(path), path.string()));
}

void save_config(const std::filesystem::path& path, const ScenarioConfig& config) {
  write_file(path, to_json(config).dump(2) + "\n");
}

std::vector<Coord2> cell_centers(const AreaBounds& area, std::size_t resolution) {
  std::vector<Coord2> centers;
  centers.reserve(resolution * resolution);
  const double w = area.width() / static_cast<double>(resolution);
  const double h = area.height() / static_cast<double>(resolution);
  for (std::size_t row = 0; row < resolution; ++row) {
    for (std::size_t col = 0; col < resolution; ++col) {
      centers.push_back({area.x_min + (static_cast<double>(col) + 0.5) * w,
                         area.y_min + (static_cast<double>(row) + 0.5) * h});
    }
  }
  return centers;
}

RadioMapGrid evaluate_model_map(const ParamVector& theta, const AreaBounds& area,
                                std::size_t resolution) {
  if (resolution < 2) throw std::invalid_argument("evaluate_map: resolution must be >= 2");
  const auto centers = cell_centers(area, resolution);
  std::vector<Coord2> unit;
  unit.reserve(centers.size());
  for (const auto& c : centers) unit.push_back(normalize_coord(c, area));
  const auto values = outage_probabilities(theta, unit);

  RadioMapGrid grid{resolution, MapProvenance::model, {}};
  for (std::size_t i = 0; i < centers.size(); ++i) {
    grid.cells.push_back({centers[i].x, centers[i].y, values[i]});
  }
  return grid;
}

RadioMapGrid evaluate_truth_map(const RadioScene& scene, std::size_t resolution,
                                std::size_t n_mc, std::uint64_t seed) {
  if (resolution < 2) throw std::invalid_argument("evaluate_map: resolution must be >= 2");
  const auto centers = cell_centers(scene.area, resolution);
  RadioMapGrid grid{resolution, MapProvenance::monte_carlo, {}};
  for (std::size_t i = 0; i < centers.size(); ++i) {
    Rng rng(derive_stream(seed, "truth", i));
    const double p =
        monte_carlo_outage(scene.at(centers[i]), scene.sites, scene.params, n_mc, rng);
    grid.cells.push_back({centers[i].x, centers[i].y, p});
  }
  return grid;
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
  const json doc = {
      {"format", "uavfl-model"},
      {"version", 1},
      {"layer_sizes", model.params.arch.layer_sizes},
      {"bounds", area_json(model.bounds)},
      {"params", model.params.values},
  };
  write_file(path, doc.dump() + "\n");
}

ModelFile load_model(const std::filesystem::path& path) {
  const json doc = parse_document(read_file(path), path.string());
  try {
    if (doc.at("format") != "uavfl-model" || doc.at("version") != 1) {
      throw FormatError(path.string() + ": not a version 1 model file");
    }
    ModelFile model;
    model.params.arch.layer_sizes = doc.at("layer_sizes").get<std::vector<std::size_t>>();
    model.params.arch.validate();
    const json& b = doc.at("bounds");
    model.bounds = {b.at("x_min").get<double>(), b.at("y_min").get<double>(),
                    b.at("x_max").get<double>(), b.at("y_max").get<double>()};
    model.params.values = doc.at("params").get<std::vector<double>>();
    if (model.params.values.size() != model.params.arch.parameter_count()) {
      throw FormatError(path.string() + ": parameter count does not match layer sizes");
    }
    return model;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_grid(const std::filesystem::path& path, const RadioMapGrid& grid) {
  std::string text = "x,y,outage\n";
  for (const auto& c : grid.cells) {
    text += format_double(c.x) + "," + format_double(c.y) + "," + format_double(c.outage) + "\n";
  }
  write_file(path, text);
}

RadioMapGrid load_grid(const std::filesystem::path& path, MapProvenance provenance) {
  const auto rows = read_csv(path, "x,y,outage", 3);
  const auto origin = path.string();
  RadioMapGrid grid;
  grid.provenance = provenance;
  std::size_t line = 1;
  for (const auto& r : rows) {
    ++line;
    grid.cells.push_back({parse_real(r[0], origin, line), parse_real(r[1], origin, line),
                          parse_real(r[2], origin, line)});
  }
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(rows.size()))));
  if (n * n != rows.size() || n < 2) {
    throw FormatError(origin + ": row count is not a square grid");
  }
  grid.resolution = n;
  return grid;
}

void save_metrics(const std::filesystem::path& path,
                  const std::vector<RoundMetrics>& history) {
  std::string text = "round,global_loss,total_samples\n";
  for (const auto& m : history) {
    text += std::to_string(m.round) + "," + format_double(m.global_loss) + "," +
            std::to_string(m.total_samples) + "\n";
  }
  write_file(path, text);
}

std::vector<RoundMetrics> load_metrics(const std::filesystem::path& path) {
  const auto rows = read_csv(path, "round,global_loss,total_samples", 3);
  const auto origin = path.string();
  std::vector<RoundMetrics> history;
  std::size_t line = 1;
  for (const auto& r : rows) {
    ++line;
    RoundMetrics m;
    m.round = parse_count(r[0], origin, line);
    m.global_loss = parse_real(r[1], origin, line);
    m.total_samples = parse_count(r[2], origin, line);
    history.push_back(std::move(m));
  }
  return history;
}

void save_path(const std::filesystem::path& path, const Path& route,
               const std::vector<double>& model_outage) {
  if (model_outage.size() != route.waypoints.size()) {
    throw std::invalid_argument("save_path: one outage value per waypoint required");
  }
  std::string text = "n,x,y,cum_length_m,model_outage\n";
  double cum = 0.0;
  for (std::size_t n = 0; n < route.waypoints.size(); ++n) {
    if (n > 0) cum += distance(route.waypoints[n - 1], route.waypoints[n]);
    const auto& q = route.waypoints[n];
    text += std::to_string(n) + "," + format_double(q.x) + "," + format_double(q.y) + "," +
            format_double(cum) + "," + format_double(model_outage[n]) + "\n";
  }
  write_file(path, text);
}

Path load_path(const std::filesystem::path& path, double v_max) {
  const auto rows = read_csv(path, "n,x,y,cum_length_m,model_outage", 5);
  const auto origin = path.string();
  std::vector<Coord2> waypoints;
  std::size_t line = 1;
  for (const auto& r : rows) {
    ++line;
    if (parse_count(r[0], origin, line) != waypoints.size()) {
      throw FormatError(origin + ":" + std::to_string(line) + ": waypoint index out of order");
    }
    waypoints.push_back({parse_real(r[1], origin, line), parse_real(r[2], origin, line)});
    parse_real(r[3], origin, line);
    parse_real(r[4], origin, line);
  }
  if (waypoints.empty()) throw FormatError(origin + ": path has no waypoints");
  return make_path(std::move(waypoints), v_max);
}

}  // namespace uavfl
