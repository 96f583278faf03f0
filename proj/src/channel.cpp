#include "uavfl/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace uavfl {

namespace {

double distance3(const Position& a, const Position& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("channel: ") + name +
                                " must be positive and finite");
  }
}

// Received mean power p_j / PL_j for each site.
std::vector<double> mean_rx_power(const Position& q,
                                  std::span<const GbsSite> sites,
                                  const ChannelParams& params) {
  if (sites.empty()) throw std::invalid_argument("channel: no GBS sites");
  std::vector<double> rx(sites.size());
  for (std::size_t j = 0; j < sites.size(); ++j) {
    rx[j] = sites[j].tx_power_mw / average_path_loss(q, sites[j].position, params);
  }
  return rx;
}

// Best SINR for one fading realization, given the mean received powers.
// `scratch` holds the per-site received powers after the call.
double best_sinr(std::span<const double> mean_rx, const ChannelParams& params,
                 Rng& rng, std::vector<double>& scratch) {
  scratch.resize(mean_rx.size());
  double total = 0.0;
  for (std::size_t j = 0; j < mean_rx.size(); ++j) {
    scratch[j] = mean_rx[j] * draw_fading(params.fading, rng);
    total += scratch[j];
  }
  // The strongest received signal also has the smallest interference.
  const double strongest = *std::max_element(scratch.begin(), scratch.end());
  double interference = 0.0;
  bool skipped = false;
  for (double s : scratch) {
    if (!skipped && s == strongest) {
      skipped = true;
      continue;
    }
    interference += s;
  }
  return strongest / (interference + params.noise_power_mw);
}

}  // namespace

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

void ChannelParams::validate() const {
  require_positive(carrier_freq_hz, "carrier_freq_hz");
  require_positive(eta_los, "eta_los");
  require_positive(eta_nlos, "eta_nlos");
  require_positive(los_a, "los_a");
  require_positive(los_b, "los_b");
  require_positive(noise_power_mw, "noise_power_mw");
  if (!(sinr_threshold >= 0.0)) {
    throw std::invalid_argument("channel: sinr_threshold must be non-negative");
  }
  require_positive(fading.scale, "fading.scale");
  if (eta_nlos < eta_los) {
    throw std::invalid_argument("channel: eta_nlos must be >= eta_los");
  }
}

double elevation_angle(const Position& uav, const Position& gbs) {
  const double horizontal = std::hypot(uav.x - gbs.x, uav.y - gbs.y);
  const double dz = std::abs(uav.z - gbs.z);
  if (horizontal == 0.0 && dz == 0.0) {
    throw std::invalid_argument("elevation_angle: coincident points");
  }
  return std::atan2(dz, horizontal) * 180.0 / std::numbers::pi;
}

double los_probability(double psi_deg, double a, double b) {
  if (!(psi_deg >= 0.0 && psi_deg <= 90.0)) {
    throw std::invalid_argument("los_probability: angle outside [0, 90]");
  }
  return 1.0 / (1.0 + a * std::exp(-b * (psi_deg - a)));
}

double free_space_factor(const Position& uav, const Position& gbs,
                         double carrier_freq_hz) {
  const double d = distance3(uav, gbs);
  if (d == 0.0) throw std::invalid_argument("free_space_factor: zero distance");
  const double r = 4.0 * std::numbers::pi * carrier_freq_hz * d / kLightSpeed;
  return r * r;
}

double average_path_loss(const Position& uav, const Position& gbs,
                         const ChannelParams& params) {
  const double gamma = free_space_factor(uav, gbs, params.carrier_freq_hz);
  if (!params.use_full_path_loss) return gamma * params.eta_los;
  const double xi =
      los_probability(elevation_angle(uav, gbs), params.los_a, params.los_b);
  return gamma * (params.eta_los * xi + params.eta_nlos * (1.0 - xi));
}

double channel_gain(const Position& uav, const Position& gbs,
                    const ChannelParams& params, double fading_draw) {
  if (!(fading_draw >= 0.0)) {
    throw std::invalid_argument("channel_gain: negative fading draw");
  }
  return fading_draw / average_path_loss(uav, gbs, params);
}

std::vector<double> sinr_vector(const Position& uav,
                                std::span<const GbsSite> sites,
                                const ChannelParams& params,
                                std::span<const double> fading_draws) {
  if (sites.empty()) throw std::invalid_argument("sinr_vector: no GBS sites");
  if (fading_draws.size() != sites.size()) {
    throw std::invalid_argument("sinr_vector: one fading draw per site required");
  }
  std::vector<double> received(sites.size());
  for (std::size_t j = 0; j < sites.size(); ++j) {
    received[j] = sites[j].tx_power_mw *
                  channel_gain(uav, sites[j].position, params, fading_draws[j]);
  }
  std::vector<double> sinr(sites.size());
  for (std::size_t j = 0; j < sites.size(); ++j) {
    double interference = 0.0;
    for (std::size_t k = 0; k < sites.size(); ++k) {
      if (k != j) interference += received[k];
    }
    sinr[j] = received[j] / (interference + params.noise_power_mw);
  }
  return sinr;
}

double draw_fading(const FadingModel& model, Rng& rng) {
  return rng.rayleigh(model.scale);
}

int sample_label(const Position& q, std::span<const GbsSite> sites,
                 const ChannelParams& params, Rng& rng) {
  const auto rx = mean_rx_power(q, sites, params);
  std::vector<double> scratch;
  return best_sinr(rx, params, rng, scratch) >= params.sinr_threshold ? 1 : 0;
}

double monte_carlo_outage(const Position& q, std::span<const GbsSite> sites,
                          const ChannelParams& params, std::size_t n_samples,
                          Rng& rng) {
  if (n_samples == 0) {
    throw std::invalid_argument("monte_carlo_outage: n_samples must be >= 1");
  }
  const auto rx = mean_rx_power(q, sites, params);
  std::vector<double> scratch;
  std::size_t outages = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    if (best_sinr(rx, params, rng, scratch) <= params.sinr_threshold) ++outages;
  }
  return static_cast<double>(outages) / static_cast<double>(n_samples);
}

}  // namespace uavfl
