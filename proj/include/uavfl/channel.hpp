#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uavfl/geometry.hpp"
#include "uavfl/random.hpp"

namespace uavfl {

inline constexpr double kLightSpeed = 2.998e8;  // m/s

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;  // altitude

  friend bool operator==(const Position&, const Position&) = default;
};

struct GbsSite {
  Position position;
  double tx_power_mw = 200.0;

  friend bool operator==(const GbsSite&, const GbsSite&) = default;
};

enum class FadingKind { rayleigh };

struct FadingModel {
  FadingKind kind = FadingKind::rayleigh;
  double scale = 1.0;

  friend bool operator==(const FadingModel&, const FadingModel&) = default;
};

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

struct ChannelParams {
  double carrier_freq_hz = 2.0e9;
  double eta_los = 1.0;
  double eta_nlos = 20.0;
  double los_a = 5.0;
  double los_b = 0.5;
  double noise_power_mw = 1.0e-14;  // -140 dBm
  double sinr_threshold = 0.65;     // linear
  bool use_full_path_loss = false;
  FadingModel fading;

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;

  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

// Transmitters plus propagation constants, with the fixed UAV flight altitude
// used to lift 2D coordinates into 3D positions.
struct RadioScene {
  std::vector<GbsSite> sites;
  ChannelParams params;
  AreaBounds area;
  double uav_altitude_m = 100.0;

  Position at(const Coord2& q) const { return {q.x, q.y, uav_altitude_m}; }
};

// Elevation angle in degrees, in [0, 90]. Throws on coincident points.
double elevation_angle(const Position& uav, const Position& gbs);

// Sigmoid line-of-sight probability for an elevation angle psi in degrees.
double los_probability(double psi_deg, double a, double b);

// (4 pi f_c d / c)^2. Throws when the distance is zero.
double free_space_factor(const Position& uav, const Position& gbs,
                         double carrier_freq_hz);

// Linear average path loss. Simplified mode returns Gamma * eta_los; the full
// mode mixes LoS and NLoS losses with the elevation-dependent LoS probability.
double average_path_loss(const Position& uav, const Position& gbs,
                         const ChannelParams& params);

double channel_gain(const Position& uav, const Position& gbs,
                    const ChannelParams& params, double fading_draw);

// Per-site SINR, each site treating every other site as interference.
std::vector<double> sinr_vector(const Position& uav,
                                std::span<const GbsSite> sites,
                                const ChannelParams& params,
                                std::span<const double> fading_draws);

double draw_fading(const FadingModel& model, Rng& rng);

// Draws fresh fading for every site. Returns 1 when the best SINR reaches the
// threshold, 0 otherwise.
int sample_label(const Position& q, std::span<const GbsSite> sites,
                 const ChannelParams& params, Rng& rng);

// Fraction of n_samples independent fading realizations in which the best
// SINR does not exceed the threshold.
double monte_carlo_outage(const Position& q, std::span<const GbsSite> sites,
                          const ChannelParams& params, std::size_t n_samples,
                          Rng& rng);

}  // namespace uavfl
