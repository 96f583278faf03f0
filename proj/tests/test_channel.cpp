#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "uavfl/channel.hpp"

using namespace uavfl;

namespace {

// Free-space factor computed directly from the definition.
double gamma_ref(double d, double fc) {
  const double r = 4.0 * std::numbers::pi * fc * d / kLightSpeed;
  return r * r;
}

}  // namespace

TEST_CASE("elevation angle") {
  const Position gbs{0.0, 0.0, 0.0};
  CHECK(elevation_angle({0.0, 0.0, 100.0}, gbs) == doctest::Approx(90.0));
  CHECK(elevation_angle({1e-9, 0.0, 100.0}, gbs) == doctest::Approx(90.0));
  CHECK(elevation_angle({250.0, 0.0, 0.0}, gbs) == 0.0);
  CHECK(elevation_angle({100.0, 0.0, 100.0}, gbs) == doctest::Approx(45.0).epsilon(1e-12));
  CHECK_THROWS_AS(elevation_angle(gbs, gbs), std::invalid_argument);
}

TEST_CASE("line-of-sight probability") {
  CHECK(los_probability(5.0, 5.0, 0.5) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(std::abs(los_probability(90.0, 5.0, 0.5) - 1.0) < 1e-9);
  // 1 / (1 + 5 exp(-20)), evaluated by hand.
  CHECK(los_probability(45.0, 5.0, 0.5) == doctest::Approx(0.99999998969423209).epsilon(1e-15));
  CHECK_THROWS_AS(los_probability(-1.0, 5.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(los_probability(91.0, 5.0, 0.5), std::invalid_argument);

  SUBCASE("strictly increasing and inside (0, 1)") {
    for (double a : {0.5, 5.0, 9.6}) {
      for (double b : {0.05, 0.5, 0.28}) {
        double prev = 0.0;
        for (double psi = 0.0; psi <= 50.0; psi += 0.5) {
          const double p = los_probability(psi, a, b);
          CHECK(p > 0.0);
          CHECK(p < 1.0);
          CHECK(p > prev);
          prev = p;
        }
      }
    }
  }
}

TEST_CASE("free-space factor") {
  const Position gbs{0.0, 0.0, 0.0};
  const double fc = 2.0e9;
  const double unit = kLightSpeed / (4.0 * std::numbers::pi * fc);
  CHECK(free_space_factor({unit, 0.0, 0.0}, gbs, fc) == doctest::Approx(1.0).epsilon(1e-14));
  // (4 pi 2e9 1000 / 2.998e8)^2 = 98.468 dB
  const double g = free_space_factor({1000.0, 0.0, 0.0}, gbs, fc);
  CHECK(g == doctest::Approx(7027752565.1937733).epsilon(1e-13));
  CHECK(10.0 * std::log10(g) == doctest::Approx(98.468165).epsilon(1e-8));
  CHECK(free_space_factor({2000.0, 0.0, 0.0}, gbs, fc) == doctest::Approx(4.0 * g).epsilon(1e-14));
  CHECK_THROWS_AS(free_space_factor(gbs, gbs, fc), std::invalid_argument);
}

TEST_CASE("average path loss") {
  const Position gbs{0.0, 0.0, 0.0};
  ChannelParams params;
  const Position uav{100.0, 0.0, 100.0};
  const double gamma = free_space_factor(uav, gbs, params.carrier_freq_hz);

  CHECK(average_path_loss(uav, gbs, params) == gamma);

  SUBCASE("full mode collapses to simplified when LoS is certain") {
    ChannelParams full = params;
    full.use_full_path_loss = true;
    full.eta_nlos = full.eta_los;  // xi drops out entirely
    CHECK(average_path_loss(uav, gbs, full) == doctest::Approx(gamma).epsilon(1e-15));
  }

  SUBCASE("full mode at 45 degrees") {
    ChannelParams full = params;
    full.use_full_path_loss = true;
    CHECK(average_path_loss(uav, gbs, full) ==
          doctest::Approx(140555078.82590249).epsilon(1e-12));
    // Low elevation: xi = 0.824..., NLoS share matters.
    CHECK(average_path_loss({300.0, 400.0, 100.0}, gbs, full) ==
          doctest::Approx(7928157324.5651798).epsilon(1e-12));
  }

  SUBCASE("non-decreasing in distance in simplified mode") {
    double prev = 0.0;
    for (double x = 1.0; x < 20000.0; x *= 1.3) {
      const double pl = average_path_loss({x, 0.0, 100.0}, gbs, params);
      CHECK(pl >= prev);
      prev = pl;
    }
  }

  CHECK_THROWS_AS(average_path_loss(gbs, gbs, params), std::invalid_argument);
}

TEST_CASE("channel gain") {
  const Position gbs{0.0, 0.0, 0.0};
  const Position uav{500.0, 0.0, 100.0};
  ChannelParams params;
  const double pl = average_path_loss(uav, gbs, params);
  CHECK(channel_gain(uav, gbs, params, 0.0) == 0.0);
  CHECK(channel_gain(uav, gbs, params, pl) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(channel_gain(uav, gbs, params, -0.1), std::invalid_argument);

  // Fixed-seed regression of a Rayleigh draw.
  Rng a(42);
  Rng b(42);
  const double g1 = channel_gain(uav, gbs, params, draw_fading(params.fading, a));
  const double g2 = channel_gain(uav, gbs, params, draw_fading(params.fading, b));
  CHECK(g1 == g2);
  Rng c(42);
  const double draw = c.rayleigh(1.0);
  CHECK(g1 == doctest::Approx(draw / pl).epsilon(1e-15));
}

TEST_CASE("SINR vector") {
  ChannelParams params;
  params.noise_power_mw = 1e-9;
  const Position uav{0.0, 0.0, 100.0};

  SUBCASE("single site has no interference") {
    const std::vector<GbsSite> sites{{{300.0, 0.0, 0.0}, 200.0}};
    const std::vector<double> draws{0.7};
    const double h = channel_gain(uav, sites[0].position, params, 0.7);
    const auto sinr = sinr_vector(uav, sites, params, draws);
    REQUIRE(sinr.size() == 1);
    CHECK(sinr[0] == doctest::Approx(200.0 * h / 1e-9).epsilon(1e-14));
  }

  SUBCASE("two symmetric sites") {
    const std::vector<GbsSite> sites{{{300.0, 0.0, 0.0}, 200.0}, {{-300.0, 0.0, 0.0}, 200.0}};
    const std::vector<double> draws{1.0, 1.0};
    const double ph = 200.0 * channel_gain(uav, sites[0].position, params, 1.0);
    const auto sinr = sinr_vector(uav, sites, params, draws);
    CHECK(sinr[0] == doctest::Approx(ph / (ph + 1e-9)).epsilon(1e-14));
    CHECK(sinr[1] == doctest::Approx(sinr[0]).epsilon(1e-14));
  }

  SUBCASE("three sites against brute force") {
    const std::vector<GbsSite> sites{{{300.0, 0.0, 0.0}, 200.0},
                                     {{0.0, -400.0, 0.0}, 100.0},
                                     {{-250.0, 250.0, 0.0}, 400.0}};
    const std::vector<double> draws{0.5, 1.2, 2.0};
    const auto sinr = sinr_vector(uav, sites, params, draws);
    CHECK(sinr[0] == doctest::Approx(0.15062881433814451).epsilon(1e-12));
    CHECK(sinr[1] == doctest::Approx(0.10181552995675051).epsilon(1e-12));
    CHECK(sinr[2] == doctest::Approx(3.459566212421934).epsilon(1e-12));

    // Reordering the other sites leaves each entry unchanged.
    const std::vector<GbsSite> permuted{sites[0], sites[2], sites[1]};
    const std::vector<double> permuted_draws{draws[0], draws[2], draws[1]};
    const auto again = sinr_vector(uav, permuted, params, permuted_draws);
    CHECK(again[0] == doctest::Approx(sinr[0]).epsilon(1e-15));
    CHECK(again[1] == doctest::Approx(sinr[2]).epsilon(1e-15));
    CHECK(again[2] == doctest::Approx(sinr[1]).epsilon(1e-15));
  }

  CHECK_THROWS_AS(sinr_vector(uav, {}, params, {}), std::invalid_argument);
  const std::vector<GbsSite> one{{{300.0, 0.0, 0.0}, 200.0}};
  const std::vector<double> two{1.0, 1.0};
  CHECK_THROWS_AS(sinr_vector(uav, one, params, two), std::invalid_argument);
}

TEST_CASE("connectivity labels and Monte-Carlo outage") {
  ChannelParams params;
  const std::vector<GbsSite> sites{{{0.0, 0.0, 0.0}, 200.0},
                                   {{800.0, 0.0, 0.0}, 200.0},
                                   {{400.0, 700.0, 0.0}, 200.0}};
  const Position q{400.0, 230.0, 100.0};

  SUBCASE("threshold extremes") {
    Rng rng(1);
    ChannelParams zero = params;
    zero.sinr_threshold = 0.0;
    ChannelParams never = params;
    never.sinr_threshold = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000; ++i) {
      CHECK(sample_label(q, sites, zero, rng) == 1);
      CHECK(sample_label(q, sites, never, rng) == 0);
    }
    CHECK(monte_carlo_outage(q, sites, zero, 10000, rng) == 0.0);
  }

  SUBCASE("label mean matches one minus outage") {
    Rng a(7);
    Rng b(8);
    const std::size_t n = 1000000;
    std::size_t connected = 0;
    for (std::size_t i = 0; i < n; ++i) connected += sample_label(q, sites, params, a);
    const double mean = static_cast<double>(connected) / n;
    const double outage = monte_carlo_outage(q, sites, params, n, b);
    const double p = outage;
    REQUIRE(p > 0.05);
    REQUIRE(p < 0.95);
    // Two independent estimates of complementary quantities.
    const double tol = 4.0 * std::sqrt(2.0 * p * (1.0 - p) / n);
    CHECK(std::abs(mean - (1.0 - outage)) < tol);
  }

  SUBCASE("large transmit power drives single-site outage to zero") {
    ChannelParams noisy = params;
    noisy.noise_power_mw = 1e-3;
    const std::vector<GbsSite> lone{{{0.0, 0.0, 0.0}, 200.0}};
    const std::vector<GbsSite> loud{{{0.0, 0.0, 0.0}, 2e12}};
    Rng rng(3);
    const Position far{2000.0, 0.0, 100.0};
    CHECK(monte_carlo_outage(far, lone, noisy, 20000, rng) > 0.99);
    CHECK(monte_carlo_outage(far, loud, noisy, 20000, rng) < 1e-3);
  }

  SUBCASE("deterministic per seed") {
    Rng a(11);
    Rng b(11);
    CHECK(monte_carlo_outage(q, sites, params, 5000, a) ==
          monte_carlo_outage(q, sites, params, 5000, b));
  }

  Rng rng(0);
  CHECK_THROWS_AS(monte_carlo_outage(q, sites, params, 0, rng), std::invalid_argument);
}

TEST_CASE("single-site outage follows the Rayleigh CDF") {
  ChannelParams params;
  params.noise_power_mw = dbm_to_mw(-75.0);
  const std::vector<GbsSite> site{{{0.0, 0.0, 0.0}, 200.0}};
  const Position q{900.0, 500.0, 100.0};
  const double pl = average_path_loss(q, site[0].position, params);
  const double x = params.sinr_threshold * pl * params.noise_power_mw / 200.0;
  const double p = 1.0 - std::exp(-x * x / 2.0);
  Rng rng(2024);
  const std::size_t n = 200000;
  const double est = monte_carlo_outage(q, site, params, n, rng);
  CHECK(std::abs(est - p) <= 3.0 * std::sqrt(p * (1.0 - p) / n));
  CHECK(p > 0.1);
}

TEST_CASE("parameter validation") {
  ChannelParams p;
  CHECK_NOTHROW(p.validate());
  p.eta_nlos = 0.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ChannelParams{};
  p.noise_power_mw = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK(dbm_to_mw(-140.0) == doctest::Approx(1e-14).epsilon(1e-12));
  CHECK(mw_to_dbm(200.0) == doctest::Approx(23.0103).epsilon(1e-5));
}
