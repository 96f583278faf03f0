#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "uavfl/geometry.hpp"
#include "uavfl/random.hpp"

namespace uavfl {

// Fully-connected ReLU network with a two-way softmax head. Class 0 is
// "outage", class 1 is "connected".
struct MlpArchitecture {
  std::vector<std::size_t> layer_sizes{2, 256, 256, 256, 2};

  void validate() const;
  std::size_t parameter_count() const;

  friend bool operator==(const MlpArchitecture&, const MlpArchitecture&) = default;
};

// Flat parameter vector. Per layer k: weights row-major
// [layer_sizes[k+1]][layer_sizes[k]], then biases [layer_sizes[k+1]].
struct ParamVector {
  MlpArchitecture arch;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }

  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

struct LabeledSample {
  Coord2 coord;  // normalized to the unit square
  int label = 0;  // 0 = outage, 1 = connected

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

// He-style fan-in initialization, zero biases.
ParamVector init_params(const MlpArchitecture& arch, Rng& rng);

// All-zero parameters of the right length.
ParamVector zero_params(const MlpArchitecture& arch);

// Class probabilities {p_outage, p_connected}. Throws on non-finite parameters.
std::array<double, 2> forward(const ParamVector& theta, const Coord2& coord);

// Class-0 (outage) probability.
double outage_probability(const ParamVector& theta, const Coord2& coord);

// Batched variant of outage_probability.
std::vector<double> outage_probabilities(const ParamVector& theta,
                                         std::span<const Coord2> coords);

// Mean cross-entropy over the batch, log arguments clamped at 1e-12.
double loss(const ParamVector& theta, std::span<const LabeledSample> batch);

// Exact gradient of `loss` by reverse-mode accumulation.
std::vector<double> gradient(const ParamVector& theta,
                             std::span<const LabeledSample> batch);

// Loss and gradient from one forward/backward sweep.
double loss_and_gradient(const ParamVector& theta,
                         std::span<const LabeledSample> batch,
                         std::vector<double>& grad);

ParamVector sgd_step(const ParamVector& theta, std::span<const double> grad,
                     double eta);

// Affine map of the area onto the unit square, and back.
Coord2 normalize_coord(const Coord2& q, const AreaBounds& bounds);
Coord2 denormalize_coord(const Coord2& unit, const AreaBounds& bounds);

}  // namespace uavfl
