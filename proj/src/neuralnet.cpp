#include "uavfl/neuralnet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace uavfl {

namespace {

using Matrix = Eigen::MatrixXd;
using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstWeights = Eigen::Map<const RowMajorMatrix>;
using ConstBias = Eigen::Map<const Eigen::VectorXd>;
using Weights = Eigen::Map<RowMajorMatrix>;
using Bias = Eigen::Map<Eigen::VectorXd>;

constexpr double kLogClamp = 1e-12;

void check_params(const ParamVector& theta) {
  if (theta.values.size() != theta.arch.parameter_count()) {
    throw std::invalid_argument("neuralnet: parameter count does not match architecture");
  }
  for (double v : theta.values) {
    if (!std::isfinite(v)) {
      throw std::domain_error("neuralnet: non-finite parameter");
    }
  }
}

// Activations of every layer for a batch laid out one sample per column.
// acts[0] is the input, acts.back() the softmax output; pre[k] are the
// pre-activations of layer k+1.
struct ForwardTrace {
  std::vector<Matrix> acts;
  std::vector<Matrix> pre;
};

template <typename CoordAt>
ForwardTrace run_forward(const ParamVector& theta, std::size_t batch,
                         CoordAt coord_at) {
  const auto& sizes = theta.arch.layer_sizes;
  const std::size_t layers = sizes.size() - 1;
  ForwardTrace trace;
  trace.acts.reserve(layers + 1);
  trace.pre.reserve(layers);

  Matrix input(2, static_cast<Eigen::Index>(batch));
  for (std::size_t i = 0; i < batch; ++i) {
    const Coord2 c = coord_at(i);
    input(0, static_cast<Eigen::Index>(i)) = c.x;
    input(1, static_cast<Eigen::Index>(i)) = c.y;
  }
  trace.acts.push_back(std::move(input));

  const double* p = theta.values.data();
  for (std::size_t k = 0; k < layers; ++k) {
    const auto in = static_cast<Eigen::Index>(sizes[k]);
    const auto out = static_cast<Eigen::Index>(sizes[k + 1]);
    ConstWeights w(p, out, in);
    p += out * in;
    ConstBias b(p, out);
    p += out;

    Matrix z = w * trace.acts.back();
    z.colwise() += b;
    Matrix a;
    if (k + 1 < layers) {
      a = z.cwiseMax(0.0);
    } else {
      // Column-wise softmax, shifted by the column max.
      a = z;
      for (Eigen::Index c = 0; c < a.cols(); ++c) {
        auto col = a.col(c);
        col.array() -= col.maxCoeff();
        col = col.array().exp().matrix();
        col /= col.sum();
      }
    }
    trace.pre.push_back(std::move(z));
    trace.acts.push_back(std::move(a));
  }
  return trace;
}

double batch_loss(const Matrix& probs, std::span<const LabeledSample> batch) {
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double p = probs(batch[i].label, static_cast<Eigen::Index>(i));
    total -= std::log(std::max(p, kLogClamp));
  }
  return total / static_cast<double>(batch.size());
}

void check_batch(std::span<const LabeledSample> batch) {
  if (batch.empty()) throw std::invalid_argument("neuralnet: empty batch");
  for (const auto& s : batch) {
    if (s.label != 0 && s.label != 1) {
      throw std::invalid_argument("neuralnet: label must be 0 or 1");
    }
  }
}

}  // namespace

void MlpArchitecture::validate() const {
  if (layer_sizes.size() < 3) {
    throw std::invalid_argument("mlp: need input, output and at least one hidden layer");
  }
  if (layer_sizes.front() != 2) throw std::invalid_argument("mlp: input size must be 2");
  if (layer_sizes.back() != 2) throw std::invalid_argument("mlp: output size must be 2");
  for (std::size_t n : layer_sizes) {
    if (n == 0) throw std::invalid_argument("mlp: layer sizes must be positive");
  }
}

std::size_t MlpArchitecture::parameter_count() const {
  std::size_t count = 0;
  for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
    count += layer_sizes[k] * layer_sizes[k + 1] + layer_sizes[k + 1];
  }
  return count;
}

ParamVector init_params(const MlpArchitecture& arch, Rng& rng) {
  arch.validate();
  ParamVector theta{arch, std::vector<double>(arch.parameter_count(), 0.0)};
  double* p = theta.values.data();
  for (std::size_t k = 0; k + 1 < arch.layer_sizes.size(); ++k) {
    const std::size_t in = arch.layer_sizes[k];
    const std::size_t out = arch.layer_sizes[k + 1];
    const double stddev = std::sqrt(2.0 / static_cast<double>(in));
    for (std::size_t i = 0; i < in * out; ++i) *p++ = stddev * rng.normal();
    p += out;  // biases stay zero
  }
  return theta;
}

ParamVector zero_params(const MlpArchitecture& arch) {
  arch.validate();
  return ParamVector{arch, std::vector<double>(arch.parameter_count(), 0.0)};
}

std::array<double, 2> forward(const ParamVector& theta, const Coord2& coord) {
  check_params(theta);
  const auto trace = run_forward(theta, 1, [&](std::size_t) { return coord; });
  const Matrix& out = trace.acts.back();
  return {out(0, 0), out(1, 0)};
}

double outage_probability(const ParamVector& theta, const Coord2& coord) {
  return forward(theta, coord)[0];
}

std::vector<double> outage_probabilities(const ParamVector& theta,
                                         std::span<const Coord2> coords) {
  check_params(theta);
  std::vector<double> result(coords.size());
  if (coords.empty()) return result;
  const auto trace =
      run_forward(theta, coords.size(), [&](std::size_t i) { return coords[i]; });
  const Matrix& out = trace.acts.back();
  for (std::size_t i = 0; i < coords.size(); ++i) {
    result[i] = out(0, static_cast<Eigen::Index>(i));
  }
  return result;
}

double loss(const ParamVector& theta, std::span<const LabeledSample> batch) {
  check_batch(batch);
  check_params(theta);
  const auto trace = run_forward(theta, batch.size(),
                                 [&](std::size_t i) { return batch[i].coord; });
  return batch_loss(trace.acts.back(), batch);
}

double loss_and_gradient(const ParamVector& theta,
                         std::span<const LabeledSample> batch,
                         std::vector<double>& grad) {
  check_batch(batch);
  check_params(theta);
  const auto& sizes = theta.arch.layer_sizes;
  const std::size_t layers = sizes.size() - 1;
  const auto trace = run_forward(theta, batch.size(),
                                 [&](std::size_t i) { return batch[i].coord; });
  const double value = batch_loss(trace.acts.back(), batch);

  grad.assign(theta.values.size(), 0.0);
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  // Softmax + cross-entropy: dL/dz = (p - onehot) / B.
  Matrix delta = trace.acts.back();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    delta(batch[i].label, static_cast<Eigen::Index>(i)) -= 1.0;
  }
  delta *= inv_batch;

  // Offsets of each layer's block inside the flat vector.
  std::vector<std::size_t> offsets(layers);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < layers; ++k) {
    offsets[k] = offset;
    offset += sizes[k] * sizes[k + 1] + sizes[k + 1];
  }

  for (std::size_t k = layers; k-- > 0;) {
    const auto in = static_cast<Eigen::Index>(sizes[k]);
    const auto out = static_cast<Eigen::Index>(sizes[k + 1]);
    Weights dw(grad.data() + offsets[k], out, in);
    Bias db(grad.data() + offsets[k] + out * in, out);
    dw.noalias() = delta * trace.acts[k].transpose();
    db = delta.rowwise().sum();
    if (k == 0) break;
    ConstWeights w(theta.values.data() + offsets[k], out, in);
    Matrix upstream = w.transpose() * delta;
    delta = upstream.cwiseProduct(
        (trace.pre[k - 1].array() > 0.0).cast<double>().matrix());
  }
  return value;
}

std::vector<double> gradient(const ParamVector& theta,
                             std::span<const LabeledSample> batch) {
  std::vector<double> grad;
  loss_and_gradient(theta, batch, grad);
  return grad;
}

ParamVector sgd_step(const ParamVector& theta, std::span<const double> grad,
                     double eta) {
  if (grad.size() != theta.values.size()) {
    throw std::invalid_argument("sgd_step: gradient shape mismatch");
  }
  if (!(eta >= 0.0)) throw std::invalid_argument("sgd_step: negative step size");
  ParamVector next = theta;
  for (std::size_t i = 0; i < next.values.size(); ++i) {
    next.values[i] -= eta * grad[i];
  }
  return next;
}

Coord2 normalize_coord(const Coord2& q, const AreaBounds& bounds) {
  if (!bounds.contains(q)) {
    throw std::out_of_range("normalize_coord: point outside area bounds");
  }
  return {(q.x - bounds.x_min) / bounds.width(),
          (q.y - bounds.y_min) / bounds.height()};
}

Coord2 denormalize_coord(const Coord2& unit, const AreaBounds& bounds) {
  return {bounds.x_min + unit.x * bounds.width(),
          bounds.y_min + unit.y * bounds.height()};
}

}  // namespace uavfl
