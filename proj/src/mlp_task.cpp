#include "lga/mlp_task.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lga {

double mlp_sine_target(double x1, double x2) { return std::sin(std::numbers::pi * x1) + x2 * x2; }

MlpTask::MlpTask(std::vector<std::size_t> layers, std::uint64_t data_seed, std::size_t samples)
    : layers_(std::move(layers)) {
  if (layers_.size() < 2 || layers_.front() != 2 || layers_.back() != 1) {
    throw std::invalid_argument("MlpTask: layers must start with 2 inputs and end with 1 output");
  }
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    if (layers_[l + 1] == 0) throw std::invalid_argument("MlpTask: empty layer");
    dim_ += layers_[l] * layers_[l + 1] + layers_[l + 1];
  }
  Rng rng(data_seed);
  inputs_ = Matrix(samples, 2);
  targets_.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    inputs_(i, 0) = rng.uniform(-1.0, 1.0);
    inputs_(i, 1) = rng.uniform(-1.0, 1.0);
    targets_[i] = mlp_sine_target(inputs_(i, 0), inputs_(i, 1));
  }
}

std::vector<double> MlpTask::predict(std::span<const double> weights) const {
  if (weights.size() != dim_) {
    throw std::invalid_argument("MlpTask: expected " + std::to_string(dim_) + " weights, got " +
                                std::to_string(weights.size()));
  }
  std::vector<double> out(inputs_.rows());
  std::vector<double> act;
  std::vector<double> next;
  for (std::size_t s = 0; s < inputs_.rows(); ++s) {
    act.assign(inputs_.row(s).begin(), inputs_.row(s).end());
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
      const std::size_t fan_in = layers_[l];
      const std::size_t fan_out = layers_[l + 1];
      const double* w = weights.data() + offset;
      const double* b = w + fan_in * fan_out;
      next.assign(b, b + fan_out);
      for (std::size_t i = 0; i < fan_in; ++i) {
        for (std::size_t o = 0; o < fan_out; ++o) next[o] += act[i] * w[i * fan_out + o];
      }
      const bool hidden = l + 2 < layers_.size();
      if (hidden) {
        for (double& v : next) v = std::tanh(v);
      }
      offset += fan_in * fan_out + fan_out;
      act.swap(next);
    }
    out[s] = act[0];
  }
  return out;
}

double MlpTask::mse(std::span<const double> weights) const {
  const auto pred = predict(weights);
  double total = 0.0;
  for (std::size_t s = 0; s < pred.size(); ++s) {
    const double r = pred[s] - targets_[s];
    total += r * r;
  }
  return total / static_cast<double>(pred.size());
}

std::vector<double> MlpTask::evaluate(const Matrix& x, Rng& /*rng*/) const {
  if (x.cols() != dim_) {
    throw std::invalid_argument("MlpTask: population has " + std::to_string(x.cols()) +
                                " columns, task dimension is " + std::to_string(dim_));
  }
  std::vector<double> out(x.rows());
  for (std::size_t j = 0; j < x.rows(); ++j) {
    const double f = mse(x.row(j));
    // diverged weights still need a finite fitness
    out[j] = std::isfinite(f) ? f : 1e30;
  }
  return out;
}

}  // namespace lga
