#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lga/task.hpp"

namespace lga {

/// Regression of sin(pi x1) + x2^2 on [-1, 1]^2 with a small tanh MLP whose
/// flattened weights are the search space. Fitness is the mean squared error.
///
/// Weight layout per hidden layer and the output layer: W (fan_in x fan_out,
/// row-major) followed by the bias (fan_out).
class MlpTask final : public Task {
 public:
  static constexpr std::size_t kDefaultSamples = 64;

  explicit MlpTask(std::vector<std::size_t> layers = {2, 8, 1}, std::uint64_t data_seed = 0,
                   std::size_t samples = kDefaultSamples);

  std::string name() const override { return "mlp-sine"; }
  std::size_t dim() const override { return dim_; }
  std::vector<double> evaluate(const Matrix& x, Rng& rng) const override;
  /// Zero weights, like the neuroevolution setups this stands in for.
  ArchiveInit default_init() const override { return {-1.0, 1.0, std::vector<double>(dim_, 0.0)}; }

  double mse(std::span<const double> weights) const;
  std::vector<double> predict(std::span<const double> weights) const;

  const Matrix& inputs() const { return inputs_; }
  const std::vector<double>& targets() const { return targets_; }
  const std::vector<std::size_t>& layers() const { return layers_; }

 private:
  std::vector<std::size_t> layers_;
  std::size_t dim_ = 0;
  Matrix inputs_;
  std::vector<double> targets_;
};

/// Target function of the default dataset.
double mlp_sine_target(double x1, double x2);

}  // namespace lga
