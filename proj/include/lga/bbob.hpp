#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lga/matrix.hpp"
#include "lga/rng.hpp"
#include "lga/task.hpp"

namespace lga::bbob {

/// Un-rotated BBOB-style function cores.
enum class FunctionId {
  // meta-training set
  sphere,
  rosenbrock,
  discus,
  rastrigin,
  schwefel,
  bueche_rastrigin,
  attractive_sector,
  weierstrass,
  schaffers_f7,
  griewank_rosenbrock,
  // hold-out set
  ellipsoidal,
  linear_slope,
  step_ellipsoid,
  sharp_ridge,
  different_powers,
};

std::string_view function_name(FunctionId id);
std::optional<FunctionId> parse_function(std::string_view name);

std::span<const FunctionId> all_functions();
std::span<const FunctionId> meta_train_functions();
std::span<const FunctionId> holdout_functions();

/// Value of the core at z = x - x_star. Every core except linear_slope has its
/// minimum 0 at z = 0 (Rosenbrock-type cores shift by +1 internally).
double core(FunctionId id, std::span<const double> z);

inline constexpr double kNoiseStrength = 0.01;
inline constexpr double kNoiseFloor = 1e-12;

struct TaskSpec {
  FunctionId function = FunctionId::sphere;
  std::size_t dim = 2;
  std::vector<double> offset;  // x_star, in [-5, 5]^D
  double sigma_init = 0.1;
  bool noisy = false;
  double noise_strength = kNoiseStrength;
  std::uint64_t seed = 0;
};

/// f(x_j) per row; noisy tasks return max(f, 1e-12) * exp(beta * n), n ~ N(0, 1).
std::vector<double> eval(const TaskSpec& task, const Matrix& x, Rng& rng);

/// Distribution over tasks for meta-training.
struct TaskFamily {
  std::vector<FunctionId> functions;
  std::size_t dim_min = 2;
  std::size_t dim_max = 10;
  double offset_bound = 5.0;
  double sigma_min = 0.01;
  double sigma_max = 0.5;
  bool noisy = false;

  /// {sphere}
  static TaskFamily small();
  /// small + {rosenbrock, discus, rastrigin, schwefel}
  static TaskFamily medium();
  /// medium + {bueche_rastrigin, attractive_sector, weierstrass, schaffers_f7, griewank_rosenbrock}
  static TaskFamily large();
};

TaskSpec sample_task(const TaskFamily& family, Rng& rng);

class BbobTask final : public Task {
 public:
  explicit BbobTask(TaskSpec spec);

  std::string name() const override;
  std::size_t dim() const override { return spec_.dim; }
  std::vector<double> evaluate(const Matrix& x, Rng& rng) const override;

  const TaskSpec& spec() const { return spec_; }

 private:
  TaskSpec spec_;
};

}  // namespace lga::bbob
