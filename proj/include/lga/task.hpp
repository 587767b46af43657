#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lga/matrix.hpp"
#include "lga/rng.hpp"

namespace lga {

/// Initial parent archive: uniform in [low, high]^D, or copies of `point`
/// when it is non-empty.
struct ArchiveInit {
  double low = -5.0;
  double high = 5.0;
  std::vector<double> point;
};

/// A minimization problem evaluated a population at a time.
class Task {
 public:
  virtual ~Task() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  /// One fitness per row of `x`. Noisy tasks draw from `rng`; noiseless ones
  /// leave it untouched.
  virtual std::vector<double> evaluate(const Matrix& x, Rng& rng) const = 0;
  virtual ArchiveInit default_init() const { return {}; }
};

/// Builds a task from its registry id ("sphere", "rastrigin", ..., "mlp-sine").
///
/// BBOB ids take the dimension and a random optimum offset drawn from
/// `offset_seed` (offset 0 when `random_offset` is false). "mlp-sine" ignores
/// `dim` unless it is 0 or matches its own weight count.
std::unique_ptr<Task> make_task(std::string_view id, std::size_t dim, bool random_offset = false,
                                std::uint64_t offset_seed = 0);

/// All ids accepted by make_task.
std::vector<std::string> task_ids();

}  // namespace lga
