#include "lga/task.hpp"

#include <stdexcept>
#include <string>

#include "lga/bbob.hpp"
#include "lga/mlp_task.hpp"

namespace lga {

std::unique_ptr<Task> make_task(std::string_view id, std::size_t dim, bool random_offset,
                                std::uint64_t offset_seed) {
  if (id == "mlp-sine") {
    auto task = std::make_unique<MlpTask>();
    if (dim != 0 && dim != task->dim()) {
      throw std::invalid_argument("mlp-sine has " + std::to_string(task->dim()) + " dimensions, not " +
                                  std::to_string(dim));
    }
    return task;
  }
  const auto fn = bbob::parse_function(id);
  if (!fn) throw std::invalid_argument("unknown task id '" + std::string(id) + "'");
  if (dim == 0) throw std::invalid_argument("task '" + std::string(id) + "' needs a dimension");
  bbob::TaskSpec spec;
  spec.function = *fn;
  spec.dim = dim;
  spec.offset.assign(dim, 0.0);
  if (random_offset) {
    Rng rng(offset_seed);
    for (double& o : spec.offset) o = rng.uniform(-5.0, 5.0);
  }
  spec.seed = offset_seed;
  return std::make_unique<bbob::BbobTask>(std::move(spec));
}

std::vector<std::string> task_ids() {
  std::vector<std::string> ids;
  for (auto fn : bbob::all_functions()) ids.emplace_back(bbob::function_name(fn));
  ids.emplace_back("mlp-sine");
  return ids;
}

}  // namespace lga
