#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lga/matrix.hpp"
#include "lga/operators.hpp"
#include "lga/params.hpp"
#include "lga/rng.hpp"
#include "lga/task.hpp"

namespace lga {

enum class SelectionKind { learned, truncation };
enum class MraKind { learned, fixed, one_fifth, samr, gesmr };
enum class SamplingKind { uniform, learned };
enum class CrossoverKind { none, learned };

std::string_view to_string(SelectionKind k);
std::string_view to_string(MraKind k);
std::string_view to_string(SamplingKind k);
std::string_view to_string(CrossoverKind k);
SelectionKind parse_selection(std::string_view s);
MraKind parse_mra(std::string_view s);
SamplingKind parse_sampling(std::string_view s);
CrossoverKind parse_crossover(std::string_view s);

struct GaConfig {
  std::size_t population_size = 16;
  /// E = ceil(elite_ratio * N); 0 means a single parent.
  double elite_ratio = 1.0;
  double sigma_init = 0.1;
  SelectionKind selection = SelectionKind::truncation;
  MraKind mra = MraKind::fixed;
  SamplingKind sampling = SamplingKind::uniform;
  CrossoverKind crossover = CrossoverKind::none;
  std::size_t generations = 50;
  std::uint64_t seed = 0;
  /// SAMR multiplier m: children use sigma * m or sigma / m.
  double samr_meta_rate = 1.5;
  /// GESMR group count; must divide population_size.
  std::size_t gesmr_groups = 8;
  /// Keep per-generation features, logits and rate multipliers.
  bool record_debug = false;

  std::size_t num_elites() const;
  bool needs_params() const;
  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

/// Intermediate values of the learned operators for one generation.
struct GenerationDebug {
  Matrix child_features;    // N x 3, joint features of children
  Matrix parent_features;   // E x 3, joint features of parents
  Matrix selection_logits;  // E x N
  Matrix selection_probs;   // E x (N + 1)
  std::vector<std::size_t> selection_choice;
  Matrix mra_features;      // N x 5, empty unless learned MRA ran
  std::vector<double> sigma_multipliers;
  std::vector<std::size_t> sampled_parents;
};

struct GenerationRecord {
  std::vector<double> fitness;
  double best_of_generation = 0.0;
  double best_so_far = 0.0;
  double mean_sigma = 0.0;
  std::optional<GenerationDebug> debug;
};

using Trajectory = std::vector<GenerationRecord>;

struct Offspring {
  Matrix x;
  std::vector<double> sigma;
};

struct GaState {
  ParentArchive archive;
  double best_fitness = INFINITY;
  std::vector<double> best_x;
  std::size_t generation = 0;
  /// False until the first tell: archive fitness is +inf and fitness-driven
  /// operators fall back to their white-box forms.
  bool evaluated = false;
  double shared_sigma = 0.0;         // MR-1/5
  std::vector<double> group_sigma;   // GESMR
  Rng operator_rng;
  Rng mutation_rng;
};

/// Ask/tell genetic algorithm with pluggable selection, MRA, sampling and
/// cross-over operators. Minimizes.
class GeneticAlgorithm {
 public:
  /// `params` must outlive the object and is required iff a slot is learned.
  GeneticAlgorithm(GaConfig config, std::size_t dim, const ArchiveInit& init,
                   const LgaParams* params = nullptr);

  Offspring ask();
  void tell(const Matrix& x, std::span<const double> fitness, std::span<const double> sigma);

  const GaConfig& config() const { return config_; }
  const GaState& state() const { return state_; }
  std::size_t dim() const { return dim_; }
  /// Debug values of the last completed generation (record_debug only).
  const std::optional<GenerationDebug>& last_debug() const { return last_debug_; }

 private:
  GaConfig config_;
  std::size_t dim_;
  const LgaParams* params_;
  GaState state_;
  std::optional<SampledParents> pending_;
  std::optional<GenerationDebug> debug_;
  std::optional<GenerationDebug> last_debug_;
};

/// Runs config.generations generations on `task`, starting from `init` (the
/// task's default when omitted). Task noise uses its own stream derived from
/// config.seed.
Trajectory run(const GaConfig& config, const LgaParams* params, const Task& task);
Trajectory run(const GaConfig& config, const LgaParams* params, const Task& task, const ArchiveInit& init);

}  // namespace lga
