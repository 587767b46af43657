#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lga/bbob.hpp"
#include "lga/ga.hpp"
#include "lga/matrix.hpp"
#include "lga/meta_es.hpp"
#include "lga/params.hpp"

namespace lga {

/// Reductions of the T x N inner-loop fitness tensor to one task score.
enum class MetaObjective { min_n_min_t, min_n_final_t, mean_n_min_t, mean_n_final_t };

std::string_view to_string(MetaObjective o);
MetaObjective parse_objective(std::string_view s);

/// `fitness[t][j]`: fitness of child j in generation t.
double reduce_objective(std::span<const std::vector<double>> fitness, MetaObjective objective);
double reduce_objective(const Trajectory& trajectory, MetaObjective objective);

struct InnerLoopConfig {
  std::size_t population = 16;
  std::size_t generations = 50;
  double elite_ratio = 1.0;
};

/// The GA used to score a candidate: learned selection and MRA, sigma_init
/// from the task, seeded by the task.
GaConfig inner_ga_config(const InnerLoopConfig& inner, const bbob::TaskSpec& task);

double inner_task_score(const LgaParams& theta, const bbob::TaskSpec& task, MetaObjective objective,
                        const InnerLoopConfig& inner);
std::vector<double> inner_score(const LgaParams& theta, std::span<const bbob::TaskSpec> tasks,
                                MetaObjective objective, const InnerLoopConfig& inner);

/// Replaces non-finite entries by the worst finite value of their column (0
/// when the column has none).
void sanitize_scores(Matrix& scores);

/// log10(max(v, 1e-12)) elementwise.
void log_transform_scores(Matrix& scores);

/// Column-wise z-score across members, then the median across tasks per row.
std::vector<double> meta_fitness(const Matrix& scores);

/// Held-out probe run on the search mean during meta-training.
struct EvalProbe {
  std::string name;     // meta-log column suffix
  std::string task_id;  // make_task id
  std::size_t dim = 0;
};

std::vector<EvalProbe> default_eval_probes();

struct MetaConfig {
  MetaEsConfig es;
  std::size_t tasks = 256;  // J
  std::size_t generations = 750;
  InnerLoopConfig inner;
  MetaObjective objective = MetaObjective::min_n_final_t;
  bbob::TaskFamily family = bbob::TaskFamily::medium();
  LgaConfig lga;
  /// mu_0 ~ N(0, init_scale^2) per weight; 0 starts from all-zero weights.
  double init_scale = 0.5;
  /// z-score log10(max(score, 1e-12)) instead of raw task scores.
  bool log_scores = true;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  std::vector<EvalProbe> probes = default_eval_probes();
  std::size_t eval_every = 25;
  std::size_t eval_seeds = 8;
  double eval_sigma_init = 0.1;

  /// Directory for checkpoints; none are written when empty.
  std::filesystem::path checkpoint_dir;
  std::size_t checkpoint_every = 50;
  /// Meta-log CSV path; not written when empty.
  std::filesystem::path log_path;

  void validate() const;
};

struct MetaLogRow {
  std::size_t generation = 0;
  double fitness_mean = 0.0;
  double fitness_median = 0.0;
  double fitness_best = 0.0;
  double sigma = 0.0;
  double lr = 0.0;
  /// One entry per probe; NaN in generations without evaluation.
  std::vector<double> eval;
};

struct MetaTrainResult {
  LgaParams mean;
  MetaEsState state;
  std::vector<MetaLogRow> log;
};

/// Seeded initial search mean.
std::vector<double> initial_mean(const MetaConfig& config);

/// Tasks of one meta-generation, shared by every candidate.
std::vector<bbob::TaskSpec> sample_generation_tasks(const MetaConfig& config, std::size_t generation);

/// Scores every candidate row of `theta` on every task (M x J).
Matrix score_candidates(const Matrix& theta, const LgaConfig& lga, std::span<const bbob::TaskSpec> tasks,
                        MetaObjective objective, const InnerLoopConfig& inner, std::size_t workers);

/// Median over seeds of the final best-so-far of the learned GA on a probe.
double evaluate_probe(const LgaParams& params, const EvalProbe& probe, const MetaConfig& config);

/// Called after every meta-generation with its log row.
using MetaProgress = std::function<void(const MetaLogRow&)>;

MetaTrainResult meta_train(const MetaConfig& config, const MetaProgress& progress = {});

void write_meta_log(const std::filesystem::path& path, const std::vector<EvalProbe>& probes,
                    const std::vector<MetaLogRow>& log);

}  // namespace lga
