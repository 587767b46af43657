#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lga/ga.hpp"
#include "lga/params.hpp"
#include "lga/task.hpp"

namespace lga {

enum class Algorithm { lga, gaussian, mr15, samr, gesmr };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);
std::vector<Algorithm> parse_algorithm_list(std::string_view csv);

/// A task id plus dimension, written "sphere:20" or "mlp-sine".
struct TaskRef {
  std::string id;
  std::size_t dim = 0;

  /// CSV label: "sphere-20d", "mlp-sine".
  std::string label() const;
  friend bool operator==(const TaskRef&, const TaskRef&) = default;
};

/// Parses a comma-separated task list; entries without ":dim" get `default_dim`.
std::vector<TaskRef> parse_task_list(std::string_view csv, std::size_t default_dim);

struct HarnessOptions {
  std::size_t population = 32;
  std::size_t generations = 50;
  double elite_ratio = 0.5;
  /// Elite ratio of the learned GA when not tuned (it is meta-trained at 1).
  double lga_elite_ratio = 1.0;
  double sigma_init = 0.25;
  std::size_t seeds = 10;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  double samr_meta_rate = 1.5;
  std::size_t gesmr_groups = 8;

  /// Grid-tune (elite ratio, sigma_init) per algorithm and task on separate seeds.
  bool tune = false;
  std::size_t tune_seeds = 3;
  std::vector<double> rho_grid{0.0, 0.15, 0.25, 0.35, 0.5, 1.0};
  std::vector<double> sigma_grid{0.1, 0.25, 0.5, 0.75, 1.0};

  /// Required by Algorithm::lga; must outlive every call.
  const LgaParams* params = nullptr;
};

/// GA settings of a named algorithm.
GaConfig algorithm_config(Algorithm algorithm, const HarnessOptions& options, double elite_ratio,
                          double sigma_init, std::uint64_t seed);

/// Seed of repetition `index`; tuning seeds come from a separate stream. The
/// same (task, index) gives the same task instance and GA seed for every
/// algorithm.
std::uint64_t run_seed(std::uint64_t master, const TaskRef& task, std::size_t index, bool tuning = false);

/// Task instance of a run: BBOB optima are offset uniformly in [-5, 5]^D.
std::unique_ptr<Task> make_run_task(const TaskRef& task, std::uint64_t seed);

Trajectory run_algorithm(Algorithm algorithm, const HarnessOptions& options, const TaskRef& task, double elite_ratio,
                         double sigma_init, std::uint64_t seed);

struct Hyperparameters {
  double elite_ratio = 0.0;
  double sigma_init = 0.0;
};

struct TuningRow {
  std::string task;
  Algorithm algorithm;
  Hyperparameters chosen;
  double score = 0.0;  // median final best-so-far over tuning seeds
};

/// Grid point with the lowest median final best-so-far (first one on ties).
TuningRow tune(Algorithm algorithm, const HarnessOptions& options, const TaskRef& task);

/// Hyperparameters used for an algorithm when not tuning.
Hyperparameters default_hyperparameters(Algorithm algorithm, const HarnessOptions& options);

struct EvaluateRow {
  std::string task;
  Algorithm algorithm;
  std::string seed;  // repetition index, or "mean"
  double best_final = 0.0;
  double normalized = 0.0;
};

struct EvaluateResult {
  std::vector<EvaluateRow> rows;
  std::vector<TuningRow> tuning;
};

/// Per (task, algorithm): one row per seed, then a "mean" row. The Gaussian GA
/// is always run; its seed-averaged final best is the task's denominator.
EvaluateResult evaluate(const HarnessOptions& options, const std::vector<Algorithm>& algorithms,
                        const std::vector<TaskRef>& tasks);

struct SweepRow {
  std::string task;
  Algorithm algorithm;
  double elite_ratio = 0.0;
  std::size_t elites = 0;
  double sigma_init = 0.0;
  std::size_t seed = 0;
  double best_final = 0.0;
};

std::vector<SweepRow> sweep(const HarnessOptions& options, const std::vector<Algorithm>& algorithms,
                            const std::vector<TaskRef>& tasks);

struct TransferRow {
  std::string task;
  SelectionKind selection;
  MraKind mra;
  std::string seed;  // repetition index, or "mean"
  double best_final = 0.0;
  double normalized = 0.0;  // against the seed-averaged truncation + fixed result
};

/// Gaussian GA with its selection and/or mutation-rate operator swapped for
/// the learned one, at the options' elite ratio and sigma_init.
std::vector<TransferRow> transfer(const HarnessOptions& options, const std::vector<TaskRef>& tasks);

/// Settings of one transfer composition.
GaConfig transfer_config(const HarnessOptions& options, SelectionKind selection, MraKind mra, std::uint64_t seed);

struct AnalyzeSelectionRow {
  std::size_t generation = 0;
  std::size_t parent = 0;
  std::optional<std::size_t> child;  // empty for the keep-parent column
  double child_zscore = 0.0;
  double child_rank = 0.0;
  double child_improved = 0.0;
  double parent_zscore = 0.0;
  double parent_rank = 0.0;
  double parent_improved = 0.0;
  double logit = 0.0;
  double probability = 0.0;
  bool chosen = false;
};

struct AnalyzeMraRow {
  std::size_t generation = 0;
  std::size_t child = 0;
  std::size_t sampled_parent = 0;
  std::vector<double> features;  // fitness z, rank, flag, sigma z, sigma min-max
  double multiplier = 0.0;
};

struct AnalyzeResult {
  std::vector<AnalyzeSelectionRow> selection;
  std::vector<AnalyzeMraRow> mra;
};

/// Debug run of the learned GA; the first generation fills the archive by
/// truncation and contributes no rows.
AnalyzeResult analyze(const HarnessOptions& options, const TaskRef& task);

void write_evaluate_csv(const std::filesystem::path& path, const std::vector<EvaluateRow>& rows);
void write_tuning_csv(const std::filesystem::path& path, const std::vector<TuningRow>& rows);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);
void write_transfer_csv(const std::filesystem::path& path, const std::vector<TransferRow>& rows);
void write_analyze_csv(const std::filesystem::path& selection_path, const std::filesystem::path& mra_path,
                       const AnalyzeResult& result);
/// generation, best_of_gen, best_so_far, mean_sigma[, f_0 .. f_{N-1}]
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory, bool wide = false);

/// "<stem><suffix><ext>" next to `path`.
std::filesystem::path sibling_path(const std::filesystem::path& path, std::string_view suffix);

}  // namespace lga
