#include "lga/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "lga/csv.hpp"
#include "lga/parallel.hpp"
#include "lga/rng.hpp"

namespace lga {
namespace {

constexpr std::pair<Algorithm, std::string_view> kAlgorithmNames[] = {{Algorithm::lga, "lga"},
                                                                      {Algorithm::gaussian, "gaussian"},
                                                                      {Algorithm::mr15, "mr15"},
                                                                      {Algorithm::samr, "samr"},
                                                                      {Algorithm::gesmr, "gesmr"}};

constexpr double kDenominatorGuard = 1e-12;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto end = std::min(csv.find(',', start), csv.size());
    auto item = trim(csv.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = end + 1;
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

std::ofstream open_csv(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void require_params(Algorithm algorithm, const HarnessOptions& options) {
  if (algorithm == Algorithm::lga && options.params == nullptr) {
    throw std::invalid_argument("algorithm 'lga' needs a checkpoint");
  }
}

double final_best(const Trajectory& t) { return t.empty() ? INFINITY : t.back().best_so_far; }

}  // namespace

std::string_view to_string(Algorithm a) {
  for (const auto& [value, name] : kAlgorithmNames) {
    if (value == a) return name;
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view s) {
  for (const auto& [value, name] : kAlgorithmNames) {
    if (name == s) return value;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(s) + "' (lga, gaussian, mr15, samr, gesmr)");
}

std::vector<Algorithm> parse_algorithm_list(std::string_view csv) {
  std::vector<Algorithm> out;
  for (const auto& item : split(csv)) {
    const Algorithm a = parse_algorithm(item);
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  if (out.empty()) throw std::invalid_argument("empty algorithm list");
  return out;
}

std::string TaskRef::label() const { return id == "mlp-sine" ? id : id + "-" + std::to_string(dim) + "d"; }

std::vector<TaskRef> parse_task_list(std::string_view csv, std::size_t default_dim) {
  std::vector<TaskRef> out;
  for (const auto& item : split(csv)) {
    TaskRef ref;
    const auto colon = item.find(':');
    ref.id = trim(item.substr(0, colon));
    if (colon != std::string::npos) {
      const std::string dim = trim(item.substr(colon + 1));
      try {
        std::size_t used = 0;
        ref.dim = std::stoul(dim, &used);
        if (used != dim.size()) throw std::invalid_argument(dim);
      } catch (const std::exception&) {
        throw std::invalid_argument("bad dimension in task '" + item + "'");
      }
    } else {
      ref.dim = ref.id == "mlp-sine" ? 0 : default_dim;
    }
    make_task(ref.id, ref.dim);  // validates id and dimension
    if (ref.id == "mlp-sine") ref.dim = make_task(ref.id, ref.dim)->dim();
    out.push_back(std::move(ref));
  }
  if (out.empty()) throw std::invalid_argument("empty task list");
  return out;
}

GaConfig algorithm_config(Algorithm algorithm, const HarnessOptions& options, double elite_ratio,
                          double sigma_init, std::uint64_t seed) {
  GaConfig c;
  c.population_size = options.population;
  c.elite_ratio = elite_ratio;
  c.sigma_init = sigma_init;
  c.generations = options.generations;
  c.seed = seed;
  c.samr_meta_rate = options.samr_meta_rate;
  c.gesmr_groups = options.gesmr_groups;
  c.selection = SelectionKind::truncation;
  switch (algorithm) {
    case Algorithm::gaussian:
      c.mra = MraKind::fixed;
      break;
    case Algorithm::mr15:
      c.mra = MraKind::one_fifth;
      break;
    case Algorithm::samr:
      c.mra = MraKind::samr;
      break;
    case Algorithm::gesmr:
      c.mra = MraKind::gesmr;
      break;
    case Algorithm::lga:
      require_params(algorithm, options);
      c.selection = SelectionKind::learned;
      c.mra = MraKind::learned;
      if (options.params->config().sampling) c.sampling = SamplingKind::learned;
      if (options.params->config().crossover) c.crossover = CrossoverKind::learned;
      break;
  }
  return c;
}

std::uint64_t run_seed(std::uint64_t master, const TaskRef& task, std::size_t index, bool tuning) {
  return derive_seed(derive_seed(master, tuning ? stream::kTuning : stream::kEvaluation, fnv1a(task.label())), index);
}

std::unique_ptr<Task> make_run_task(const TaskRef& task, std::uint64_t seed) {
  return make_task(task.id, task.dim, true, seed);
}

Trajectory run_algorithm(Algorithm algorithm, const HarnessOptions& options, const TaskRef& task, double elite_ratio,
                         double sigma_init, std::uint64_t seed) {
  const auto instance = make_run_task(task, seed);
  return run(algorithm_config(algorithm, options, elite_ratio, sigma_init, seed), options.params, *instance);
}

Hyperparameters default_hyperparameters(Algorithm algorithm, const HarnessOptions& options) {
  return {algorithm == Algorithm::lga ? options.lga_elite_ratio : options.elite_ratio, options.sigma_init};
}

TuningRow tune(Algorithm algorithm, const HarnessOptions& options, const TaskRef& task) {
  if (options.rho_grid.empty() || options.sigma_grid.empty() || options.tune_seeds == 0) {
    throw std::invalid_argument("tuning needs non-empty grids and at least one seed");
  }
  const std::size_t points = options.rho_grid.size() * options.sigma_grid.size();
  std::vector<double> finals(points * options.tune_seeds);
  parallel_for(finals.size(), options.workers, [&](std::size_t k) {
    const std::size_t point = k / options.tune_seeds;
    const std::size_t s = k % options.tune_seeds;
    const double rho = options.rho_grid[point / options.sigma_grid.size()];
    const double sigma = options.sigma_grid[point % options.sigma_grid.size()];
    finals[k] = final_best(run_algorithm(algorithm, options, task, rho, sigma, run_seed(options.seed, task, s, true)));
  });
  TuningRow best{task.label(), algorithm, {}, INFINITY};
  for (std::size_t point = 0; point < points; ++point) {
    const auto first = finals.begin() + static_cast<std::ptrdiff_t>(point * options.tune_seeds);
    const double score = median({first, first + static_cast<std::ptrdiff_t>(options.tune_seeds)});
    if (score < best.score) {
      best.score = score;
      best.chosen = {options.rho_grid[point / options.sigma_grid.size()],
                     options.sigma_grid[point % options.sigma_grid.size()]};
    }
  }
  if (!std::isfinite(best.score)) {
    best.chosen = default_hyperparameters(algorithm, options);
  }
  return best;
}

EvaluateResult evaluate(const HarnessOptions& options, const std::vector<Algorithm>& algorithms,
                        const std::vector<TaskRef>& tasks) {
  if (options.seeds == 0) throw std::invalid_argument("evaluate needs at least one seed");
  std::vector<Algorithm> algos{Algorithm::gaussian};
  for (Algorithm a : algorithms) {
    require_params(a, options);
    if (std::find(algos.begin(), algos.end(), a) == algos.end()) algos.push_back(a);
  }

  EvaluateResult result;
  std::vector<Hyperparameters> settings;  // task-major, then algorithm
  for (const auto& task : tasks) {
    for (Algorithm a : algos) {
      if (options.tune) {
        result.tuning.push_back(tune(a, options, task));
        settings.push_back(result.tuning.back().chosen);
      } else {
        settings.push_back(default_hyperparameters(a, options));
      }
    }
  }

  const std::size_t per_task = algos.size() * options.seeds;
  std::vector<double> finals(tasks.size() * per_task);
  parallel_for(finals.size(), options.workers, [&](std::size_t k) {
    const std::size_t t = k / per_task;
    const std::size_t a = (k % per_task) / options.seeds;
    const std::size_t s = k % options.seeds;
    const auto& hp = settings[t * algos.size() + a];
    finals[k] = final_best(run_algorithm(algos[a], options, tasks[t], hp.elite_ratio, hp.sigma_init,
                                         run_seed(options.seed, tasks[t], s)));
  });

  // Gaussian is algos[0]; its seed-averaged final best normalizes the task.
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto first = finals.begin() + static_cast<std::ptrdiff_t>(t * per_task);
    const double denom = std::max(mean({first, first + static_cast<std::ptrdiff_t>(options.seeds)}), kDenominatorGuard);
    for (std::size_t a = 0; a < algos.size(); ++a) {
      std::vector<double> bests(options.seeds);
      for (std::size_t s = 0; s < options.seeds; ++s) {
        bests[s] = finals[t * per_task + a * options.seeds + s];
        result.rows.push_back({tasks[t].label(), algos[a], std::to_string(s), bests[s], bests[s] / denom});
      }
      const double m = mean(bests);
      result.rows.push_back({tasks[t].label(), algos[a], "mean", m, m / denom});
    }
  }
  return result;
}

std::vector<SweepRow> sweep(const HarnessOptions& options, const std::vector<Algorithm>& algorithms,
                            const std::vector<TaskRef>& tasks) {
  if (options.rho_grid.empty() || options.sigma_grid.empty()) throw std::invalid_argument("sweep grids must be non-empty");
  if (options.seeds == 0) throw std::invalid_argument("sweep needs at least one seed");
  for (Algorithm a : algorithms) require_params(a, options);

  std::vector<SweepRow> rows;
  for (const auto& task : tasks) {
    for (Algorithm a : algorithms) {
      for (double rho : options.rho_grid) {
        for (double sigma : options.sigma_grid) {
          for (std::size_t s = 0; s < options.seeds; ++s) {
            SweepRow row{task.label(), a, rho, 0, sigma, s, 0.0};
            row.elites = algorithm_config(a, options, rho, sigma, 0).num_elites();
            rows.push_back(row);
          }
        }
      }
    }
  }
  const std::size_t per_task = algorithms.size() * options.rho_grid.size() * options.sigma_grid.size() * options.seeds;
  parallel_for(rows.size(), options.workers, [&](std::size_t k) {
    auto& row = rows[k];
    const auto& task = tasks[k / per_task];
    row.best_final = final_best(
        run_algorithm(row.algorithm, options, task, row.elite_ratio, row.sigma_init, run_seed(options.seed, task, row.seed)));
  });
  return rows;
}

GaConfig transfer_config(const HarnessOptions& options, SelectionKind selection, MraKind mra, std::uint64_t seed) {
  GaConfig c = algorithm_config(Algorithm::gaussian, options, options.elite_ratio, options.sigma_init, seed);
  c.selection = selection;
  c.mra = mra;
  return c;
}

std::vector<TransferRow> transfer(const HarnessOptions& options, const std::vector<TaskRef>& tasks) {
  require_params(Algorithm::lga, options);
  if (options.seeds == 0) throw std::invalid_argument("transfer needs at least one seed");
  const std::pair<SelectionKind, MraKind> compositions[] = {{SelectionKind::truncation, MraKind::fixed},
                                                            {SelectionKind::truncation, MraKind::learned},
                                                            {SelectionKind::learned, MraKind::fixed},
                                                            {SelectionKind::learned, MraKind::learned}};
  constexpr std::size_t kCompositions = std::size(compositions);
  const std::size_t per_task = kCompositions * options.seeds;
  std::vector<double> finals(tasks.size() * per_task);
  parallel_for(finals.size(), options.workers, [&](std::size_t k) {
    const auto& task = tasks[k / per_task];
    const auto [selection, mra] = compositions[(k % per_task) / options.seeds];
    const std::uint64_t seed = run_seed(options.seed, task, k % options.seeds);
    const auto instance = make_run_task(task, seed);
    finals[k] = final_best(run(transfer_config(options, selection, mra, seed), options.params, *instance));
  });

  std::vector<TransferRow> rows;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto first = finals.begin() + static_cast<std::ptrdiff_t>(t * per_task);
    const double denom = std::max(mean({first, first + static_cast<std::ptrdiff_t>(options.seeds)}), kDenominatorGuard);
    for (std::size_t c = 0; c < kCompositions; ++c) {
      std::vector<double> bests(options.seeds);
      for (std::size_t s = 0; s < options.seeds; ++s) {
        bests[s] = finals[t * per_task + c * options.seeds + s];
        rows.push_back({tasks[t].label(), compositions[c].first, compositions[c].second, std::to_string(s), bests[s],
                        bests[s] / denom});
      }
      const double m = mean(bests);
      rows.push_back({tasks[t].label(), compositions[c].first, compositions[c].second, "mean", m, m / denom});
    }
  }
  return rows;
}

AnalyzeResult analyze(const HarnessOptions& options, const TaskRef& task) {
  require_params(Algorithm::lga, options);
  const std::uint64_t seed = run_seed(options.seed, task, 0);
  GaConfig config = algorithm_config(Algorithm::lga, options, options.lga_elite_ratio, options.sigma_init, seed);
  config.record_debug = true;
  const auto instance = make_run_task(task, seed);
  const Trajectory trajectory = run(config, options.params, *instance);

  AnalyzeResult result;
  for (std::size_t g = 0; g < trajectory.size(); ++g) {
    const auto& debug = trajectory[g].debug;
    if (!debug) continue;
    const Matrix& probs = debug->selection_probs;
    const std::size_t n = debug->child_features.rows();
    for (std::size_t i = 0; i < probs.rows(); ++i) {
      for (std::size_t j = 0; j <= n; ++j) {
        AnalyzeSelectionRow row;
        row.generation = g;
        row.parent = i;
        row.parent_zscore = debug->parent_features(i, 0);
        row.parent_rank = debug->parent_features(i, 1);
        row.parent_improved = debug->parent_features(i, 2);
        row.probability = probs(i, j);
        row.chosen = debug->selection_choice[i] == j;
        if (j < n) {
          row.child = j;
          row.child_zscore = debug->child_features(j, 0);
          row.child_rank = debug->child_features(j, 1);
          row.child_improved = debug->child_features(j, 2);
          row.logit = debug->selection_logits(i, j);
        } else {
          row.logit = 1.0;
        }
        result.selection.push_back(row);
      }
    }
    for (std::size_t j = 0; j < debug->sigma_multipliers.size(); ++j) {
      const auto f = debug->mra_features.row(j);
      result.mra.push_back({g, j, debug->sampled_parents[j], {f.begin(), f.end()}, debug->sigma_multipliers[j]});
    }
  }
  return result;
}

void write_evaluate_csv(const std::filesystem::path& path, const std::vector<EvaluateRow>& rows) {
  auto out = open_csv(path);
  write_csv_row(out, {"task", "algo", "seed", "best_final", "normalized"});
  for (const auto& r : rows) {
    write_csv_row(out, {r.task, std::string(to_string(r.algorithm)), r.seed, format_double(r.best_final),
                        format_double(r.normalized)});
  }
}

void write_tuning_csv(const std::filesystem::path& path, const std::vector<TuningRow>& rows) {
  auto out = open_csv(path);
  write_csv_row(out, {"task", "algo", "elite_ratio", "sigma_init", "median_best_final"});
  for (const auto& r : rows) {
    write_csv_row(out, {r.task, std::string(to_string(r.algorithm)), format_double(r.chosen.elite_ratio),
                        format_double(r.chosen.sigma_init), format_double(r.score)});
  }
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  auto out = open_csv(path);
  write_csv_row(out, {"task", "algo", "elite_ratio", "elites", "sigma_init", "seed", "best_final"});
  for (const auto& r : rows) {
    write_csv_row(out, {r.task, std::string(to_string(r.algorithm)), format_double(r.elite_ratio),
                        std::to_string(r.elites), format_double(r.sigma_init), std::to_string(r.seed),
                        format_double(r.best_final)});
  }
}

void write_transfer_csv(const std::filesystem::path& path, const std::vector<TransferRow>& rows) {
  auto out = open_csv(path);
  write_csv_row(out, {"task", "selection", "mra", "seed", "best_final", "normalized"});
  for (const auto& r : rows) {
    write_csv_row(out, {r.task, std::string(to_string(r.selection)), std::string(to_string(r.mra)), r.seed,
                        format_double(r.best_final), format_double(r.normalized)});
  }
}

void write_analyze_csv(const std::filesystem::path& selection_path, const std::filesystem::path& mra_path,
                       const AnalyzeResult& result) {
  auto sel = open_csv(selection_path);
  write_csv_row(sel, {"generation", "parent", "child", "child_zscore", "child_rank", "child_improved", "parent_zscore",
                      "parent_rank", "parent_improved", "logit", "probability", "chosen"});
  for (const auto& r : result.selection) {
    const bool keep = !r.child.has_value();
    write_csv_row(sel, {std::to_string(r.generation), std::to_string(r.parent),
                        keep ? std::string("keep") : std::to_string(*r.child),
                        keep ? std::string() : format_double(r.child_zscore),
                        keep ? std::string() : format_double(r.child_rank),
                        keep ? std::string() : format_double(r.child_improved), format_double(r.parent_zscore),
                        format_double(r.parent_rank), format_double(r.parent_improved), format_double(r.logit),
                        format_double(r.probability), r.chosen ? "1" : "0"});
  }
  auto mra = open_csv(mra_path);
  write_csv_row(mra, {"generation", "child", "sampled_parent", "fitness_zscore", "fitness_rank", "fitness_improved",
                      "sigma_zscore", "sigma_minmax", "multiplier"});
  for (const auto& r : result.mra) {
    std::vector<std::string> fields{std::to_string(r.generation), std::to_string(r.child),
                                    std::to_string(r.sampled_parent)};
    for (double f : r.features) fields.push_back(format_double(f));
    fields.push_back(format_double(r.multiplier));
    write_csv_row(mra, fields);
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory, bool wide) {
  auto out = open_csv(path);
  std::vector<std::string> header{"generation", "best_of_gen", "best_so_far", "mean_sigma"};
  const std::size_t n = trajectory.empty() ? 0 : trajectory.front().fitness.size();
  if (wide) {
    for (std::size_t j = 0; j < n; ++j) header.push_back("f_" + std::to_string(j));
  }
  write_csv_row(out, header);
  for (std::size_t g = 0; g < trajectory.size(); ++g) {
    const auto& rec = trajectory[g];
    std::vector<std::string> fields{std::to_string(g), format_double(rec.best_of_generation),
                                    format_double(rec.best_so_far), format_double(rec.mean_sigma)};
    if (wide) {
      for (double f : rec.fitness) fields.push_back(format_double(f));
    }
    write_csv_row(out, fields);
  }
}

std::filesystem::path sibling_path(const std::filesystem::path& path, std::string_view suffix) {
  auto name = path.stem().string() + std::string(suffix) + path.extension().string();
  return path.parent_path() / name;
}

}  // namespace lga
