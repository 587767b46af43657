#include "lga/metabbo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lga/csv.hpp"
#include "lga/features.hpp"
#include "lga/parallel.hpp"
#include "lga/task.hpp"

namespace lga {
namespace {

constexpr double kScoreFloor = 1e-12;

constexpr std::pair<MetaObjective, std::string_view> kObjectiveNames[] = {
    {MetaObjective::min_n_min_t, "minN-minT"},
    {MetaObjective::min_n_final_t, "minN-finalT"},
    {MetaObjective::mean_n_min_t, "meanN-minT"},
    {MetaObjective::mean_n_final_t, "meanN-finalT"},
};

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty set");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string checkpoint_name(std::size_t generation) {
  std::ostringstream s;
  s << "checkpoint_gen" << std::setw(5) << std::setfill('0') << generation << ".json";
  return s.str();
}

}  // namespace

std::string_view to_string(MetaObjective o) {
  for (const auto& [value, name] : kObjectiveNames) {
    if (value == o) return name;
  }
  return "?";
}

MetaObjective parse_objective(std::string_view s) {
  for (const auto& [value, name] : kObjectiveNames) {
    if (name == s) return value;
  }
  throw std::invalid_argument("unknown meta-objective '" + std::string(s) + "'");
}

double reduce_objective(std::span<const std::vector<double>> fitness, MetaObjective objective) {
  if (fitness.empty() || fitness.front().empty()) throw std::invalid_argument("reduce_objective: empty fitness tensor");
  const auto& last = fitness.back();
  switch (objective) {
    case MetaObjective::min_n_min_t: {
      double best = INFINITY;
      for (const auto& gen : fitness) best = std::min(best, *std::min_element(gen.begin(), gen.end()));
      return best;
    }
    case MetaObjective::min_n_final_t:
      return *std::min_element(last.begin(), last.end());
    case MetaObjective::mean_n_min_t: {
      double best = INFINITY;
      for (const auto& gen : fitness) best = std::min(best, mean_of(gen));
      return best;
    }
    case MetaObjective::mean_n_final_t:
      return mean_of(last);
  }
  throw std::invalid_argument("reduce_objective: unknown objective");
}

double reduce_objective(const Trajectory& trajectory, MetaObjective objective) {
  std::vector<std::vector<double>> fitness;
  fitness.reserve(trajectory.size());
  for (const auto& rec : trajectory) fitness.push_back(rec.fitness);
  return reduce_objective(fitness, objective);
}

GaConfig inner_ga_config(const InnerLoopConfig& inner, const bbob::TaskSpec& task) {
  GaConfig c;
  c.population_size = inner.population;
  c.elite_ratio = inner.elite_ratio;
  c.sigma_init = task.sigma_init;
  c.selection = SelectionKind::learned;
  c.mra = MraKind::learned;
  c.generations = inner.generations;
  c.seed = task.seed;
  return c;
}

double inner_task_score(const LgaParams& theta, const bbob::TaskSpec& task, MetaObjective objective,
                        const InnerLoopConfig& inner) {
  const bbob::BbobTask bbob_task(task);
  return reduce_objective(run(inner_ga_config(inner, task), &theta, bbob_task), objective);
}

std::vector<double> inner_score(const LgaParams& theta, std::span<const bbob::TaskSpec> tasks,
                                MetaObjective objective, const InnerLoopConfig& inner) {
  std::vector<double> out;
  out.reserve(tasks.size());
  for (const auto& task : tasks) out.push_back(inner_task_score(theta, task, objective, inner));
  return out;
}

void sanitize_scores(Matrix& scores) {
  for (std::size_t j = 0; j < scores.cols(); ++j) {
    double worst = -INFINITY;
    for (std::size_t i = 0; i < scores.rows(); ++i) {
      if (std::isfinite(scores(i, j))) worst = std::max(worst, scores(i, j));
    }
    if (!std::isfinite(worst)) worst = 0.0;
    for (std::size_t i = 0; i < scores.rows(); ++i) {
      if (!std::isfinite(scores(i, j))) scores(i, j) = worst;
    }
  }
}

void log_transform_scores(Matrix& scores) {
  for (double& v : scores.values()) v = std::log10(std::max(v, kScoreFloor));
}

std::vector<double> meta_fitness(const Matrix& scores) {
  const std::size_t m = scores.rows();
  const std::size_t tasks = scores.cols();
  if (m == 0 || tasks == 0) throw std::invalid_argument("meta_fitness: empty score matrix");
  Matrix z(m, tasks);
  for (std::size_t j = 0; j < tasks; ++j) {
    const auto col = z_score(scores.col(j));
    for (std::size_t i = 0; i < m; ++i) z(i, j) = col[i];
  }
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = median({z.row(i).begin(), z.row(i).end()});
  return out;
}

std::vector<EvalProbe> default_eval_probes() {
  return {{"sphere_10d", "sphere", 10}, {"rosenbrock_10d", "rosenbrock", 10}, {"mlp_sine", "mlp-sine", 0}};
}

void MetaConfig::validate() const {
  es.validate();
  if (tasks == 0) throw std::invalid_argument("MetaConfig: at least one task per generation is required");
  if (inner.population == 0 || inner.generations == 0) throw std::invalid_argument("MetaConfig: empty inner loop");
  if (family.functions.empty()) throw std::invalid_argument("MetaConfig: empty task family");
  if (!probes.empty() && (eval_every == 0 || eval_seeds == 0)) {
    throw std::invalid_argument("MetaConfig: evaluation needs positive eval_every and eval_seeds");
  }
  if (!(init_scale >= 0.0)) throw std::invalid_argument("MetaConfig: init scale must be non-negative");
  if (!(eval_sigma_init > 0.0)) throw std::invalid_argument("MetaConfig: eval sigma must be positive");
}

std::vector<double> initial_mean(const MetaConfig& config) {
  std::vector<double> mean(LgaParams(config.lga).parameter_count(), 0.0);
  if (config.init_scale > 0.0) {
    Rng rng(derive_seed(config.seed, stream::kInit));
    for (double& v : mean) v = config.init_scale * rng.normal();
  }
  return mean;
}

std::vector<bbob::TaskSpec> sample_generation_tasks(const MetaConfig& config, std::size_t generation) {
  Rng rng(derive_seed(config.seed, stream::kTasks, generation));
  std::vector<bbob::TaskSpec> tasks;
  tasks.reserve(config.tasks);
  for (std::size_t j = 0; j < config.tasks; ++j) tasks.push_back(bbob::sample_task(config.family, rng));
  return tasks;
}

Matrix score_candidates(const Matrix& theta, const LgaConfig& lga, std::span<const bbob::TaskSpec> tasks,
                        MetaObjective objective, const InnerLoopConfig& inner, std::size_t workers) {
  const std::size_t m = theta.rows();
  std::vector<LgaParams> params;
  params.reserve(m);
  for (std::size_t i = 0; i < m; ++i) params.push_back(LgaParams::from_flat(lga, theta.row(i)));

  Matrix scores(m, tasks.size());
  parallel_for(m * tasks.size(), workers, [&](std::size_t k) {
    const std::size_t i = k / tasks.size();
    const std::size_t j = k % tasks.size();
    double s = std::numeric_limits<double>::quiet_NaN();
    try {
      s = inner_task_score(params[i], tasks[j], objective, inner);
    } catch (const std::invalid_argument&) {
      // an exploding candidate (non-finite logits) loses this task
    }
    scores(i, j) = s;
  });
  sanitize_scores(scores);
  return scores;
}

double evaluate_probe(const LgaParams& params, const EvalProbe& probe, const MetaConfig& config) {
  std::vector<double> finals(config.eval_seeds);
  for (std::size_t s = 0; s < config.eval_seeds; ++s) {
    const std::uint64_t seed = derive_seed(config.seed, stream::kMetaEval, s);
    const auto task = make_task(probe.task_id, probe.dim, true, seed);
    GaConfig c;
    c.population_size = config.inner.population;
    c.elite_ratio = config.inner.elite_ratio;
    c.sigma_init = config.eval_sigma_init;
    c.selection = SelectionKind::learned;
    c.mra = MraKind::learned;
    c.generations = config.inner.generations;
    c.seed = derive_seed(seed, stream::kMetaEval);
    try {
      finals[s] = run(c, &params, *task).back().best_so_far;
    } catch (const std::invalid_argument&) {
      finals[s] = std::numeric_limits<double>::infinity();
    }
  }
  return median(std::move(finals));
}

void write_meta_log(const std::filesystem::path& path, const std::vector<EvalProbe>& probes,
                    const std::vector<MetaLogRow>& log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write meta-log " + path.string());
  std::vector<std::string> header{"generation", "meta_fitness_mean", "meta_fitness_median", "meta_fitness_best",
                                   "sigma_meta", "learning_rate"};
  for (const auto& p : probes) header.push_back("eval_" + p.name);
  write_csv_row(out, header);
  for (const auto& row : log) {
    std::vector<std::string> fields{std::to_string(row.generation), format_double(row.fitness_mean),
                                    format_double(row.fitness_median), format_double(row.fitness_best),
                                    format_double(row.sigma), format_double(row.lr)};
    for (double e : row.eval) fields.push_back(std::isnan(e) ? std::string() : format_double(e));
    write_csv_row(out, fields);
  }
}

MetaTrainResult meta_train(const MetaConfig& config, const MetaProgress& progress) {
  config.validate();
  MetaEsState state = meta_es_init(config.es, initial_mean(config));
  std::vector<MetaLogRow> log;
  log.reserve(config.generations);
  if (!config.checkpoint_dir.empty()) std::filesystem::create_directories(config.checkpoint_dir);

  for (std::size_t g = 0; g < config.generations; ++g) {
    MetaLogRow row;
    row.generation = g;
    row.sigma = state.sigma;
    row.lr = state.lr;
    row.eval.assign(config.probes.size(), std::numeric_limits<double>::quiet_NaN());
    if (!config.probes.empty() && (g % config.eval_every == 0 || g + 1 == config.generations)) {
      const auto mean_params = LgaParams::from_flat(config.lga, state.mean);
      for (std::size_t p = 0; p < config.probes.size(); ++p) {
        row.eval[p] = evaluate_probe(mean_params, config.probes[p], config);
      }
    }

    const auto tasks = sample_generation_tasks(config, g);
    Rng candidate_rng(derive_seed(config.seed, stream::kCandidates, g));
    const MetaCandidates candidates = meta_ask(config.es, state, candidate_rng);
    Matrix scores = score_candidates(candidates.theta, config.lga, tasks, config.objective, config.inner, config.workers);
    if (config.log_scores) log_transform_scores(scores);
    const auto fitness = meta_fitness(scores);
    state = meta_tell(config.es, std::move(state), candidates, fitness);

    row.fitness_mean = mean_of(fitness);
    row.fitness_median = median(fitness);
    row.fitness_best = *std::min_element(fitness.begin(), fitness.end());
    log.push_back(row);
    if (progress) progress(row);

    const bool last = g + 1 == config.generations;
    if (!config.checkpoint_dir.empty() && (last || (config.checkpoint_every > 0 && (g + 1) % config.checkpoint_every == 0))) {
      const auto mean_params = LgaParams::from_flat(config.lga, state.mean);
      save_checkpoint(mean_params, config.checkpoint_dir / checkpoint_name(g + 1));
      if (last) save_checkpoint(mean_params, config.checkpoint_dir / "checkpoint_final.json");
    }
    if (!config.log_path.empty()) write_meta_log(config.log_path, config.probes, log);
  }
  if (!config.log_path.empty() && config.generations == 0) write_meta_log(config.log_path, config.probes, log);

  return {LgaParams::from_flat(config.lga, state.mean), std::move(state), std::move(log)};
}

}  // namespace lga
