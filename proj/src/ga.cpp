#include "lga/ga.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lga/features.hpp"

namespace lga {
namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::pair<Enum, std::string_view> (&table)[N], const char* what) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  throw std::invalid_argument(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

template <typename Enum, std::size_t N>
std::string_view enum_name(Enum v, const std::pair<Enum, std::string_view> (&table)[N]) {
  for (const auto& [value, name] : table) {
    if (value == v) return name;
  }
  return "?";
}

constexpr std::pair<SelectionKind, std::string_view> kSelectionNames[] = {
    {SelectionKind::learned, "learned"}, {SelectionKind::truncation, "truncation"}};
constexpr std::pair<MraKind, std::string_view> kMraNames[] = {{MraKind::learned, "learned"},
                                                              {MraKind::fixed, "fixed"},
                                                              {MraKind::one_fifth, "one_fifth"},
                                                              {MraKind::samr, "samr"},
                                                              {MraKind::gesmr, "gesmr"}};
constexpr std::pair<SamplingKind, std::string_view> kSamplingNames[] = {{SamplingKind::uniform, "uniform"},
                                                                        {SamplingKind::learned, "learned"}};
constexpr std::pair<CrossoverKind, std::string_view> kCrossoverNames[] = {{CrossoverKind::none, "none"},
                                                                          {CrossoverKind::learned, "learned"}};

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

std::string_view to_string(SelectionKind k) { return enum_name(k, kSelectionNames); }
std::string_view to_string(MraKind k) { return enum_name(k, kMraNames); }
std::string_view to_string(SamplingKind k) { return enum_name(k, kSamplingNames); }
std::string_view to_string(CrossoverKind k) { return enum_name(k, kCrossoverNames); }
SelectionKind parse_selection(std::string_view s) { return parse_enum(s, kSelectionNames, "selection"); }
MraKind parse_mra(std::string_view s) { return parse_enum(s, kMraNames, "mra"); }
SamplingKind parse_sampling(std::string_view s) { return parse_enum(s, kSamplingNames, "sampling"); }
CrossoverKind parse_crossover(std::string_view s) { return parse_enum(s, kCrossoverNames, "crossover"); }

std::size_t GaConfig::num_elites() const {
  if (elite_ratio <= 0.0) return 1;
  // the epsilon keeps e.g. 0.15 * 20 from rounding up to 4
  const auto e = static_cast<std::size_t>(std::ceil(elite_ratio * static_cast<double>(population_size) - 1e-9));
  return std::clamp<std::size_t>(e, 1, population_size);
}

bool GaConfig::needs_params() const {
  return selection == SelectionKind::learned || mra == MraKind::learned || sampling == SamplingKind::learned ||
         crossover == CrossoverKind::learned;
}

void GaConfig::validate() const {
  if (population_size == 0) throw std::invalid_argument("GaConfig: population size must be positive");
  if (!(elite_ratio >= 0.0 && elite_ratio <= 1.0)) throw std::invalid_argument("GaConfig: elite ratio must be in [0, 1]");
  if (!std::isfinite(sigma_init) || sigma_init < 0.0) throw std::invalid_argument("GaConfig: sigma_init must be >= 0");
  if (sigma_init == 0.0 && mra != MraKind::fixed) {
    throw std::invalid_argument("GaConfig: sigma_init must be positive for adaptive mutation rates");
  }
  if (mra == MraKind::samr && !(samr_meta_rate > 0.0)) throw std::invalid_argument("GaConfig: samr meta rate must be positive");
  if (mra == MraKind::gesmr && (gesmr_groups == 0 || population_size % gesmr_groups != 0)) {
    throw std::invalid_argument("GaConfig: " + std::to_string(gesmr_groups) +
                                " GESMR groups do not divide a population of " + std::to_string(population_size));
  }
}

GeneticAlgorithm::GeneticAlgorithm(GaConfig config, std::size_t dim, const ArchiveInit& init,
                                   const LgaParams* params)
    : config_(config), dim_(dim), params_(params) {
  config_.validate();
  if (dim_ == 0) throw std::invalid_argument("GeneticAlgorithm: dimension must be positive");
  if (config_.needs_params()) {
    if (params_ == nullptr) throw std::invalid_argument("GeneticAlgorithm: a learned operator needs LGA parameters");
    const auto& pc = params_->config();
    if (pc.fitness_dim != kFitnessFeatureDim || pc.sigma_dim != kSigmaFeatureDim) {
      throw std::invalid_argument("GeneticAlgorithm: LGA parameters expect different feature widths");
    }
    if (config_.sampling == SamplingKind::learned && !pc.sampling) {
      throw std::invalid_argument("GeneticAlgorithm: learned sampling needs sampling weights");
    }
    if (config_.crossover == CrossoverKind::learned && !pc.crossover) {
      throw std::invalid_argument("GeneticAlgorithm: learned cross-over needs cross-over weights");
    }
  }

  Rng init_rng(derive_seed(config_.seed, stream::kInit));
  state_.operator_rng = Rng(derive_seed(config_.seed, stream::kOperators));
  state_.mutation_rng = Rng(derive_seed(config_.seed, stream::kMutation));

  const std::size_t e = config_.num_elites();
  auto& archive = state_.archive;
  archive.x = Matrix(e, dim_);
  if (!init.point.empty()) {
    if (init.point.size() != dim_) throw std::invalid_argument("GeneticAlgorithm: initial point has wrong dimension");
    for (std::size_t i = 0; i < e; ++i) std::copy(init.point.begin(), init.point.end(), archive.x.row(i).begin());
  } else {
    if (!(init.low < init.high)) throw std::invalid_argument("GeneticAlgorithm: init box needs low < high");
    for (double& v : archive.x.values()) v = init_rng.uniform(init.low, init.high);
  }
  archive.fitness.assign(e, INFINITY);
  archive.sigma.assign(e, config_.sigma_init);
  archive.age.assign(e, 0);
  state_.shared_sigma = config_.sigma_init;
  if (config_.mra == MraKind::gesmr) state_.group_sigma.assign(config_.gesmr_groups, config_.sigma_init);
}

Offspring GeneticAlgorithm::ask() {
  const std::size_t n = config_.population_size;
  const auto& archive = state_.archive;
  auto& rng = state_.operator_rng;
  const bool warm = state_.evaluated;
  if (config_.record_debug) debug_.emplace();

  const bool learned_sampling = warm && config_.sampling == SamplingKind::learned;
  const bool learned_crossover_on = warm && config_.crossover == CrossoverKind::learned;
  Matrix parent_only_features;
  if (learned_sampling || learned_crossover_on) {
    parent_only_features = fitness_features(archive.fitness, state_.best_fitness);
  }

  std::vector<std::size_t> index;
  if (learned_sampling) {
    index = sample_parents(learned_sampling_probs(*params_, parent_only_features, archive.age), n, rng);
  } else {
    index = uniform_sample_parents(archive.size(), n, rng);
  }

  SampledParents sampled = learned_crossover_on
                               ? gather_parents(archive, learned_crossover(*params_, parent_only_features, archive.x), index)
                               : gather_parents(archive, index);

  std::vector<double> sigma(n);
  switch (config_.mra) {
    case MraKind::fixed:
      std::fill(sigma.begin(), sigma.end(), config_.sigma_init);
      break;
    case MraKind::one_fifth:
      std::fill(sigma.begin(), sigma.end(), state_.shared_sigma);
      break;
    case MraKind::gesmr: {
      const std::size_t group_size = n / config_.gesmr_groups;
      for (std::size_t j = 0; j < n; ++j) sigma[j] = state_.group_sigma[j / group_size];
      break;
    }
    case MraKind::samr:
      for (std::size_t j = 0; j < n; ++j) {
        sigma[j] = std::clamp(samr_adapt(sampled.sigma[j], config_.samr_meta_rate, rng), kMinSigma, kMaxSigma);
      }
      break;
    case MraKind::learned:
      if (warm) {
        Matrix features = build_sampled_parent_features(sampled.fitness, sampled.sigma, state_.best_fitness);
        const auto multipliers = learned_mra_multipliers(*params_, features);
        for (std::size_t j = 0; j < n; ++j) sigma[j] = std::clamp(multipliers[j] * sampled.sigma[j], kMinSigma, kMaxSigma);
        if (debug_) {
          debug_->mra_features = std::move(features);
          debug_->sigma_multipliers = multipliers;
        }
      } else {
        sigma = sampled.sigma;
      }
      break;
  }

  Offspring out{gaussian_mutate(sampled.x, sigma, state_.mutation_rng), std::move(sigma)};
  if (debug_) debug_->sampled_parents = sampled.index;
  pending_ = std::move(sampled);
  return out;
}

void GeneticAlgorithm::tell(const Matrix& x, std::span<const double> fitness, std::span<const double> sigma) {
  const std::size_t n = config_.population_size;
  if (x.rows() != n || x.cols() != dim_ || fitness.size() != n || sigma.size() != n) {
    throw std::invalid_argument("GeneticAlgorithm::tell: shapes do not match the configuration");
  }
  for (double f : fitness) {
    if (!std::isfinite(f)) throw std::invalid_argument("GeneticAlgorithm::tell: non-finite fitness");
  }
  for (double s : sigma) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("GeneticAlgorithm::tell: invalid mutation rate");
  }

  Population children{x, {fitness.begin(), fitness.end()}, {sigma.begin(), sigma.end()}};
  const double previous_best = state_.best_fitness;
  auto& archive = state_.archive;

  if (!state_.evaluated || config_.selection == SelectionKind::truncation) {
    archive = truncation_selection(children, archive);
  } else {
    // flags compare against the best seen before this batch
    auto features = build_joint_fitness_features(children.fitness, archive.fitness, previous_best);
    Matrix logits = learned_selection_logits(*params_, features.parents, features.children);
    Matrix probs = selection_probs_from_logits(logits);
    const SelectionSample sample = sample_selection(probs, state_.operator_rng);
    archive = apply_selection(sample, children, archive);
    if (debug_) {
      debug_->child_features = std::move(features.children);
      debug_->parent_features = std::move(features.parents);
      debug_->selection_logits = std::move(logits);
      debug_->selection_probs = std::move(probs);
      debug_->selection_choice = sample.choice;
    }
  }

  const bool parents_known =
      pending_ && std::all_of(pending_->fitness.begin(), pending_->fitness.end(), [](double f) { return std::isfinite(f); });
  if (parents_known && pending_->fitness.size() == n) {
    if (config_.mra == MraKind::one_fifth) {
      std::size_t successes = 0;
      for (std::size_t j = 0; j < n; ++j) successes += fitness[j] < pending_->fitness[j] ? 1 : 0;
      state_.shared_sigma = mr_one_fifth(state_.shared_sigma, successes, n);
    } else if (config_.mra == MraKind::gesmr) {
      const std::size_t groups = config_.gesmr_groups;
      const std::size_t group_size = n / groups;
      std::vector<double> improvement(groups);
      for (std::size_t g = 0; g < groups; ++g) {
        double best_child = INFINITY;
        double best_parent = INFINITY;
        for (std::size_t j = g * group_size; j < (g + 1) * group_size; ++j) {
          best_child = std::min(best_child, fitness[j]);
          best_parent = std::min(best_parent, pending_->fitness[j]);
        }
        improvement[g] = best_child - best_parent;
      }
      state_.group_sigma = gesmr_adapt(state_.group_sigma, improvement, n, state_.operator_rng);
    }
  }

  for (std::size_t j = 0; j < n; ++j) {
    if (fitness[j] < state_.best_fitness) {
      state_.best_fitness = fitness[j];
      state_.best_x.assign(x.row(j).begin(), x.row(j).end());
    }
  }
  state_.evaluated = true;
  state_.generation += 1;
  pending_.reset();
  last_debug_ = std::move(debug_);
  debug_.reset();
}

Trajectory run(const GaConfig& config, const LgaParams* params, const Task& task) {
  return run(config, params, task, task.default_init());
}

Trajectory run(const GaConfig& config, const LgaParams* params, const Task& task, const ArchiveInit& init) {
  GeneticAlgorithm ga(config, task.dim(), init, params);
  Rng eval_rng(derive_seed(config.seed, stream::kEvaluation));
  Trajectory out;
  out.reserve(config.generations);
  for (std::size_t t = 0; t < config.generations; ++t) {
    Offspring children = ga.ask();
    const auto fitness = task.evaluate(children.x, eval_rng);
    ga.tell(children.x, fitness, children.sigma);

    GenerationRecord rec;
    rec.fitness = fitness;
    rec.best_of_generation = *std::min_element(fitness.begin(), fitness.end());
    rec.best_so_far = ga.state().best_fitness;
    rec.mean_sigma = mean(children.sigma);
    if (config.record_debug) rec.debug = ga.last_debug();
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace lga
