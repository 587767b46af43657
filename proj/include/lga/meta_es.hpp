#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lga/matrix.hpp"
#include "lga/rng.hpp"

namespace lga {

/// OpenAI-ES with antithetic sampling, centered-rank shaping and Adam.
struct MetaEsConfig {
  std::size_t population = 512;  // M, even
  double lr_init = 0.01;
  double lr_decay = 0.999;
  double lr_final = 0.001;
  double sigma_init = 0.1;
  double sigma_decay = 0.999;
  double sigma_final = 0.001;
  /// lambda: mu <- (1 - lambda) mu after every update.
  double mean_decay = 0.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
};

struct MetaEsState {
  std::vector<double> mean;
  double sigma = 0.0;
  double lr = 0.0;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  std::size_t generation = 0;
};

MetaEsState meta_es_init(const MetaEsConfig& config, std::vector<double> mean);

/// Row 2k is mu + sigma * eps_k and row 2k + 1 is mu - sigma * eps_k.
struct MetaCandidates {
  Matrix noise;  // M/2 x P
  Matrix theta;  // M x P
};

MetaCandidates meta_ask(const MetaEsConfig& config, const MetaEsState& state, Rng& rng);

/// (1 / (M sigma)) * sum_i shaped_i * eps_i, with eps_{2k+1} = -eps_k.
std::vector<double> estimate_gradient(const MetaCandidates& candidates, std::span<const double> shaped, double sigma);

/// Shapes `meta_fitness` (lower is better) by centered ranks, takes one Adam
/// step against the gradient estimate, decays the mean, then the schedules.
MetaEsState meta_tell(const MetaEsConfig& config, MetaEsState state, const MetaCandidates& candidates,
                      std::span<const double> meta_fitness);

}  // namespace lga
