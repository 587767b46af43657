#include "lga/meta_es.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lga/features.hpp"

namespace lga {

void MetaEsConfig::validate() const {
  if (population == 0 || population % 2 != 0) {
    throw std::invalid_argument("MetaEsConfig: population must be positive and even for antithetic pairs");
  }
  if (!(lr_init >= 0.0) || !(sigma_init >= 0.0)) throw std::invalid_argument("MetaEsConfig: negative schedule start");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0) || !(sigma_decay > 0.0 && sigma_decay <= 1.0)) {
    throw std::invalid_argument("MetaEsConfig: decay factors must be in (0, 1]");
  }
  if (lr_final > lr_init || sigma_final > sigma_init) {
    throw std::invalid_argument("MetaEsConfig: schedule floor above its start value");
  }
  if (!(mean_decay >= 0.0 && mean_decay < 1.0)) throw std::invalid_argument("MetaEsConfig: mean decay must be in [0, 1)");
}

MetaEsState meta_es_init(const MetaEsConfig& config, std::vector<double> mean) {
  config.validate();
  MetaEsState s;
  s.adam_m.assign(mean.size(), 0.0);
  s.adam_v.assign(mean.size(), 0.0);
  s.mean = std::move(mean);
  s.sigma = config.sigma_init;
  s.lr = config.lr_init;
  return s;
}

MetaCandidates meta_ask(const MetaEsConfig& config, const MetaEsState& state, Rng& rng) {
  config.validate();
  const std::size_t pairs = config.population / 2;
  const std::size_t p = state.mean.size();
  MetaCandidates c{Matrix(pairs, p), Matrix(config.population, p)};
  for (double& e : c.noise.values()) e = rng.normal();
  for (std::size_t k = 0; k < pairs; ++k) {
    for (std::size_t d = 0; d < p; ++d) {
      const double step = state.sigma * c.noise(k, d);
      c.theta(2 * k, d) = state.mean[d] + step;
      c.theta(2 * k + 1, d) = state.mean[d] - step;
    }
  }
  return c;
}

std::vector<double> estimate_gradient(const MetaCandidates& candidates, std::span<const double> shaped, double sigma) {
  const std::size_t m = candidates.theta.rows();
  const std::size_t p = candidates.noise.cols();
  if (shaped.size() != m || candidates.noise.rows() * 2 != m) {
    throw std::invalid_argument("estimate_gradient: fitness count does not match the candidates");
  }
  std::vector<double> grad(p, 0.0);
  if (sigma == 0.0) return grad;
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = i % 2 == 0 ? 1.0 : -1.0;
    const auto eps = candidates.noise.row(i / 2);
    for (std::size_t d = 0; d < p; ++d) grad[d] += shaped[i] * sign * eps[d];
  }
  const double scale = 1.0 / (static_cast<double>(m) * sigma);
  for (double& g : grad) g *= scale;
  return grad;
}

MetaEsState meta_tell(const MetaEsConfig& config, MetaEsState state, const MetaCandidates& candidates,
                      std::span<const double> meta_fitness) {
  if (meta_fitness.size() != candidates.theta.rows() || candidates.theta.cols() != state.mean.size()) {
    throw std::invalid_argument("meta_tell: candidates and fitness do not match the search state");
  }
  const auto shaped = centered_ranks(meta_fitness);
  const auto grad = estimate_gradient(candidates, shaped, state.sigma);

  state.generation += 1;
  const double t = static_cast<double>(state.generation);
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const double m_correction = 1.0 - std::pow(b1, t);
  const double v_correction = 1.0 - std::pow(b2, t);
  for (std::size_t d = 0; d < state.mean.size(); ++d) {
    state.adam_m[d] = b1 * state.adam_m[d] + (1.0 - b1) * grad[d];
    state.adam_v[d] = b2 * state.adam_v[d] + (1.0 - b2) * grad[d] * grad[d];
    const double m_hat = state.adam_m[d] / m_correction;
    const double v_hat = state.adam_v[d] / v_correction;
    state.mean[d] -= state.lr * m_hat / (std::sqrt(v_hat) + config.adam_eps);
  }
  if (config.mean_decay > 0.0) {
    for (double& v : state.mean) v *= 1.0 - config.mean_decay;
  }
  state.lr = std::max(state.lr * config.lr_decay, config.lr_final);
  state.sigma = std::max(state.sigma * config.sigma_decay, config.sigma_final);
  return state;
}

}  // namespace lga
