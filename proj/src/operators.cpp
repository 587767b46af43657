#include "lga/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lga/attention.hpp"
#include "lga/features.hpp"

namespace lga {
namespace {

/// Attention layer with queries from `query_in` and keys/values from `kv_in`.
Matrix attend(const AttentionWeights& w, const Matrix& query_in, const Matrix& kv_in) {
  if (w.query.empty()) throw std::invalid_argument("attention weights are missing");
  if (query_in.cols() != w.query.front().rows() || kv_in.cols() != w.key.front().rows()) {
    throw std::invalid_argument("attention: feature width " + std::to_string(query_in.cols()) +
                                " does not match embedding rows " + std::to_string(w.query.front().rows()));
  }
  if (w.query.size() == 1) {
    return sdpa(matmul(query_in, w.query[0]), matmul(kv_in, w.key[0]), matmul(kv_in, w.value[0]));
  }
  std::vector<HeadInputs> heads;
  heads.reserve(w.query.size());
  for (std::size_t h = 0; h < w.query.size(); ++h) {
    heads.push_back({matmul(query_in, w.query[h]), matmul(kv_in, w.key[h]), matmul(kv_in, w.value[h])});
  }
  return multi_head_sdpa(heads, w.output);
}

}  // namespace

SampledParents gather_parents(const ParentArchive& archive, std::span<const std::size_t> index) {
  return gather_parents(archive, archive.x, index);
}

SampledParents gather_parents(const ParentArchive& archive, const Matrix& x,
                              std::span<const std::size_t> index) {
  SampledParents out;
  out.index.assign(index.begin(), index.end());
  out.x = gather_rows(x, index);
  out.fitness.reserve(index.size());
  out.sigma.reserve(index.size());
  for (std::size_t i : index) {
    out.fitness.push_back(archive.fitness[i]);
    out.sigma.push_back(archive.sigma[i]);
  }
  return out;
}

Matrix learned_selection_logits(const LgaParams& params, const Matrix& parent_features,
                                const Matrix& child_features) {
  const Matrix attended = attend(params.selection_attention, parent_features, child_features);
  const Matrix query = matmul(attended, params.selection_query);
  const Matrix key = matmul(child_features, params.selection_key);
  Matrix logits = matmul_transposed(query, key);
  const double scale = 1.0 / std::sqrt(static_cast<double>(params.config().key_dim));
  for (double& v : logits.values()) v *= scale;
  return logits;
}

Matrix selection_probs_from_logits(const Matrix& logits) {
  Matrix padded(logits.rows(), logits.cols() + 1, 1.0);
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    std::copy(logits.row(i).begin(), logits.row(i).end(), padded.row(i).begin());
  }
  return row_softmax(padded);
}

Matrix learned_selection_probs(const LgaParams& params, const Matrix& parent_features,
                               const Matrix& child_features) {
  return selection_probs_from_logits(learned_selection_logits(params, parent_features, child_features));
}

Matrix SelectionSample::mask() const {
  Matrix m(choice.size(), columns);
  for (std::size_t i = 0; i < choice.size(); ++i) m(i, choice[i]) = 1.0;
  return m;
}

std::size_t sample_categorical(std::span<const double> probs, Rng& rng) {
  if (probs.empty()) throw std::invalid_argument("sample_categorical: empty distribution");
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] > 0.0) {
      cumulative += probs[j];
      last_positive = j;
      if (u < cumulative) return j;
    }
  }
  return last_positive;  // rounding left u above the total mass
}

SelectionSample sample_selection(const Matrix& probs, Rng& rng) {
  SelectionSample s;
  s.columns = probs.cols();
  s.choice.reserve(probs.rows());
  for (std::size_t i = 0; i < probs.rows(); ++i) s.choice.push_back(sample_categorical(probs.row(i), rng));
  return s;
}

ParentArchive apply_selection(const SelectionSample& sample, const Population& children,
                              const ParentArchive& archive) {
  const std::size_t n = children.fitness.size();
  if (sample.columns != n + 1 || sample.choice.size() != archive.size()) {
    throw std::invalid_argument("apply_selection: selection sample does not match population shapes");
  }
  ParentArchive out = archive;
  for (std::size_t i = 0; i < sample.choice.size(); ++i) {
    const std::size_t j = sample.choice[i];
    if (j < n) {
      std::copy(children.x.row(j).begin(), children.x.row(j).end(), out.x.row(i).begin());
      out.fitness[i] = children.fitness[j];
      out.sigma[i] = children.sigma[j];
      out.age[i] = 0;
    } else {
      out.age[i] += 1;
    }
  }
  return out;
}

std::vector<double> learned_mra_multipliers(const LgaParams& params, const Matrix& mra_features) {
  const Matrix attended = attend(params.mra_attention, mra_features, mra_features);
  const Matrix projected = matmul(attended, params.mra_projection);
  std::vector<double> out(projected.rows());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::clamp(std::exp(0.5 * projected(i, 0)), kMinSigmaMultiplier, kMaxSigmaMultiplier);
  }
  return out;
}

std::vector<double> learned_mra(const LgaParams& params, const Matrix& mra_features,
                                std::span<const double> sampled_sigma) {
  if (mra_features.rows() != sampled_sigma.size()) {
    throw std::invalid_argument("learned_mra: feature rows do not match sigma length");
  }
  auto out = learned_mra_multipliers(params, mra_features);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= sampled_sigma[i];
  return out;
}

std::vector<double> learned_sampling_probs(const LgaParams& params, const Matrix& parent_features,
                                           std::span<const long> age) {
  if (!params.config().sampling) throw std::invalid_argument("learned_sampling_probs: params have no sampling weights");
  if (age.size() != parent_features.rows()) throw std::invalid_argument("learned_sampling_probs: age length mismatch");
  Matrix age_col(age.size(), 1);
  for (std::size_t i = 0; i < age.size(); ++i) age_col(i, 0) = std::tanh(static_cast<double>(age[i]) / kAgeScale);
  const Matrix features = hconcat(parent_features, age_col);
  const Matrix scores = attend(params.sampling_attention, features, features);  // E x 1

  Matrix logits(1, scores.rows());
  for (std::size_t i = 0; i < scores.rows(); ++i) logits(0, i) = scores(i, 0);
  const Matrix probs = row_softmax(logits);
  return {probs.values().begin(), probs.values().end()};
}

std::vector<std::size_t> sample_parents(std::span<const double> probs, std::size_t count, Rng& rng) {
  std::vector<std::size_t> out(count);
  for (auto& i : out) i = sample_categorical(probs, rng);
  return out;
}

Matrix crossover_dimension_features(std::span<const double> column) {
  const auto z = z_score(column);
  Matrix out(column.size(), 2);
  for (std::size_t i = 0; i < column.size(); ++i) {
    out(i, 0) = z[i];
    out(i, 1) = std::abs(z[i]);
  }
  return out;
}

Matrix learned_crossover(const LgaParams& params, const Matrix& parent_features, const Matrix& parents_x) {
  if (!params.config().crossover) throw std::invalid_argument("learned_crossover: params have no cross-over weights");
  if (parent_features.rows() != parents_x.rows()) {
    throw std::invalid_argument("learned_crossover: feature rows do not match archive rows");
  }
  Matrix out = parents_x;
  for (std::size_t d = 0; d < parents_x.cols(); ++d) {
    const auto column = parents_x.col(d);
    const Matrix features = hconcat(parent_features, crossover_dimension_features(column));
    const Matrix z = attend(params.crossover_attention, features, features);
    const Matrix delta = matmul(z, params.crossover_projection);
    for (std::size_t i = 0; i < out.rows(); ++i) out(i, d) += delta(i, 0);
  }
  return out;
}

std::vector<std::size_t> uniform_sample_parents(std::size_t archive_size, std::size_t count, Rng& rng) {
  if (archive_size == 0) throw std::invalid_argument("uniform_sample_parents: empty archive");
  std::vector<std::size_t> out(count);
  for (auto& i : out) i = rng.index(archive_size);
  return out;
}

Matrix gaussian_mutate(const Matrix& x, std::span<const double> sigma, Rng& rng) {
  if (sigma.size() != x.rows()) throw std::invalid_argument("gaussian_mutate: sigma length mismatch");
  Matrix out = x;
  for (std::size_t j = 0; j < x.rows(); ++j) {
    for (double& v : out.row(j)) v += sigma[j] * rng.normal();
  }
  return out;
}

Matrix gaussian_mutate(const Matrix& x, std::span<const double> sigma, const Matrix& noise) {
  if (sigma.size() != x.rows() || noise.rows() != x.rows() || noise.cols() != x.cols()) {
    throw std::invalid_argument("gaussian_mutate: shape mismatch");
  }
  Matrix out = x;
  for (std::size_t j = 0; j < x.rows(); ++j) {
    for (std::size_t d = 0; d < x.cols(); ++d) out(j, d) += sigma[j] * noise(j, d);
  }
  return out;
}

ParentArchive truncation_selection(const Population& children, const ParentArchive& archive) {
  const std::size_t n = children.fitness.size();
  const std::size_t e = archive.size();
  std::vector<std::size_t> pool(n + e);
  std::iota(pool.begin(), pool.end(), 0);
  const auto fitness_of = [&](std::size_t k) { return k < n ? children.fitness[k] : archive.fitness[k - n]; };
  std::stable_sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) { return fitness_of(a) < fitness_of(b); });

  ParentArchive out;
  out.x = Matrix(e, archive.x.cols());
  out.fitness.resize(e);
  out.sigma.resize(e);
  out.age.resize(e);
  for (std::size_t i = 0; i < e; ++i) {
    const std::size_t k = pool[i];
    if (k < n) {
      std::copy(children.x.row(k).begin(), children.x.row(k).end(), out.x.row(i).begin());
      out.fitness[i] = children.fitness[k];
      out.sigma[i] = children.sigma[k];
      out.age[i] = 0;
    } else {
      const std::size_t p = k - n;
      std::copy(archive.x.row(p).begin(), archive.x.row(p).end(), out.x.row(i).begin());
      out.fitness[i] = archive.fitness[p];
      out.sigma[i] = archive.sigma[p];
      out.age[i] = archive.age[p] + 1;
    }
  }
  return out;
}

double mr_one_fifth(double sigma, std::size_t successes, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("mr_one_fifth: no trials");
  // successes / trials >= 1/5, in integers
  const bool grow = 5 * successes >= trials;
  return std::clamp(grow ? 2.0 * sigma : 0.5 * sigma, kMinSigma, kMaxSigma);
}

double samr_adapt(double parent_sigma, double meta_rate, Rng& rng) {
  const double m = rng.uniform() < 0.5 ? meta_rate : 1.0 / meta_rate;
  return parent_sigma * m;
}

std::size_t gesmr_elite_group(std::span<const double> improvements) {
  if (improvements.empty()) throw std::invalid_argument("gesmr: no groups");
  return static_cast<std::size_t>(std::min_element(improvements.begin(), improvements.end()) -
                                  improvements.begin());
}

std::vector<double> gesmr_adapt(std::span<const double> group_sigma, std::span<const double> improvements,
                                std::size_t population_size, Rng& rng) {
  const std::size_t k = group_sigma.size();
  if (k == 0 || improvements.size() != k) throw std::invalid_argument("gesmr_adapt: group count mismatch");
  if (population_size % k != 0) {
    throw std::invalid_argument("gesmr_adapt: " + std::to_string(k) + " groups do not divide a population of " +
                                std::to_string(population_size));
  }
  const std::size_t elite = gesmr_elite_group(improvements);
  const double elite_sigma = group_sigma[elite];
  const double ln2 = std::log(2.0);
  std::vector<double> out(k);
  for (std::size_t g = 0; g < k; ++g) {
    out[g] = g == elite ? elite_sigma : std::clamp(elite_sigma * std::exp(rng.uniform(-ln2, ln2)), kMinSigma, kMaxSigma);
  }
  return out;
}

}  // namespace lga
