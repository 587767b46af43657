#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lga/matrix.hpp"
#include "lga/params.hpp"
#include "lga/rng.hpp"

namespace lga {

/// Evaluated candidates with their mutation rates.
struct Population {
  Matrix x;                    // N x D
  std::vector<double> fitness;  // N
  std::vector<double> sigma;    // N
};

/// Elite solutions kept between generations.
struct ParentArchive {
  Matrix x;                    // E x D
  std::vector<double> fitness;  // E
  std::vector<double> sigma;    // E, > 0
  std::vector<long> age;       // generations survived

  std::size_t size() const { return fitness.size(); }
  friend bool operator==(const ParentArchive&, const ParentArchive&) = default;
};

/// Parents drawn (with replacement) for the next batch of children.
struct SampledParents {
  std::vector<std::size_t> index;  // archive rows
  Matrix x;
  std::vector<double> fitness;
  std::vector<double> sigma;
};

SampledParents gather_parents(const ParentArchive& archive, std::span<const std::size_t> index);
SampledParents gather_parents(const ParentArchive& archive, const Matrix& x,
                              std::span<const std::size_t> index);

// ---------------------------------------------------------------------------
// Learned selection

/// Raw logits m_ij = (A^S W_QS)(F_C W_KS)^T / sqrt(D_K), E x N.
Matrix learned_selection_logits(const LgaParams& params, const Matrix& parent_features,
                                const Matrix& child_features);

/// Softmax over [logits, 1] per parent row, E x (N + 1). Column N keeps the parent.
Matrix selection_probs_from_logits(const Matrix& logits);

Matrix learned_selection_probs(const LgaParams& params, const Matrix& parent_features,
                               const Matrix& child_features);

/// One categorical draw per parent row; choice[i] == N keeps parent i.
struct SelectionSample {
  std::vector<std::size_t> choice;
  std::size_t columns = 0;  // N + 1

  /// 0/1 matrix with exactly one 1 per row.
  Matrix mask() const;
};

/// Index drawn from a discrete distribution (one uniform draw).
std::size_t sample_categorical(std::span<const double> probs, Rng& rng);

SelectionSample sample_selection(const Matrix& probs, Rng& rng);

/// Replaces parent i with child choice[i] (age 0) or keeps it (age + 1).
ParentArchive apply_selection(const SelectionSample& sample, const Population& children,
                              const ParentArchive& archive);

// ---------------------------------------------------------------------------
// Learned mutation-rate adaptation

/// Lower/upper clamp of the multiplicative rate change.
inline constexpr double kMinSigmaMultiplier = 4.5399929762484854e-05;  // e^-10
inline constexpr double kMaxSigmaMultiplier = 22026.465794806718;      // e^10

/// exp(0.5 * A^M W_sigma), clamped to [e^-10, e^10]; one entry per row of `features`.
std::vector<double> learned_mra_multipliers(const LgaParams& params, const Matrix& mra_features);

/// Child mutation rates: multiplier ⊙ sampled_sigma.
std::vector<double> learned_mra(const LgaParams& params, const Matrix& mra_features,
                                std::span<const double> sampled_sigma);

// ---------------------------------------------------------------------------
// Learned sampling and cross-over

/// Scale of the age transform tanh(age / kAgeScale).
inline constexpr double kAgeScale = 20.0;

/// Parent sampling distribution (length E, sums to 1).
std::vector<double> learned_sampling_probs(const LgaParams& params, const Matrix& parent_features,
                                           std::span<const long> age);

/// `count` draws with replacement from `probs`.
std::vector<std::size_t> sample_parents(std::span<const double> probs, std::size_t count, Rng& rng);

/// Per-dimension diversity features of one archive column: z-score and
/// |x - mean| / std (zero when the column has no spread). E x 2.
Matrix crossover_dimension_features(std::span<const double> column);

/// X^P + ΔX^P, where ΔX^P[:, d] comes from self-attention over [F_P, features(X^P[:, d])].
Matrix learned_crossover(const LgaParams& params, const Matrix& parent_features, const Matrix& parents_x);

// ---------------------------------------------------------------------------
// White-box operators

std::vector<std::size_t> uniform_sample_parents(std::size_t archive_size, std::size_t count, Rng& rng);

/// x_j + sigma_j * eps_j with eps ~ N(0, I) drawn row by row from `rng`.
Matrix gaussian_mutate(const Matrix& x, std::span<const double> sigma, Rng& rng);
/// Same with explicit noise.
Matrix gaussian_mutate(const Matrix& x, std::span<const double> sigma, const Matrix& noise);

/// Top-E of parents + children by fitness (stable; children win ties).
ParentArchive truncation_selection(const Population& children, const ParentArchive& archive);

inline constexpr double kMinSigma = 1e-8;
inline constexpr double kMaxSigma = 1e3;

/// 2 sigma when successes / trials >= 1/5, sigma / 2 otherwise; clamped to [1e-8, 1e3].
double mr_one_fifth(double sigma, std::size_t successes, std::size_t trials);

/// sigma * m with m drawn uniformly from {meta_rate, 1 / meta_rate}.
double samr_adapt(double parent_sigma, double meta_rate, Rng& rng);

/// Group whose improvement is lowest (first on ties).
std::size_t gesmr_elite_group(std::span<const double> improvements);

/// Keeps the elite group's rate and resamples the others as
/// sigma_elite * exp(u), u ~ U(-ln 2, ln 2). Throws when the group count does
/// not divide `population_size`.
std::vector<double> gesmr_adapt(std::span<const double> group_sigma, std::span<const double> improvements,
                                std::size_t population_size, Rng& rng);

}  // namespace lga
