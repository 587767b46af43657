#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lga/matrix.hpp"

namespace lga {

/// Columns of a fitness feature matrix: z-score, centered rank, improvement flag.
inline constexpr std::size_t kFitnessFeatureDim = 3;
/// Columns of a mutation-rate feature matrix: z-score, min-max map to [-1, 1].
inline constexpr std::size_t kSigmaFeatureDim = 2;
/// Standard deviations (and ranges) below this are treated as zero.
inline constexpr double kZeroVarianceGuard = 1e-10;

/// rank / (n - 1) - 0.5 with ascending ranks; ties get their average rank.
/// A single element maps to 0.
std::vector<double> centered_ranks(std::span<const double> f);

/// (f - mean) / std with population std; all zeros when std < kZeroVarianceGuard.
std::vector<double> z_score(std::span<const double> f);

/// n x 3 fitness features of `f`. The flag column is 1 iff f_i < best_so_far.
Matrix fitness_features(std::span<const double> f, double best_so_far);

/// Features computed over the concatenation [children, parents] and split back.
struct JointFitnessFeatures {
  Matrix joint;     // (N + E) x 3
  Matrix children;  // N x 3, rows 0..N-1 of joint
  Matrix parents;   // E x 3, rows N..N+E-1 of joint
};

JointFitnessFeatures build_joint_fitness_features(std::span<const double> child_fitness,
                                                  std::span<const double> parent_fitness,
                                                  double best_so_far);

/// n x 2 mutation-rate features. Throws on non-positive sigma.
Matrix sigma_features(std::span<const double> sigma);

/// [fitness_features(f_sampled), sigma_features(sigma_sampled)], n x 5.
Matrix build_sampled_parent_features(std::span<const double> sampled_fitness,
                                     std::span<const double> sampled_sigma,
                                     double best_so_far);

}  // namespace lga
