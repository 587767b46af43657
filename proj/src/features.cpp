#include "lga/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lga {
namespace {

void require_finite(std::span<const double> f, const char* what) {
  for (double v : f) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite value");
  }
}

}  // namespace

std::vector<double> centered_ranks(std::span<const double> f) {
  require_finite(f, "centered_ranks");
  const std::size_t n = f.size();
  if (n == 0) throw std::invalid_argument("centered_ranks: empty input");
  std::vector<double> out(n, 0.0);
  if (n == 1) return out;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });

  const double denom = static_cast<double>(n - 1);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && f[order[end]] == f[order[start]]) ++end;
    // positions start..end-1 share one value
    const double avg_rank = 0.5 * static_cast<double>(start + end - 1);
    for (std::size_t k = start; k < end; ++k) out[order[k]] = avg_rank / denom - 0.5;
    start = end;
  }
  return out;
}

std::vector<double> z_score(std::span<const double> f) {
  require_finite(f, "z_score");
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  double mean = 0.0;
  for (double v : f) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : f) var += (v - mean) * (v - mean);
  const double std = std::sqrt(var / static_cast<double>(n));
  if (!(std >= kZeroVarianceGuard)) return out;
  for (std::size_t i = 0; i < n; ++i) out[i] = (f[i] - mean) / std;
  return out;
}

Matrix fitness_features(std::span<const double> f, double best_so_far) {
  const auto z = z_score(f);
  const auto ranks = centered_ranks(f);
  Matrix out(f.size(), kFitnessFeatureDim);
  for (std::size_t i = 0; i < f.size(); ++i) {
    out(i, 0) = z[i];
    out(i, 1) = ranks[i];
    out(i, 2) = f[i] < best_so_far ? 1.0 : 0.0;
  }
  return out;
}

JointFitnessFeatures build_joint_fitness_features(std::span<const double> child_fitness,
                                                  std::span<const double> parent_fitness,
                                                  double best_so_far) {
  const std::size_t n = child_fitness.size();
  const std::size_t e = parent_fitness.size();
  if (n == 0 || e == 0) {
    throw std::invalid_argument("build_joint_fitness_features: need at least one child and one parent");
  }
  std::vector<double> joint(child_fitness.begin(), child_fitness.end());
  joint.insert(joint.end(), parent_fitness.begin(), parent_fitness.end());

  JointFitnessFeatures out;
  out.joint = fitness_features(joint, best_so_far);
  out.children = Matrix(n, kFitnessFeatureDim);
  out.parents = Matrix(e, kFitnessFeatureDim);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(out.joint.row(i).begin(), out.joint.row(i).end(), out.children.row(i).begin());
  }
  for (std::size_t i = 0; i < e; ++i) {
    std::copy(out.joint.row(n + i).begin(), out.joint.row(n + i).end(), out.parents.row(i).begin());
  }
  return out;
}

Matrix sigma_features(std::span<const double> sigma) {
  for (double s : sigma) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("sigma_features: mutation rates must be positive and finite");
    }
  }
  const auto z = z_score(sigma);
  const auto [lo, hi] = std::minmax_element(sigma.begin(), sigma.end());
  const double range = sigma.empty() ? 0.0 : *hi - *lo;
  Matrix out(sigma.size(), kSigmaFeatureDim);
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    out(i, 0) = z[i];
    out(i, 1) = range == 0.0 ? 0.0 : 2.0 * (sigma[i] - *lo) / range - 1.0;
  }
  return out;
}

Matrix build_sampled_parent_features(std::span<const double> sampled_fitness,
                                     std::span<const double> sampled_sigma,
                                     double best_so_far) {
  if (sampled_fitness.size() != sampled_sigma.size()) {
    throw std::invalid_argument("build_sampled_parent_features: fitness/sigma length mismatch");
  }
  return hconcat(fitness_features(sampled_fitness, best_so_far), sigma_features(sampled_sigma));
}

}  // namespace lga
