#pragma once

// Straightforward reference implementations used as test oracles. They share
// no code with the library: plain loops, long double accumulation, no max
// subtraction in softmax.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lga/matrix.hpp"
#include "lga/rng.hpp"

namespace oracle {

using Table = std::vector<std::vector<long double>>;

inline Table table(const lga::Matrix& m) {
  Table t(m.rows(), std::vector<long double>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) t[r][c] = m(r, c);
  }
  return t;
}

inline lga::Matrix matrix(const Table& t) {
  lga::Matrix m(t.size(), t.empty() ? 0 : t[0].size());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = static_cast<double>(t[r][c]);
  }
  return m;
}

inline Table mul(const Table& a, const Table& b) {
  Table out(a.size(), std::vector<long double>(b[0].size(), 0.0L));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b[0].size(); ++j) {
      for (std::size_t k = 0; k < b.size(); ++k) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

inline Table transpose(const Table& a) {
  Table out(a[0].size(), std::vector<long double>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[0].size(); ++j) out[j][i] = a[i][j];
  }
  return out;
}

inline Table softmax_rows(const Table& a) {
  Table out = a;
  for (auto& row : out) {
    long double total = 0.0L;
    for (auto& v : row) total += (v = std::exp(v));
    for (auto& v : row) v /= total;
  }
  return out;
}

inline Table sdpa(const Table& q, const Table& k, const Table& v) {
  Table logits = mul(q, transpose(k));
  const long double scale = 1.0L / std::sqrt(static_cast<long double>(q[0].size()));
  for (auto& row : logits) {
    for (auto& x : row) x *= scale;
  }
  return mul(softmax_rows(logits), v);
}

inline lga::Matrix sdpa(const lga::Matrix& q, const lga::Matrix& k, const lga::Matrix& v) {
  return matrix(sdpa(table(q), table(k), table(v)));
}

inline lga::Matrix random_matrix(std::size_t rows, std::size_t cols, lga::Rng& rng, double scale = 1.0) {
  lga::Matrix m(rows, cols);
  for (double& x : m.values()) x = scale * rng.normal();
  return m;
}

/// Mean-centred z-score with population std; zeros when std < 1e-10.
inline std::vector<double> z_score(const std::vector<double>& f) {
  long double mean = 0.0L;
  for (double x : f) mean += x;
  mean /= f.size();
  long double var = 0.0L;
  for (double x : f) var += (x - mean) * (x - mean);
  const long double sd = std::sqrt(var / f.size());
  std::vector<double> out(f.size(), 0.0);
  if (sd < 1e-10L) return out;
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = static_cast<double>((f[i] - mean) / sd);
  return out;
}

/// Average ranks by counting: rank_i = #{j : f_j < f_i} + (#{j : f_j == f_i} - 1) / 2.
inline std::vector<double> centered_ranks(const std::vector<double>& f) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n == 1) return out;
  for (std::size_t i = 0; i < n; ++i) {
    double less = 0.0;
    double equal = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      less += f[j] < f[i] ? 1.0 : 0.0;
      equal += f[j] == f[i] ? 1.0 : 0.0;
    }
    out[i] = (less + (equal - 1.0) / 2.0) / static_cast<double>(n - 1) - 0.5;
  }
  return out;
}

inline lga::Matrix fitness_features(const std::vector<double>& f, double best) {
  const auto z = z_score(f);
  const auto r = centered_ranks(f);
  lga::Matrix out(f.size(), 3);
  for (std::size_t i = 0; i < f.size(); ++i) {
    out(i, 0) = z[i];
    out(i, 1) = r[i];
    out(i, 2) = f[i] < best ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace oracle
