#include "lga/attention.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lga {

Matrix row_softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const auto in = logits.row(i);
    auto dst = out.row(i);
    double peak = -INFINITY;
    for (double v : in) {
      if (!std::isfinite(v)) throw std::invalid_argument("row_softmax: non-finite logit");
      peak = std::max(peak, v);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      dst[j] = std::exp(in[j] - peak);
      total += dst[j];
    }
    for (double& v : dst) v /= total;
  }
  return out;
}

Matrix sdpa(const Matrix& query, const Matrix& key, const Matrix& value) {
  if (query.cols() != key.cols()) {
    throw std::invalid_argument("sdpa: query has " + std::to_string(query.cols()) +
                                " columns, key has " + std::to_string(key.cols()));
  }
  if (key.rows() != value.rows()) {
    throw std::invalid_argument("sdpa: key has " + std::to_string(key.rows()) +
                                " rows, value has " + std::to_string(value.rows()));
  }
  if (key.rows() == 0) throw std::invalid_argument("sdpa: empty key set");
  Matrix scores = matmul_transposed(query, key);
  const double scale = 1.0 / std::sqrt(static_cast<double>(query.cols()));
  for (double& v : scores.values()) v *= scale;
  return matmul(row_softmax(scores), value);
}

Matrix multi_head_sdpa(std::span<const HeadInputs> heads, const Matrix& w_out) {
  if (heads.empty()) throw std::invalid_argument("multi_head_sdpa: need at least one head");
  const std::size_t value_cols = heads.front().value.cols();
  if (w_out.rows() != heads.size() * value_cols) {
    throw std::invalid_argument("multi_head_sdpa: output projection has " +
                                std::to_string(w_out.rows()) + " rows, expected " +
                                std::to_string(heads.size() * value_cols));
  }
  Matrix concat = sdpa(heads.front().query, heads.front().key, heads.front().value);
  for (std::size_t h = 1; h < heads.size(); ++h) {
    const auto& head = heads[h];
    if (head.value.cols() != value_cols) {
      throw std::invalid_argument("multi_head_sdpa: heads disagree on value width");
    }
    concat = hconcat(concat, sdpa(head.query, head.key, head.value));
  }
  return matmul(concat, w_out);
}

}  // namespace lga
