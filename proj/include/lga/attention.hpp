#pragma once

#include <span>

#include "lga/matrix.hpp"

namespace lga {

/// Row-wise softmax with max subtraction. Throws std::invalid_argument on
/// non-finite input.
Matrix row_softmax(const Matrix& logits);

/// softmax(Q K^T / sqrt(d_k)) V, with d_k = Q.cols().
///
/// Each output row depends only on its own query row, so permuting the rows of
/// Q permutes the output identically (bit-exact). Jointly permuting K and V
/// leaves the output unchanged up to summation order.
Matrix sdpa(const Matrix& query, const Matrix& key, const Matrix& value);

/// Attention inputs for one head.
struct HeadInputs {
  Matrix query;
  Matrix key;
  Matrix value;
};

/// Runs sdpa per head, concatenates the head outputs column-wise and projects
/// the result with `w_out` (rows = heads * value.cols()).
///
/// With one head and w_out = I this is exactly sdpa().
Matrix multi_head_sdpa(std::span<const HeadInputs> heads, const Matrix& w_out);

}  // namespace lga
