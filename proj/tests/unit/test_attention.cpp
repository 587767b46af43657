#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "lga/attention.hpp"
#include "oracles.hpp"

using lga::Matrix;

TEST_CASE("row_softmax on small rows") {
  const Matrix p = lga::row_softmax(Matrix::from_rows({{0, 0, 0, 0}, {std::log(3.0), 0, 0, 0}}));
  for (std::size_t j = 0; j < 4; ++j) CHECK(p(0, j) == doctest::Approx(0.25).epsilon(1e-15));

  const Matrix two = lga::row_softmax(Matrix::from_rows({{std::log(3.0), 0}}));
  CHECK(two(0, 0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(two(0, 1) == doctest::Approx(0.25).epsilon(1e-15));

  const Matrix big = lga::row_softmax(Matrix::from_rows({{1000, 0}}));
  CHECK(std::isfinite(big(0, 0)));
  CHECK(big(0, 0) == 1.0);
  CHECK(big(0, 1) < 1e-300);
}

TEST_CASE("row_softmax rejects non-finite logits") {
  CHECK_THROWS_AS(lga::row_softmax(Matrix::from_rows({{0, NAN}})), std::invalid_argument);
  CHECK_THROWS_AS(lga::row_softmax(Matrix::from_rows({{INFINITY, 0}})), std::invalid_argument);
}

TEST_CASE("row_softmax rows sum to one and match the naive oracle") {
  lga::Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix logits = oracle::random_matrix(5, 9, rng, 4.0);
    const Matrix p = lga::row_softmax(logits);
    const Matrix expected = oracle::matrix(oracle::softmax_rows(oracle::table(logits)));
    CHECK(lga::max_abs_diff(p, expected) < 1e-14);
    for (std::size_t i = 0; i < p.rows(); ++i) {
      const double total = std::accumulate(p.row(i).begin(), p.row(i).end(), 0.0);
      CHECK(std::abs(total - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("sdpa with one key returns the value row") {
  const Matrix q = Matrix::from_rows({{1, 2}, {-3, 0.5}, {0, 0}});
  const Matrix k = Matrix::from_rows({{0.3, -1}});
  const Matrix v = Matrix::from_rows({{4, 5, 6}});
  const Matrix out = lga::sdpa(q, k, v);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(out(i, j) == doctest::Approx(v(0, j)).epsilon(1e-15));
  }
}

TEST_CASE("sdpa with identical keys averages the values") {
  lga::Rng rng(3);
  const Matrix q = oracle::random_matrix(4, 3, rng);
  Matrix k(6, 3);
  for (std::size_t i = 0; i < 6; ++i) {
    k(i, 0) = 0.2;
    k(i, 1) = -1.1;
    k(i, 2) = 2.0;
  }
  const Matrix v = oracle::random_matrix(6, 2, rng);
  const Matrix out = lga::sdpa(q, k, v);
  for (std::size_t j = 0; j < 2; ++j) {
    const auto col = v.col(j);
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / 6.0;
    for (std::size_t i = 0; i < 4; ++i) CHECK(out(i, j) == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("sdpa matches the long double oracle") {
  lga::Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t nq = 1 + rng.index(8), nk = 1 + rng.index(8), dk = 1 + rng.index(6), dv = 1 + rng.index(5);
    const Matrix q = oracle::random_matrix(nq, dk, rng);
    const Matrix k = oracle::random_matrix(nk, dk, rng);
    const Matrix v = oracle::random_matrix(nk, dv, rng);
    CHECK(lga::max_abs_diff(lga::sdpa(q, k, v), oracle::sdpa(q, k, v)) < 1e-12);
  }
}

TEST_CASE("sdpa permutation properties") {
  lga::Rng rng(5);
  const Matrix q = oracle::random_matrix(6, 4, rng);
  const Matrix k = oracle::random_matrix(7, 4, rng);
  const Matrix v = oracle::random_matrix(7, 3, rng);
  const Matrix base = lga::sdpa(q, k, v);

  const std::vector<std::size_t> pq{3, 0, 5, 1, 4, 2};
  const Matrix permuted_out = lga::sdpa(lga::gather_rows(q, pq), k, v);
  CHECK(permuted_out == lga::gather_rows(base, pq));

  const std::vector<std::size_t> pk{6, 2, 0, 4, 1, 5, 3};
  const Matrix joint = lga::sdpa(q, lga::gather_rows(k, pk), lga::gather_rows(v, pk));
  CHECK(lga::max_abs_diff(joint, base) < 1e-12);
}

TEST_CASE("sdpa shape errors") {
  CHECK_THROWS_AS(lga::sdpa(Matrix(2, 3), Matrix(4, 2), Matrix(4, 1)), std::invalid_argument);
  CHECK_THROWS_AS(lga::sdpa(Matrix(2, 3), Matrix(4, 3), Matrix(5, 1)), std::invalid_argument);
}

TEST_CASE("multi_head_sdpa reduces to sdpa") {
  lga::Rng rng(13);
  const Matrix q = oracle::random_matrix(5, 4, rng);
  const Matrix k = oracle::random_matrix(6, 4, rng);
  const Matrix v = oracle::random_matrix(6, 3, rng);
  const Matrix single = lga::sdpa(q, k, v);

  const std::vector<lga::HeadInputs> one{{q, k, v}};
  CHECK(lga::max_abs_diff(lga::multi_head_sdpa(one, Matrix::identity(3)), single) < 1e-15);

  // Two equal heads and W_out = [I; I] / 2 average back to the single head.
  const std::vector<lga::HeadInputs> two{{q, k, v}, {q, k, v}};
  Matrix avg(6, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    avg(i, i) = 0.5;
    avg(i + 3, i) = 0.5;
  }
  CHECK(lga::max_abs_diff(lga::multi_head_sdpa(two, avg), single) < 1e-15);
}

TEST_CASE("multi_head_sdpa matches a reimplementation on random heads") {
  lga::Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<lga::HeadInputs> heads;
    oracle::Table concat;
    for (int h = 0; h < 2; ++h) {
      lga::HeadInputs in{oracle::random_matrix(4, 3, rng), oracle::random_matrix(5, 3, rng),
                         oracle::random_matrix(5, 2, rng)};
      const auto out = oracle::sdpa(oracle::table(in.query), oracle::table(in.key), oracle::table(in.value));
      if (concat.empty()) concat = out;
      else {
        for (std::size_t i = 0; i < out.size(); ++i) concat[i].insert(concat[i].end(), out[i].begin(), out[i].end());
      }
      heads.push_back(std::move(in));
    }
    const Matrix w_out = oracle::random_matrix(4, 3, rng);
    const Matrix expected = oracle::matrix(oracle::mul(concat, oracle::table(w_out)));
    CHECK(lga::max_abs_diff(lga::multi_head_sdpa(heads, w_out), expected) < 1e-12);
  }
}

TEST_CASE("multi_head_sdpa errors") {
  CHECK_THROWS_AS(lga::multi_head_sdpa({}, Matrix::identity(2)), std::invalid_argument);
  const std::vector<lga::HeadInputs> one{{Matrix(2, 2), Matrix(2, 2), Matrix(2, 2)}};
  CHECK_THROWS_AS(lga::multi_head_sdpa(one, Matrix::identity(3)), std::invalid_argument);
}
