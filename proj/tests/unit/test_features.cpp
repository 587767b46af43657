#include <cmath>
#include <vector>

#include "doctest.h"
#include "lga/features.hpp"
#include "oracles.hpp"

using lga::Matrix;

namespace {

void check_vec(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= tol * (1.0 + std::abs(want[i])));
}

}  // namespace

TEST_CASE("centered_ranks examples") {
  check_vec(lga::centered_ranks(std::vector<double>{3, 1, 2}), {0.5, -0.5, 0.0}, 1e-15);
  check_vec(lga::centered_ranks(std::vector<double>{5}), {0.0}, 0.0);
  check_vec(lga::centered_ranks(std::vector<double>{2, 2, 7}), {-0.25, -0.25, 0.5}, 1e-15);
}

TEST_CASE("centered_ranks rejects non-finite values") {
  CHECK_THROWS_AS(lga::centered_ranks(std::vector<double>{1, NAN}), std::invalid_argument);
}

TEST_CASE("z_score examples") {
  check_vec(lga::z_score(std::vector<double>{1, 2, 3}), {-std::sqrt(1.5), 0.0, std::sqrt(1.5)}, 1e-12);
  check_vec(lga::z_score(std::vector<double>{4.2, 4.2, 4.2}), {0, 0, 0}, 0.0);
  check_vec(lga::z_score(std::vector<double>{0, 10}), {-1, 1}, 1e-15);
}

TEST_CASE("features match the counting oracle on random data with ties") {
  lga::Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.index(20);
    std::vector<double> f(n);
    for (double& v : f) v = static_cast<double>(rng.integer(0, 6));  // plenty of ties
    const double best = static_cast<double>(rng.integer(-1, 7));
    const Matrix got = lga::fitness_features(f, best);
    const Matrix want = oracle::fitness_features(f, best);
    CHECK(lga::max_abs_diff(got, want) < 1e-12);
  }
}

TEST_CASE("scale invariance of features") {
  lga::Rng rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> f(12), g(12);
    const double a = std::exp(rng.uniform(-3, 3));
    const double b = rng.uniform(-10, 10);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = rng.normal();
      g[i] = a * f[i] + b;
    }
    CHECK(lga::centered_ranks(f) == lga::centered_ranks(g));
    const auto zf = lga::z_score(f), zg = lga::z_score(g);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(zf[i] - zg[i]) < 1e-6);
  }
}

TEST_CASE("features are permutation equivariant") {
  const std::vector<double> f{0.3, -2.0, 5.5, 0.3, 1.0};
  const std::vector<std::size_t> p{4, 2, 0, 3, 1};
  std::vector<double> g;
  for (std::size_t i : p) g.push_back(f[i]);
  CHECK(lga::fitness_features(g, 0.5) == lga::gather_rows(lga::fitness_features(f, 0.5), p));
}

TEST_CASE("joint fitness features") {
  SUBCASE("ranks over children and parents together") {
    const auto j = lga::build_joint_fitness_features(std::vector<double>{1, 3}, std::vector<double>{2}, 2.0);
    CHECK(j.joint.rows() == 3);
    CHECK(j.joint.col(1) == std::vector<double>{-0.5, 0.5, 0.0});
    CHECK(j.joint.col(2) == std::vector<double>{1, 0, 0});
    CHECK(j.children.rows() == 2);
    CHECK(j.parents.rows() == 1);
    CHECK(j.parents(0, 1) == 0.0);
    CHECK(j.children(1, 1) == 0.5);
  }
  SUBCASE("all equal") {
    const auto j = lga::build_joint_fitness_features(std::vector<double>{4, 4, 4}, std::vector<double>{4, 4}, 4.0);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(j.joint(i, 0) == 0.0);
      CHECK(j.joint(i, 1) == 0.0);
      CHECK(j.joint(i, 2) == 0.0);
    }
  }
  SUBCASE("first generation sets every flag") {
    const auto j = lga::build_joint_fitness_features(std::vector<double>{9, 1e9}, std::vector<double>{3}, INFINITY);
    CHECK(j.joint.col(2) == std::vector<double>{1, 1, 1});
  }
  SUBCASE("empty sides are rejected") {
    CHECK_THROWS_AS(lga::build_joint_fitness_features(std::vector<double>{}, std::vector<double>{1}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(lga::build_joint_fitness_features(std::vector<double>{1}, std::vector<double>{}, 0.0),
                    std::invalid_argument);
  }
}

TEST_CASE("mutation-rate features") {
  const Matrix same = lga::sigma_features(std::vector<double>{0.2, 0.2, 0.2});
  for (double v : same.values()) CHECK(v == 0.0);

  const Matrix lin = lga::sigma_features(std::vector<double>{0.1, 0.2, 0.3});
  CHECK(lin(0, 1) == doctest::Approx(-1.0));
  CHECK(lin(1, 1) == doctest::Approx(0.0).scale(1.0));
  CHECK(lin(2, 1) == doctest::Approx(1.0));

  CHECK_THROWS_AS(lga::sigma_features(std::vector<double>{0.1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(lga::sigma_features(std::vector<double>{0.1, -1.0}), std::invalid_argument);

  const Matrix full = lga::build_sampled_parent_features(std::vector<double>{1, 2}, std::vector<double>{0.5, 0.25}, 1.5);
  CHECK(full.cols() == 5);
  CHECK(full(0, 2) == 1.0);
  CHECK(full(1, 2) == 0.0);
  CHECK(full(0, 4) == 1.0);
  CHECK(full(1, 4) == -1.0);
}

TEST_CASE("degenerate populations give finite features") {
  const Matrix f = lga::fitness_features(std::vector<double>{1e300, 1e300, 1e300}, INFINITY);
  CHECK(f.all_finite());
  const Matrix s = lga::sigma_features(std::vector<double>{1e-300, 1e-300});
  CHECK(s.all_finite());
}
