#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "lga/meta_es.hpp"
#include "lga/metabbo.hpp"
#include "oracles.hpp"

using lga::Matrix;

namespace {

double plain_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> meta_fitness_oracle(const Matrix& s) {
  Matrix z(s.rows(), s.cols());
  for (std::size_t j = 0; j < s.cols(); ++j) {
    const auto col = oracle::z_score(s.col(j));
    for (std::size_t i = 0; i < s.rows(); ++i) z(i, j) = col[i];
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < s.rows(); ++i) out.push_back(plain_median({z.row(i).begin(), z.row(i).end()}));
  return out;
}

lga::MetaConfig tiny_config() {
  lga::MetaConfig c;
  c.es.population = 4;
  c.tasks = 3;
  c.generations = 3;
  c.inner.population = 6;
  c.inner.generations = 5;
  c.family = lga::bbob::TaskFamily::medium();
  c.family.dim_max = 3;
  c.lga.key_dim = 4;
  c.eval_every = 2;
  c.eval_seeds = 2;
  c.probes = {{"sphere_3d", "sphere", 3}};
  return c;
}

}  // namespace

TEST_CASE("objective reductions") {
  const std::vector<std::vector<double>> f{{3, 1}, {2, 4}};
  CHECK(lga::reduce_objective(f, lga::MetaObjective::min_n_min_t) == 1.0);
  CHECK(lga::reduce_objective(f, lga::MetaObjective::min_n_final_t) == 2.0);
  CHECK(lga::reduce_objective(f, lga::MetaObjective::mean_n_min_t) == 2.0);
  CHECK(lga::reduce_objective(f, lga::MetaObjective::mean_n_final_t) == 3.0);

  const std::vector<std::vector<double>> flat(4, std::vector<double>(3, 2.5));
  for (auto o : {lga::MetaObjective::min_n_min_t, lga::MetaObjective::min_n_final_t, lga::MetaObjective::mean_n_min_t,
                 lga::MetaObjective::mean_n_final_t}) {
    CHECK(lga::reduce_objective(flat, o) == 2.5);
    CHECK(lga::parse_objective(lga::to_string(o)) == o);
  }

  lga::Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> r(5, std::vector<double>(4));
    for (auto& row : r) {
      for (double& v : row) v = rng.normal();
    }
    CHECK(lga::reduce_objective(r, lga::MetaObjective::min_n_min_t) <=
          lga::reduce_objective(r, lga::MetaObjective::min_n_final_t));
  }
  CHECK_THROWS(lga::parse_objective("maxN"));
}

TEST_CASE("meta-fitness") {
  const auto one = lga::meta_fitness(Matrix::from_rows({{1}, {3}}));
  CHECK(one == std::vector<double>{-1, 1});

  const auto flat = lga::meta_fitness(Matrix::from_rows({{2, 1}, {2, 5}, {2, 9}}));
  // Constant first column contributes zeros; median of two entries is their mean.
  const auto z = oracle::z_score({1, 5, 9});
  for (std::size_t i = 0; i < 3; ++i) CHECK(flat[i] == doctest::Approx(0.5 * z[i]).epsilon(1e-12));

  lga::Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix s = oracle::random_matrix(8, 5, rng, 3.0);
    const auto got = lga::meta_fitness(s);
    const auto want = meta_fitness_oracle(s);
    for (std::size_t i = 0; i < 8; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12).scale(1.0));

    Matrix t = s;
    for (std::size_t j = 0; j < t.cols(); ++j) {
      const double a = std::exp(rng.uniform(-4, 4)), b = rng.uniform(-100, 100);
      for (std::size_t i = 0; i < t.rows(); ++i) t(i, j) = a * t(i, j) + b;
    }
    const auto affine = lga::meta_fitness(t);
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(affine[i] - got[i]) < 1e-6);
  }
}

TEST_CASE("score sanitising and log transform") {
  Matrix s = Matrix::from_rows({{1, NAN}, {INFINITY, NAN}, {3, 2}});
  lga::sanitize_scores(s);
  CHECK(s(1, 0) == 3.0);
  CHECK(s(0, 1) == 2.0);
  Matrix none = Matrix::from_rows({{NAN}, {NAN}});
  lga::sanitize_scores(none);
  CHECK(none(0, 0) == 0.0);

  Matrix l = Matrix::from_rows({{100, 0}, {1e-3, -1}});
  lga::log_transform_scores(l);
  CHECK(l(0, 0) == doctest::Approx(2.0));
  CHECK(l(0, 1) == doctest::Approx(-12.0));
  CHECK(l(1, 0) == doctest::Approx(-3.0));
  CHECK(l(1, 1) == doctest::Approx(-12.0));
}

TEST_CASE("antithetic candidates") {
  lga::MetaEsConfig c;
  c.population = 6;
  const std::vector<double> mu{0.5, -1.0, 2.0};
  auto state = lga::meta_es_init(c, mu);
  lga::Rng rng(3);
  const auto cand = lga::meta_ask(c, state, rng);
  REQUIRE(cand.theta.rows() == 6);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t d = 0; d < 3; ++d) {
      CHECK(0.5 * (cand.theta(2 * k, d) + cand.theta(2 * k + 1, d)) == doctest::Approx(mu[d]).epsilon(1e-15));
      CHECK(cand.theta(2 * k, d) == doctest::Approx(mu[d] + 0.1 * cand.noise(k, d)).epsilon(1e-15));
    }
  }
  lga::Rng again(3);
  CHECK(lga::meta_ask(c, state, again).theta == cand.theta);

  c.sigma_init = 0.0;
  c.sigma_final = 0.0;
  state = lga::meta_es_init(c, mu);
  const auto frozen = lga::meta_ask(c, state, rng);
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::vector<double>(frozen.theta.row(i).begin(), frozen.theta.row(i).end()) == mu);

  c.population = 5;
  CHECK_THROWS(c.validate());
}

TEST_CASE("gradient estimate equals the pairwise-difference form") {
  lga::MetaEsConfig c;
  c.population = 8;
  auto state = lga::meta_es_init(c, std::vector<double>(4, 0.0));
  lga::Rng rng(4);
  const auto cand = lga::meta_ask(c, state, rng);
  const std::vector<double> shaped{0.5, -0.5, 0.1, -0.3, 0.2, 0.0, -0.1, 0.4};
  const auto g = lga::estimate_gradient(cand, shaped, 0.1);
  for (std::size_t d = 0; d < 4; ++d) {
    long double want = 0.0L;
    for (std::size_t k = 0; k < 4; ++k) want += (shaped[2 * k] - shaped[2 * k + 1]) * cand.noise(k, d);
    want /= 8.0L * 0.1L;
    CHECK(std::abs(g[d] - static_cast<double>(want)) < 1e-9);
  }
}

TEST_CASE("meta_tell") {
  lga::MetaEsConfig c;
  c.population = 8;
  lga::Rng rng(5);
  std::vector<double> mu(6);
  for (double& v : mu) v = rng.normal();
  const auto state = lga::meta_es_init(c, mu);
  const auto cand = lga::meta_ask(c, state, rng);

  SUBCASE("equal fitness leaves the mean in place") {
    const auto next = lga::meta_tell(c, state, cand, std::vector<double>(8, 1.0));
    CHECK(next.mean == mu);
    CHECK(next.generation == 1);
  }
  SUBCASE("mean decay scales the updated mean") {
    const std::vector<double> fit{3, 1, 4, 1, 5, 9, 2, 6};
    const auto plain = lga::meta_tell(c, state, cand, fit);
    auto decayed_config = c;
    decayed_config.mean_decay = 0.005;
    const auto decayed = lga::meta_tell(decayed_config, state, cand, fit);
    for (std::size_t d = 0; d < mu.size(); ++d) CHECK(decayed.mean[d] == doctest::Approx(0.995 * plain.mean[d]).epsilon(1e-15));
    CHECK(plain.mean != mu);

    const auto equal = lga::meta_tell(decayed_config, state, cand, std::vector<double>(8, 0.0));
    for (std::size_t d = 0; d < mu.size(); ++d) CHECK(equal.mean[d] == doctest::Approx(0.995 * mu[d]).epsilon(1e-15));
  }
  SUBCASE("first Adam step moves each weight by the learning rate against the gradient") {
    const std::vector<double> fit{3, 1, 4, 1.5, 5, 9, 2, 6};
    const auto next = lga::meta_tell(c, state, cand, fit);
    const auto shaped = oracle::centered_ranks(fit);
    const auto g = lga::estimate_gradient(cand, shaped, state.sigma);
    for (std::size_t d = 0; d < mu.size(); ++d) {
      // m_hat = g, v_hat = g^2 after bias correction.
      const double step = c.lr_init * g[d] / (std::abs(g[d]) + c.adam_eps);
      CHECK(next.mean[d] == doctest::Approx(mu[d] - step).epsilon(1e-12));
    }
  }
  SUBCASE("schedules decay monotonically to their floors") {
    auto s = state;
    double lr = s.lr, sigma = s.sigma;
    for (int g = 0; g < 8000; ++g) {
      s = lga::meta_tell(c, s, cand, std::vector<double>(8, 0.0));
      CHECK(s.lr <= lr);
      CHECK(s.sigma <= sigma);
      CHECK(s.lr >= c.lr_final);
      CHECK(s.sigma >= c.sigma_final);
      lr = s.lr;
      sigma = s.sigma;
    }
    CHECK(s.lr == c.lr_final);
    CHECK(s.sigma == c.sigma_final);
  }
}

TEST_CASE("shared randomness across candidates") {
  const auto config = tiny_config();
  const auto tasks = lga::sample_generation_tasks(config, 0);
  CHECK(tasks.size() == 3);
  const lga::LgaParams shape(config.lga);
  lga::Rng rng(6);
  Matrix theta(3, shape.parameter_count());
  for (double& v : theta.values()) v = 0.5 * rng.normal();
  std::copy(theta.row(0).begin(), theta.row(0).end(), theta.row(2).begin());
  const Matrix scores =
      lga::score_candidates(theta, config.lga, tasks, config.objective, config.inner, 1);
  for (std::size_t j = 0; j < 3; ++j) CHECK(scores(0, j) == scores(2, j));

  const Matrix parallel = lga::score_candidates(theta, config.lga, tasks, config.objective, config.inner, 3);
  CHECK(parallel == scores);
}

TEST_CASE("meta-training is reproducible across worker counts") {
  auto config = tiny_config();
  const auto dir = std::filesystem::temp_directory_path() / "lga_meta_test";
  std::filesystem::remove_all(dir);
  config.checkpoint_dir = dir;
  config.checkpoint_every = 2;
  config.log_path = dir / "meta_log.csv";
  std::size_t calls = 0;
  const auto a = lga::meta_train(config, [&](const lga::MetaLogRow&) { ++calls; });
  CHECK(calls == 3);
  CHECK(std::filesystem::exists(dir / "checkpoint_final.json"));
  CHECK(std::filesystem::exists(dir / "meta_log.csv"));
  CHECK(lga::load_checkpoint(dir / "checkpoint_final.json").config() == config.lga);

  auto parallel = tiny_config();
  parallel.workers = 4;
  const auto b = lga::meta_train(parallel);
  CHECK(a.mean == b.mean);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t g = 0; g < a.log.size(); ++g) {
    CHECK(a.log[g].fitness_mean == b.log[g].fitness_mean);
    CHECK(a.log[g].sigma == b.log[g].sigma);
    CHECK(std::isnan(a.log[g].eval[0]) == std::isnan(b.log[g].eval[0]));
  }
  // Probes run every second generation and on the last one.
  CHECK_FALSE(std::isnan(a.log[0].eval[0]));
  CHECK(std::isnan(a.log[1].eval[0]));
  CHECK_FALSE(std::isnan(a.log[2].eval[0]));
  std::filesystem::remove_all(dir);
}
