#include <cmath>
#include <vector>

#include "doctest.h"
#include "lga/bbob.hpp"
#include "lga/mlp_task.hpp"
#include "lga/task.hpp"

using lga::Matrix;
namespace bbob = lga::bbob;

TEST_CASE("cores vanish at the optimum") {
  for (auto id : bbob::all_functions()) {
    if (id == bbob::FunctionId::linear_slope) continue;
    for (std::size_t d : {1u, 2u, 5u, 10u, 40u}) {
      const std::vector<double> z(d, 0.0);
      INFO(bbob::function_name(id), " d=", d);
      CHECK(std::abs(bbob::core(id, z)) < 1e-9);
    }
  }
}

TEST_CASE("linear slope decreases towards the boundary and is flat beyond it") {
  lga::Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> z(4);
    for (double& v : z) v = rng.uniform(-5, 5);
    const double base = bbob::core(bbob::FunctionId::linear_slope, z);
    auto moved = z;
    moved[rng.index(4)] += 0.5;
    CHECK(bbob::core(bbob::FunctionId::linear_slope, moved) < base);
  }
  CHECK(bbob::core(bbob::FunctionId::linear_slope, std::vector<double>{5, 5, 5}) == 0.0);
  CHECK(bbob::core(bbob::FunctionId::linear_slope, std::vector<double>{7, 9, 5}) == 0.0);
}

TEST_CASE("analytic values") {
  CHECK(bbob::core(bbob::FunctionId::sphere, std::vector<double>{1, 2}) == 5.0);
  CHECK(bbob::core(bbob::FunctionId::rastrigin, std::vector<double>{0.5}) == doctest::Approx(20.25).epsilon(1e-12));
  // 100 (1 - 2)^2 + 0 at z = (0, 1) in the shifted Rosenbrock coordinates.
  CHECK(bbob::core(bbob::FunctionId::rosenbrock, std::vector<double>{0, 1}) == doctest::Approx(100.0));
}

TEST_CASE("cores are finite on the search box") {
  lga::Rng rng(2);
  for (auto id : bbob::all_functions()) {
    for (std::size_t d : {1u, 3u, 17u, 64u}) {
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> z(d);
        for (double& v : z) v = rng.uniform(-10, 10);  // x and x_star both in [-5, 5]
        CHECK(std::isfinite(bbob::core(id, z)));
      }
    }
  }
}

TEST_CASE("optimum sits at the offset and translation holds") {
  lga::Rng rng(3);
  for (auto id : bbob::all_functions()) {
    bbob::TaskSpec spec;
    spec.function = id;
    spec.dim = 6;
    for (int i = 0; i < 6; ++i) spec.offset.push_back(rng.uniform(-5, 5));
    bbob::TaskSpec origin = spec;
    origin.offset.assign(6, 0.0);

    Matrix z(8, 6), x(8, 6);
    for (std::size_t r = 0; r < 8; ++r) {
      for (std::size_t c = 0; c < 6; ++c) {
        z(r, c) = r == 0 ? 0.0 : rng.uniform(-3, 3);
        x(r, c) = z(r, c) + spec.offset[c];
      }
    }
    const auto shifted = bbob::eval(spec, x, rng);
    const auto plain = bbob::eval(origin, z, rng);
    for (std::size_t r = 0; r < 8; ++r) CHECK(shifted[r] == doctest::Approx(plain[r]).epsilon(1e-9).scale(1.0));
    if (id != bbob::FunctionId::linear_slope) CHECK(std::abs(shifted[0]) < 1e-9);
  }
}

TEST_CASE("noisy evaluation") {
  bbob::TaskSpec spec;
  spec.dim = 3;
  spec.offset.assign(3, 0.0);
  spec.noisy = true;
  const Matrix x = Matrix::from_rows({{1, 1, 1}, {1, 1, 1}});
  lga::Rng a(8), b(8), c(8);
  CHECK(bbob::eval(spec, x, a) == bbob::eval(spec, x, b));
  const auto noisy = bbob::eval(spec, x, c);
  CHECK(noisy[0] != noisy[1]);
  for (double v : noisy) CHECK(v == doctest::Approx(3.0).epsilon(0.06));

  spec.noisy = false;
  lga::Rng d(1);
  const auto clean = bbob::eval(spec, x, d);
  CHECK(clean[0] == clean[1]);
  CHECK_THROWS_AS(bbob::eval(spec, Matrix(2, 4), d), std::invalid_argument);
}

TEST_CASE("task families and sampling") {
  CHECK(bbob::TaskFamily::small().functions.size() == 1);
  CHECK(bbob::TaskFamily::medium().functions.size() == 5);
  CHECK(bbob::TaskFamily::large().functions.size() == 10);

  lga::Rng a(4), b(4);
  const auto family = bbob::TaskFamily::medium();
  for (int i = 0; i < 20; ++i) {
    const auto s = bbob::sample_task(family, a);
    const auto t = bbob::sample_task(family, b);
    CHECK(s.function == t.function);
    CHECK(s.offset == t.offset);
    CHECK(s.sigma_init == t.sigma_init);
    CHECK(s.sigma_init >= 0.01);
    CHECK(s.sigma_init <= 0.5);
  }

  lga::Rng rng(5);
  const int draws = 10000;
  std::vector<int> counts(11, 0);
  const auto small = bbob::TaskFamily::small();
  for (int i = 0; i < draws; ++i) {
    const auto s = bbob::sample_task(small, rng);
    CHECK(s.function == bbob::FunctionId::sphere);
    for (double o : s.offset) CHECK(std::abs(o) <= 5.0);
    counts[s.dim]++;
  }
  const double p = 1.0 / 9.0;
  const double sd = std::sqrt(draws * p * (1 - p));
  for (std::size_t d = 2; d <= 10; ++d) CHECK(std::abs(counts[d] - draws * p) < 3.0 * sd);
  CHECK(counts[0] + counts[1] == 0);
}

TEST_CASE("task registry") {
  for (const auto& id : lga::task_ids()) {
    const auto task = lga::make_task(id, id == "mlp-sine" ? 0 : 4);
    CHECK(task->dim() > 0);
  }
  CHECK_THROWS(lga::make_task("nope", 3));
  const auto a = lga::make_task("sphere", 3, true, 7);
  const auto b = lga::make_task("sphere", 3, true, 7);
  lga::Rng rng(0);
  const Matrix x(1, 3);
  CHECK(a->evaluate(x, rng) == b->evaluate(x, rng));
  CHECK(a->evaluate(x, rng)[0] > 0.0);
}

TEST_CASE("mlp regression task") {
  const lga::MlpTask task;
  CHECK(task.dim() == 2 * 8 + 8 + 8 * 1 + 1);
  const std::vector<double> zero(task.dim(), 0.0);
  // Zero weights predict 0 everywhere, so the error is the mean squared target.
  double expected = 0.0;
  for (std::size_t i = 0; i < task.inputs().rows(); ++i) {
    const double t = std::sin(M_PI * task.inputs()(i, 0)) + task.inputs()(i, 1) * task.inputs()(i, 1);
    CHECK(task.targets()[i] == doctest::Approx(t).epsilon(1e-15));
    expected += t * t;
  }
  expected /= static_cast<double>(task.inputs().rows());
  CHECK(task.mse(zero) == doctest::Approx(expected).epsilon(1e-14));

  // Forward pass oracle for random weights.
  lga::Rng rng(6);
  std::vector<double> w(task.dim());
  for (double& v : w) v = rng.normal();
  const auto pred = task.predict(w);
  double mse = 0.0;
  for (std::size_t i = 0; i < task.inputs().rows(); ++i) {
    double out = w[32];
    for (std::size_t h = 0; h < 8; ++h) {
      const double pre = task.inputs()(i, 0) * w[h] + task.inputs()(i, 1) * w[8 + h] + w[16 + h];
      out += std::tanh(pre) * w[24 + h];
    }
    CHECK(pred[i] == doctest::Approx(out).epsilon(1e-12));
    mse += (out - task.targets()[i]) * (out - task.targets()[i]);
  }
  CHECK(task.mse(w) == doctest::Approx(mse / task.inputs().rows()).epsilon(1e-12));

  Matrix x(3, task.dim());
  for (std::size_t d = 0; d < task.dim(); ++d) x(0, d) = x(2, d) = w[d];
  const auto f = task.evaluate(x, rng);
  CHECK(f[0] == f[2]);
  for (double v : f) CHECK(v >= 0.0);
}
