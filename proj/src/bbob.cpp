#include "lga/bbob.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lga::bbob {
namespace {

constexpr double kPi = std::numbers::pi;

struct NamedFunction {
  FunctionId id;
  std::string_view name;
};

constexpr std::array<NamedFunction, 15> kFunctions{{
    {FunctionId::sphere, "sphere"},
    {FunctionId::rosenbrock, "rosenbrock"},
    {FunctionId::discus, "discus"},
    {FunctionId::rastrigin, "rastrigin"},
    {FunctionId::schwefel, "schwefel"},
    {FunctionId::bueche_rastrigin, "bueche_rastrigin"},
    {FunctionId::attractive_sector, "attractive_sector"},
    {FunctionId::weierstrass, "weierstrass"},
    {FunctionId::schaffers_f7, "schaffers_f7"},
    {FunctionId::griewank_rosenbrock, "griewank_rosenbrock"},
    {FunctionId::ellipsoidal, "ellipsoidal"},
    {FunctionId::linear_slope, "linear_slope"},
    {FunctionId::step_ellipsoid, "step_ellipsoid"},
    {FunctionId::sharp_ridge, "sharp_ridge"},
    {FunctionId::different_powers, "different_powers"},
}};

constexpr std::array<FunctionId, 15> kAll{
    FunctionId::sphere,          FunctionId::rosenbrock,       FunctionId::discus,
    FunctionId::rastrigin,       FunctionId::schwefel,         FunctionId::bueche_rastrigin,
    FunctionId::attractive_sector, FunctionId::weierstrass,    FunctionId::schaffers_f7,
    FunctionId::griewank_rosenbrock, FunctionId::ellipsoidal,  FunctionId::linear_slope,
    FunctionId::step_ellipsoid,  FunctionId::sharp_ridge,      FunctionId::different_powers,
};

// i / (D - 1), 0 for D = 1
double frac(std::size_t i, std::size_t d) {
  return d == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(d - 1);
}

// Diagonal conditioning alpha^(0.5 i / (D - 1)).
std::vector<double> condition(std::span<const double> z, double alpha) {
  std::vector<double> y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) y[i] = std::pow(alpha, 0.5 * frac(i, z.size())) * z[i];
  return y;
}

double boundary_penalty(std::span<const double> v) {
  double p = 0.0;
  for (double x : v) {
    const double excess = std::abs(x) - 5.0;
    if (excess > 0.0) p += excess * excess;
  }
  return p;
}

double rastrigin_sum(std::span<const double> y) {
  double cos_sum = 0.0;
  double sq = 0.0;
  for (double v : y) {
    cos_sum += std::cos(2.0 * kPi * v);
    sq += v * v;
  }
  return 10.0 * (static_cast<double>(y.size()) - cos_sum) + sq;
}

double sphere(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s += v * v;
  return s;
}

double ellipsoidal(std::span<const double> z) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += std::pow(10.0, 6.0 * frac(i, z.size())) * z[i] * z[i];
  return s;
}

double discus(std::span<const double> z) {
  double s = 1e6 * z[0] * z[0];
  for (std::size_t i = 1; i < z.size(); ++i) s += z[i] * z[i];
  return s;
}

double rosenbrock(std::span<const double> z) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double a = z[i] + 1.0;
    const double b = z[i + 1] + 1.0;
    s += 100.0 * (a * a - b) * (a * a - b) + (a - 1.0) * (a - 1.0);
  }
  return s;
}

double bueche_rastrigin(std::span<const double> z) {
  std::vector<double> y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    double s = std::pow(10.0, 0.5 * frac(i, z.size()));
    if (z[i] > 0.0 && i % 2 == 0) s *= 10.0;
    y[i] = s * z[i];
  }
  return rastrigin_sum(y) + 100.0 * boundary_penalty(z);
}

double linear_slope(std::span<const double> z) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double slope = std::pow(10.0, frac(i, z.size()));
    s += slope * (5.0 - std::min(z[i], 5.0));
  }
  return s;
}

double attractive_sector(std::span<const double> z) {
  const auto y = condition(z, 10.0);
  double s = 0.0;
  for (double v : y) {
    const double scaled = v > 0.0 ? 100.0 * v : v;
    s += scaled * scaled;
  }
  return std::pow(s, 0.9);
}

double step_ellipsoid(std::span<const double> z) {
  const auto zh = condition(z, 10.0);
  double s = 0.0;
  for (std::size_t i = 0; i < zh.size(); ++i) {
    const double rounded = std::abs(zh[i]) > 0.5 ? std::floor(0.5 + zh[i]) : std::floor(0.5 + 10.0 * zh[i]) / 10.0;
    s += std::pow(10.0, 2.0 * frac(i, zh.size())) * rounded * rounded;
  }
  return 0.1 * std::max(std::abs(zh[0]) / 1e4, s) + boundary_penalty(z);
}

double sharp_ridge(std::span<const double> z) {
  const auto y = condition(z, 10.0);
  double tail = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) tail += y[i] * y[i];
  return y[0] * y[0] + 100.0 * std::sqrt(tail);
}

double different_powers(std::span<const double> z) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += std::pow(std::abs(z[i]), 2.0 + 4.0 * frac(i, z.size()));
  return std::sqrt(s);
}

constexpr int kWeierstrassTerms = 12;

double weierstrass_offset() {
  double f0 = 0.0;
  for (int k = 0; k < kWeierstrassTerms; ++k) f0 += std::pow(0.5, k) * std::cos(kPi * std::pow(3.0, k));
  return f0;
}

double weierstrass(std::span<const double> z) {
  static const double f0 = weierstrass_offset();
  const auto y = condition(z, 0.01);
  double total = 0.0;
  for (double v : y) {
    double amplitude = 1.0;
    double frequency = 1.0;
    for (int k = 0; k < kWeierstrassTerms; ++k) {
      total += amplitude * std::cos(2.0 * kPi * frequency * (v + 0.5));
      amplitude *= 0.5;
      frequency *= 3.0;
    }
  }
  const double d = static_cast<double>(z.size());
  const double inner = total / d - f0;
  return 10.0 * inner * inner * inner + 10.0 / d * boundary_penalty(z);
}

double schaffers_f7(std::span<const double> z) {
  const double penalty = 10.0 * boundary_penalty(z);
  if (z.size() < 2) return penalty;
  const auto y = condition(z, 10.0);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    const double si = std::sqrt(y[i] * y[i] + y[i + 1] * y[i + 1]);
    const double root = std::sqrt(si);
    const double wave = std::sin(50.0 * std::pow(si, 0.2));
    s += root + root * wave * wave;
  }
  s /= static_cast<double>(y.size() - 1);
  return s * s + penalty;
}

double griewank_rosenbrock(std::span<const double> z) {
  if (z.size() < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double a = z[i] + 1.0;
    const double b = z[i + 1] + 1.0;
    const double r = 100.0 * (a * a - b) * (a * a - b) + (a - 1.0) * (a - 1.0);
    s += r / 4000.0 - std::cos(r);
  }
  return 10.0 * s / static_cast<double>(z.size() - 1) + 10.0;
}

// Classic Schwefel optimum location of -u sin(sqrt|u|) on [-500, 500].
constexpr double kSchwefelOptimum = 420.9687462275036;

double schwefel(std::span<const double> z) {
  static const double peak = kSchwefelOptimum * std::sin(std::sqrt(kSchwefelOptimum));
  double s = 0.0;
  double penalty = 0.0;
  for (double v : z) {
    const double u = kSchwefelOptimum + 100.0 * v;
    s += u * std::sin(std::sqrt(std::abs(u)));
    const double excess = std::abs(u / 100.0) - 5.0;
    if (excess > 0.0) penalty += excess * excess;
  }
  const double d = static_cast<double>(z.size());
  return -s / (100.0 * d) + peak / 100.0 + 100.0 * penalty;
}

}  // namespace

std::string_view function_name(FunctionId id) {
  for (const auto& f : kFunctions) {
    if (f.id == id) return f.name;
  }
  throw std::invalid_argument("unknown function id");
}

std::optional<FunctionId> parse_function(std::string_view name) {
  for (const auto& f : kFunctions) {
    if (f.name == name) return f.id;
  }
  return std::nullopt;
}

std::span<const FunctionId> all_functions() { return kAll; }
std::span<const FunctionId> meta_train_functions() { return std::span(kAll).first(10); }
std::span<const FunctionId> holdout_functions() { return std::span(kAll).subspan(10); }

double core(FunctionId id, std::span<const double> z) {
  if (z.empty()) throw std::invalid_argument("bbob::core: empty input");
  switch (id) {
    case FunctionId::sphere: return sphere(z);
    case FunctionId::rosenbrock: return rosenbrock(z);
    case FunctionId::discus: return discus(z);
    case FunctionId::rastrigin: return rastrigin_sum(condition(z, 10.0));
    case FunctionId::schwefel: return schwefel(z);
    case FunctionId::bueche_rastrigin: return bueche_rastrigin(z);
    case FunctionId::attractive_sector: return attractive_sector(z);
    case FunctionId::weierstrass: return weierstrass(z);
    case FunctionId::schaffers_f7: return schaffers_f7(z);
    case FunctionId::griewank_rosenbrock: return griewank_rosenbrock(z);
    case FunctionId::ellipsoidal: return ellipsoidal(z);
    case FunctionId::linear_slope: return linear_slope(z);
    case FunctionId::step_ellipsoid: return step_ellipsoid(z);
    case FunctionId::sharp_ridge: return sharp_ridge(z);
    case FunctionId::different_powers: return different_powers(z);
  }
  throw std::invalid_argument("bbob::core: unknown function id");
}

std::vector<double> eval(const TaskSpec& task, const Matrix& x, Rng& rng) {
  if (x.cols() != task.dim) {
    throw std::invalid_argument("bbob::eval: population has " + std::to_string(x.cols()) +
                                " columns, task dimension is " + std::to_string(task.dim));
  }
  if (task.offset.size() != task.dim) throw std::invalid_argument("bbob::eval: offset length mismatch");
  std::vector<double> out(x.rows());
  std::vector<double> z(task.dim);
  for (std::size_t j = 0; j < x.rows(); ++j) {
    const auto row = x.row(j);
    for (std::size_t d = 0; d < task.dim; ++d) z[d] = row[d] - task.offset[d];
    double f = core(task.function, z);
    if (task.noisy) f = std::max(f, kNoiseFloor) * std::exp(task.noise_strength * rng.normal());
    out[j] = f;
  }
  return out;
}

TaskFamily TaskFamily::small() { return TaskFamily{{FunctionId::sphere}}; }

TaskFamily TaskFamily::medium() {
  return TaskFamily{{FunctionId::sphere, FunctionId::rosenbrock, FunctionId::discus, FunctionId::rastrigin,
                     FunctionId::schwefel}};
}

TaskFamily TaskFamily::large() {
  const auto fns = meta_train_functions();
  return TaskFamily{{fns.begin(), fns.end()}};
}

TaskSpec sample_task(const TaskFamily& family, Rng& rng) {
  if (family.functions.empty()) throw std::invalid_argument("sample_task: empty task family");
  if (family.dim_min == 0 || family.dim_min > family.dim_max) {
    throw std::invalid_argument("sample_task: invalid dimension range");
  }
  TaskSpec spec;
  spec.function = family.functions[rng.index(family.functions.size())];
  spec.dim = static_cast<std::size_t>(
      rng.integer(static_cast<long long>(family.dim_min), static_cast<long long>(family.dim_max)));
  spec.offset.resize(spec.dim);
  for (double& o : spec.offset) o = rng.uniform(-family.offset_bound, family.offset_bound);
  spec.sigma_init = rng.uniform(family.sigma_min, family.sigma_max);
  spec.noisy = family.noisy;
  spec.seed = rng.engine()();
  return spec;
}

BbobTask::BbobTask(TaskSpec spec) : spec_(std::move(spec)) {
  if (spec_.dim == 0) throw std::invalid_argument("BbobTask: dimension must be positive");
  if (spec_.offset.empty()) spec_.offset.assign(spec_.dim, 0.0);
  if (spec_.offset.size() != spec_.dim) throw std::invalid_argument("BbobTask: offset length mismatch");
}

std::string BbobTask::name() const {
  return std::string(function_name(spec_.function)) + "-" + std::to_string(spec_.dim) + "d";
}

std::vector<double> BbobTask::evaluate(const Matrix& x, Rng& rng) const { return eval(spec_, x, rng); }

}  // namespace lga::bbob
