#include "lga/params.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lga {
namespace {

AttentionWeights make_attention(std::size_t heads, std::size_t in_dim, std::size_t key_dim,
                                std::size_t value_dim) {
  AttentionWeights w;
  for (std::size_t h = 0; h < heads; ++h) {
    w.query.emplace_back(in_dim, key_dim);
    w.key.emplace_back(in_dim, key_dim);
    w.value.emplace_back(in_dim, value_dim);
  }
  if (heads > 1) w.output = Matrix(heads * value_dim, value_dim);
  return w;
}

std::string head_name(const char* base, std::size_t head, std::size_t heads) {
  return heads == 1 ? std::string(base) : std::string(base) + "." + std::to_string(head);
}

template <typename Weights, typename Fn>
void visit_attention(Weights& w, const char* q, const char* k, const char* v, const char* out, Fn&& fn) {
  const std::size_t heads = w.query.size();
  for (std::size_t h = 0; h < heads; ++h) {
    fn(head_name(q, h, heads), w.query[h]);
    fn(head_name(k, h, heads), w.key[h]);
    fn(head_name(v, h, heads), w.value[h]);
  }
  if (heads > 1) fn(std::string(out), w.output);
}

template <typename Self, typename Fn>
void visit_all(Self& self, Fn&& fn) {
  visit_attention(self.selection_attention, "W_QP", "W_KC", "W_VC", "W_OS", fn);
  fn(std::string("W_QS"), self.selection_query);
  fn(std::string("W_KS"), self.selection_key);
  visit_attention(self.mra_attention, "W_QM", "W_KM", "W_VM", "W_OM", fn);
  fn(std::string("W_sigma"), self.mra_projection);
  if (self.config().sampling) {
    visit_attention(self.sampling_attention, "W_QA", "W_KA", "W_VA", "W_OA", fn);
  }
  if (self.config().crossover) {
    visit_attention(self.crossover_attention, "W_QX", "W_KX", "W_VX", "W_OX", fn);
    fn(std::string("W_dX"), self.crossover_projection);
  }
}

std::string float_text(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), static_cast<float>(v));
  return std::string(buf, res.ptr);
}

double parse_float(const std::string& s) {
  float v = 0.0f;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("checkpoint: bad value '" + s + "'");
  }
  return static_cast<double>(v);
}

}  // namespace

LgaParams::LgaParams(LgaConfig config) : config_(config) {
  if (config.key_dim == 0 || config.heads == 0 || config.fitness_dim == 0) {
    throw std::invalid_argument("LgaParams: key_dim, heads and fitness_dim must be positive");
  }
  const std::size_t dk = config.key_dim;
  const std::size_t h = config.heads;
  const std::size_t df = config.fitness_dim;
  selection_attention = make_attention(h, df, dk, dk);
  selection_query = Matrix(dk, dk);
  selection_key = Matrix(df, dk);
  mra_attention = make_attention(h, df + config.sigma_dim, dk, dk);
  mra_projection = Matrix(dk, 1);
  if (config.sampling) sampling_attention = make_attention(h, df + 1, dk, 1);
  if (config.crossover) {
    crossover_attention = make_attention(h, df + config.crossover_feature_dim, dk, dk);
    crossover_projection = Matrix(dk, 1);
  }
}

void LgaParams::for_each(const std::function<void(const std::string&, const Matrix&)>& fn) const {
  visit_all(*this, [&](const std::string& name, const Matrix& m) { fn(name, m); });
}

void LgaParams::for_each(const std::function<void(const std::string&, Matrix&)>& fn) {
  visit_all(*this, [&](const std::string& name, Matrix& m) { fn(name, m); });
}

std::size_t LgaParams::parameter_count() const {
  std::size_t n = 0;
  for_each([&](const std::string&, const Matrix& m) { n += m.size(); });
  return n;
}

std::vector<double> LgaParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for_each([&](const std::string&, const Matrix& m) {
    flat.insert(flat.end(), m.values().begin(), m.values().end());
  });
  return flat;
}

void LgaParams::assign(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw std::invalid_argument("LgaParams::assign: expected " + std::to_string(parameter_count()) +
                                " values, got " + std::to_string(flat.size()));
  }
  std::size_t offset = 0;
  for_each([&](const std::string&, Matrix& m) {
    auto dst = m.values();
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(offset),
              flat.begin() + static_cast<std::ptrdiff_t>(offset + dst.size()), dst.begin());
    offset += dst.size();
  });
}

LgaParams LgaParams::from_flat(LgaConfig config, std::span<const double> flat) {
  LgaParams p(config);
  p.assign(flat);
  return p;
}

bool operator==(const LgaParams& a, const LgaParams& b) {
  return a.config_ == b.config_ && a.flatten() == b.flatten();
}

std::string to_checkpoint_text(const LgaParams& params) {
  using nlohmann::ordered_json;
  const auto& c = params.config();
  ordered_json doc;
  doc["format_version"] = kCheckpointFormatVersion;
  doc["config"] = {{"key_dim", c.key_dim},
                   {"heads", c.heads},
                   {"fitness_dim", c.fitness_dim},
                   {"sigma_dim", c.sigma_dim},
                   {"crossover_feature_dim", c.crossover_feature_dim},
                   {"sampling", c.sampling},
                   {"crossover", c.crossover}};
  ordered_json matrices = ordered_json::array();
  params.for_each([&](const std::string& name, const Matrix& m) {
    ordered_json values = ordered_json::array();
    for (double v : m.values()) values.push_back(float_text(v));
    matrices.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"values", values}});
  });
  doc["matrices"] = std::move(matrices);
  return doc.dump(1) + "\n";
}

LgaParams from_checkpoint_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("checkpoint: malformed document: ") + e.what());
  }
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion) {
      throw std::runtime_error("checkpoint: unsupported format_version " + std::to_string(version));
    }
    const auto& cj = doc.at("config");
    LgaConfig config;
    config.key_dim = cj.at("key_dim").get<std::size_t>();
    config.heads = cj.at("heads").get<std::size_t>();
    config.fitness_dim = cj.at("fitness_dim").get<std::size_t>();
    config.sigma_dim = cj.at("sigma_dim").get<std::size_t>();
    config.crossover_feature_dim = cj.at("crossover_feature_dim").get<std::size_t>();
    config.sampling = cj.at("sampling").get<bool>();
    config.crossover = cj.at("crossover").get<bool>();

    LgaParams params(config);
    const auto& entries = doc.at("matrices");
    std::size_t index = 0;
    params.for_each([&](const std::string& name, Matrix& m) {
      if (index >= entries.size()) throw std::runtime_error("checkpoint: missing matrix " + name);
      const auto& entry = entries[index++];
      const auto got = entry.at("name").get<std::string>();
      if (got != name) throw std::runtime_error("checkpoint: expected matrix " + name + ", found " + got);
      const auto rows = entry.at("rows").get<std::size_t>();
      const auto cols = entry.at("cols").get<std::size_t>();
      if (rows != m.rows() || cols != m.cols()) {
        throw std::runtime_error("checkpoint: matrix " + name + " has the wrong shape");
      }
      const auto& values = entry.at("values");
      if (values.size() != m.size()) throw std::runtime_error("checkpoint: matrix " + name + " has wrong value count");
      auto dst = m.values();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = parse_float(values[i].get<std::string>());
    });
    if (index != entries.size()) throw std::runtime_error("checkpoint: unexpected extra matrices");
    return params;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const LgaParams& params, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out << to_checkpoint_text(params);
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

LgaParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_checkpoint_text(buf.str());
}

}  // namespace lga
