#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lga/matrix.hpp"

namespace lga {

/// Shape metadata of a learned GA.
struct LgaConfig {
  std::size_t key_dim = 16;
  std::size_t heads = 1;
  std::size_t fitness_dim = 3;
  std::size_t sigma_dim = 2;
  std::size_t crossover_feature_dim = 2;
  bool sampling = false;
  bool crossover = false;

  friend bool operator==(const LgaConfig&, const LgaConfig&) = default;
};

/// Query/key/value embeddings of one attention layer, one entry per head.
/// `output` projects the concatenated heads back; it is empty for one head.
struct AttentionWeights {
  std::vector<Matrix> query;
  std::vector<Matrix> key;
  std::vector<Matrix> value;
  Matrix output;
};

/// Attention weights of a learned GA.
///
/// Selection:  query W_QP, key W_KC, value W_VC, then W_QS and W_KS.
/// MRA:        query W_QM, key W_KM, value W_VM, then W_sigma.
/// Sampling:   query W_QA, key W_KA, value W_VA (optional).
/// Cross-over: query W_QX, key W_KX, value W_VX, then W_dX (optional).
class LgaParams {
 public:
  /// All-zero weights for the given shape.
  explicit LgaParams(LgaConfig config = {});

  const LgaConfig& config() const { return config_; }

  AttentionWeights selection_attention;
  Matrix selection_query;  // W_QS, D_K x D_K
  Matrix selection_key;    // W_KS, D_F x D_K

  AttentionWeights mra_attention;
  Matrix mra_projection;   // W_sigma, D_K x 1

  AttentionWeights sampling_attention;   // empty unless config().sampling
  AttentionWeights crossover_attention;  // empty unless config().crossover
  Matrix crossover_projection;           // W_dX, D_K x 1

  /// Visits every weight matrix in the canonical (flattening) order.
  void for_each(const std::function<void(const std::string&, const Matrix&)>& fn) const;
  void for_each(const std::function<void(const std::string&, Matrix&)>& fn);

  std::size_t parameter_count() const;
  std::vector<double> flatten() const;
  /// Overwrites all weights from a flat vector of parameter_count() values.
  void assign(std::span<const double> flat);
  static LgaParams from_flat(LgaConfig config, std::span<const double> flat);

  friend bool operator==(const LgaParams& a, const LgaParams& b);

 private:
  LgaConfig config_;
};

inline constexpr int kCheckpointFormatVersion = 1;

/// Checkpoint text: JSON with a format version, the shape block, and one
/// entry per named matrix holding row-major values as decimal strings.
/// Values are written as 32-bit floats with enough digits to round-trip.
std::string to_checkpoint_text(const LgaParams& params);
LgaParams from_checkpoint_text(const std::string& text);

void save_checkpoint(const LgaParams& params, const std::filesystem::path& path);
LgaParams load_checkpoint(const std::filesystem::path& path);

}  // namespace lga
