#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rvflx/activations.hpp"
#include "rvflx/matrix.hpp"
#include "rvflx/transforms.hpp"

namespace rvflx {

enum class ModelKind { rvfl, elm, rvflx_n, rvflx_auto };

inline constexpr std::array<ModelKind, 4> kAllModelKinds = {ModelKind::rvfl, ModelKind::elm,
                                                           ModelKind::rvflx_n, ModelKind::rvflx_auto};

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

inline bool is_complex(ModelKind kind) {
  return kind == ModelKind::rvflx_n || kind == ModelKind::rvflx_auto;
}

/// One grid point.
struct HyperParams {
  double c = 1.0;
  int n_hidden = 103;
  Activation activation = Activation::relu;
  double alpha = 0.0;  // fraction of hidden weights and biases zeroed
  int varpi = 1;       // rvflx_auto only
  bool direct_link = true;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const HyperParams&) const = default;
};

/// Knobs that are not hyperparameters.
struct TrainOptions {
  TransposeKind transpose = TransposeKind::hermitian;
  /// Test hook: zero the imaginary parts of the complex hidden weights and
  /// biases after initialization.
  bool zero_imaginary_hidden = false;
};

/// Random input-to-hidden parameters: weights r x N_h and one bias per hidden
/// node, broadcast across sample rows.
template <typename Scalar>
struct HiddenLayer {
  Matrix<Scalar> weights;
  RowVector<Scalar> bias;
};

using RealHiddenLayer = HiddenLayer<double>;
using ComplexHiddenLayer = HiddenLayer<Complex>;

template <typename Scalar>
struct Network {
  HiddenLayer<Scalar> hidden;
  Matrix<Scalar> eta;  // (r + N_h) x d with direct link, N_h x d without
  bool direct_link = true;
};

struct FittedModel {
  ModelKind kind = ModelKind::rvfl;
  HyperParams hp;
  Eigen::Index n_features = 0;
  std::vector<std::string> class_names;
  std::optional<FittedTransform> transform;  // complex kinds only
  std::variant<Network<double>, Network<Complex>> network;

  Eigen::Index n_classes() const { return static_cast<Eigen::Index>(class_names.size()); }
};

struct Prediction {
  RealMatrix scores;
  std::vector<int> labels;
};

/// Whether `kind` feeds the raw inputs to the output layer. rvfl always does,
/// elm never does, the complex kinds follow hp.direct_link.
bool uses_direct_link(ModelKind kind, const HyperParams& hp);

/// Draw counts for alpha-sparsification: floor(alpha * count).
std::size_t sparsified_count(double alpha, std::size_t count);

/// Real RVFL/ELM hidden parameters: weights uniform [-1, 1], biases uniform
/// [0, 1], then alpha-sparsification. Shares its random streams with the real
/// parts of init_complex_params, so the two agree on every real component.
RealHiddenLayer init_real_params(const HyperParams& hp, Eigen::Index n_features, const Rng& rng);

/// Complex hidden parameters: real and imaginary weight parts uniform [-1, 1],
/// real and imaginary bias parts uniform [0, 1], then a uniformly random
/// floor(alpha * count) subset of weight entries and of bias entries set to 0.
ComplexHiddenLayer init_complex_params(const HyperParams& hp, Eigen::Index n_features, const Rng& rng);

/// sigma(Z F_w + F_b) for real layers.
RealMatrix forward_hidden_real(const RealMatrix& z, const RealMatrix& weights,
                               const RealRowVector& bias, Activation kind);

/// sigma^X(Z^X F_w^X + F_b^X) with complex arithmetic and the split activation.
ComplexMatrix forward_hidden_complex(const ComplexMatrix& zx, const ComplexMatrix& weights,
                                     const ComplexRowVector& bias, Activation kind);

FittedModel train(ModelKind kind, const HyperParams& hp, const RealMatrix& z,
                  const RealMatrix& targets_onehot, std::vector<std::string> class_names = {},
                  const TrainOptions& options = {});

/// One model per entry of `c_values`, each identical to train() with hp.c set
/// to that entry. The hidden layer and Gram matrix are shared where C does not
/// enter them (everything but rvflx_auto).
std::vector<FittedModel> train_path(ModelKind kind, const HyperParams& hp, const std::vector<double>& c_values,
                                    const RealMatrix& z, const RealMatrix& targets_onehot,
                                    std::vector<std::string> class_names = {}, const TrainOptions& options = {});

/// Hidden-layer output of a fitted model on new data (after the complex
/// transform, for complex kinds).
RealMatrix real_hidden_features(const FittedModel& model, const RealMatrix& z);
ComplexMatrix complex_hidden_features(const FittedModel& model, const RealMatrix& z);

/// Scores and argmax labels (ties go to the lowest class index). Complex kinds
/// score with the elementwise magnitude of G_2^X eta^X.
Prediction predict(const FittedModel& model, const RealMatrix& z);

/// Row-wise argmax, lowest index on ties.
std::vector<int> argmax_rows(const RealMatrix& scores);

}  // namespace rvflx
