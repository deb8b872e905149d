#pragma once

#include <optional>
#include <string>
#include <utility>

#include "rvflx/matrix.hpp"

namespace rvflx {

enum class TransformMethod { natural, autoencoder };

std::string to_string(TransformMethod method);
TransformMethod parse_transform_method(const std::string& name);

/// Column-wise min-max scaling onto [0, 1]. Constant columns map to 0.
struct MinMaxScaler {
  RealRowVector min;
  RealRowVector max;

  /// Scales with the stored parameters. With `clamp`, values outside the fitted
  /// range are pinned to [0, 1].
  RealMatrix apply(const RealMatrix& m, bool clamp = true) const;
};

/// Fits a MinMaxScaler on `m` and returns the scaled matrix with it.
std::pair<RealMatrix, MinMaxScaler> xi_fit_apply(const RealMatrix& m);

/// State needed to map unseen real data into the complex domain the same way
/// the training data was mapped.
struct FittedTransform {
  TransformMethod method = TransformMethod::natural;
  int varpi = 1;
  Eigen::Index n_features = 0;
  // Autoencoder only.
  RealMatrix encoder_weights;  // r x r, uniform [-1, 1]
  RealMatrix decoder_weights;  // r x r, ridge decoder V*
  std::optional<MinMaxScaler> latent_scaling;

  /// Z (varpi V* + (1 - varpi) V*^T), before scaling.
  RealMatrix latent_projection(const RealMatrix& z) const;
};

FittedTransform fit_natural(const RealMatrix& z);

/// Random encoder W, latent S_hat = xi(Z W), ridge decoder V* minimizing
/// c/2 ||Z - S_hat V||^2 + 1/2 ||V||^2, then the imaginary-part scaler fitted on
/// Z (varpi V* + (1 - varpi) V*^T).
FittedTransform fit_autoencoder(const RealMatrix& z, double c, int varpi, Rng& rng);

/// Z + i S, with S = 0 (natural) or the scaled latent projection (autoencoder).
ComplexMatrix apply_transform(const FittedTransform& t, const RealMatrix& z);

}  // namespace rvflx
