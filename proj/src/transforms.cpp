#include "rvflx/transforms.hpp"

#include "rvflx/solvers.hpp"

namespace rvflx {

std::string to_string(TransformMethod method) {
  return method == TransformMethod::natural ? "natural" : "autoencoder";
}

TransformMethod parse_transform_method(const std::string& name) {
  if (name == "natural") return TransformMethod::natural;
  if (name == "autoencoder" || name == "auto") return TransformMethod::autoencoder;
  throw ArgumentError("unknown transform method '" + name + "' (expected natural or auto)");
}

RealMatrix MinMaxScaler::apply(const RealMatrix& m, bool clamp) const {
  if (m.cols() != min.size())
    throw ArgumentError("min-max scaler fitted on " + std::to_string(min.size()) +
                        " columns, got " + std::to_string(m.cols()));
  RealMatrix out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double lo = min(j);
    const double span = max(j) - lo;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      double v = span > 0.0 ? (m(i, j) - lo) / span : 0.0;
      if (clamp) v = std::clamp(v, 0.0, 1.0);
      out(i, j) = v;
    }
  }
  return out;
}

std::pair<RealMatrix, MinMaxScaler> xi_fit_apply(const RealMatrix& m) {
  if (m.size() == 0) throw ArgumentError("cannot fit min-max scaling on an empty matrix");
  MinMaxScaler scaler{m.colwise().minCoeff(), m.colwise().maxCoeff()};
  RealMatrix scaled = scaler.apply(m, false);
  return {std::move(scaled), std::move(scaler)};
}

RealMatrix FittedTransform::latent_projection(const RealMatrix& z) const {
  if (varpi == 1) return z * decoder_weights;
  return z * decoder_weights.transpose();
}

FittedTransform fit_natural(const RealMatrix& z) {
  FittedTransform t;
  t.method = TransformMethod::natural;
  t.n_features = z.cols();
  return t;
}

FittedTransform fit_autoencoder(const RealMatrix& z, double c, int varpi, Rng& rng) {
  if (!(c > 0.0)) throw ArgumentError("autoencoder regularization must be positive");
  if (varpi != 0 && varpi != 1) throw ArgumentError("varpi must be 0 or 1");
  if (z.rows() < 1 || z.cols() < 1) throw ArgumentError("autoencoder needs a nonempty matrix");

  FittedTransform t;
  t.method = TransformMethod::autoencoder;
  t.varpi = varpi;
  t.n_features = z.cols();
  t.encoder_weights = uniform_matrix(rng, z.cols(), z.cols(), -1.0, 1.0);
  const RealMatrix latent = xi_fit_apply(z * t.encoder_weights).first;
  t.decoder_weights = real_ridge(latent, z, c, RidgeMode::automatic);
  t.latent_scaling = xi_fit_apply(t.latent_projection(z)).second;
  return t;
}

ComplexMatrix apply_transform(const FittedTransform& t, const RealMatrix& z) {
  if (z.cols() != t.n_features)
    throw ArgumentError("transform fitted on " + std::to_string(t.n_features) +
                        " features, got " + std::to_string(z.cols()));
  ComplexMatrix out(z.rows(), z.cols());
  out.real() = z;
  if (t.method == TransformMethod::natural) {
    out.imag().setZero();
  } else {
    out.imag() = t.latent_scaling->apply(t.latent_projection(z), true);
  }
  return out;
}

}  // namespace rvflx
