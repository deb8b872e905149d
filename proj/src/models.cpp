#include "rvflx/models.hpp"

#include <cmath>
#include <numeric>

#include "rvflx/solvers.hpp"

namespace rvflx {

namespace {

// Child streams of the model seed. The real RVFL draws from the same streams
// as the real parts of the complex model.
enum Stream : std::uint64_t {
  kWeightReal = 1,
  kWeightImag = 2,
  kBiasReal = 3,
  kBiasImag = 4,
  kMask = 5,
  kTransform = 6,
};

// floor(alpha * count) distinct positions out of [0, count), by partial
// Fisher-Yates.
std::vector<std::size_t> sample_positions(Rng& rng, std::size_t count, std::size_t picks) {
  std::vector<std::size_t> pool(count);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < picks; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(count - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(picks);
  return pool;
}

template <typename Scalar>
void sparsify(HiddenLayer<Scalar>& layer, double alpha, Rng rng) {
  const auto rows = static_cast<std::size_t>(layer.weights.rows());
  const auto cols = static_cast<std::size_t>(layer.weights.cols());
  // Positions index the weight matrix in row-major order.
  for (std::size_t pos : sample_positions(rng, rows * cols, sparsified_count(alpha, rows * cols)))
    layer.weights(static_cast<Eigen::Index>(pos / cols), static_cast<Eigen::Index>(pos % cols)) = Scalar(0);
  const auto n = static_cast<std::size_t>(layer.bias.size());
  for (std::size_t pos : sample_positions(rng, n, sparsified_count(alpha, n)))
    layer.bias(static_cast<Eigen::Index>(pos)) = Scalar(0);
}

// Affine map with a fixed summation order: out(i, j) = sum_t z(i, t) w(t, j) + b(j).
// Real and complex instantiations perform the same sequence of operations on
// the real parts when every imaginary part is zero.
inline double mul(double a, double b) { return a * b; }

// Textbook complex product, without the NaN recovery of operator*; inputs are
// finite by the time they get here.
inline Complex mul(const Complex& a, const Complex& b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// Z W + b with a fixed summation order (t = 0, 1, ..., then the bias), shared
// by the real and complex paths.
template <typename Scalar>
Matrix<Scalar> affine(const Matrix<Scalar>& z, const Matrix<Scalar>& w, const RowVector<Scalar>& b) {
  if (z.cols() != w.rows())
    throw ArgumentError("hidden layer expects " + std::to_string(w.rows()) + " inputs, got " +
                        std::to_string(z.cols()));
  if (b.size() != w.cols()) throw ArgumentError("hidden bias length does not match hidden width");
  const Eigen::Index k = z.rows();
  Matrix<Scalar> out = Matrix<Scalar>::Zero(k, w.cols());
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    Scalar* col = out.col(j).data();
    for (Eigen::Index t = 0; t < z.cols(); ++t) {
      const Scalar wt = w(t, j);
      const Scalar* zt = z.col(t).data();
      for (Eigen::Index i = 0; i < k; ++i) col[i] += mul(zt[i], wt);
    }
    const Scalar bj = b(j);
    for (Eigen::Index i = 0; i < k; ++i) col[i] += bj;
  }
  return out;
}

template <typename Scalar>
Matrix<Scalar> design_matrix(const Matrix<Scalar>& inputs, const Matrix<Scalar>& hidden, bool direct_link) {
  if (!direct_link) return hidden;
  Matrix<Scalar> g(inputs.rows(), inputs.cols() + hidden.cols());
  g << inputs, hidden;
  return g;
}

void check_inputs(const FittedModel& model, const RealMatrix& z) {
  if (z.cols() != model.n_features)
    throw ArgumentError("model trained on " + std::to_string(model.n_features) + " features, got " +
                        std::to_string(z.cols()));
  if (!all_finite(z)) throw NumericError("input features contain non-finite values");
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::rvfl: return "rvfl";
    case ModelKind::elm: return "elm";
    case ModelKind::rvflx_n: return "rvflx_n";
    case ModelKind::rvflx_auto: return "rvflx_auto";
  }
  return "rvfl";
}

ModelKind parse_model_kind(const std::string& name) {
  for (ModelKind kind : kAllModelKinds)
    if (to_string(kind) == name) return kind;
  if (name == "rvflwodl") return ModelKind::elm;
  throw ArgumentError("unknown model '" + name + "' (expected rvfl, elm, rvflx_n or rvflx_auto)");
}

void HyperParams::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ArgumentError("C must be positive and finite");
  if (n_hidden < 1) throw ArgumentError("number of hidden nodes must be at least 1");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in [0, 1)");
  if (varpi != 0 && varpi != 1) throw ArgumentError("varpi must be 0 or 1");
}

bool uses_direct_link(ModelKind kind, const HyperParams& hp) {
  switch (kind) {
    case ModelKind::rvfl: return true;
    case ModelKind::elm: return false;
    default: return hp.direct_link;
  }
}

std::size_t sparsified_count(double alpha, std::size_t count) {
  // The small epsilon keeps products like 0.3 * 10 = 2.9999999999999996 at 3.
  const auto picks = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(count) + 1e-9));
  return std::min(picks, count);
}

RealHiddenLayer init_real_params(const HyperParams& hp, Eigen::Index n_features, const Rng& rng) {
  if (n_features < 1) throw ArgumentError("need at least one input feature");
  Rng weight_stream = rng.split(kWeightReal);
  Rng bias_stream = rng.split(kBiasReal);
  RealHiddenLayer layer;
  layer.weights = uniform_matrix(weight_stream, n_features, hp.n_hidden, -1.0, 1.0);
  layer.bias = uniform_matrix(bias_stream, 1, hp.n_hidden, 0.0, 1.0);
  sparsify(layer, hp.alpha, rng.split(kMask));
  return layer;
}

ComplexHiddenLayer init_complex_params(const HyperParams& hp, Eigen::Index n_features, const Rng& rng) {
  if (n_features < 1) throw ArgumentError("need at least one input feature");
  Rng wr = rng.split(kWeightReal);
  Rng wi = rng.split(kWeightImag);
  Rng br = rng.split(kBiasReal);
  Rng bi = rng.split(kBiasImag);
  ComplexHiddenLayer layer;
  layer.weights.resize(n_features, hp.n_hidden);
  layer.weights.real() = uniform_matrix(wr, n_features, hp.n_hidden, -1.0, 1.0);
  layer.weights.imag() = uniform_matrix(wi, n_features, hp.n_hidden, -1.0, 1.0);
  layer.bias.resize(hp.n_hidden);
  layer.bias.real() = uniform_matrix(br, 1, hp.n_hidden, 0.0, 1.0);
  layer.bias.imag() = uniform_matrix(bi, 1, hp.n_hidden, 0.0, 1.0);
  sparsify(layer, hp.alpha, rng.split(kMask));
  return layer;
}

RealMatrix forward_hidden_real(const RealMatrix& z, const RealMatrix& weights, const RealRowVector& bias,
                               Activation kind) {
  return apply_real(kind, affine<double>(z, weights, bias));
}

ComplexMatrix forward_hidden_complex(const ComplexMatrix& zx, const ComplexMatrix& weights,
                                     const ComplexRowVector& bias, Activation kind) {
  return apply_complex(kind, affine<Complex>(zx, weights, bias));
}

namespace {

std::vector<std::string> checked_class_names(const HyperParams& hp, const RealMatrix& z,
                                             const RealMatrix& targets_onehot, std::vector<std::string> class_names) {
  hp.validate();
  if (z.rows() == 0) throw DataError("cannot train on zero rows");
  if (z.rows() != targets_onehot.rows())
    throw ArgumentError("features have " + std::to_string(z.rows()) + " rows but targets have " +
                        std::to_string(targets_onehot.rows()));
  if (z.cols() < 1) throw DataError("dataset has no feature columns");
  if (targets_onehot.cols() < 2) throw DataError("need at least two classes to train");
  if (!all_finite(z)) throw NumericError("input features contain non-finite values");
  if (class_names.empty())
    for (Eigen::Index j = 0; j < targets_onehot.cols(); ++j) class_names.push_back(std::to_string(j));
  if (static_cast<Eigen::Index>(class_names.size()) != targets_onehot.cols())
    throw ArgumentError("class name count does not match target columns");
  return class_names;
}

template <typename Scalar>
std::vector<FittedModel> solve_path(const FittedModel& base, Network<Scalar> net, const Matrix<Scalar>& g,
                                    const RealMatrix& targets, const std::vector<double>& c_values,
                                    TransposeKind transpose) {
  const RidgeSystem<Scalar> system(g, targets, SolveForm::automatic, transpose);
  std::vector<FittedModel> models;
  models.reserve(c_values.size());
  for (double c : c_values) {
    FittedModel m = base;
    m.hp.c = c;
    net.eta = system.solve(c);
    m.network = net;
    models.push_back(std::move(m));
  }
  return models;
}

}  // namespace

std::vector<FittedModel> train_path(ModelKind kind, const HyperParams& hp, const std::vector<double>& c_values,
                                    const RealMatrix& z, const RealMatrix& targets_onehot,
                                    std::vector<std::string> class_names, const TrainOptions& options) {
  FittedModel base;
  base.kind = kind;
  base.hp = hp;
  base.n_features = z.cols();
  base.class_names = checked_class_names(hp, z, targets_onehot, std::move(class_names));
  for (double c : c_values)
    if (!(c > 0.0)) throw ArgumentError("regularization parameter must be positive");
  const Rng rng(hp.seed);
  const bool direct = uses_direct_link(kind, hp);

  if (!is_complex(kind)) {
    Network<double> net;
    net.direct_link = direct;
    net.hidden = init_real_params(hp, z.cols(), rng);
    const RealMatrix hidden = forward_hidden_real(z, net.hidden.weights, net.hidden.bias, hp.activation);
    return solve_path<double>(base, std::move(net), design_matrix<double>(z, hidden, direct), targets_onehot,
                              c_values, TransposeKind::hermitian);
  }

  Network<Complex> net;
  net.direct_link = direct;
  net.hidden = init_complex_params(hp, z.cols(), rng);
  if (options.zero_imaginary_hidden) {
    net.hidden.weights.imag().setZero();
    net.hidden.bias.imag().setZero();
  }
  const auto fit = [&](const FittedTransform& transform, const std::vector<double>& cs) {
    FittedModel with_transform = base;
    with_transform.transform = transform;
    const ComplexMatrix zx = apply_transform(transform, z);
    const ComplexMatrix hidden = forward_hidden_complex(zx, net.hidden.weights, net.hidden.bias, hp.activation);
    return solve_path<Complex>(with_transform, net, design_matrix<Complex>(zx, hidden, direct), targets_onehot, cs,
                               options.transpose);
  };

  if (kind == ModelKind::rvflx_n) return fit(fit_natural(z), c_values);

  // The autoencoder shares C with the output layer, so nothing carries over.
  std::vector<FittedModel> models;
  models.reserve(c_values.size());
  for (double c : c_values) {
    Rng transform_stream = rng.split(kTransform);
    models.push_back(std::move(fit(fit_autoencoder(z, c, hp.varpi, transform_stream), {c}).front()));
  }
  return models;
}

FittedModel train(ModelKind kind, const HyperParams& hp, const RealMatrix& z, const RealMatrix& targets_onehot,
                  std::vector<std::string> class_names, const TrainOptions& options) {
  return std::move(train_path(kind, hp, {hp.c}, z, targets_onehot, std::move(class_names), options).front());
}

RealMatrix real_hidden_features(const FittedModel& model, const RealMatrix& z) {
  check_inputs(model, z);
  const auto* net = std::get_if<Network<double>>(&model.network);
  if (net == nullptr) throw ArgumentError("model is complex-valued");
  return forward_hidden_real(z, net->hidden.weights, net->hidden.bias, model.hp.activation);
}

ComplexMatrix complex_hidden_features(const FittedModel& model, const RealMatrix& z) {
  check_inputs(model, z);
  const auto* net = std::get_if<Network<Complex>>(&model.network);
  if (net == nullptr || !model.transform) throw ArgumentError("model is real-valued");
  return forward_hidden_complex(apply_transform(*model.transform, z), net->hidden.weights, net->hidden.bias,
                                model.hp.activation);
}

std::vector<int> argmax_rows(const RealMatrix& scores) {
  std::vector<int> labels(static_cast<std::size_t>(scores.rows()), 0);
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < scores.cols(); ++j)
      if (scores(i, j) > scores(i, best)) best = j;
    labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return labels;
}

Prediction predict(const FittedModel& model, const RealMatrix& z) {
  check_inputs(model, z);
  Prediction out;
  if (const auto* net = std::get_if<Network<double>>(&model.network)) {
    const RealMatrix hidden = forward_hidden_real(z, net->hidden.weights, net->hidden.bias, model.hp.activation);
    out.scores = design_matrix<double>(z, hidden, net->direct_link) * net->eta;
  } else {
    const auto& cnet = std::get<Network<Complex>>(model.network);
    const ComplexMatrix zx = apply_transform(*model.transform, z);
    const ComplexMatrix hidden = forward_hidden_complex(zx, cnet.hidden.weights, cnet.hidden.bias, model.hp.activation);
    out.scores = (design_matrix<Complex>(zx, hidden, cnet.direct_link) * cnet.eta).cwiseAbs();
  }
  out.labels = argmax_rows(out.scores);
  return out;
}

}  // namespace rvflx
