#include "rvflx/serialization.hpp"

#include <fstream>

namespace rvflx {

using nlohmann::json;

namespace {

void expect_schema(const json& j, const char* schema) {
  const auto found = j.value("schema", std::string());
  if (found != schema)
    throw DataError("expected schema '" + std::string(schema) + "', found '" + found + "'");
}

std::vector<double> row_major(const RealMatrix& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

RealMatrix from_row_major(Eigen::Index rows, Eigen::Index cols, const std::vector<double>& data) {
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols))
    throw DataError("matrix payload has " + std::to_string(data.size()) + " entries for a " +
                    std::to_string(rows) + "x" + std::to_string(cols) + " shape");
  RealMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = data[static_cast<std::size_t>(i * cols + j)];
  return m;
}

template <typename Scalar>
json network_to_json(const Network<Scalar>& net) {
  const auto as_matrix = [](const RowVector<Scalar>& v) { return Matrix<Scalar>(v); };
  return {{"hidden_weights", to_json(net.hidden.weights)},
          {"hidden_bias", to_json(as_matrix(net.hidden.bias))},
          {"eta", to_json(net.eta)},
          {"direct_link", net.direct_link}};
}

}  // namespace

json to_json(const RealMatrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", row_major(m)}};
}

json to_json(const ComplexMatrix& m) {
  return {{"rows", m.rows()},
          {"cols", m.cols()},
          {"re", row_major(m.real())},
          {"im", row_major(m.imag())}};
}

RealMatrix real_matrix_from_json(const json& j) {
  return from_row_major(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>(),
                        j.at("data").get<std::vector<double>>());
}

ComplexMatrix complex_matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  ComplexMatrix m(rows, cols);
  m.real() = from_row_major(rows, cols, j.at("re").get<std::vector<double>>());
  m.imag() = from_row_major(rows, cols, j.at("im").get<std::vector<double>>());
  return m;
}

json to_json(const FittedTransform& t) {
  json j{{"schema", kTransformSchema},
         {"kind", to_string(t.method)},
         {"varpi", t.varpi},
         {"n_features", t.n_features}};
  if (t.method == TransformMethod::autoencoder) {
    j["encoder_weights"] = to_json(t.encoder_weights);
    j["decoder_weights"] = to_json(t.decoder_weights);
    j["xi_params"] = {{"min", row_major(t.latent_scaling->min)}, {"max", row_major(t.latent_scaling->max)}};
  }
  return j;
}

FittedTransform transform_from_json(const json& j) {
  expect_schema(j, kTransformSchema);
  FittedTransform t;
  t.method = parse_transform_method(j.at("kind").get<std::string>());
  t.varpi = j.at("varpi").get<int>();
  t.n_features = j.at("n_features").get<Eigen::Index>();
  if (t.method == TransformMethod::autoencoder) {
    t.encoder_weights = real_matrix_from_json(j.at("encoder_weights"));
    t.decoder_weights = real_matrix_from_json(j.at("decoder_weights"));
    const auto lo = j.at("xi_params").at("min").get<std::vector<double>>();
    const auto hi = j.at("xi_params").at("max").get<std::vector<double>>();
    const auto r = t.n_features;
    if (t.encoder_weights.rows() != r || t.encoder_weights.cols() != r || t.decoder_weights.rows() != r ||
        t.decoder_weights.cols() != r)
      throw DataError("autoencoder weights must be " + std::to_string(r) + "x" + std::to_string(r));
    t.latent_scaling = MinMaxScaler{from_row_major(1, r, lo), from_row_major(1, r, hi)};
  }
  return t;
}

json to_json(const HyperParams& hp) {
  return {{"c", hp.c},
          {"n_hidden", hp.n_hidden},
          {"activation", to_string(hp.activation)},
          {"alpha", hp.alpha},
          {"varpi", hp.varpi},
          {"direct_link", hp.direct_link},
          {"seed", hp.seed}};
}

HyperParams hyperparams_from_json(const json& j) {
  HyperParams hp;
  hp.c = j.value("c", hp.c);
  hp.n_hidden = j.value("n_hidden", hp.n_hidden);
  hp.activation = parse_activation(j.value("activation", to_string(hp.activation)));
  hp.alpha = j.value("alpha", hp.alpha);
  hp.varpi = j.value("varpi", hp.varpi);
  hp.direct_link = j.value("direct_link", hp.direct_link);
  hp.seed = j.value("seed", hp.seed);
  hp.validate();
  return hp;
}

json to_json(const FittedModel& m) {
  json j{{"schema", kModelSchema},
         {"kind", to_string(m.kind)},
         {"hyperparams", to_json(m.hp)},
         {"n_features", m.n_features},
         {"class_names", m.class_names}};
  if (m.transform) j["transform"] = to_json(*m.transform);
  std::visit([&](const auto& net) { j["network"] = network_to_json(net); }, m.network);
  return j;
}

FittedModel model_from_json(const json& j) {
  expect_schema(j, kModelSchema);
  FittedModel m;
  m.kind = parse_model_kind(j.at("kind").get<std::string>());
  m.hp = hyperparams_from_json(j.at("hyperparams"));
  m.n_features = j.at("n_features").get<Eigen::Index>();
  m.class_names = j.at("class_names").get<std::vector<std::string>>();
  const json& net = j.at("network");
  if (is_complex(m.kind)) {
    m.transform = transform_from_json(j.at("transform"));
    Network<Complex> cnet;
    cnet.hidden.weights = complex_matrix_from_json(net.at("hidden_weights"));
    cnet.hidden.bias = complex_matrix_from_json(net.at("hidden_bias"));
    cnet.eta = complex_matrix_from_json(net.at("eta"));
    cnet.direct_link = net.at("direct_link").get<bool>();
    m.network = std::move(cnet);
  } else {
    Network<double> rnet;
    rnet.hidden.weights = real_matrix_from_json(net.at("hidden_weights"));
    rnet.hidden.bias = real_matrix_from_json(net.at("hidden_bias"));
    rnet.eta = real_matrix_from_json(net.at("eta"));
    rnet.direct_link = net.at("direct_link").get<bool>();
    m.network = std::move(rnet);
  }
  std::visit(
      [&](const auto& n) {
        const auto expected_rows = (n.direct_link ? m.n_features : 0) + n.hidden.weights.cols();
        if (n.hidden.weights.rows() != m.n_features || n.hidden.bias.size() != n.hidden.weights.cols() ||
            n.eta.rows() != expected_rows || n.eta.cols() != m.n_classes())
          throw DataError("model file has inconsistent weight shapes");
      },
      m.network);
  return m;
}

json to_json(const Grid& g) {
  std::vector<std::string> acts;
  for (Activation a : g.activations) acts.push_back(to_string(a));
  return {{"schema", kGridSchema},
          {"c_values", g.c_values},
          {"n_hidden_values", g.n_hidden_values},
          {"activations", acts},
          {"alpha_values", g.alpha_values},
          {"varpi_values", g.varpi_values}};
}

Grid grid_from_json(const json& j, const Grid& base) {
  Grid g = base;
  if (j.contains("c_values")) g.c_values = j.at("c_values").get<std::vector<double>>();
  if (j.contains("n_hidden_values")) g.n_hidden_values = j.at("n_hidden_values").get<std::vector<int>>();
  if (j.contains("activations")) {
    g.activations.clear();
    for (const auto& name : j.at("activations")) g.activations.push_back(parse_activation(name.get<std::string>()));
  }
  if (j.contains("alpha_values")) g.alpha_values = j.at("alpha_values").get<std::vector<double>>();
  if (j.contains("varpi_values")) g.varpi_values = j.at("varpi_values").get<std::vector<int>>();
  g.validate();
  return g;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace rvflx
