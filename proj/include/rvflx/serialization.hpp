#pragma once

#include <filesystem>

#include <json.hpp>

#include "rvflx/experiment.hpp"
#include "rvflx/models.hpp"
#include "rvflx/transforms.hpp"

namespace rvflx {

inline constexpr const char* kTransformSchema = "rvflx.transform/1";
inline constexpr const char* kModelSchema = "rvflx.model/1";
inline constexpr const char* kGridSchema = "rvflx.grid/1";

// Matrices are stored as {"rows", "cols", "data"} with data in row-major
// order; complex matrices carry "re" and "im" arrays instead of "data".
nlohmann::json to_json(const RealMatrix& m);
nlohmann::json to_json(const ComplexMatrix& m);
RealMatrix real_matrix_from_json(const nlohmann::json& j);
ComplexMatrix complex_matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FittedTransform& t);
FittedTransform transform_from_json(const nlohmann::json& j);

nlohmann::json to_json(const HyperParams& hp);
HyperParams hyperparams_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FittedModel& m);
FittedModel model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Grid& g);
/// Missing keys keep their defaults.
Grid grid_from_json(const nlohmann::json& j, const Grid& base = Grid::defaults());

nlohmann::json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace rvflx
