#pragma once

#include "rvflx/matrix.hpp"

namespace rvflx {

using RidgeMode = SolveForm;

/// Real ridge closed form shared by the RVFL output layer and the autoencoder
/// decoder. `automatic` resolves to dual iff g.rows() < g.cols().
RealMatrix real_ridge(const RealMatrix& g, const RealMatrix& w, double c,
                      RidgeMode mode = RidgeMode::automatic);

}  // namespace rvflx
