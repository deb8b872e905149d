#include "rvflx/solvers.hpp"

namespace rvflx {

RealMatrix real_ridge(const RealMatrix& g, const RealMatrix& w, double c, RidgeMode mode) {
  return regularized_solve<double>(g, w, c, mode);
}

}  // namespace rvflx
