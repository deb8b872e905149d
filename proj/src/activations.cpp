#include "rvflx/activations.hpp"

#include <cmath>

namespace rvflx {

std::string to_string(Activation kind) {
  switch (kind) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::sine: return "sine";
    case Activation::tribas: return "tribas";
    case Activation::radbas: return "radbas";
    case Activation::tansig: return "tansig";
    case Activation::relu: return "relu";
  }
  return "relu";
}

Activation parse_activation(std::string_view name) {
  for (Activation kind : kAllActivations)
    if (to_string(kind) == name) return kind;
  throw ArgumentError("unknown activation '" + std::string(name) +
                      "' (expected sigmoid, sine, tribas, radbas, tansig or relu)");
}

double activate(Activation kind, double x) {
  switch (kind) {
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::sine: return std::sin(x);
    case Activation::tribas: return std::max(0.0, 1.0 - std::abs(x));
    case Activation::radbas: return std::exp(-x * x);
    case Activation::tansig: return 2.0 / (1.0 + std::exp(-2.0 * x)) - 1.0;
    case Activation::relu: return std::max(0.0, x);
  }
  return x;
}

RealMatrix apply_real(Activation kind, const RealMatrix& m) {
  if (!all_finite(m)) throw NumericError("activation input contains non-finite values");
  return m.unaryExpr([kind](double x) { return activate(kind, x); });
}

ComplexMatrix apply_complex(Activation kind, const ComplexMatrix& m) {
  if (!all_finite(m)) throw NumericError("activation input contains non-finite values");
  return m.unaryExpr([kind](const Complex& z) {
    return Complex(activate(kind, z.real()), activate(kind, z.imag()));
  });
}

}  // namespace rvflx
