#pragma once

#include <array>
#include <string>
#include <string_view>

#include "rvflx/matrix.hpp"

namespace rvflx {

enum class Activation { sigmoid, sine, tribas, radbas, tansig, relu };

inline constexpr std::array<Activation, 6> kAllActivations = {
    Activation::sigmoid, Activation::sine,   Activation::tribas,
    Activation::radbas,  Activation::tansig, Activation::relu};

std::string to_string(Activation kind);

/// Parses one of the six admissible names; throws ArgumentError otherwise.
Activation parse_activation(std::string_view name);

double activate(Activation kind, double x);

RealMatrix apply_real(Activation kind, const RealMatrix& m);

/// Split-complex lift: sigma(Re z) + i sigma(Im z), elementwise.
ComplexMatrix apply_complex(Activation kind, const ComplexMatrix& m);

}  // namespace rvflx
