#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace mcuq {

/// Samples f_{i-1}, f_i, f_{i+1}, f_{i+2} around the edge [x_i, x_{i+1}] plus
/// the node spacing along the edge axis.
struct EdgeStencil {
  std::array<double, 4> values{};
  double h = 1.0;

  EdgeStencil() = default;
  EdgeStencil(double fm1, double f0, double f1, double f2, double spacing)
      : values{fm1, f0, f1, f2}, h(spacing) {
    validate();
  }

  /// Sample at offset -1..2 relative to x_i.
  double at(int offset) const { return values[static_cast<std::size_t>(offset + 1)]; }

  void validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("EdgeStencil: spacing must be positive");
    for (double v : values)
      if (!std::isfinite(v)) throw std::invalid_argument("EdgeStencil: non-finite sample");
  }
};

/// Seven-sample window f_{i-3} .. f_{i+3} used by the WENO solver.
struct WenoStencil {
  std::array<double, 7> values{};
  double h = 1.0;

  WenoStencil() = default;
  WenoStencil(const std::array<double, 7>& v, double spacing) : values(v), h(spacing) { validate(); }

  double at(int offset) const { return values[static_cast<std::size_t>(offset + 3)]; }

  EdgeStencil inner() const { return EdgeStencil(at(-1), at(0), at(1), at(2), h); }

  void validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("WenoStencil: spacing must be positive");
    for (double v : values)
      if (!std::isfinite(v)) throw std::invalid_argument("WenoStencil: non-finite sample");
  }
};

}  // namespace mcuq
