#pragma once

#include <cmath>

#include "pfh/grid.hpp"

namespace pfh {

/// Pointwise squared gradient by centered second-order periodic differences,
///   d_j f(x) ~ (f(x + h e_j) - f(x - h e_j)) / (2h).
inline ScalarField gradient_squared(const ScalarField& f) {
  const GridSpec& g = f.grid;
  const double inv2h = 1.0 / (2.0 * g.spacing());
  ScalarField out = ScalarField::zeros(g);
  const int n = g.n;
  if (g.dim == 1) {
    for (int i = 0; i < n; ++i) {
      const double d = (f.values[(i + 1) % n] - f.values[(i + n - 1) % n]) * inv2h;
      out.values[i] = d * d;
    }
    return out;
  }
  for (int i0 = 0; i0 < n; ++i0) {
    const int up = (i0 + 1) % n;
    const int dn = (i0 + n - 1) % n;
    for (int i1 = 0; i1 < n; ++i1) {
      const int rt = (i1 + 1) % n;
      const int lf = (i1 + n - 1) % n;
      const double d0 = (f.at(up, i1) - f.at(dn, i1)) * inv2h;
      const double d1 = (f.at(i0, rt) - f.at(i0, lf)) * inv2h;
      out.at(i0, i1) = d0 * d0 + d1 * d1;
    }
  }
  return out;
}

/// Pointwise ||grad f||, same stencil as gradient_squared.
inline ScalarField gradient_norm(const ScalarField& f) {
  ScalarField out = gradient_squared(f);
  for (double& v : out.values) v = std::sqrt(v);
  return out;
}

} // namespace pfh
