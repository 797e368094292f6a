#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "pfh/util.hpp"

namespace pfh {

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// Uniform periodic grid on [origin, origin+L)^dim with n nodes per axis.
/// Node j sits at origin + j*h with h = L/n; node n is identified with node 0.
struct GridSpec {
  int dim = 2;
  int n = 256;
  double length = 4.0;
  double origin = -2.0;

  double spacing() const { return length / n; }

  std::size_t node_count() const {
    return dim == 1 ? static_cast<std::size_t>(n)
                    : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  }

  double cell_measure() const { return dim == 1 ? spacing() : spacing() * spacing(); }

  double domain_measure() const { return dim == 1 ? length : length * length; }

  double coord(int j) const { return origin + j * spacing(); }

  void validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("grid dim must be 1 or 2");
    if (n < 8 || !is_power_of_two(n))
      throw std::invalid_argument("grid n must be a power of two with n >= 8, got " + std::to_string(n));
    if (!(length > 0.0) || !std::isfinite(length))
      throw std::invalid_argument("grid L must be > 0");
    if (!std::isfinite(origin)) throw std::invalid_argument("grid origin must be finite");
  }

  bool operator==(const GridSpec&) const = default;
};

inline Point node_point(const GridSpec& g, std::size_t flat) {
  if (g.dim == 1) return Point{g.coord(static_cast<int>(flat)), 0.0};
  const int i0 = static_cast<int>(flat) / g.n;
  const int i1 = static_cast<int>(flat) % g.n;
  return Point{g.coord(i0), g.coord(i1)};
}

/// Real values on a periodic grid, row-major: index = i0*n + i1 in 2D.
struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  static ScalarField constant(const GridSpec& g, double c) {
    g.validate();
    return ScalarField{g, std::vector<double>(g.node_count(), c)};
  }

  static ScalarField zeros(const GridSpec& g) { return constant(g, 0.0); }

  std::size_t index(int i0, int i1 = 0) const {
    return static_cast<std::size_t>(i0) * (grid.dim == 2 ? grid.n : 1) + i1;
  }

  double& at(int i0, int i1 = 0) { return values[index(i0, i1)]; }
  double at(int i0, int i1 = 0) const { return values[index(i0, i1)]; }

  Point point(std::size_t flat) const { return node_point(grid, flat); }

  void validate() const {
    grid.validate();
    if (values.size() != grid.node_count())
      throw std::invalid_argument("field size does not match grid node count");
    for (double v : values)
      if (!std::isfinite(v)) throw std::invalid_argument("field contains a non-finite value");
  }
};

} // namespace pfh
