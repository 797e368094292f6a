#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pfh/grid.hpp"
#include "pfh/util.hpp"

namespace pfh {

/// Spatially inhomogeneous double-well potential W_delta(x, u) together with
/// its analytic u-derivative. All families are immutable after construction
/// and evaluation is pure, so values can be shared freely across threads.
///
/// Families:
///   homogeneous      W(u) = (u^2-1)^2 / 4
///   hex_weight       W(x,u) = w(x/delta) (u^2-1)^2/4, hexagonal weight w
///   random_tile      W(x,u) = q_ij (u^2-1)^2/4, i.i.d. uniform tile weights
///   varying_wells    W(x,u) = ((u^2 - b(x/delta))^2 + c(x/delta))/4, c = 1-b^2
///   varying_exponent W(x,u) = |u^2-1|^{p(x/delta)}
///   tabulated        x-independent W(u) by monotone cubic interpolation
///   sum              pointwise sum of sub-potentials
class Potential {
public:
  enum class Kind { Homogeneous, HexWeight, RandomTile, VaryingWells, VaryingExponent, Tabulated, Sum };

  static Potential homogeneous() { return Potential(Kind::Homogeneous); }

  static Potential hex_weight(double a, double b, double delta) {
    require_delta(delta);
    Potential p(Kind::HexWeight);
    p.a_ = a;
    p.b_ = b;
    p.delta_ = delta;
    // Cell average of a + b*sum_i sin^2(pi z_i) over the unit z-cell is
    // exactly a + 3b/2 (the oblique modes pair up and cancel).
    p.hex_mean_ = a + 1.5 * b;
    if (!(p.hex_mean_ > 0.0))
      throw std::invalid_argument("hex weight cell mean a + 3b/2 must be positive");
    return p;
  }

  static Potential random_tile(double delta, int m_sub, double low, double high, std::uint64_t seed) {
    require_delta(delta);
    if (m_sub < 1) throw std::invalid_argument("random tile m_sub must be >= 1");
    if (!(low <= high)) throw std::invalid_argument("random tile requires low <= high");
    Potential p(Kind::RandomTile);
    p.delta_ = delta;
    p.m_sub_ = m_sub;
    p.low_ = low;
    p.high_ = high;
    p.seed_ = seed;
    return p;
  }

  static Potential varying_wells(double delta) {
    require_delta(delta);
    Potential p(Kind::VaryingWells);
    p.delta_ = delta;
    return p;
  }

  static Potential varying_exponent(double delta) {
    require_delta(delta);
    Potential p(Kind::VaryingExponent);
    p.delta_ = delta;
    return p;
  }

  static Potential tabulated(std::vector<double> u, std::vector<double> w) {
    if (u.size() != w.size() || u.size() < 2)
      throw std::invalid_argument("tabulated potential needs >= 2 matching samples");
    for (std::size_t i = 1; i < u.size(); ++i)
      if (!(u[i] > u[i - 1]))
        throw std::invalid_argument("tabulated u samples must be strictly increasing");
    Potential p(Kind::Tabulated);
    p.tab_slope_ = pchip_slopes(u, w);
    p.tab_u_ = std::move(u);
    p.tab_w_ = std::move(w);
    return p;
  }

  static Potential sum(std::vector<Potential> terms) {
    Potential p(Kind::Sum);
    p.terms_ = std::move(terms);
    return p;
  }

  Kind kind() const { return kind_; }
  double delta() const { return delta_; }
  int m_sub() const { return m_sub_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Potential>& terms() const { return terms_; }
  const std::vector<double>& samples_u() const { return tab_u_; }
  const std::vector<double>& samples_w() const { return tab_w_; }

  /// W_delta(x, u).
  double value(Point x, double u) const {
    switch (kind_) {
      case Kind::Homogeneous:
        return double_well(u);
      case Kind::HexWeight:
        return hex_w(scaled(x)) * double_well(u);
      case Kind::RandomTile:
        return tile_q(x) * double_well(u);
      case Kind::VaryingWells: {
        const Point z = scaled(x);
        const double b = wells_b(z);
        const double d = u * u - b;
        return (d * d + (1.0 - b * b)) * 0.25;
      }
      case Kind::VaryingExponent: {
        const double base = std::fabs(u * u - 1.0);
        return base == 0.0 ? 0.0 : std::pow(base, exponent_p(scaled(x)));
      }
      case Kind::Tabulated:
        return tab_eval(u).first;
      case Kind::Sum: {
        double s = 0.0;
        for (const Potential& t : terms_) s += t.value(x, u);
        return s;
      }
    }
    return 0.0;
  }

  /// d/du W_delta(x, u). The varying-exponent family has p(x) > 1, so the
  /// derivative extends continuously by 0 at u = +-1.
  double derivative(Point x, double u) const {
    switch (kind_) {
      case Kind::Homogeneous:
        return u * (u * u - 1.0);
      case Kind::HexWeight:
        return hex_w(scaled(x)) * u * (u * u - 1.0);
      case Kind::RandomTile:
        return tile_q(x) * u * (u * u - 1.0);
      case Kind::VaryingWells:
        return u * (u * u - wells_b(scaled(x)));
      case Kind::VaryingExponent: {
        const double base = u * u - 1.0;
        if (base == 0.0) return 0.0;
        const double p = exponent_p(scaled(x));
        return 2.0 * u * p * std::pow(std::fabs(base), p - 1.0) * (base > 0.0 ? 1.0 : -1.0);
      }
      case Kind::Tabulated:
        return tab_eval(u).second;
      case Kind::Sum: {
        double s = 0.0;
        for (const Potential& t : terms_) s += t.derivative(x, u);
        return s;
      }
    }
    return 0.0;
  }

  /// True when W does not depend on x.
  bool spatially_uniform() const {
    switch (kind_) {
      case Kind::Homogeneous:
      case Kind::Tabulated:
        return true;
      case Kind::Sum:
        for (const Potential& t : terms_)
          if (!t.spatially_uniform()) return false;
        return true;
      default:
        return false;
    }
  }

  /// Side length of the periodic cell used for cell averages (x units).
  /// The random tile field repeats every m_sub tiles by construction.
  double cell_extent() const {
    switch (kind_) {
      case Kind::HexWeight:
      case Kind::VaryingWells:
      case Kind::VaryingExponent:
        return delta_;
      case Kind::RandomTile:
        return delta_ * m_sub_;
      default:
        return 0.0;
    }
  }

  /// Hexagonal weight w(z) = w~(z) / <w~>, normalized so the cell average is 1.
  double hex_w(Point z) const {
    const double s1 = std::sin(pi * z.x1);
    const double z2 = 0.5 * (z.x1 + std::sqrt(3.0) * z.x2);
    const double z3 = 0.5 * (z.x1 - std::sqrt(3.0) * z.x2);
    const double s2 = std::sin(pi * z2);
    const double s3 = std::sin(pi * z3);
    return (a_ + b_ * (s1 * s1 + s2 * s2 + s3 * s3)) / hex_mean_;
  }

  /// Tile weight at x: tile (i, j) of side delta draws from a stream keyed by
  /// (seed, i mod m_sub, j mod m_sub), so values do not depend on evaluation
  /// order and the field is (m_sub * delta)-periodic.
  double tile_q(Point x) const {
    const auto wrap = [this](double c) {
      const long i = static_cast<long>(std::floor(c / delta_));
      long r = i % m_sub_;
      if (r < 0) r += m_sub_;
      return static_cast<std::uint64_t>(r);
    };
    const std::uint64_t h = derive_seed(seed_, wrap(x.x1), wrap(x.x2));
    return low_ + (high_ - low_) * u01_from_bits(h);
  }

  /// Spatial factor of the separable families at x: the hexagonal weight
  /// w(x/delta), the tile value q_ij, or 1 for x-independent potentials.
  double spatial_weight(Point x) const {
    switch (kind_) {
      case Kind::Homogeneous:
      case Kind::Tabulated:
        return 1.0;
      case Kind::HexWeight:
        return hex_w(scaled(x));
      case Kind::RandomTile:
        return tile_q(x);
      default:
        throw std::invalid_argument("potential has no separable spatial weight");
    }
  }

  double wells_b(Point z) const { return 1.0 + 0.5 * std::cos(2.0 * pi * (z.x1 + 2.0 * z.x2)); }

  double exponent_p(Point z) const {
    const double c = std::cos(2.0 * pi * (z.x2 - std::sin(2.0 * pi * z.x1)));
    return 1.5 + 8.5 * c * c;
  }

private:
  explicit Potential(Kind k) : kind_(k) {}

  static void require_delta(double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("potential delta must be > 0");
  }

  static double double_well(double u) {
    const double d = u * u - 1.0;
    return 0.25 * d * d;
  }

  Point scaled(Point x) const { return Point{x.x1 / delta_, x.x2 / delta_}; }

  // Fritsch-Carlson monotone cubic slopes; no overshoot between samples.
  static std::vector<double> pchip_slopes(const std::vector<double>& u, const std::vector<double>& w) {
    const std::size_t n = u.size();
    std::vector<double> h(n - 1), d(n - 1), m(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = u[i + 1] - u[i];
      d[i] = (w[i + 1] - w[i]) / h[i];
    }
    if (n == 2) {
      m[0] = m[1] = d[0];
      return m;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (d[i - 1] * d[i] <= 0.0) {
        m[i] = 0.0;
      } else {
        const double w1 = 2.0 * h[i] + h[i - 1];
        const double w2 = h[i] + 2.0 * h[i - 1];
        m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
      }
    }
    const auto endpoint = [](double h0, double h1, double d0, double d1) {
      double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (s * d0 <= 0.0) return 0.0;
      if (d0 * d1 < 0.0 && std::fabs(s) > 3.0 * std::fabs(d0)) return 3.0 * d0;
      return s;
    };
    m[0] = endpoint(h[0], h[1], d[0], d[1]);
    m[n - 1] = endpoint(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    return m;
  }

  // Value and derivative of the cubic Hermite interpolant.
  std::pair<double, double> tab_eval(double u) const {
    const auto& xs = tab_u_;
    if (u < xs.front() || u > xs.back())
      throw std::domain_error("tabulated potential evaluated outside sample range [" +
                              format_double(xs.front()) + ", " + format_double(xs.back()) +
                              "] at u = " + format_double(u));
    std::size_t hi = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), u) - xs.begin());
    if (hi == 0) hi = 1;
    if (hi == xs.size()) hi = xs.size() - 1;
    const std::size_t lo = hi - 1;
    const double h = xs[hi] - xs[lo];
    const double t = (u - xs[lo]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    const double v = h00 * tab_w_[lo] + h * h10 * tab_slope_[lo] + h01 * tab_w_[hi] + h * h11 * tab_slope_[hi];
    const double dh00 = 6 * t2 - 6 * t, dh10 = 3 * t2 - 4 * t + 1;
    const double dh01 = -6 * t2 + 6 * t, dh11 = 3 * t2 - 2 * t;
    const double dv = (dh00 * tab_w_[lo] + h * dh10 * tab_slope_[lo] + dh01 * tab_w_[hi] + h * dh11 * tab_slope_[hi]) / h;
    return {v, dv};
  }

  Kind kind_;
  double a_ = 0.0, b_ = 0.0;
  double hex_mean_ = 1.0;
  double delta_ = 0.0;
  int m_sub_ = 0;
  double low_ = 0.0, high_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<double> tab_u_, tab_w_, tab_slope_;
  std::vector<Potential> terms_;
};

/// Realization of the spatial weight at the grid nodes, for snapshot dumps.
inline ScalarField weight_field(const Potential& pot, const GridSpec& g) {
  ScalarField f = ScalarField::zeros(g);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    f.values[i] = pot.spatial_weight(node_point(g, i));
  return f;
}

} // namespace pfh
