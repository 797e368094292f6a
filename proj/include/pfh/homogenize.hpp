#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pfh/potential.hpp"
#include "pfh/util.hpp"

namespace pfh {

/// Homogenized potential W_hom(u) = cell average of W(z, u), tabulated on an
/// increasing u grid. Derivative samples are the cell averages of d_u W, so
/// evaluation is cubic Hermite with exact nodal derivatives.
class HomogenizedPotential {
public:
  HomogenizedPotential(std::vector<double> u, std::vector<double> w, std::vector<double> dw,
                       int cell_quadrature_n)
      : u_(std::move(u)), w_(std::move(w)), dw_(std::move(dw)), quad_n_(cell_quadrature_n) {
    if (u_.size() < 2 || u_.size() != w_.size() || u_.size() != dw_.size())
      throw std::invalid_argument("homogenized potential needs matching sample arrays");
    for (std::size_t i = 1; i < u_.size(); ++i)
      if (!(u_[i] > u_[i - 1]))
        throw std::invalid_argument("homogenized potential u samples must be strictly increasing");
  }

  const std::vector<double>& samples_u() const { return u_; }
  const std::vector<double>& samples_w() const { return w_; }
  const std::vector<double>& samples_dw() const { return dw_; }
  int cell_quadrature_n() const { return quad_n_; }
  double min_u() const { return u_.front(); }
  double max_u() const { return u_.back(); }

  double value(double u) const { return eval(u).first; }
  double derivative(double u) const { return eval(u).second; }

  Potential to_potential() const { return Potential::tabulated(u_, w_); }

private:
  std::pair<double, double> eval(double u) const {
    if (u < u_.front() || u > u_.back())
      throw std::domain_error("homogenized potential evaluated outside [" + format_double(u_.front()) +
                              ", " + format_double(u_.back()) + "] at u = " + format_double(u));
    std::size_t hi = static_cast<std::size_t>(std::lower_bound(u_.begin(), u_.end(), u) - u_.begin());
    if (hi == 0) hi = 1;
    if (hi == u_.size()) hi = u_.size() - 1;
    const std::size_t lo = hi - 1;
    const double h = u_[hi] - u_[lo];
    const double t = (u - u_[lo]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double v = (2 * t3 - 3 * t2 + 1) * w_[lo] + h * (t3 - 2 * t2 + t) * dw_[lo] +
                     (-2 * t3 + 3 * t2) * w_[hi] + h * (t3 - t2) * dw_[hi];
    const double dv = ((6 * t2 - 6 * t) * w_[lo] + h * (3 * t2 - 4 * t + 1) * dw_[lo] +
                       (-6 * t2 + 6 * t) * w_[hi] + h * (3 * t2 - 2 * t) * dw_[hi]) /
                      h;
    return {v, dv};
  }

  std::vector<double> u_, w_, dw_;
  int quad_n_;
};

inline std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 2) throw std::invalid_argument("linspace needs >= 2 points");
  std::vector<double> xs(count);
  for (int i = 0; i < count; ++i) xs[i] = lo + (hi - lo) * i / (count - 1);
  xs.back() = hi;
  return xs;
}

/// Midpoint-rule cell average of W over one periodic cell, per u sample.
/// Spatially uniform potentials are their own homogenization; sums homogenize
/// term by term.
inline HomogenizedPotential homogenize(const Potential& pot, int cell_quadrature_n,
                                       std::span<const double> u_grid) {
  if (cell_quadrature_n < 32) throw std::invalid_argument("cell quadrature n must be >= 32");
  if (u_grid.size() < 2) throw std::invalid_argument("homogenize needs >= 2 u samples");

  std::vector<double> us(u_grid.begin(), u_grid.end());
  const std::size_t nu = us.size();
  std::vector<double> w(nu, 0.0), dw(nu, 0.0);

  if (pot.kind() == Potential::Kind::Sum) {
    for (const Potential& term : pot.terms()) {
      HomogenizedPotential part = homogenize(term, cell_quadrature_n, us);
      for (std::size_t i = 0; i < nu; ++i) {
        w[i] += part.samples_w()[i];
        dw[i] += part.samples_dw()[i];
      }
    }
    return HomogenizedPotential(std::move(us), std::move(w), std::move(dw), cell_quadrature_n);
  }

  if (pot.spatially_uniform()) {
    for (std::size_t i = 0; i < nu; ++i) {
      w[i] = pot.value(Point{}, us[i]);
      dw[i] = pot.derivative(Point{}, us[i]);
    }
    return HomogenizedPotential(std::move(us), std::move(w), std::move(dw), cell_quadrature_n);
  }

  const double cell = pot.cell_extent();
  const int nq = cell_quadrature_n;
  const double hq = cell / nq;
  std::vector<double> vals(static_cast<std::size_t>(nq) * nq), dvals(vals.size());
  for (std::size_t i = 0; i < nu; ++i) {
    std::size_t idx = 0;
    for (int a = 0; a < nq; ++a) {
      const double x1 = (a + 0.5) * hq;
      for (int b = 0; b < nq; ++b, ++idx) {
        const Point x{x1, (b + 0.5) * hq};
        vals[idx] = pot.value(x, us[i]);
        dvals[idx] = pot.derivative(x, us[i]);
      }
    }
    const double inv = 1.0 / static_cast<double>(vals.size());
    w[i] = pairwise_sum(vals) * inv;
    dw[i] = pairwise_sum(dvals) * inv;
  }
  return HomogenizedPotential(std::move(us), std::move(w), std::move(dw), cell_quadrature_n);
}

/// Surface tension constant c_hom = int_{-1}^{1} sqrt(2 W_hom(u)) du.
/// Midpoint rule with 10^4 points; never evaluates at the +-1 endpoints where
/// the integrand only vanishes like a square root.
inline double c_hom(const HomogenizedPotential& w) {
  if (w.min_u() > -1.0 || w.max_u() < 1.0)
    throw std::invalid_argument("c_hom needs W defined on [-1, 1]");
  constexpr int kPoints = 10000;
  const double h = 2.0 / kPoints;
  std::vector<double> f(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    const double u = -1.0 + (i + 0.5) * h;
    const double val = w.value(u);
    if (val < -1e-9)
      throw std::invalid_argument("c_hom rejects negative homogenized potential, W(" +
                                  format_double(u) + ") = " + format_double(val));
    f[i] = std::sqrt(2.0 * std::max(val, 0.0));
  }
  return pairwise_sum(f) * h;
}

/// Monotone transition profile solving phi' = sqrt(2 W_hom(phi)), phi(0) = 0,
/// by classical RK4 with the trajectory clamped at +-1 once |phi| reaches
/// 1 - 1e-10 (the truncated curve is still a solution). x_grid must be
/// increasing and contain x = 0 in its range.
inline std::vector<double> optimal_profile(const HomogenizedPotential& w,
                                           std::span<const double> x_grid) {
  if (x_grid.size() < 1) throw std::invalid_argument("optimal_profile needs a nonempty x grid");
  for (std::size_t i = 1; i < x_grid.size(); ++i)
    if (!(x_grid[i] > x_grid[i - 1]))
      throw std::invalid_argument("optimal_profile x grid must be strictly increasing");
  if (w.min_u() > -1.0 || w.max_u() < 1.0)
    throw std::invalid_argument("optimal_profile needs W defined on [-1, 1]");
  if (!(w.value(0.0) > 0.0))
    throw std::invalid_argument("optimal_profile rejects W with W(0) <= 0 (degenerate third well)");

  constexpr double kClamp = 1.0 - 1e-10;
  const auto rhs = [&w](double phi) {
    if (std::fabs(phi) >= 1.0) return 0.0;
    return std::sqrt(2.0 * std::max(w.value(phi), 0.0));
  };
  // One RK4 step; returns the clamped state.
  const auto rk4 = [&rhs](double phi, double dx) {
    const double k1 = rhs(phi);
    const double k2 = rhs(phi + 0.5 * dx * k1);
    const double k3 = rhs(phi + 0.5 * dx * k2);
    const double k4 = rhs(phi + dx * k3);
    double next = phi + dx / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (next >= kClamp) next = 1.0;
    if (next <= -kClamp) next = -1.0;
    return next;
  };
  const auto integrate_to = [&rk4](double phi, double from, double to) {
    const double span = to - from;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::fabs(span) / 1e-3)));
    const double dx = span / steps;
    for (int s = 0; s < steps; ++s) phi = rk4(phi, dx);
    return phi;
  };

  std::vector<double> out(x_grid.size());
  // Split the grid at 0 and march outward in both directions.
  std::size_t first_right = 0;
  while (first_right < x_grid.size() && x_grid[first_right] < 0.0) ++first_right;
  double phi = 0.0;
  double xcur = 0.0;
  for (std::size_t i = first_right; i < x_grid.size(); ++i) {
    phi = integrate_to(phi, xcur, x_grid[i]);
    xcur = x_grid[i];
    out[i] = phi;
  }
  phi = 0.0;
  xcur = 0.0;
  for (std::size_t i = first_right; i-- > 0;) {
    phi = integrate_to(phi, xcur, x_grid[i]);
    xcur = x_grid[i];
    out[i] = phi;
  }
  return out;
}

} // namespace pfh
