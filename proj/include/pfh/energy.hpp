#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "pfh/field_ops.hpp"
#include "pfh/grid.hpp"
#include "pfh/homogenize.hpp"
#include "pfh/potential.hpp"
#include "pfh/util.hpp"

namespace pfh {

/// Terms of the discrete energy
///   F(u) = int (eps/2) ||grad u||^2 + W_delta(x, u)/eps  [+ sqrt(delta/eps) ||grad u||],
/// each by the midpoint rule at the grid nodes. `normalized` divides the raw
/// total by L^{d-1}; for two straight interfaces spanning the square torus it
/// reports twice the surface tension constant.
struct EnergyBreakdown {
  double gradient_part = 0.0;
  double potential_part = 0.0;
  double tv_part = 0.0;
  double total = 0.0;
  double normalized = 0.0;
};

struct TraceRecord {
  int step = 0;
  double time = 0.0;
  EnergyBreakdown energy;
};

using EnergyTrace = std::vector<TraceRecord>;

namespace detail {

inline EnergyBreakdown assemble_energy(const ScalarField& u, double eps, const Potential& pot,
                                       double tv_coeff) {
  if (!(eps > 0.0)) throw std::invalid_argument("energy requires eps > 0");
  const double hd = u.grid.cell_measure();
  const ScalarField gsq = gradient_squared(u);

  std::vector<double> wvals(u.values.size());
  for (std::size_t i = 0; i < u.values.size(); ++i) wvals[i] = pot.value(u.point(i), u.values[i]);

  EnergyBreakdown e;
  e.gradient_part = 0.5 * eps * hd * pairwise_sum(gsq.values);
  e.potential_part = hd * pairwise_sum(wvals) / eps;
  if (tv_coeff != 0.0) {
    std::vector<double> gnorm(gsq.values.size());
    for (std::size_t i = 0; i < gsq.values.size(); ++i) gnorm[i] = std::sqrt(gsq.values[i]);
    e.tv_part = tv_coeff * hd * pairwise_sum(gnorm);
  }
  e.total = e.gradient_part + e.potential_part + e.tv_part;
  e.normalized = e.total / std::pow(u.grid.length, u.grid.dim - 1);
  return e;
}

} // namespace detail

inline EnergyBreakdown energy(const ScalarField& u, double eps, const Potential& pot) {
  return detail::assemble_energy(u, eps, pot, 0.0);
}

/// Energy augmented with the total variation term sqrt(delta/eps) int ||grad u||.
inline EnergyBreakdown energy_tv(const ScalarField& u, double eps, double delta, const Potential& pot) {
  if (!(delta > 0.0)) throw std::invalid_argument("energy_tv requires delta > 0");
  return detail::assemble_energy(u, eps, pot, std::sqrt(delta / eps));
}

/// Tiling of the periodic domain by axis-aligned squares of side delta,
/// aligned with the grid: L/delta and delta/h must both be integers. Cell
/// (c0, c1) owns the node index block [c0*s, (c0+1)*s) x [c1*s, (c1+1)*s).
struct CellPartition {
  GridSpec grid;
  double delta = 0.0;
  int cells_per_axis = 0;
  int nodes_per_cell_axis = 0;

  std::size_t cell_count() const {
    return grid.dim == 1 ? static_cast<std::size_t>(cells_per_axis)
                         : static_cast<std::size_t>(cells_per_axis) * cells_per_axis;
  }

  double cell_measure() const { return grid.dim == 1 ? delta : delta * delta; }
};

inline CellPartition make_partition(const GridSpec& grid, double delta) {
  grid.validate();
  if (!(delta > 0.0)) throw std::invalid_argument("partition delta must be > 0");
  const double cells = grid.length / delta;
  const double nodes = delta / grid.spacing();
  const int cells_i = static_cast<int>(std::lround(cells));
  const int nodes_i = static_cast<int>(std::lround(nodes));
  if (cells_i < 1 || std::fabs(cells - cells_i) > 1e-9 * cells)
    throw std::invalid_argument("partition requires L/delta to be an integer");
  if (nodes_i < 1 || std::fabs(nodes - nodes_i) > 1e-9 * nodes)
    throw std::invalid_argument("partition requires delta to be a multiple of the grid spacing");
  return CellPartition{grid, delta, cells_i, nodes_i};
}

namespace detail {

// Apply fn(flat_index) over every node of one partition cell, row-major.
template <typename Fn>
inline void for_cell_nodes(const CellPartition& part, std::size_t cell, Fn&& fn) {
  const int s = part.nodes_per_cell_axis;
  if (part.grid.dim == 1) {
    const int base = static_cast<int>(cell) * s;
    for (int j = 0; j < s; ++j) fn(static_cast<std::size_t>(base + j));
    return;
  }
  const int c0 = static_cast<int>(cell) / part.cells_per_axis;
  const int c1 = static_cast<int>(cell) % part.cells_per_axis;
  for (int a = 0; a < s; ++a) {
    const std::size_t row = static_cast<std::size_t>(c0 * s + a) * part.grid.n;
    for (int b = 0; b < s; ++b) fn(row + c1 * s + b);
  }
}

} // namespace detail

/// sup over cell-wise constant probe values of
///   sum_i | int_{Q_i} W_delta(x, u_i) - W_hom(u_i) dx |.
/// The supremum decomposes cell by cell because the probes are independent,
/// so each cell is maximized over the probe grid separately.
inline double compatibility_gap(const Potential& pot, const HomogenizedPotential& whom,
                                const CellPartition& part, std::span<const double> u_probe, double m_bound) {
  if (u_probe.empty()) throw std::invalid_argument("compatibility_gap needs probe values");
  for (double u : u_probe)
    if (std::fabs(u) > m_bound + 1e-12)
      throw std::invalid_argument("compatibility_gap probe values must lie in [-M, M]");

  const double hd = part.grid.cell_measure();
  const double cellmeas = part.cell_measure();

  std::vector<double> cell_gaps(part.cell_count(), 0.0);
  std::vector<double> wsum;
  for (std::size_t c = 0; c < part.cell_count(); ++c) {
    double worst = 0.0;
    for (double u : u_probe) {
      wsum.clear();
      detail::for_cell_nodes(part, c, [&](std::size_t flat) {
        wsum.push_back(pot.value(node_point(part.grid, flat), u));
      });
      const double gap = std::fabs(hd * pairwise_sum(wsum) - whom.value(u) * cellmeas);
      if (gap > worst) worst = gap;
    }
    cell_gaps[c] = worst;
  }
  return pairwise_sum(cell_gaps);
}

/// Both sides of the per-cell lower bound that replaces the inhomogeneous
/// energy by the homogenized one at the cost of a Poincare-weakened gradient,
/// an oscillation penalty, and the compatibility defect:
///   F_delta(u) >= (1 - c_P a) * grad + int W_hom(u)/eps
///                 - C (delta/eps)^2 |Omega| / (a eps) - sum_i |gap_i| / eps.
/// The constants are measured from the data rather than assumed: c_P is the
/// worst-cell Rayleigh quotient of u itself and C comes from the measured
/// u-Lipschitz field of W_delta plus the Lipschitz constant of W_hom.
struct CellLowerBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double gradient_raw = 0.0;            // int ||grad u||^2
  double homogenized_potential = 0.0;   // int W_hom(u) / eps
  double penalty = 0.0;                 // C (delta/eps)^2 |Omega| / (alpha eps)
  double compatibility = 0.0;           // sum_i |cell gap at the cell mean| / eps
  double measured_poincare = 0.0;       // c_P
  double measured_lipschitz = 0.0;      // C
  bool poincare_degenerate = false;     // a cell had mean oscillation but zero gradient
};

inline CellLowerBoundReport cell_energy_lower_bound(const ScalarField& u, double eps, double delta,
                                                    double alpha, const Potential& pot,
                                                    const HomogenizedPotential& whom,
                                                    const CellPartition& part) {
  if (!(alpha > 0.0)) throw std::invalid_argument("lower bound requires alpha > 0");
  if (!(eps > 0.0)) throw std::invalid_argument("lower bound requires eps > 0");
  if (std::fabs(part.delta - delta) > 1e-12 * delta)
    throw std::invalid_argument("partition delta does not match the requested delta");
  u.validate();
  if (u.grid != part.grid) throw std::invalid_argument("field and partition use different grids");

  double umax = 0.0;
  for (double v : u.values) umax = std::max(umax, std::fabs(v));
  const double m_bound = std::max(1.5, umax);
  if (whom.min_u() > -m_bound || whom.max_u() < m_bound)
    throw std::invalid_argument("homogenized potential does not cover the field range");

  // Lipschitz constant of W_hom on [-M, M], from a dense derivative probe.
  const auto probe = linspace(-m_bound, m_bound, 1001);
  double lip_hom = 0.0;
  for (double s : probe) lip_hom = std::max(lip_hom, std::fabs(whom.derivative(s)));

  const double hd = u.grid.cell_measure();
  const ScalarField gsq = gradient_squared(u);

  const std::size_t ncells = part.cell_count();
  std::vector<double> lhs_cells(ncells), grad_cells(ncells), hom_cells(ncells), gap_cells(ncells);
  std::vector<double> buf_g, buf_w, buf_h, buf_u, buf_l, buf_v;
  double c_poincare = 0.0;
  double c_lip = 0.0;
  bool degenerate = false;

  for (std::size_t c = 0; c < ncells; ++c) {
    buf_g.clear();
    buf_w.clear();
    buf_h.clear();
    buf_u.clear();
    buf_l.clear();
    detail::for_cell_nodes(part, c, [&](std::size_t flat) {
      const Point x = u.point(flat);
      const double uv = u.values[flat];
      buf_g.push_back(gsq.values[flat]);
      buf_w.push_back(pot.value(x, uv));
      buf_h.push_back(whom.value(uv));
      buf_u.push_back(uv);
      double lloc = 0.0;
      for (double s : probe) lloc = std::max(lloc, std::fabs(pot.derivative(x, s)));
      buf_l.push_back((lloc + lip_hom) * (lloc + lip_hom) * 0.5);
    });

    const double grad_i = hd * pairwise_sum(buf_g);
    const double mean_i = pairwise_sum(buf_u) / static_cast<double>(buf_u.size());
    buf_v.clear();
    for (double uv : buf_u) buf_v.push_back((uv - mean_i) * (uv - mean_i));
    const double var_i = hd * pairwise_sum(buf_v);

    grad_cells[c] = grad_i;
    lhs_cells[c] = 0.5 * eps * grad_i + hd * pairwise_sum(buf_w) / eps;
    hom_cells[c] = hd * pairwise_sum(buf_h) / eps;

    double wmean_sum = 0.0;
    detail::for_cell_nodes(part, c, [&](std::size_t flat) {
      wmean_sum += pot.value(u.point(flat), mean_i);
    });
    gap_cells[c] = std::fabs(hd * wmean_sum - whom.value(mean_i) * part.cell_measure()) / eps;

    c_lip = std::max(c_lip, pairwise_sum(buf_l) / static_cast<double>(buf_l.size()));
    if (grad_i > 0.0) {
      c_poincare = std::max(c_poincare, var_i / (delta * delta * grad_i));
    } else if (var_i > 1e-24) {
      degenerate = true;
    }
  }

  CellLowerBoundReport rep;
  rep.lhs = pairwise_sum(lhs_cells);
  rep.gradient_raw = pairwise_sum(grad_cells);
  rep.homogenized_potential = pairwise_sum(hom_cells);
  rep.compatibility = pairwise_sum(gap_cells);
  rep.measured_poincare = c_poincare;
  rep.measured_lipschitz = c_lip;
  rep.poincare_degenerate = degenerate;
  rep.penalty = c_lip * (delta / eps) * (delta / eps) * u.grid.domain_measure() / (alpha * eps);
  rep.rhs = (1.0 - c_poincare * alpha) * 0.5 * eps * rep.gradient_raw + rep.homogenized_potential -
            rep.penalty - rep.compatibility;
  rep.slack = rep.lhs - rep.rhs;
  return rep;
}

} // namespace pfh
