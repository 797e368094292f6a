#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pfh/grid.hpp"
#include "pfh/util.hpp"

namespace pfh {

/// 1D shifting-wells counterexample on (0,1):
///   W(z, u) = (u^2 - b(z))^2 - 1/4,  b = 1/2 on (0,1/2)+Z, 3/2 on (1/2,1)+Z,
/// evaluated on the ansatz phi(x) = 1 - (delta/eps)^2 psi(x/delta).
/// psi(z) = alpha sin(2 pi z) points toward the local well (wells sit at
/// sqrt(b), so phi dips below 1 where b = 1/2 and rises above 1 where
/// b = 3/2); the energy then goes negative at leading order
///   (delta^2/eps^3) * (alpha^2 pi^2 - 4 alpha / pi),
/// which is negative for alpha < 4/pi^3.
struct CounterexampleConfig {
  double eps = 0.01;
  double delta = 0.005;
  double alpha = 0.03;
  long n_1d = 200000;
};

inline double voids_counterexample_energy(const CounterexampleConfig& cfg) {
  if (!(cfg.eps > 0.0)) throw std::invalid_argument("counterexample eps must be > 0");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw std::invalid_argument("counterexample delta must lie in (0, 1)");
  if (!(cfg.alpha > 0.0)) throw std::invalid_argument("counterexample alpha must be > 0");
  if (static_cast<double>(cfg.n_1d) * cfg.delta < 16.0)
    throw std::invalid_argument("under-resolved grid: need at least 16 nodes per delta period");

  const double h = 1.0 / static_cast<double>(cfg.n_1d);
  const double eta = (cfg.delta / cfg.eps) * (cfg.delta / cfg.eps);
  std::vector<double> integrand(static_cast<std::size_t>(cfg.n_1d));
  for (long i = 0; i < cfg.n_1d; ++i) {
    const double x = (i + 0.5) * h;  // midpoints keep b's jumps off the nodes
    const double z = x / cfg.delta;
    const double zf = z - std::floor(z);
    const double b = zf < 0.5 ? 0.5 : 1.5;
    const double psi = cfg.alpha * std::sin(2.0 * pi * z);
    const double dpsi = cfg.alpha * 2.0 * pi * std::cos(2.0 * pi * z);
    const double phi = 1.0 - eta * psi;
    const double dphi = -eta * dpsi / cfg.delta;  // analytic derivative of the ansatz
    const double d = phi * phi - b;
    const double w = d * d - 0.25;
    integrand[static_cast<std::size_t>(i)] = 0.5 * cfg.eps * dphi * dphi + w / cfg.eps;
  }
  return h * pairwise_sum(integrand);
}

/// Leading-order coefficient of the counterexample energy in delta^2/eps^3,
/// by fine quadrature of the linearized integrand (independent of the energy
/// path above): int_0^1 (1/2)|psi'|^2 - 4 |1 - b| |psi| dz.
inline double voids_leading_coefficient(double alpha, long n = 1 << 20) {
  const double h = 1.0 / static_cast<double>(n);
  std::vector<double> vals(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const double z = (i + 0.5) * h;
    const double zf = z - std::floor(z);
    const double b = zf < 0.5 ? 0.5 : 1.5;
    const double psi = alpha * std::sin(2.0 * pi * z);
    const double dpsi = alpha * 2.0 * pi * std::cos(2.0 * pi * z);
    vals[static_cast<std::size_t>(i)] = 0.5 * dpsi * dpsi - 4.0 * std::fabs(1.0 - b) * std::fabs(psi);
  }
  return h * pairwise_sum(vals);
}

enum class TileDistribution { Uniform01, Bernoulli };

/// Monte-Carlo study of the tile-average discrepancy
///   D = (1/n^d) sum_i | (1/m^d) sum_j q_ij - p |
/// against the sub-Gaussian predictions E[D] <= m^{-d/2} and
/// P(D >= m^{-d/2}) <= exp(-0.3 n^d).
struct DiscrepancyStats {
  int n_cells = 0;
  int m_sub = 0;
  int trials = 0;
  double empirical_mean = 0.0;
  double empirical_tail_freq = 0.0;
  double bound_mean = 0.0;  // m^{-d/2}
  double bound_tail = 0.0;  // exp(-0.3 n^d)
};

inline DiscrepancyStats stochastic_discrepancy(int n, int m, int d, TileDistribution dist, double p,
                                               int trials, std::uint64_t seed) {
  if (n < 1 || m < 1) throw std::invalid_argument("discrepancy needs n, m >= 1");
  if (d < 1 || d > 3) throw std::invalid_argument("discrepancy dimension must be 1, 2 or 3");
  if (trials < 1) throw std::invalid_argument("discrepancy needs trials >= 1");
  if (dist == TileDistribution::Bernoulli && (p < 0.0 || p > 1.0))
    throw std::invalid_argument("Bernoulli parameter must lie in [0, 1]");
  const double mean_q = dist == TileDistribution::Uniform01 ? 0.5 : p;

  std::size_t cells = 1, subs = 1;
  for (int k = 0; k < d; ++k) {
    cells *= static_cast<std::size_t>(n);
    subs *= static_cast<std::size_t>(m);
  }
  const double threshold = std::pow(static_cast<double>(m), -0.5 * d);

  std::vector<double> per_trial(static_cast<std::size_t>(trials));
  int exceed = 0;
  for (int t = 0; t < trials; ++t) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<double> cell_dev(cells);
    for (std::size_t c = 0; c < cells; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < subs; ++j) {
        const double x = rng.next_u01();
        s += dist == TileDistribution::Uniform01 ? x : (x < p ? 1.0 : 0.0);
      }
      cell_dev[c] = std::fabs(s / static_cast<double>(subs) - mean_q);
    }
    const double dval = pairwise_sum(cell_dev) / static_cast<double>(cells);
    per_trial[static_cast<std::size_t>(t)] = dval;
    if (dval >= threshold) ++exceed;
  }

  DiscrepancyStats out;
  out.n_cells = n;
  out.m_sub = m;
  out.trials = trials;
  out.empirical_mean = pairwise_sum(per_trial) / static_cast<double>(trials);
  out.empirical_tail_freq = static_cast<double>(exceed) / static_cast<double>(trials);
  out.bound_mean = threshold;
  out.bound_tail = std::exp(-0.3 * static_cast<double>(cells));
  return out;
}

/// Per-index min and max of a 2D field over the transverse direction:
/// axis = 0 scans x1 and reduces over x2, axis = 1 the other way around.
struct Envelope {
  std::vector<double> min;
  std::vector<double> max;
};

inline Envelope interface_envelope(const ScalarField& u, int axis) {
  if (u.grid.dim != 2) throw std::invalid_argument("interface_envelope needs a 2D field");
  if (axis != 0 && axis != 1) throw std::invalid_argument("interface_envelope axis must be 0 or 1");
  const int n = u.grid.n;
  Envelope env{std::vector<double>(n), std::vector<double>(n)};
  for (int a = 0; a < n; ++a) {
    double lo = u.at(axis == 0 ? a : 0, axis == 0 ? 0 : a);
    double hi = lo;
    for (int b = 0; b < n; ++b) {
      const double v = axis == 0 ? u.at(a, b) : u.at(b, a);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    env.min[a] = lo;
    env.max[a] = hi;
  }
  return env;
}

} // namespace pfh
