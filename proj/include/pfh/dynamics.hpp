#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pfh/energy.hpp"
#include "pfh/fft.hpp"
#include "pfh/grid.hpp"
#include "pfh/potential.hpp"

namespace pfh {

enum class InitialCondition { Strip, FromFile, Custom };

/// One gradient-flow run: semi-implicit spectral stepping of
///   d_t u = eps Lap u - d_u W_delta(x, u) / eps.
struct FlowConfig {
  double eps = 0.025;
  double tau = 1e-3;
  int steps = 100;
  Potential potential = Potential::homogeneous();
  GridSpec grid;
  InitialCondition initial = InitialCondition::Strip;
  std::string initial_file;                    // used with FromFile
  std::optional<ScalarField> custom_initial;   // used with Custom
  int record_every = 1;
  int snapshot_every = 0;
  std::uint64_t seed = 0;

  double delta() const { return potential.delta(); }

  void validate() const {
    grid.validate();
    if (!(eps > 0.0)) throw std::invalid_argument("flow eps must be > 0");
    if (!(tau > 0.0)) throw std::invalid_argument("flow tau must be > 0");
    if (steps < 0) throw std::invalid_argument("flow steps must be >= 0");
    if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
    if (snapshot_every < 0) throw std::invalid_argument("snapshot_every must be >= 0");
  }
};

/// Phase indicator of the centered strip: +1 on |x1 - center| < L/4, -1
/// outside. The wells sit at +-1, so the signed version skips the transient
/// that the 0/1 indicator would spend migrating into the wells.
inline ScalarField strip_indicator(const GridSpec& g) {
  ScalarField u = ScalarField::zeros(g);
  const double center = g.origin + 0.5 * g.length;
  const double half = 0.25 * g.length;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double x1 = node_point(g, i).x1;
    u.values[i] = std::fabs(x1 - center) < half ? 1.0 : -1.0;
  }
  return u;
}

/// Relaxed reference state: tanh(sd(x) / (sqrt(2) eps)) with sd the signed
/// distance to the strip boundary.
inline ScalarField tanh_strip(const GridSpec& g, double eps) {
  ScalarField u = ScalarField::zeros(g);
  const double center = g.origin + 0.5 * g.length;
  const double half = 0.25 * g.length;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double x1 = node_point(g, i).x1;
    const double sd = half - std::fabs(x1 - center);
    u.values[i] = std::tanh(sd / (std::sqrt(2.0) * eps));
  }
  return u;
}

/// Pointwise truncation T_M u = M u / max(|u|, M); never increases the energy.
inline ScalarField truncate(const ScalarField& u, double m_bound) {
  if (!(m_bound > 0.0)) throw std::invalid_argument("truncate requires M > 0");
  ScalarField out = u;
  for (double& v : out.values) v = std::clamp(v, -m_bound, m_bound);
  return out;
}

/// Stability advisory for the explicit potential term: tau * sup |d^2_u W| / eps
/// should stay below 1 on the range the flow visits. Returns a warning string
/// when the bound is violated or the grid does not resolve eps; never fails.
inline std::optional<std::string> stability_warning(const FlowConfig& cfg, double m_bound = 1.5) {
  std::optional<std::string> msg;
  double ddw_max = 0.0;
  const auto us = linspace(-m_bound, m_bound, 257);
  const double hu = 1e-5;
  for (int s = 0; s < 16; ++s) {
    const double frac = s / 16.0;
    const Point x{cfg.grid.origin + frac * cfg.grid.length,
                  cfg.grid.origin + frac * frac * cfg.grid.length};
    for (double uv : us) {
      const double dd =
          (cfg.potential.derivative(x, uv + hu) - cfg.potential.derivative(x, uv - hu)) / (2.0 * hu);
      ddw_max = std::max(ddw_max, std::fabs(dd));
    }
  }
  const double stiff = cfg.tau * ddw_max / cfg.eps;
  if (stiff >= 1.0)
    msg = "explicit potential term is stiff: tau * sup|W''| / eps = " + format_double(stiff);
  if (cfg.grid.spacing() > 0.5 * cfg.eps) {
    const std::string grid_msg =
        "grid spacing h = " + format_double(cfg.grid.spacing()) +
        " does not resolve eps/2 = " + format_double(0.5 * cfg.eps);
    msg = msg ? *msg + "; " + grid_msg : grid_msg;
  }
  return msg;
}

/// Energy recorded along flows: the Lyapunov functional of the spectral
/// stepper, with the gradient term taken as the spectral quadratic form
///   (eps/2) |Omega| sum_k 4 pi^2 |xi_k|^2 |u_k|^2
/// and the potential term by the midpoint rule. The centered-difference
/// quadrature of energy() is not what the scheme dissipates and drifts
/// upward by ~1e-4 per step near marginally resolved layers; this form is
/// non-increasing along the flow whenever the explicit term is stable.
inline EnergyBreakdown flow_energy(const ScalarField& u, double eps, const Potential& pot) {
  if (!(eps > 0.0)) throw std::invalid_argument("energy requires eps > 0");
  const Spectrum s = forward_transform(u);
  const std::vector<double> sym = laplacian_symbol(u.grid);
  std::vector<double> quad(sym.size());
  for (std::size_t i = 0; i < sym.size(); ++i) quad[i] = -sym[i] * std::norm(s.coefficients[i]);
  std::vector<double> w(u.values.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = pot.value(u.point(i), u.values[i]);

  EnergyBreakdown e;
  e.gradient_part = 0.5 * eps * u.grid.domain_measure() * pairwise_sum(quad);
  e.potential_part = u.grid.cell_measure() * pairwise_sum(w) / eps;
  e.tv_part = 0.0;
  e.total = e.gradient_part + e.potential_part + e.tv_part;
  e.normalized = e.total / std::pow(u.grid.length, u.grid.dim - 1);
  return e;
}

namespace detail {

// One semi-implicit spectral step of d_t v = eps Lap v - g(v), Laplacian
// implicit, forcing g evaluated at the current state:
//   (1 + 4 pi^2 tau eps |xi|^2) F v_next = F(v - tau g(v)).
inline ScalarField semi_implicit_apply(const ScalarField& rhs_field, double tau, double eps,
                                       const std::vector<double>& lap_sym) {
  Spectrum s = forward_transform(rhs_field);
  for (std::size_t i = 0; i < s.coefficients.size(); ++i)
    s.coefficients[i] /= (1.0 - tau * eps * lap_sym[i]);
  return inverse_transform(s);
}

} // namespace detail

inline ScalarField step_semi_implicit(const ScalarField& u, const FlowConfig& cfg) {
  cfg.validate();
  if (u.grid != cfg.grid) throw std::invalid_argument("field grid does not match flow grid");
  const std::vector<double> sym = laplacian_symbol(cfg.grid);
  ScalarField rhs = u;
  const double f = cfg.tau / cfg.eps;
  for (std::size_t i = 0; i < rhs.values.size(); ++i)
    rhs.values[i] = u.values[i] - f * cfg.potential.derivative(u.point(i), u.values[i]);
  return detail::semi_implicit_apply(rhs, cfg.tau, cfg.eps, sym);
}

struct FlowResult {
  ScalarField final_field;
  EnergyTrace trace;
};

using SnapshotCallback = std::function<void(int step, const ScalarField&)>;

/// Iterates the semi-implicit step, recording the energy every record_every
/// steps (always step 0 and the final step) and invoking the snapshot
/// callback every snapshot_every steps. Aborts with the offending step index
/// if the field turns non-finite. Deterministic for a fixed config.
inline FlowResult run_flow(const FlowConfig& cfg, const SnapshotCallback& on_snapshot = {}) {
  cfg.validate();
  ScalarField u = [&]() {
    switch (cfg.initial) {
      case InitialCondition::Strip:
        return strip_indicator(cfg.grid);
      case InitialCondition::Custom:
        if (!cfg.custom_initial) throw std::invalid_argument("custom initial condition not provided");
        return *cfg.custom_initial;
      case InitialCondition::FromFile:
        throw std::invalid_argument("file-backed initial conditions are loaded by the runner");
    }
    return strip_indicator(cfg.grid);
  }();
  u.validate();
  if (u.grid != cfg.grid) throw std::invalid_argument("initial field grid does not match flow grid");

  const std::vector<double> sym = laplacian_symbol(cfg.grid);
  const double f = cfg.tau / cfg.eps;

  EnergyTrace trace;
  trace.push_back({0, 0.0, flow_energy(u, cfg.eps, cfg.potential)});
  if (on_snapshot && cfg.snapshot_every > 0) on_snapshot(0, u);

  ScalarField rhs = u;
  for (int step = 1; step <= cfg.steps; ++step) {
    for (std::size_t i = 0; i < rhs.values.size(); ++i)
      rhs.values[i] = u.values[i] - f * cfg.potential.derivative(u.point(i), u.values[i]);
    u = detail::semi_implicit_apply(rhs, cfg.tau, cfg.eps, sym);
    for (double v : u.values)
      if (!std::isfinite(v))
        throw std::runtime_error("non-finite field value at step " + std::to_string(step));
    if (step % cfg.record_every == 0 || step == cfg.steps)
      trace.push_back({step, step * cfg.tau, flow_energy(u, cfg.eps, cfg.potential)});
    if (on_snapshot && cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) on_snapshot(step, u);
  }
  return FlowResult{std::move(u), std::move(trace)};
}

/// One minimizing-movements step: approximately minimizes
///   F(v) + ||v - T_M u||^2 / (2 tau)
/// by damped semi-implicit iteration on the augmented flow
///   d_s v = eps Lap v - d_u W(x, v)/eps - (v - T_M u)/tau,
/// inner pseudo-time step sigma = min(tau, eps^2)/4, halved whenever a trial
/// step fails to decrease the objective. Every accepted iterate keeps
///   F(v) + ||v - T_M u||^2/(2 tau) <= F(T_M u),
/// which is exactly the pair of inequalities reported in ProximalResult.
struct ProximalResult {
  ScalarField u_hat;
  double f_before = 0.0;  // F(T_M u)
  double f_after = 0.0;   // F(u_hat)
  double l2_move = 0.0;   // ||u_hat - T_M u||_{L^2}
  int inner_iterations = 0;
  bool converged = false;  // relative objective decrease reached tol
  bool contracts_hold = false;
};

inline ProximalResult proximal_step(const ScalarField& u, double tau, double eps, const Potential& pot,
                                    double m_bound, double tol = 1e-10, int max_iter = 500) {
  if (!(tau > 0.0) || !(eps > 0.0)) throw std::invalid_argument("proximal_step requires tau, eps > 0");
  u.validate();

  const ScalarField ref = truncate(u, m_bound);
  const double hd = u.grid.cell_measure();
  const std::vector<double> sym = laplacian_symbol(u.grid);

  const auto raw_energy = [&](const ScalarField& v) { return energy(v, eps, pot).total; };
  const auto move_sq = [&](const ScalarField& v) {
    std::vector<double> d(v.values.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double e = v.values[i] - ref.values[i];
      d[i] = e * e;
    }
    return hd * pairwise_sum(d);
  };

  const double f_ref = raw_energy(ref);
  ScalarField v = ref;
  double f_v = f_ref;
  double move_v = 0.0;
  double obj = f_ref;
  double sigma = std::min(tau, eps * eps) / 4.0;

  ProximalResult res{v, f_ref, f_ref, 0.0, 0, false, false};
  ScalarField rhs = v;
  int iter = 0;
  while (iter < max_iter && sigma > 1e-18) {
    ++iter;
    for (std::size_t i = 0; i < rhs.values.size(); ++i) {
      const double drift =
          pot.derivative(v.point(i), v.values[i]) / eps + (v.values[i] - ref.values[i]) / tau;
      rhs.values[i] = v.values[i] - sigma * drift;
    }
    ScalarField cand = detail::semi_implicit_apply(rhs, sigma, eps, sym);
    bool finite = true;
    for (double val : cand.values)
      if (!std::isfinite(val)) {
        finite = false;
        break;
      }
    if (!finite) {
      sigma *= 0.5;
      continue;
    }
    const double f_cand = raw_energy(cand);
    const double mv_cand = move_sq(cand);
    const double obj_cand = f_cand + mv_cand / (2.0 * tau);
    if (obj_cand <= obj) {
      const double drop = obj - obj_cand;
      v = std::move(cand);
      f_v = f_cand;
      move_v = mv_cand;
      obj = obj_cand;
      if (drop <= tol * std::max(1.0, std::fabs(obj))) {
        res.converged = true;
        break;
      }
    } else {
      sigma *= 0.5;
    }
  }

  res.u_hat = std::move(v);
  res.f_after = f_v;
  res.l2_move = std::sqrt(move_v);
  res.inner_iterations = iter;
  res.contracts_hold = (res.f_after <= res.f_before + 1e-10) &&
                       (move_v <= 2.0 * tau * (res.f_before - res.f_after) + 1e-10);
  return res;
}

} // namespace pfh
