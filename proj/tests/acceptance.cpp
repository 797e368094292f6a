// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria marked with a note print their measured values so
// failures are diagnosable from the log alone.

#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "pfh/analysis.hpp"
#include "pfh/dynamics.hpp"
#include "pfh/energy.hpp"
#include "pfh/homogenize.hpp"
#include "pfh/potential.hpp"

using namespace pfh;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %s%s%s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.empty() ? "" : ": ",
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.8g", x);
  return buf;
}

FlowConfig paper_flow(const Potential& pot) {
  FlowConfig cfg;
  cfg.eps = 0.025;
  cfg.tau = 1e-3;
  cfg.steps = 100;
  cfg.potential = pot;
  cfg.grid = GridSpec{2, 256, 4.0, -2.0};
  cfg.initial = InitialCondition::Strip;
  cfg.record_every = 1;
  return cfg;
}

bool trace_monotone(const EnergyTrace& trace, double* worst = nullptr) {
  double w = 0.0;
  bool ok = true;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const double prev = trace[i - 1].energy.normalized;
    const double cur = trace[i].energy.normalized;
    if (cur > prev + 1e-9 * std::max(1.0, std::fabs(prev))) {
      ok = false;
      w = std::max(w, cur - prev);
    }
  }
  if (worst) *worst = w;
  return ok;
}

// Band-limited random field, deterministic in the seed.
ScalarField random_smooth_field(const GridSpec& g, std::uint64_t seed, int kmax, double amplitude) {
  ScalarField u = ScalarField::zeros(g);
  SplitMix64 rng(derive_seed(seed, 0xf1e1d));
  for (int k0 = -kmax; k0 <= kmax; ++k0) {
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
      const double a = (2.0 * rng.next_u01() - 1.0) / (1.0 + k0 * k0 + k1 * k1);
      const double phase = 2.0 * pi * rng.next_u01();
      for (std::size_t i = 0; i < u.values.size(); ++i) {
        const Point x = node_point(g, i);
        const double arg =
            2.0 * pi * (k0 * (x.x1 - g.origin) + k1 * (x.x2 - g.origin)) / g.length + phase;
        u.values[i] += a * std::cos(arg);
      }
    }
  }
  double vmax = 0.0;
  for (double v : u.values) vmax = std::max(vmax, std::fabs(v));
  if (vmax > 0.0)
    for (double& v : u.values) v *= amplitude / vmax;
  return u;
}

ScalarField drive_term(const ScalarField& u, double eps, const Potential& pot) {
  Spectrum s = forward_transform(u);
  const auto sym = laplacian_symbol(u.grid);
  for (std::size_t i = 0; i < sym.size(); ++i) s.coefficients[i] *= sym[i];
  ScalarField lap = inverse_transform(s);
  ScalarField out = u;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = eps * lap.values[i] - pot.derivative(u.point(i), u.values[i]) / eps;
  return out;
}

} // namespace

int main() {
  const double c0 = 2.0 * std::sqrt(2.0) / 3.0;

  // 1. Surface tension constant of the standard double well.
  {
    const auto ugrid = linspace(-1.5, 1.5, 601);
    const HomogenizedPotential whom = homogenize(Potential::homogeneous(), 256, ugrid);
    const double c = c_hom(whom);
    report("1 c_hom(standard well) = 2*sqrt(2)/3 to 1e-6", std::fabs(c - c0) <= 1e-6,
           "c_hom = " + fmt(c) + ", target " + fmt(c0));
  }

  // 2 + 3 + 5 share the paper-default flows.
  const FlowResult hom_flow = run_flow(paper_flow(Potential::homogeneous()));
  const FlowResult hex01_flow = run_flow(paper_flow(Potential::hex_weight(0.228, -0.1, 0.1)));
  const FlowResult hex40_flow = run_flow(paper_flow(Potential::hex_weight(0.228, -0.1, 0.4)));
  const FlowResult hex025_flow = run_flow(paper_flow(Potential::hex_weight(0.228, -0.1, 0.025)));

  {
    const double terminal = hom_flow.trace.back().energy.normalized;
    report("2 homogeneous flow terminal energy within 5% of 2*c0",
           std::fabs(terminal - 2.0 * c0) <= 0.05 * 2.0 * c0,
           "terminal = " + fmt(terminal) + ", target " + fmt(2.0 * c0));
  }
  {
    double worst_h = 0.0, worst_x = 0.0;
    const bool mono_h = trace_monotone(hom_flow.trace, &worst_h);
    const bool mono_x = trace_monotone(hex01_flow.trace, &worst_x);
    report("3 energy trace monotone (homogeneous and hex delta=0.1)", mono_h && mono_x,
           mono_h && mono_x ? "no increase beyond 1e-9 slack over 100 steps"
                            : "worst increases " + fmt(worst_h) + " / " + fmt(worst_x));
  }

  // 4. Cell averages of the hex and varying-wells potentials.
  {
    const auto ugrid = linspace(-1.5, 1.5, 301);
    double sup_hex = 0.0, sup_wells = 0.0;
    const HomogenizedPotential hom_hex = homogenize(Potential::hex_weight(0.228, -0.1, 0.1), 256, ugrid);
    const HomogenizedPotential hom_wells = homogenize(Potential::varying_wells(0.1), 256, ugrid);
    for (double u : ugrid) {
      const double d = u * u - 1.0;
      const double ref = 0.25 * d * d;
      sup_hex = std::max(sup_hex, std::fabs(hom_hex.value(u) - ref));
      sup_wells = std::max(sup_wells, std::fabs(hom_wells.value(u) - ref));
    }
    report("4 homogenized hex and varying wells match the standard well to 1e-3",
           sup_hex <= 1e-3 && sup_wells <= 1e-3,
           "sup errors " + fmt(sup_hex) + " (hex), " + fmt(sup_wells) + " (wells)");
  }

  // 5. Delta ordering of the hex terminal energies.
  {
    const double e_hom = hom_flow.trace.back().energy.normalized;
    const double e40 = hex40_flow.trace.back().energy.normalized;
    const double e025 = hex025_flow.trace.back().energy.normalized;
    const bool ordered = e40 <= e025;
    const bool close = std::fabs(e025 - e_hom) <= 0.02 * e_hom;
    report("5 hex terminal energies: E(0.4) <= E(0.025) and E(0.025) within 2% of homogeneous",
           ordered && close,
           "E(0.4) = " + fmt(e40) + ", E(0.025) = " + fmt(e025) + ", E(hom) = " + fmt(e_hom));
  }

  // 6. Shifting-wells counterexample.
  {
    CounterexampleConfig cfg;  // eps 0.01, alpha 0.03
    cfg.delta = 0.005;
    const double e5 = voids_counterexample_energy(cfg);
    const bool negative = e5 < 0.0;
    report("6a counterexample energy negative at delta = 0.005", negative, "energy = " + fmt(e5));

    cfg.delta = 0.0025;
    cfg.n_1d = 400000;
    const double scaled =
        voids_counterexample_energy(cfg) * std::pow(cfg.eps, 3) / (cfg.delta * cfg.delta);
    const double alpha = cfg.alpha;
    const double stated = alpha * alpha * pi * pi - 2.0 * alpha / pi;    // -0.010216
    const double linearized = alpha * alpha * pi * pi - 4.0 * alpha / pi;  // -0.029315
    const bool within_stated = std::fabs(scaled - stated) <= 0.15 * std::fabs(stated);
    report("6b counterexample scaled energy within 15% of a^2 pi^2 - 2a/pi", within_stated,
           "scaled = " + fmt(scaled) + ", stated target " + fmt(stated) +
               "; exact linearization of W((1 - (d/e)^2 psi)) gives a^2 pi^2 - 4a/pi = " +
               fmt(linearized) + " (measured/linearized = " + fmt(scaled / linearized) +
               "), so the stated coefficient 2(1-b) understates the true -4(1-b) coupling");
  }

  // 7. Proximal contraction inequalities on random smooth fields.
  {
    const GridSpec g{2, 64, 4.0, -2.0};
    const double eps = 0.1, tau = 0.01, m_bound = 1.5;
    const Potential pot = Potential::homogeneous();
    int hold = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const ScalarField u = random_smooth_field(g, seed, 4, 1.3);
      const ProximalResult res = proximal_step(u, tau, eps, pot, m_bound);
      const double f_u = energy(u, eps, pot).total;
      const double f_tm = energy(truncate(u, m_bound), eps, pot).total;
      const bool ok1 = res.f_after <= f_tm + 1e-10;
      const bool ok2 = res.l2_move * res.l2_move <= 2.0 * tau * (f_u - res.f_after) + 1e-10;
      if (ok1 && ok2) ++hold;
    }
    report("7 proximal contracts hold on 20 random smooth fields", hold == 20,
           std::to_string(hold) + "/20 fields satisfy both inequalities with slack 1e-10");
  }

  // 8. Stochastic discrepancy concentration.
  {
    const DiscrepancyStats st =
        stochastic_discrepancy(8, 10, 2, TileDistribution::Uniform01, 0.5, 200, 2026);
    const bool mean_ok = st.empirical_mean <= 0.1;
    const bool tail_ok = st.empirical_tail_freq == 0.0;  // exp(-0.3*64) ~ 5e-9 forbids any hit
    report("8 discrepancy: mean <= 0.1 and no tail exceedances in 200 trials", mean_ok && tail_ok,
           "mean = " + fmt(st.empirical_mean) + ", tail freq = " + fmt(st.empirical_tail_freq) +
               ", tail bound = " + fmt(st.bound_tail));
  }

  // 9. Drive term is the negative gradient of the spectral-form energy.
  {
    const GridSpec g{2, 32, 4.0, -2.0};
    const double eps = 0.2;
    double worst = 0.0;
    for (std::uint64_t seed = 50; seed < 55; ++seed) {
      const ScalarField u = random_smooth_field(g, seed, 4, 0.9);
      const ScalarField v = random_smooth_field(g, seed + 100, 4, 1.0);
      const ScalarField drive = drive_term(u, eps, Potential::homogeneous());
      std::vector<double> prod(u.values.size());
      for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = drive.values[i] * v.values[i];
      const double inner = g.cell_measure() * pairwise_sum(prod);
      const double s = 1e-5;
      ScalarField up = u, dn = u;
      for (std::size_t i = 0; i < u.values.size(); ++i) {
        up.values[i] += s * v.values[i];
        dn.values[i] -= s * v.values[i];
      }
      const double de = (flow_energy(up, eps, Potential::homogeneous()).total -
                         flow_energy(dn, eps, Potential::homogeneous()).total) /
                        (2.0 * s);
      worst = std::max(worst, std::fabs(inner + de) / std::max(1.0, std::fabs(de)));
    }
    report("9 stepper drive matches central differences of the spectral-form energy to 1e-5",
           worst <= 1e-5, "worst relative mismatch = " + fmt(worst));
  }

  // 10. Exact single-mode damping factor.
  {
    FlowConfig cfg = paper_flow(Potential::sum({}));
    const GridSpec& g = cfg.grid;
    const int k = g.n / 4;
    ScalarField u = ScalarField::zeros(g);
    for (std::size_t i = 0; i < u.values.size(); ++i)
      u.values[i] = 0.01 * std::sin(2.0 * pi * k * (node_point(g, i).x1 - g.origin) / g.length);
    const ScalarField next = step_semi_implicit(u, cfg);
    const double xi = static_cast<double>(k) / g.length;
    const double factor = 1.0 / (1.0 + 4.0 * pi * pi * cfg.tau * cfg.eps * xi * xi);
    double err = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i)
      err = std::max(err, std::fabs(next.values[i] - factor * u.values[i]));
    report("10 single-mode damping factor 1/(1 + 4 pi^2 tau eps (k/L)^2) to machine precision",
           err <= 1e-12 * 0.01, "max deviation = " + fmt(err) + " at amplitude 0.01");
  }

  std::printf("%d criterion check(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
