#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pfh/analysis.hpp"
#include "pfh/config.hpp"
#include "pfh/dynamics.hpp"
#include "pfh/homogenize.hpp"
#include "pfh/io.hpp"
#include "pfh/version.hpp"

namespace pfh {

struct RunManifest {
  std::uint64_t config_hash = 0;
  std::string tool_version;
  std::vector<std::pair<std::string, std::string>> outputs;  // (kind, path)
  double wall_time_s = 0.0;
};

namespace rundetail {

inline std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[h & 0xf];
    h >>= 4;
  }
  return s;
}

inline void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  json doc{{"config_hash", hash_hex(m.config_hash)},
           {"tool_version", m.tool_version},
           {"wall_time_s", m.wall_time_s}};
  doc["outputs"] = json::array();
  for (const auto& [kind, path] : m.outputs) doc["outputs"].push_back(json{{"kind", kind}, {"path", path}});
  write_text(dir / "manifest.json", doc.dump(2) + "\n");
}

inline std::string step_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snap_%06d.pfh", step);
  return buf;
}

} // namespace rundetail

/// Executes a parsed config, writing every output under out_dir. Returns the
/// manifest that was also serialized to out_dir/manifest.json.
inline RunManifest run(const RunConfig& rc, const std::filesystem::path& out_dir,
                       std::ostream* log = &std::cerr) {
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(out_dir);

  RunManifest manifest;
  manifest.config_hash = config_hash(rc.canonical);
  manifest.tool_version = version;
  const auto add_output = [&](const std::string& kind, const std::string& name) {
    manifest.outputs.emplace_back(kind, name);
  };

  if (const auto* job = std::get_if<FlowJob>(&rc.job)) {
    FlowConfig flow = job->flow;
    if (!job->tabulated_file.empty()) {
      auto [u, w] = read_tabulated_csv(job->tabulated_file);
      flow.potential = Potential::tabulated(std::move(u), std::move(w));
    }
    if (flow.initial == InitialCondition::FromFile) {
      flow.custom_initial = read_field_pfh1(job->initial_file);
      flow.initial = InitialCondition::Custom;
    }
    if (log)
      if (auto warn = stability_warning(flow)) *log << "warning: " << *warn << "\n";
    if (flow.potential.kind() == Potential::Kind::HexWeight ||
        flow.potential.kind() == Potential::Kind::RandomTile) {
      write_field_pfh1(out_dir / "weight.pfh", weight_field(flow.potential, flow.grid));
      add_output("weight", "weight.pfh");
    }
    FlowResult result = run_flow(flow, [&](int step, const ScalarField& f) {
      const std::string name = rundetail::step_name(step);
      write_field_pfh1(out_dir / name, f);
      add_output("snapshot", name);
    });
    write_field_pfh1(out_dir / "final.pfh", result.final_field);
    add_output("snapshot", "final.pfh");
    write_text(out_dir / "trace.csv", trace_csv(result.trace));
    add_output("trace_csv", "trace.csv");
  } else if (const auto* job = std::get_if<HomogenizeJob>(&rc.job)) {
    const auto grid = linspace(job->u_min, job->u_max, job->u_count);
    const HomogenizedPotential whom = homogenize(job->potential, job->cell_quadrature_n, grid);
    write_text(out_dir / "whom.csv", tabulated_csv(whom.samples_u(), whom.samples_w()));
    add_output("tabulated_csv", "whom.csv");
  } else if (const auto* job = std::get_if<ProfileJob>(&rc.job)) {
    const auto ugrid = linspace(job->u_min, job->u_max, job->u_count);
    const HomogenizedPotential whom = homogenize(job->potential, job->cell_quadrature_n, ugrid);
    const auto xgrid = linspace(job->x_min, job->x_max, job->x_count);
    const auto phi = optimal_profile(whom, xgrid);
    std::string body = "x,phi\n";
    for (std::size_t i = 0; i < xgrid.size(); ++i)
      body += format_double(xgrid[i]) + "," + format_double(phi[i]) + "\n";
    write_text(out_dir / "profile.csv", body);
    add_output("profile_csv", "profile.csv");
  } else if (const auto* job = std::get_if<CounterexampleJob>(&rc.job)) {
    const double e = voids_counterexample_energy(job->cfg);
    const double scaled = e * std::pow(job->cfg.eps, 3) / (job->cfg.delta * job->cfg.delta);
    std::string body = "eps,delta,energy,scaled_energy\n";
    body += format_double(job->cfg.eps) + "," + format_double(job->cfg.delta) + "," +
            format_double(e) + "," + format_double(scaled) + "\n";
    write_text(out_dir / "counterexample.csv", body);
    add_output("counterexample_csv", "counterexample.csv");
  } else if (const auto* job = std::get_if<StochasticJob>(&rc.job)) {
    const DiscrepancyStats st =
        stochastic_discrepancy(job->n, job->m, job->d, job->dist, job->p, job->trials, job->seed);
    std::string body = "n,m,d,trials,empirical_mean,empirical_tail_freq,bound_mean,bound_tail\n";
    body += std::to_string(st.n_cells) + "," + std::to_string(st.m_sub) + "," +
            std::to_string(job->d) + "," + std::to_string(st.trials) + "," +
            format_double(st.empirical_mean) + "," + format_double(st.empirical_tail_freq) + "," +
            format_double(st.bound_mean) + "," + format_double(st.bound_tail) + "\n";
    write_text(out_dir / "discrepancy.csv", body);
    add_output("discrepancy_csv", "discrepancy.csv");
  } else if (const auto* job = std::get_if<EnergyJob>(&rc.job)) {
    const ScalarField f = read_field_pfh1(job->field_file);
    const EnergyBreakdown e = job->tv_delta ? energy_tv(f, job->eps, *job->tv_delta, job->potential)
                                            : energy(f, job->eps, job->potential);
    EnergyTrace one{{0, 0.0, e}};
    write_text(out_dir / "energy.csv", trace_csv(one));
    add_output("trace_csv", "energy.csv");
  }

  manifest.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& [kind, name] : manifest.outputs)
    if (!std::filesystem::exists(out_dir / name))
      throw std::runtime_error("manifest lists a missing output: " + name);
  rundetail::write_manifest(out_dir, manifest);
  return manifest;
}

} // namespace pfh
