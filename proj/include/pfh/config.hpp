#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pfh/analysis.hpp"
#include "pfh/dynamics.hpp"
#include "pfh/potential.hpp"

namespace pfh {

using json = nlohmann::json;

/// Configuration error with a path-qualified message, e.g.
///   "potential.delta: must be > 0".
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace cfgdetail {

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path.empty() ? msg : path + ": " + msg);
}

inline std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

// Strict objects: every present key must be known.
inline void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& kv : obj.items())
    if (!allowed.contains(kv.key()))
      fail(join(path, kv.key()), "unknown key (allowed: " + [&] {
        std::string s;
        for (const auto& k : allowed) s += s.empty() ? k : ", " + k;
        return s;
      }() + ")");
}

inline const json& require(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) fail(join(path, key), "missing required key");
  return obj.at(key);
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

inline double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0)) fail(path, "must be > 0");
  return x;
}

inline long integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<long>();
}

inline double get_or(const json& obj, const std::string& path, const std::string& key, double dflt) {
  return obj.contains(key) ? number(obj.at(key), join(path, key)) : dflt;
}

inline long get_int_or(const json& obj, const std::string& path, const std::string& key, long dflt) {
  return obj.contains(key) ? integer(obj.at(key), join(path, key)) : dflt;
}

} // namespace cfgdetail

inline GridSpec parse_grid(const json& obj, const std::string& path) {
  using namespace cfgdetail;
  if (!obj.is_object()) fail(path, "expected an object");
  check_keys(obj, path, {"n", "L", "origin", "dim"});
  GridSpec g;
  g.n = static_cast<int>(integer(require(obj, path, "n"), join(path, "n")));
  g.length = positive(require(obj, path, "L"), join(path, "L"));
  g.origin = get_or(obj, path, "origin", -0.5 * g.length);
  g.dim = static_cast<int>(get_int_or(obj, path, "dim", 2));
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return g;
}

inline Potential parse_potential(const json& obj, const std::string& path) {
  using namespace cfgdetail;
  if (!obj.is_object()) fail(path, "expected an object");
  const std::string family = [&] {
    const json& f = require(obj, path, "family");
    if (!f.is_string()) fail(join(path, "family"), "expected a string");
    return f.get<std::string>();
  }();

  try {
    if (family == "homogeneous") {
      check_keys(obj, path, {"family"});
      return Potential::homogeneous();
    }
    if (family == "hex") {
      check_keys(obj, path, {"family", "a", "b", "delta"});
      return Potential::hex_weight(number(require(obj, path, "a"), join(path, "a")),
                                   number(require(obj, path, "b"), join(path, "b")),
                                   positive(require(obj, path, "delta"), join(path, "delta")));
    }
    if (family == "random") {
      check_keys(obj, path, {"family", "delta", "m_sub", "low", "high", "seed"});
      const double delta = positive(require(obj, path, "delta"), join(path, "delta"));
      return Potential::random_tile(
          delta, static_cast<int>(get_int_or(obj, path, "m_sub", 1)),
          number(require(obj, path, "low"), join(path, "low")),
          number(require(obj, path, "high"), join(path, "high")),
          static_cast<std::uint64_t>(get_int_or(obj, path, "seed", 1)));
    }
    if (family == "wells") {
      check_keys(obj, path, {"family", "delta"});
      return Potential::varying_wells(positive(require(obj, path, "delta"), join(path, "delta")));
    }
    if (family == "exponent") {
      check_keys(obj, path, {"family", "delta"});
      return Potential::varying_exponent(positive(require(obj, path, "delta"), join(path, "delta")));
    }
    if (family == "tabulated") {
      check_keys(obj, path, {"family", "u", "w", "file"});
      if (obj.contains("file")) {
        if (obj.contains("u") || obj.contains("w"))
          fail(path, "tabulated potential takes either 'file' or 'u'+'w', not both");
        // File contents are loaded by the runner; parsing validates shape only.
        if (!obj.at("file").is_string()) fail(join(path, "file"), "expected a string");
        std::vector<double> stub_u{-1.0, 1.0}, stub_w{0.0, 0.0};
        return Potential::tabulated(stub_u, stub_w);
      }
      const json& ju = require(obj, path, "u");
      const json& jw = require(obj, path, "w");
      if (!ju.is_array() || !jw.is_array()) fail(path, "'u' and 'w' must be arrays");
      std::vector<double> u, w;
      for (std::size_t i = 0; i < ju.size(); ++i) u.push_back(number(ju[i], join(path, "u")));
      for (std::size_t i = 0; i < jw.size(); ++i) w.push_back(number(jw[i], join(path, "w")));
      return Potential::tabulated(std::move(u), std::move(w));
    }
    if (family == "sum") {
      check_keys(obj, path, {"family", "terms"});
      const json& terms = require(obj, path, "terms");
      if (!terms.is_array()) fail(join(path, "terms"), "expected an array");
      std::vector<Potential> parts;
      for (std::size_t i = 0; i < terms.size(); ++i)
        parts.push_back(parse_potential(terms[i], join(path, "terms[" + std::to_string(i) + "]")));
      return Potential::sum(std::move(parts));
    }
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  cfgdetail::fail(join(path, "family"),
                  "unknown family '" + family +
                      "' (valid: homogeneous, hex, random, wells, exponent, tabulated, sum)");
}

struct FlowJob {
  FlowConfig flow;
  std::string initial_file;  // nonempty when initial comes from a PFH1 file
  std::string tabulated_file;  // nonempty when the potential comes from a CSV
};

struct HomogenizeJob {
  Potential potential = Potential::homogeneous();
  int cell_quadrature_n = 256;
  double u_min = -1.5, u_max = 1.5;
  int u_count = 301;
};

struct ProfileJob {
  Potential potential = Potential::homogeneous();
  int cell_quadrature_n = 256;
  double u_min = -1.5, u_max = 1.5;
  int u_count = 601;
  double x_min = -5.0, x_max = 5.0;
  int x_count = 1001;
};

struct CounterexampleJob {
  CounterexampleConfig cfg;
};

struct StochasticJob {
  int n = 8, m = 10, d = 2;
  TileDistribution dist = TileDistribution::Uniform01;
  double p = 0.5;
  int trials = 200;
  std::uint64_t seed = 1;
};

struct EnergyJob {
  std::string field_file;
  double eps = 0.025;
  Potential potential = Potential::homogeneous();
  std::optional<double> tv_delta;
};

struct RunConfig {
  std::string mode;
  json canonical;  // effective config with defaults filled in
  std::variant<FlowJob, HomogenizeJob, ProfileJob, CounterexampleJob, StochasticJob, EnergyJob> job;
};

inline RunConfig parse_config(const json& doc) {
  using namespace cfgdetail;
  if (!doc.is_object()) fail("", "config must be a JSON object");
  const std::string mode = [&] {
    const json& m = require(doc, "", "mode");
    if (!m.is_string()) fail("mode", "expected a string");
    return m.get<std::string>();
  }();

  RunConfig rc;
  rc.mode = mode;
  rc.canonical = doc;

  if (mode == "flow") {
    check_keys(doc, "", {"mode", "eps", "tau", "steps", "grid", "potential", "initial",
                         "record_every", "snapshot_every", "seed"});
    FlowJob job;
    job.flow.eps = positive(require(doc, "", "eps"), "eps");
    job.flow.tau = positive(require(doc, "", "tau"), "tau");
    job.flow.steps = static_cast<int>(integer(require(doc, "", "steps"), "steps"));
    if (job.flow.steps < 0) fail("steps", "must be >= 0");
    job.flow.grid = parse_grid(require(doc, "", "grid"), "grid");
    const json& pot = require(doc, "", "potential");
    job.flow.potential = parse_potential(pot, "potential");
    if (pot.contains("family") && pot.at("family") == "tabulated" && pot.contains("file"))
      job.tabulated_file = pot.at("file").get<std::string>();
    const json& init = require(doc, "", "initial");
    if (init.is_string() && init.get<std::string>() == "strip") {
      job.flow.initial = InitialCondition::Strip;
    } else if (init.is_object() && init.contains("file")) {
      check_keys(init, "initial", {"file"});
      if (!init.at("file").is_string()) fail("initial.file", "expected a string");
      job.flow.initial = InitialCondition::FromFile;
      job.initial_file = init.at("file").get<std::string>();
    } else {
      fail("initial", "expected \"strip\" or {\"file\": path}");
    }
    job.flow.record_every = static_cast<int>(get_int_or(doc, "", "record_every", 1));
    job.flow.snapshot_every = static_cast<int>(get_int_or(doc, "", "snapshot_every", 0));
    job.flow.seed = static_cast<std::uint64_t>(get_int_or(doc, "", "seed", 0));
    try {
      job.flow.validate();
    } catch (const std::invalid_argument& e) {
      fail("", e.what());
    }
    rc.job = std::move(job);
  } else if (mode == "homogenize") {
    check_keys(doc, "", {"mode", "potential", "cell_quadrature_n", "u"});
    HomogenizeJob job;
    job.potential = parse_potential(require(doc, "", "potential"), "potential");
    job.cell_quadrature_n = static_cast<int>(get_int_or(doc, "", "cell_quadrature_n", 256));
    if (job.cell_quadrature_n < 32) fail("cell_quadrature_n", "must be >= 32");
    if (doc.contains("u")) {
      const json& u = doc.at("u");
      check_keys(u, "u", {"min", "max", "count"});
      job.u_min = get_or(u, "u", "min", -1.5);
      job.u_max = get_or(u, "u", "max", 1.5);
      job.u_count = static_cast<int>(get_int_or(u, "u", "count", 301));
    }
    if (!(job.u_min < job.u_max)) fail("u", "min must be < max");
    if (job.u_count < 2) fail("u.count", "must be >= 2");
    rc.job = std::move(job);
  } else if (mode == "profile") {
    check_keys(doc, "", {"mode", "potential", "cell_quadrature_n", "u", "x"});
    ProfileJob job;
    job.potential = parse_potential(require(doc, "", "potential"), "potential");
    job.cell_quadrature_n = static_cast<int>(get_int_or(doc, "", "cell_quadrature_n", 256));
    if (job.cell_quadrature_n < 32) fail("cell_quadrature_n", "must be >= 32");
    if (doc.contains("u")) {
      const json& u = doc.at("u");
      check_keys(u, "u", {"min", "max", "count"});
      job.u_min = get_or(u, "u", "min", -1.5);
      job.u_max = get_or(u, "u", "max", 1.5);
      job.u_count = static_cast<int>(get_int_or(u, "u", "count", 601));
    }
    if (doc.contains("x")) {
      const json& x = doc.at("x");
      check_keys(x, "x", {"min", "max", "count"});
      job.x_min = get_or(x, "x", "min", -5.0);
      job.x_max = get_or(x, "x", "max", 5.0);
      job.x_count = static_cast<int>(get_int_or(x, "x", "count", 1001));
    }
    if (!(job.x_min < 0.0 && job.x_max > 0.0)) fail("x", "range must contain 0");
    rc.job = std::move(job);
  } else if (mode == "counterexample") {
    check_keys(doc, "", {"mode", "eps", "delta", "alpha", "n_1d"});
    CounterexampleJob job;
    job.cfg.eps = get_or(doc, "", "eps", 0.01);
    job.cfg.delta = get_or(doc, "", "delta", 0.005);
    job.cfg.alpha = get_or(doc, "", "alpha", 0.03);
    job.cfg.n_1d = get_int_or(doc, "", "n_1d", 200000);
    if (!(job.cfg.eps > 0.0)) fail("eps", "must be > 0");
    if (!(job.cfg.delta > 0.0 && job.cfg.delta < 1.0)) fail("delta", "must lie in (0, 1)");
    if (!(job.cfg.alpha > 0.0)) fail("alpha", "must be > 0");
    if (static_cast<double>(job.cfg.n_1d) * job.cfg.delta < 16.0)
      fail("n_1d", "under-resolved: need at least 16 nodes per delta period");
    rc.job = std::move(job);
  } else if (mode == "stochastic") {
    check_keys(doc, "", {"mode", "n", "m", "d", "dist", "trials", "seed"});
    StochasticJob job;
    job.n = static_cast<int>(get_int_or(doc, "", "n", 8));
    job.m = static_cast<int>(get_int_or(doc, "", "m", 10));
    job.d = static_cast<int>(get_int_or(doc, "", "d", 2));
    job.trials = static_cast<int>(get_int_or(doc, "", "trials", 200));
    job.seed = static_cast<std::uint64_t>(get_int_or(doc, "", "seed", 1));
    if (job.n < 1 || job.m < 1) fail("", "n and m must be >= 1");
    if (job.d < 1 || job.d > 3) fail("d", "must be 1, 2 or 3");
    if (job.trials < 1) fail("trials", "must be >= 1");
    if (doc.contains("dist")) {
      const json& dist = doc.at("dist");
      if (dist.is_string() && dist.get<std::string>() == "uniform01") {
        job.dist = TileDistribution::Uniform01;
        job.p = 0.5;
      } else if (dist.is_object() && dist.contains("bernoulli")) {
        check_keys(dist, "dist", {"bernoulli"});
        job.dist = TileDistribution::Bernoulli;
        job.p = number(dist.at("bernoulli"), "dist.bernoulli");
        if (job.p < 0.0 || job.p > 1.0) fail("dist.bernoulli", "must lie in [0, 1]");
      } else {
        fail("dist", "expected \"uniform01\" or {\"bernoulli\": p}");
      }
    }
    rc.job = std::move(job);
  } else if (mode == "energy") {
    check_keys(doc, "", {"mode", "field", "eps", "potential", "tv"});
    EnergyJob job;
    const json& field = require(doc, "", "field");
    if (!field.is_string()) fail("field", "expected a PFH1 file path string");
    job.field_file = field.get<std::string>();
    job.eps = positive(require(doc, "", "eps"), "eps");
    job.potential = parse_potential(require(doc, "", "potential"), "potential");
    if (doc.contains("tv")) {
      const json& tv = doc.at("tv");
      check_keys(tv, "tv", {"delta"});
      job.tv_delta = positive(require(tv, "tv", "delta"), "tv.delta");
    }
    rc.job = std::move(job);
  } else {
    fail("mode", "unknown mode '" + mode +
                     "' (valid: flow, homogenize, profile, counterexample, stochastic, energy)");
  }
  return rc;
}

inline RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

/// Full flow configuration for one of the four fixed experiments plus the
/// homogeneous baseline, downscaled to n = 256 with a default delta of 0.1.
/// Every value can be overridden afterwards via dotted-path --set.
inline json preset(const std::string& name) {
  json doc{{"mode", "flow"},
           {"eps", 0.025},
           {"tau", 0.001},
           {"steps", 100},
           {"grid", json{{"n", 256}, {"L", 4.0}, {"origin", -2.0}, {"dim", 2}}},
           {"initial", "strip"},
           {"record_every", 1},
           {"snapshot_every", 0},
           {"seed", 1}};
  if (name == "homogeneous") {
    doc["potential"] = json{{"family", "homogeneous"}};
  } else if (name == "hex") {
    doc["potential"] = json{{"family", "hex"}, {"a", 0.228}, {"b", -0.1}, {"delta", 0.1}};
  } else if (name == "random") {
    doc["potential"] = json{{"family", "random"}, {"delta", 0.1}, {"m_sub", 40},
                            {"low", 0.0},         {"high", 2.0},  {"seed", 1}};
  } else if (name == "wells") {
    doc["potential"] = json{{"family", "wells"}, {"delta", 0.1}};
  } else if (name == "exponent") {
    doc["potential"] = json{{"family", "exponent"}, {"delta", 0.1}};
  } else {
    throw ConfigError("unknown preset '" + name +
                      "' (valid: hex, random, wells, exponent, homogeneous)");
  }
  return doc;
}

/// Dotted-path override, applied to the raw JSON before validation. The value
/// is parsed as JSON when possible and falls back to a plain string.
inline void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("--set expects key.path=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* cursor = &doc;
  std::size_t pos = 0;
  while (true) {
    const auto dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (key.empty()) throw ConfigError("--set path has an empty segment: '" + path + "'");
    if (dot == std::string::npos) {
      (*cursor)[key] = value;
      return;
    }
    cursor = &(*cursor)[key];
    if (!cursor->is_object() && !cursor->is_null())
      throw ConfigError("--set path '" + path + "' descends into a non-object");
    pos = dot + 1;
  }
}

/// FNV-1a over the canonical (sorted-key, shortest-float) dump.
inline std::uint64_t config_hash(const json& doc) {
  const std::string dump = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

} // namespace pfh
