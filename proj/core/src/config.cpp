#include "ricci/config.hpp"

#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <random>
#include <set>
#include <sstream>

#include "ricci/geometry.hpp"
#include "ricci/sphere.hpp"
#include "ricci/torus.hpp"

namespace ricci {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out = "invalid configuration:";
  for (const auto& s : v) out += "\n  " + s;
  return out;
}

// Collects violations while walking the document; every accessor records a
// problem and returns the default instead of throwing.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    fail(path, "expected an object");
    return false;
  }

  void allow(const json& j, const std::string& path, std::set<std::string> keys) {
    if (!j.is_object()) return;
    for (const auto& [k, _] : j.items()) {
      if (!keys.count(k)) fail(path.empty() ? k : path + "." + k, "unknown key");
    }
  }

  template <class T>
  T get(const json& j, const std::string& key, const std::string& path, T fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    const json& v = j.at(key);
    const std::string where = path.empty() ? key : path + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (v.is_boolean()) return v.get<bool>();
      fail(where, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (v.is_number_integer()) {
        const auto raw = v.get<long long>();
        if (raw < static_cast<long long>(std::numeric_limits<T>::min()) ||
            static_cast<unsigned long long>(std::max(raw, 0LL)) >
                static_cast<unsigned long long>(std::numeric_limits<T>::max())) {
          fail(where, "integer out of range");
          return fallback;
        }
        return static_cast<T>(raw);
      }
      fail(where, "expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (v.is_number()) return v.get<double>();
      fail(where, "expected a number");
    } else {
      if (v.is_string()) return v.get<std::string>();
      fail(where, "expected a string");
    }
    return fallback;
  }
};

std::string position_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  std::ostringstream os;
  os << "line " << line << ", column " << col;
  return os.str();
}

struct BackendChoice {
  bool sphere = true;
  SphereSpec sphere_spec;
  TorusSpec torus_spec;
};

BackendChoice read_backend(Reader& r, const json& root) {
  BackendChoice out;
  if (!root.contains("backend")) {
    r.fail("backend", "missing");
    return out;
  }
  const json& b = root.at("backend");
  if (!r.object(b, "backend")) return out;
  const std::string kind = r.get<std::string>(b, "kind", "backend", "");
  if (kind == "sphere") {
    r.allow(b, "backend", {"kind", "resolution", "dealias"});
    out.sphere_spec.n = r.get<int>(b, "resolution", "backend", out.sphere_spec.n);
    out.sphere_spec.dealias = r.get<bool>(b, "dealias", "backend", true);
    if (out.sphere_spec.n < 4 || out.sphere_spec.n > 4096) r.fail("backend.resolution", "must lie in [4, 4096]");
  } else if (kind == "torus") {
    out.sphere = false;
    r.allow(b, "backend", {"kind", "n1", "n2", "l1", "l2", "dealias"});
    auto& t = out.torus_spec;
    t.n1 = r.get<int>(b, "n1", "backend", t.n1);
    t.n2 = r.get<int>(b, "n2", "backend", t.n2);
    t.l1 = r.get<double>(b, "l1", "backend", t.l1);
    t.l2 = r.get<double>(b, "l2", "backend", t.l2);
    t.dealias = r.get<bool>(b, "dealias", "backend", true);
    if (t.n1 < 4 || t.n1 > 1024 || t.n1 % 2) r.fail("backend.n1", "must be even and lie in [4, 1024]");
    if (t.n2 < 4 || t.n2 > 1024 || t.n2 % 2) r.fail("backend.n2", "must be even and lie in [4, 1024]");
    if (!(t.l1 > 0.0) || !std::isfinite(t.l1)) r.fail("backend.l1", "must be positive");
    if (!(t.l2 > 0.0) || !std::isfinite(t.l2)) r.fail("backend.l2", "must be positive");
  } else {
    r.fail("backend.kind", "must be \"sphere\" or \"torus\"");
  }
  return out;
}

DataSpec read_data(Reader& r, const json& j, const std::string& path, bool sphere, bool* require_kahler) {
  DataSpec out;
  if (!r.object(j, path)) return out;
  std::set<std::string> keys{"modes", "random"};
  if (require_kahler) keys.insert("require_kahler");
  r.allow(j, path, keys);
  if (require_kahler) *require_kahler = r.get<bool>(j, "require_kahler", path, true);
  if (j.contains("modes")) {
    const json& modes = j.at("modes");
    if (!modes.is_array()) {
      r.fail(path + ".modes", "expected an array");
    } else {
      for (std::size_t i = 0; i < modes.size(); ++i) {
        const std::string where = path + ".modes[" + std::to_string(i) + "]";
        const json& m = modes[i];
        if (!r.object(m, where)) continue;
        ModeSpec spec;
        if (sphere) {
          r.allow(m, where, {"l", "amplitude"});
          spec.l = r.get<int>(m, "l", where, -1);
          if (spec.l < 0) r.fail(where + ".l", "missing or negative");
        } else {
          r.allow(m, where, {"kx", "ky", "sine", "amplitude"});
          spec.kx = r.get<int>(m, "kx", where, 0);
          spec.ky = r.get<int>(m, "ky", where, 0);
          spec.sine = r.get<bool>(m, "sine", where, false);
        }
        if (!m.contains("amplitude")) r.fail(where + ".amplitude", "missing");
        spec.amplitude = r.get<double>(m, "amplitude", where, 0.0);
        if (!std::isfinite(spec.amplitude)) r.fail(where + ".amplitude", "must be finite");
        out.modes.push_back(spec);
      }
    }
  }
  if (j.contains("random")) {
    const json& rnd = j.at("random");
    const std::string where = path + ".random";
    if (r.object(rnd, where)) {
      r.allow(rnd, where, {"band", "amplitude", "seed"});
      RandomSpec spec;
      spec.band = r.get<int>(rnd, "band", where, spec.band);
      spec.amplitude = r.get<double>(rnd, "amplitude", where, spec.amplitude);
      spec.seed = r.get<std::uint64_t>(rnd, "seed", where, spec.seed);
      if (spec.band < 1) r.fail(where + ".band", "must be at least 1");
      if (!(spec.amplitude >= 0.0) || !std::isfinite(spec.amplitude)) r.fail(where + ".amplitude", "must be >= 0");
      out.random = spec;
    }
  }
  return out;
}

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty() || base.empty()) return p;
  const std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(base) / path).string();
}

double uniform_symmetric(std::mt19937_64& gen) {
  // 53 random bits mapped to [-1, 1).
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

void check_bands(Reader& r, const DataSpec& d, const std::string& path, const BackendChoice& b) {
  const int limit = b.sphere ? b.sphere_spec.n - 1 : std::min(b.torus_spec.n1, b.torus_spec.n2) / 2 - 1;
  for (std::size_t i = 0; i < d.modes.size(); ++i) {
    const auto& m = d.modes[i];
    const int k = b.sphere ? m.l : std::max(std::abs(m.kx), std::abs(m.ky));
    if (k > limit) r.fail(path + ".modes[" + std::to_string(i) + "]", "mode exceeds the resolvable band");
  }
  if (d.random && d.random->band > limit) r.fail(path + ".random.band", "exceeds the resolvable band");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(join(violations)), violations_(std::move(violations)) {}

Field mode_field(const Backend& backend, const ModeSpec& mode) {
  if (const auto* s = dynamic_cast<const SphereBackend*>(&backend)) {
    const int l = mode.l;
    return s->from_function([l](double x) { return legendre_p(l, x); }) * mode.amplitude;
  }
  const auto& t = dynamic_cast<const TorusBackend&>(backend);
  const double kx = 2.0 * std::numbers::pi * mode.kx / t.l1();
  const double ky = 2.0 * std::numbers::pi * mode.ky / t.l2();
  const bool sine = mode.sine;
  return t.from_function([=](double x, double y) {
           const double phase = kx * x + ky * y;
           return sine ? std::sin(phase) : std::cos(phase);
         }) *
         mode.amplitude;
}

Field random_field(const Backend& backend, const RandomSpec& spec) {
  std::mt19937_64 gen(spec.seed);
  Field f = backend.zeros();
  if (backend.kind() == BackendKind::sphere) {
    for (int l = 1; l <= spec.band; ++l) f += mode_field(backend, {l, 0, 0, false, uniform_symmetric(gen)});
  } else {
    for (int kx = -spec.band; kx <= spec.band; ++kx) {
      for (int ky = 0; ky <= spec.band; ++ky) {
        if (ky == 0 && kx <= 0) continue;
        f += mode_field(backend, {0, kx, ky, false, uniform_symmetric(gen)});
        f += mode_field(backend, {0, kx, ky, true, uniform_symmetric(gen)});
      }
    }
  }
  const double sup = f.sup_norm();
  if (sup == 0.0) return f;
  return f * (spec.amplitude / sup);
}

Field build_data(const Backend& backend, const DataSpec& spec) {
  Field f = backend.zeros();
  for (const auto& m : spec.modes) f += mode_field(backend, m);
  if (spec.random) f += random_field(backend, *spec.random);
  return f;
}

Field normalize_ricci_potential(const Field& f) {
  const auto& b = f.backend();
  const double total = integrate(b.nonlinear(f, [](double t) { return std::exp(t); }));
  return f - std::log(total / b.volume());
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    const auto cut = msg.find("parse error");
    throw ConfigError({"syntax error at " + position_of(text, e.byte) + ": " +
                       (cut == std::string::npos ? msg : msg.substr(cut))});
  }

  Reader r;
  RunConfig cfg;
  if (!root.is_object()) throw ConfigError({"<root>: expected a JSON object"});
  r.allow(root, "", {"backend", "mu", "initial", "synthetic_f", "max_steps", "stop_tol", "gauge_fix", "diagnostics",
                     "solver", "output", "oracle_mode", "target", "target_file", "state_file"});

  const BackendChoice choice = read_backend(r, root);
  const int canonical = choice.sphere ? 1 : 0;
  auto& it = cfg.iteration;
  it.mu = r.get<int>(root, "mu", "", canonical);
  if (it.mu < -1 || it.mu > 1) r.fail("mu", "must be -1, 0 or 1");

  bool require_kahler = true;
  if (root.contains("initial")) cfg.initial = read_data(r, root.at("initial"), "initial", choice.sphere, &require_kahler);
  if (root.contains("synthetic_f")) cfg.synthetic_f = read_data(r, root.at("synthetic_f"), "synthetic_f", choice.sphere, nullptr);
  if (root.contains("target")) cfg.target = read_data(r, root.at("target"), "target", choice.sphere, nullptr);
  cfg.target_file = resolve(base_dir, r.get<std::string>(root, "target_file", "", ""));
  cfg.state_file = resolve(base_dir, r.get<std::string>(root, "state_file", "", ""));

  const bool synthetic = !cfg.synthetic_f.empty();
  if (synthetic) {
    if (choice.sphere || it.mu != -1) r.fail("synthetic_f", "only allowed for the torus mu = -1 model");
  } else if (it.mu != canonical && it.mu >= -1 && it.mu <= 1) {
    std::ostringstream os;
    os << "inadmissible class sign mu = " << it.mu << " for the " << (choice.sphere ? "sphere" : "torus")
       << " backend (admissible: " << canonical << (choice.sphere ? "" : ", or -1 with synthetic_f") << ")";
    r.fail("mu", os.str());
  }
  if (!require_kahler && it.mu != 1) r.fail("initial.require_kahler", "may only be disabled for mu = 1");

  it.max_steps = r.get<int>(root, "max_steps", "", it.max_steps);
  if (it.max_steps < 0) r.fail("max_steps", "must be non-negative");
  it.stop_tol_sup = r.get<double>(root, "stop_tol", "", it.stop_tol_sup);
  if (!(it.stop_tol_sup >= 0.0)) r.fail("stop_tol", "must be non-negative");
  if (root.contains("gauge_fix")) it.gauge_fix = r.get<bool>(root, "gauge_fix", "", true);
  cfg.oracle_mode = r.get<bool>(root, "oracle_mode", "", false);

  if (root.contains("diagnostics")) {
    const json& d = root.at("diagnostics");
    if (r.object(d, "diagnostics")) {
      r.allow(d, "diagnostics", {"functionals", "green_bounds", "green_sources", "k_energy_nodes"});
      it.functionals = r.get<bool>(d, "functionals", "diagnostics", it.functionals);
      it.green_bounds = r.get<bool>(d, "green_bounds", "diagnostics", it.green_bounds);
      it.green_sources = r.get<int>(d, "green_sources", "diagnostics", it.green_sources);
      it.k_energy_nodes = r.get<int>(d, "k_energy_nodes", "diagnostics", it.k_energy_nodes);
      if (it.green_sources < 0) r.fail("diagnostics.green_sources", "must be non-negative");
      if (it.k_energy_nodes < 2 || it.k_energy_nodes > 128) r.fail("diagnostics.k_energy_nodes", "must lie in [2, 128]");
    }
  }
  if (root.contains("solver")) {
    const json& s = root.at("solver");
    if (r.object(s, "solver")) {
      r.allow(s, "solver", {"tol_sup", "max_newton", "max_halvings"});
      it.solver.tol_sup = r.get<double>(s, "tol_sup", "solver", it.solver.tol_sup);
      it.solver.max_newton = r.get<int>(s, "max_newton", "solver", it.solver.max_newton);
      it.solver.max_halvings = r.get<int>(s, "max_halvings", "solver", it.solver.max_halvings);
      if (!(it.solver.tol_sup > 0.0)) r.fail("solver.tol_sup", "must be positive");
      if (it.solver.max_newton < 1) r.fail("solver.max_newton", "must be at least 1");
      if (it.solver.max_halvings < 0) r.fail("solver.max_halvings", "must be non-negative");
    }
  }
  if (root.contains("output")) {
    const json& o = root.at("output");
    if (r.object(o, "output")) {
      r.allow(o, "output", {"dir", "csv", "jsonl", "svg"});
      cfg.output.dir = r.get<std::string>(o, "dir", "output", cfg.output.dir);
      cfg.output.csv = r.get<bool>(o, "csv", "output", true);
      cfg.output.jsonl = r.get<bool>(o, "jsonl", "output", true);
      cfg.output.svg = r.get<bool>(o, "svg", "output", false);
    }
  }
  cfg.output.dir = resolve(base_dir, cfg.output.dir);

  check_bands(r, cfg.initial, "initial", choice);
  check_bands(r, cfg.synthetic_f, "synthetic_f", choice);
  check_bands(r, cfg.target, "target", choice);
  if (cfg.oracle_mode) {
    const bool small = choice.sphere ? choice.sphere_spec.n <= 32
                                     : choice.torus_spec.n1 <= 32 && choice.torus_spec.n2 <= 32;
    if (!small) r.fail("oracle_mode", "dense oracles need a resolution of at most 32 per axis");
  }
  if (!r.errors.empty()) throw ConfigError(r.errors);

  // Data checks need the grid.
  std::shared_ptr<const Backend> backend;
  if (choice.sphere) {
    backend = make_sphere(choice.sphere_spec);
  } else {
    backend = make_torus(choice.torus_spec);
  }
  it.backend = backend;
  if (!cfg.initial.empty()) it.initial_potential = build_data(*backend, cfg.initial);
  if (synthetic) it.synthetic_f = normalize_ricci_potential(build_data(*backend, cfg.synthetic_f));

  if (require_kahler && it.initial_potential) {
    const double margin = conformal_density(*it.initial_potential).min();
    if (!(margin > 0.0)) {
      std::ostringstream os;
      os.precision(17);
      os << "initial potential violates positivity: min(1 + ½Δψ₀) = " << margin;
      r.fail("initial", os.str());
    }
  }
  if (!cfg.target.empty()) {
    if (!choice.sphere) r.fail("target", "inverse Ricci targets need the sphere backend");
    for (std::size_t i = 0; i < cfg.target.modes.size(); ++i) {
      if (cfg.target.modes[i].l == 0) r.fail("target.modes[" + std::to_string(i) + "]", "l = 0 would change the class");
    }
    if (choice.sphere) {
      const double margin = (1.0 + build_data(*backend, cfg.target)).min();
      if (!(margin > 0.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "target density is not positive: min = " << margin;
        r.fail("target", os.str());
      }
    }
  }
  if (!r.errors.empty()) throw ConfigError(r.errors);
  return cfg;
}

}  // namespace ricci
