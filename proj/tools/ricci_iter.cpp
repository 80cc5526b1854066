#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "ricci/config.hpp"
#include "ricci/errors.hpp"
#include "ricci/functionals.hpp"
#include "ricci/invariants.hpp"
#include "ricci/io.hpp"
#include "ricci/iteration.hpp"
#include "ricci/kahler.hpp"
#include "ricci/oracles.hpp"

namespace fs = std::filesystem;
using namespace ricci;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_solver = 3;
constexpr int exit_invariant = 4;

struct Invocation {
  std::string config_path;
  std::string out_dir;
};

// Distinguishes rejected input (exit 2) from numerical failure (exit 3).
struct ConfigProblem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig load(const Invocation& inv) {
  std::string text;
  try {
    text = io::read_file(inv.config_path);
  } catch (const Error& e) {
    throw ConfigProblem(e.what());
  }
  return parse_config(text, fs::path(inv.config_path).parent_path().string());
}

std::string output_dir(const Invocation& inv, const RunConfig& cfg) {
  const std::string dir = inv.out_dir.empty() ? cfg.output.dir : inv.out_dir;
  fs::create_directories(dir);
  return dir;
}

std::string path_in(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

void write_iteration_outputs(const std::string& dir, const RunConfig& cfg, const Trajectory& t,
                             const std::optional<std::string>& error) {
  if (cfg.output.jsonl) {
    io::write_file(path_in(dir, "trajectory.jsonl"), render([&](std::ostream& o) { io::write_trajectory_jsonl(o, t, error); }));
  }
  if (cfg.output.csv) io::write_file(path_in(dir, "summary.csv"), render([&](std::ostream& o) { io::write_summary_csv(o, t); }));
  if (cfg.output.svg) {
    io::write_file(path_in(dir, "convergence.svg"), render([&](std::ostream& o) { io::write_convergence_svg(o, t); }));
  }
  if (t.final_potential) {
    io::write_file(path_in(dir, "final_state.json"), render([&](std::ostream& o) { io::write_field(o, *t.final_potential); }));
  }
}

// Step one recomputed with the dense oracle; returns the sup discrepancy.
double oracle_audit(const RunConfig& cfg) {
  const auto& it = cfg.iteration;
  const auto& b = *it.backend;
  const Field psi0 = it.initial_potential.value_or(b.zeros());
  const Field f = it.synthetic_f.value_or(b.zeros());
  const StepResult step = ricci_step(it.mu == 1 ? remove_mean(psi0) : psi0, it.mu, f, it.solver);
  if (it.mu == 1) {
    const auto normalized = normalize_for_step(remove_mean(psi0), f);
    const Field density = b.nonlinear(f - normalized.potential, [](double t) { return std::exp(t); });
    return sup_distance(oracles::dense_inverse_laplacian(2.0 * (density - 1.0)), step.potential);
  }
  const SemilinearProblem p{f - psi0, 1.0 - it.mu, 1.0};
  return sup_distance(oracles::dense_semilinear_solve(p), step.natural);
}

int cmd_iterate(const Invocation& inv) {
  const RunConfig cfg = load(inv);
  const std::string dir = output_dir(inv, cfg);
  try {
    const Trajectory t = run_iteration(cfg.iteration);
    write_iteration_outputs(dir, cfg, t, std::nullopt);
    std::printf("%s: %zu steps, converged=%s\n", t.label.c_str(), t.steps.size(), t.converged ? "yes" : "no");
    if (!t.steps.empty()) {
      const auto& last = t.steps.back();
      std::printf("last increment %s, curvature deviation %s\n", io::number(last.c0_increment).c_str(),
                  io::number(last.curvature_deviation).c_str());
    }
    for (const auto& s : t.steps) {
      if (s.green_slack && *s.green_slack < -1e-6) {
        std::fprintf(stderr, "green bound violated at step %d (slack %s)\n", s.k, io::number(*s.green_slack).c_str());
        return exit_invariant;
      }
    }
    if (cfg.oracle_mode) {
      const double gap = oracle_audit(cfg);
      std::printf("oracle audit of step 1: %s\n", io::number(gap).c_str());
      if (!(gap <= 1e-8)) return exit_invariant;
    }
  } catch (const IterationError& e) {
    write_iteration_outputs(dir, cfg, e.partial(), std::string(e.what()));
    std::fprintf(stderr, "%s: %s\n", e.internal() ? "invariant failure" : "solver error", e.what());
    return e.internal() ? exit_invariant : exit_solver;
  }
  return exit_ok;
}

int cmd_forward(const Invocation& inv) {
  const RunConfig cfg = load(inv);
  if (cfg.iteration.backend->kind() != BackendKind::sphere) throw ConfigProblem("fwd requires the sphere backend");
  if (cfg.iteration.initial_potential) {
    const double margin = conformal_density(*cfg.iteration.initial_potential).min();
    if (!(margin > 0.0)) throw ConfigProblem("initial potential violates positivity: margin " + io::number(margin));
  }
  const std::string dir = output_dir(inv, cfg);
  const ForwardTrajectory t = run_forward_iteration(cfg.iteration);
  const auto back = find_return_to_initial(t);
  if (cfg.output.jsonl) {
    io::write_file(path_in(dir, "forward.jsonl"), render([&](std::ostream& o) { io::write_forward_jsonl(o, t, back); }));
  }
  if (cfg.output.csv) io::write_file(path_in(dir, "forward.csv"), render([&](std::ostream& o) { io::write_forward_csv(o, t); }));
  std::printf("forward: %zu steps, lost positivity=%s\n", t.steps.size(), t.lost_positivity ? "yes" : "no");
  // A return to ω₀ forces constant curvature.
  if (back) {
    const double dev = curvature_deviation(MetricState::from_potential(t.states[0]), 1);
    if (dev > 1e-8) {
      std::fprintf(stderr, "non-round periodic orbit at k = %d\n", *back);
      return exit_invariant;
    }
  }
  return exit_ok;
}

int cmd_invricci(const Invocation& inv) {
  const RunConfig cfg = load(inv);
  const auto& b = *cfg.iteration.backend;
  Field target = b.zeros();
  if (!cfg.target_file.empty()) {
    try {
      target = io::read_field(io::read_file(cfg.target_file), b);
    } catch (const Error& e) {
      throw ConfigProblem(e.what());
    }
  } else if (!cfg.target.empty()) {
    target = 1.0 + build_data(b, cfg.target);
  } else {
    throw ConfigProblem("invricci needs target or target_file");
  }
  const std::string dir = output_dir(inv, cfg);
  const MetricState m = inverse_ricci(target);
  const double residual = sup_distance(ricci_form(m).ricci_density, target);
  io::write_file(path_in(dir, "state.json"), render([&](std::ostream& o) { io::write_field(o, m.potential()); }));
  io::write_file(path_in(dir, "invricci.json"), "{\"residual_sup\":" + io::number(residual) +
                                                    ",\"positivity_margin\":" + io::number(m.positivity_margin()) + "}\n");
  std::printf("inverse Ricci residual %s\n", io::number(residual).c_str());
  return exit_ok;
}

int cmd_check(const Invocation& inv) {
  const RunConfig cfg = load(inv);
  (void)cfg;
  const auto results = run_invariant_suite(true);
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    std::printf("%-4s %-42s %-24s <= %s%s%s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), io::number(r.value).c_str(),
                io::number(r.tolerance).c_str(), r.detail.empty() ? "" : "  ", r.detail.c_str());
  }
  return all ? exit_ok : exit_invariant;
}

int cmd_green(const Invocation& inv) {
  const RunConfig cfg = load(inv);
  const auto& it = cfg.iteration;
  Field psi = it.initial_potential.value_or(it.backend->zeros());
  if (!cfg.state_file.empty()) {
    try {
      psi = io::read_field(io::read_file(cfg.state_file), *it.backend);
    } catch (const Error& e) {
      throw ConfigProblem(e.what());
    }
  }
  std::optional<MetricState> m;
  try {
    m = MetricState::from_potential(psi);
  } catch (const NotKahlerError& e) {
    throw ConfigProblem(e.what());
  }
  const std::string dir = output_dir(inv, cfg);
  const int count = it.green_sources > 0 ? it.green_sources : (it.backend->kind() == BackendKind::sphere ? 64 : 48);
  const auto sources = default_green_sources(*it.backend, count);
  const auto g = green_function(*m, sources);
  const auto ref = green_function(MetricState::reference(it.backend), sources);
  double symmetry = 0.0;
  for (std::size_t a = 0; a < sources.size(); ++a) {
    for (std::size_t c = 0; c < sources.size(); ++c) {
      symmetry = std::max(symmetry, std::abs(g.columns[a][sources[c]] - g.columns[c][sources[a]]));
    }
  }
  const double slack = green_bound_slack(m->potential(), ref.A, g.A);
  std::ostringstream os;
  os << "{\"A\":" << io::number(g.A) << ",\"A_reference\":" << io::number(ref.A) << ",\"sources\":" << sources.size()
     << ",\"symmetry_defect\":" << io::number(symmetry) << ",\"green_slack\":" << io::number(slack) << "}\n";
  io::write_file(path_in(dir, "green.json"), os.str());
  std::printf("A = %s, slack = %s\n", io::number(g.A).c_str(), io::number(slack).c_str());
  return slack >= -1e-6 ? exit_ok : exit_invariant;
}

bool thread_env_ok() {
  const char* env = std::getenv("RICCI_ITER_THREADS");
  if (!env) return true;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  return end != env && *end == '\0' && v > 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ricci iteration on model Kähler surfaces"};
  app.require_subcommand(1);
  Invocation inv;
  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const Invocation&);
  };
  const Sub subs[] = {
      {"iterate", "run the Ricci iteration", cmd_iterate},
      {"fwd", "run the forward iteration ω ↦ Ric ω", cmd_forward},
      {"invricci", "solve Ric ω = h·ω for a target density", cmd_invricci},
      {"check", "run the invariant suite and oracle cross-checks", cmd_check},
      {"green", "Green function diagnostics for a stored state", cmd_green},
  };
  int (*chosen)(const Invocation&) = nullptr;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", inv.config_path, "JSON run description")->required();
    sub->add_option("--out", inv.out_dir, "output directory (overrides output.dir)");
    sub->callback([&chosen, fn = s.fn] { chosen = fn; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }
  if (!thread_env_ok()) {
    std::fprintf(stderr, "config error: RICCI_ITER_THREADS must be a positive integer\n");
    return exit_config;
  }
  try {
    return chosen(inv);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error:\n");
    for (const auto& v : e.violations()) std::fprintf(stderr, "  %s\n", v.c_str());
    return exit_config;
  } catch (const ConfigProblem& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return exit_config;
  } catch (const InternalConsistencyError& e) {
    std::fprintf(stderr, "invariant failure: %s\n", e.what());
    return exit_invariant;
  } catch (const Error& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return exit_solver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_solver;
  }
}
