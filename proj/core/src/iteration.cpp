#include "ricci/iteration.hpp"

#include <cmath>
#include <sstream>

namespace ricci {

namespace {

bool is_sphere(const Backend& b) { return b.kind() == BackendKind::sphere; }

int default_green_count(const Backend& b) { return is_sphere(b) ? 64 : 48; }

}  // namespace

double curvature_deviation(const MetricState& m, int mu, const std::optional<Field>& model_f) {
  Field r = ricci_form(m).ricci_density;
  if (model_f) {
    // The model pretends Ric ω = μω + i∂∂̄f on the flat grid.
    r += static_cast<double>(mu) - m.backend().reference_curvature() + 0.5 * laplacian(*model_f);
  }
  return (r - static_cast<double>(mu) * m.density()).sup_norm();
}

StepResult ricci_step(const Field& previous, int mu, const Field& f, const SemilinearOptions& solver,
                      const std::optional<Field>& initial_guess) {
  previous.require_compatible(f);
  const auto& backend = previous.backend();
  if (mu == 1) {
    if (!is_sphere(backend)) throw ClassMismatchError("ricci_step: mu = 1 requires the sphere backend");
    auto normalized = normalize_for_step(previous, f);
    const Field density = backend.nonlinear(f - normalized.potential, [](double t) { return std::exp(t); });
    // Exact exponentials are positive; a negative projection means the
    // grid cannot resolve the step.
    if (!(density.min() > 0.0)) {
      throw InternalConsistencyError("ricci_step: projected step density is not positive; resolution too low?");
    }
    auto solved = solve_poisson_step(density);
    return {solved.u, solved.u, std::move(solved.report), normalized.constant};
  }
  if (mu != 0 && mu != -1) throw Error("ricci_step: mu must be -1, 0 or 1");
  if (is_sphere(backend)) throw ClassMismatchError("ricci_step: mu <= 0 requires the torus backend");

  SemilinearProblem problem{f - previous, 1.0 - mu, 1.0};
  EllipticSolution solved = [&] {
    const Field zero = backend.zeros();
    if (!initial_guess) return solve_semilinear(problem, zero, solver);
    try {
      return solve_semilinear(problem, *initial_guess, solver);
    } catch (const SolverStallError&) {
      return solve_semilinear(problem, zero, solver);
    }
  }();
  const double c = mean(solved.u);
  return {solved.u - c, solved.u, std::move(solved.report), c};
}

void validate(const IterationConfig& cfg) {
  if (!cfg.backend) throw Error("iteration: backend missing");
  const auto& b = *cfg.backend;
  if (cfg.mu < -1 || cfg.mu > 1) throw Error("iteration: mu must be -1, 0 or 1");
  if (cfg.synthetic_f) {
    if (cfg.mu != -1 || is_sphere(b)) throw Error("iteration: synthetic_f is only used by the torus mu = -1 model");
    cfg.synthetic_f->require_compatible(b.zeros());
  } else if (cfg.mu != b.canonical_mu()) {
    throw ClassMismatchError("iteration: inadmissible class sign for this backend");
  }
  if (cfg.initial_potential) cfg.initial_potential->require_compatible(b.zeros());
  if (cfg.max_steps < 0) throw Error("iteration: max_steps must be non-negative");
  if (cfg.stop_tol_sup < 0.0) throw Error("iteration: stop tolerance must be non-negative");
  if (cfg.mu != 1 && cfg.initial_potential) {
    const double margin = conformal_density(*cfg.initial_potential).min();
    if (!(margin > 0.0)) throw NotKahlerError("iteration: initial potential is not Kähler", margin);
  }
}

Trajectory run_iteration(const IterationConfig& cfg) {
  validate(cfg);
  const auto backend = cfg.backend;
  const int mu = cfg.mu;
  const Field f = cfg.synthetic_f.value_or(backend->zeros());
  const std::optional<Field> model_f = cfg.synthetic_f;
  const bool gauge = cfg.gauge_fix.value_or(is_sphere(*backend)) && is_sphere(*backend);
  const Field psi0 = cfg.initial_potential.value_or(backend->zeros());

  Trajectory traj;
  traj.label = model_f ? "model-mu-1" : "ricci-iteration";
  traj.mu = mu;

  const bool kahler0 = conformal_density(psi0).min() > 0.0;
  Field previous = mu == 1 ? remove_mean(psi0) : psi0;
  std::optional<Field> before_previous;

  std::vector<std::size_t> sources;
  if (cfg.green_bounds) {
    sources = default_green_sources(*backend, cfg.green_sources > 0 ? cfg.green_sources : default_green_count(*backend));
    traj.reference_green_constant = green_function(MetricState::reference(backend), sources).A;
  }
  if (cfg.functionals) {
    traj.initial_functionals = evaluate_functionals(remove_mean(psi0), mu == 1 ? std::optional<Field>(f) : std::nullopt,
                                                    kahler0, cfg.k_energy_nodes);
  }
  if (cfg.keep_states) traj.states.push_back(previous);
  traj.final_potential = remove_mean(psi0);
  traj.final_kahler = kahler0;

  for (int k = 1; k <= cfg.max_steps; ++k) {
    try {
      std::optional<Field> guess;
      if (mu != 1 && before_previous) guess = 2.0 * previous - *before_previous;

      StepResult step = ricci_step(previous, mu, f, cfg.solver, guess);

      std::optional<MetricState> state;
      try {
        state = MetricState::from_potential(step.potential);
      } catch (const NotKahlerError&) {
        throw InternalConsistencyError("ricci_step produced a non-positive density; resolution too low?");
      }

      StepRecord rec;
      rec.k = k;
      rec.solve = step.report;
      rec.normalization_constant = step.normalization_constant;

      Field current = step.natural;
      if (gauge) {
        rec.mobius_parameter = mobius_parameter(*state);
        if (rec.mobius_parameter != 0.0) state = mobius_pullback(*state, rec.mobius_parameter);
        current = state->potential();
      }

      rec.c0_increment = sup_distance(current, previous);
      rec.curvature_deviation = curvature_deviation(*state, mu, model_f);
      rec.positivity_margin = state->positivity_margin();
      if (cfg.functionals) {
        rec.functionals = evaluate_functionals(state->potential(), mu == 1 ? std::optional<Field>(f) : std::nullopt,
                                               true, cfg.k_energy_nodes);
      }
      if (cfg.green_bounds) {
        const double a_k = green_function(*state, sources).A;
        rec.green_constant = a_k;
        rec.green_slack = green_bound_slack(state->potential(), *traj.reference_green_constant, a_k);
      }

      traj.steps.push_back(rec);
      if (cfg.keep_states) traj.states.push_back(current);
      traj.final_potential = state->potential();
      traj.final_kahler = true;
      before_previous = std::move(previous);
      previous = std::move(current);

      if (rec.c0_increment < cfg.stop_tol_sup) {
        traj.converged = true;
        break;
      }
    } catch (const Error& e) {
      std::ostringstream os;
      os << "step " << k << ": " << e.what();
      const bool internal = dynamic_cast<const InternalConsistencyError*>(&e) != nullptr;
      throw IterationError(os.str(), std::move(traj), internal);
    }
  }
  return traj;
}

ForwardTrajectory run_forward_iteration(const IterationConfig& cfg) {
  if (!cfg.backend || !is_sphere(*cfg.backend)) throw UnsupportedError("forward iteration requires the sphere backend");
  const Field psi0 = cfg.initial_potential.value_or(cfg.backend->zeros());
  MetricState m = MetricState::from_potential(psi0);

  ForwardTrajectory out;
  out.states.push_back(m.potential());
  for (int k = 1; k <= cfg.max_steps; ++k) {
    ForwardOutcome next = forward_ricci(m);
    if (!next.positive()) {
      out.lost_positivity = true;
      out.terminal_margin = next.ricci_minimum;
      break;
    }
    ForwardRecord rec;
    rec.k = k;
    rec.ricci_minimum = next.ricci_minimum;
    rec.c0_increment = sup_distance(next.state->potential(), m.potential());
    rec.positivity_margin = next.state->positivity_margin();
    rec.curvature_deviation = curvature_deviation(*next.state, 1);
    m = std::move(*next.state);
    out.steps.push_back(rec);
    out.states.push_back(m.potential());
  }
  return out;
}

std::optional<int> find_return_to_initial(const ForwardTrajectory& t, double tol) {
  for (std::size_t k = 1; k < t.states.size(); ++k) {
    if (sup_distance(t.states[k], t.states[0]) <= tol) return static_cast<int>(k);
  }
  return std::nullopt;
}

}  // namespace ricci
