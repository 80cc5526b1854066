#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ricci/elliptic.hpp"
#include "ricci/errors.hpp"
#include "ricci/field.hpp"
#include "ricci/functionals.hpp"
#include "ricci/geometry.hpp"
#include "ricci/kahler.hpp"

namespace ricci {

struct IterationConfig {
  int mu = 1;
  std::shared_ptr<const Backend> backend;
  /// ψ₀ relative to the reference form; zero when empty.
  std::optional<Field> initial_potential;
  /// Ricci potential of the μ = -1 model on the torus grid (∫exp(f) = V).
  std::optional<Field> synthetic_f;
  int max_steps = 200;
  double stop_tol_sup = 1e-11;
  /// Möbius gauge fixing after every step; defaults to on for the sphere.
  std::optional<bool> gauge_fix;
  bool functionals = true;
  bool green_bounds = false;
  /// Number of Green sources; 0 selects 48 (torus) or 64 (sphere).
  int green_sources = 0;
  int k_energy_nodes = 16;
  SemilinearOptions solver{.tol_sup = 1e-12};
  /// Keep every potential in the trajectory (for audits and tests).
  bool keep_states = false;
};

struct StepRecord {
  int k = 0;
  /// ‖ψ_k - ψ_{k-1}‖∞ in the gauge the step equation is posed in.
  double c0_increment = 0.0;
  /// ‖r_k - μ v_k‖∞, the density of Ric ω_k - μ ω_k.
  double curvature_deviation = 0.0;
  FunctionalValues functionals;
  SolveReport solve;
  double positivity_margin = 0.0;
  std::optional<double> green_slack;
  std::optional<double> green_constant;
  /// Normalisation constant of the step: log(V⁻¹∫exp(f - ψ_{k-1})) for
  /// μ = 1, the mean of the raw solution for μ ≤ 0.
  double normalization_constant = 0.0;
  double mobius_parameter = 0.0;
};

struct Trajectory {
  /// "ricci-iteration" or "model-mu-1" for the synthetic μ = -1 problem.
  std::string label;
  int mu = 0;
  std::vector<StepRecord> steps;
  /// Zero-mean potential of the last state (ψ₀ when no step ran).
  std::optional<Field> final_potential;
  bool final_kahler = false;
  bool converged = false;
  /// Functionals of ψ₀ (K-energy only when ψ₀ is Kähler).
  FunctionalValues initial_functionals;
  std::optional<double> reference_green_constant;
  /// Potentials ψ₀..ψ_K in the step gauge, when keep_states is set.
  std::vector<Field> states;
};

/// A step failed; carries everything computed before the failure.
class IterationError : public Error {
 public:
  IterationError(const std::string& what, Trajectory partial, bool internal = false)
      : Error(what), partial_(std::make_shared<Trajectory>(std::move(partial))), internal_(internal) {}
  const Trajectory& partial() const { return *partial_; }
  /// The step failed a post-condition check rather than a solve.
  bool internal() const noexcept { return internal_; }

 private:
  std::shared_ptr<Trajectory> partial_;
  bool internal_;
};

struct StepResult {
  /// Zero-mean ψ_k.
  Field potential;
  /// ψ_k in the gauge of the step equation (μ ≤ 0: raw solution).
  Field natural;
  SolveReport report;
  double normalization_constant = 0.0;
};

/// One time-one Ricci iteration step: solves
/// ω_{ψ_k} = ω · exp(f + (1-μ)ψ_k - ψ_{k-1}).
StepResult ricci_step(const Field& previous, int mu, const Field& f, const SemilinearOptions& solver = {},
                      const std::optional<Field>& initial_guess = std::nullopt);

/// Validates cfg and throws Error describing the first violation.
void validate(const IterationConfig& cfg);

Trajectory run_iteration(const IterationConfig& cfg);

struct ForwardRecord {
  int k = 0;
  double c0_increment = 0.0;
  /// Minimum of Ric of the previous state (the density of this state).
  double ricci_minimum = 0.0;
  double positivity_margin = 0.0;
  double curvature_deviation = 0.0;
};

struct ForwardTrajectory {
  std::vector<ForwardRecord> steps;
  /// States ω₀..ω_K (zero-mean potentials).
  std::vector<Field> states;
  bool lost_positivity = false;
  /// min Ric of the last state when positivity was lost.
  double terminal_margin = 0.0;
};

/// Iterates ω ↦ Ric ω on the sphere until Ric stops being positive.
ForwardTrajectory run_forward_iteration(const IterationConfig& cfg);

/// First k ≥ 1 whose state is within tol of ψ₀ (sup norm), if any.
std::optional<int> find_return_to_initial(const ForwardTrajectory& t, double tol = 1e-9);

/// ‖r - μv‖∞ for a state; f is the model Ricci potential (zero for the
/// genuine backends).
double curvature_deviation(const MetricState& m, int mu, const std::optional<Field>& model_f = std::nullopt);

}  // namespace ricci
