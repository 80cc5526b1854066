#pragma once

#include <optional>

#include "ricci/field.hpp"

namespace ricci {

/// A Kähler metric ω_ψ = ω + i∂∂̄ψ in the reference class.
///
/// The potential is stored with zero mean; the density v = 1 + ½Δψ is cached
/// and must be strictly positive (checked on construction).
class MetricState {
 public:
  /// Throws NotKahlerError when min(1 + ½Δψ) <= 0.
  static MetricState from_potential(const Field& psi);
  /// The metric whose density is v (positive, integrating to V).
  static MetricState from_density(const Field& density);
  static MetricState reference(const std::shared_ptr<const class Backend>& backend);

  const Field& potential() const { return psi_; }
  const Field& density() const { return v_; }
  double positivity_margin() const { return margin_; }
  const Backend& backend() const { return psi_.backend(); }

 private:
  MetricState(Field psi, Field v);
  Field psi_;
  Field v_;
  double margin_;
};

/// Ric ω_ψ = r·ω with r = K_ref - ½Δ log v.
struct RicciData {
  Field ricci_density;
  bool positive = false;
  double minimum = 0.0;
};

RicciData ricci_form(const MetricState& m);

/// f with i∂∂̄f = Ric ω_ψ - μ ω_ψ, normalised by ∫exp(f) ω_ψ = V.
/// Throws ClassMismatchError when ∫(r - μv) does not vanish.
Field ricci_potential(const MetricState& m, int mu);

/// The unique ω_φ in c₁ with Ric ω_φ = h·ω (sphere only). The result is
/// verified by substitution; failure raises InternalConsistencyError.
MetricState inverse_ricci(const Field& target_density);

struct ForwardOutcome {
  std::optional<MetricState> state;
  /// Minimum of the Ricci density of the input metric.
  double ricci_minimum = 0.0;
  bool positive() const { return state.has_value(); }
};

/// Nadel's forward map ω ↦ Ric ω (sphere only). When Ric ω is not positive
/// the outcome carries no state.
ForwardOutcome forward_ricci(const MetricState& m);

struct NormalizedPotential {
  Field potential;
  double constant;
};

/// ψ̃ = ψ + c with ∫exp(f - ψ̃) dA = V, c in closed form.
NormalizedPotential normalize_for_step(const Field& psi, const Field& f);

/// Axial Möbius parameter t that centres the area measure of m (sphere only).
double mobius_parameter(const MetricState& m);
/// Pullback of m along x ↦ (x - t)/(1 - t x) with t = mobius_parameter(m).
MetricState mobius_gauge_fix(const MetricState& m);
/// Pullback along the axial Möbius map with a given parameter.
MetricState mobius_pullback(const MetricState& m, double t);

/// ∫ x·v dA on the sphere (zero for a centred metric).
double area_moment(const MetricState& m);

}  // namespace ricci
