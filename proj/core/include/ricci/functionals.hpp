#pragma once

#include <optional>
#include <vector>

#include "ricci/field.hpp"
#include "ricci/kahler.hpp"

namespace ricci {

/// Energies of ω_ψ measured against the reference form.
struct FunctionalValues {
  double I = 0.0;
  double J = 0.0;
  std::optional<double> ding;
  std::optional<double> k_energy;
};

/// Aubin I = V⁻¹∫ψ(1 - v).
double aubin_I(const Field& psi);

/// Aubin J by Gauss-Legendre quadrature along the affine path tψ.
double aubin_J(const Field& psi, int path_nodes = 8);

/// Ding energy J(ψ) - V⁻¹∫ψ - log(V⁻¹∫exp(f - ψ)).
double ding_functional(const Field& psi, const Field& f);

/// Mabuchi K-energy -V⁻¹∫₀¹∫ψ (s_t - s̄) v_t dA dt along ψ_t = tψ, with the
/// real scalar curvature s_t = 2 r_t / v_t. Throws PathError if some v_t is
/// not positive.
double k_energy(const Field& psi, int path_nodes = 16);

/// Differential of the K-energy at ψ in direction η:
/// -V⁻¹∫η (s - s̄) v dA.
double k_energy_differential(const Field& psi, const Field& direction);

/// Green function of -Δ_ψ (Δ_ψ = ½ v⁻¹ Δ_ref) with -Δ_ψ G(·,y) = V δ_y - 1
/// and ∫G(·,y) v dA = 0. The discrete δ_y is the quadrature-dual point mass
/// at node y.
struct GreenData {
  std::vector<std::size_t> sources;
  std::vector<Field> columns;
  /// -min over every computed value.
  double A = 0.0;
};

GreenData green_function(const MetricState& m, const std::vector<std::size_t>& sources);

/// count node indices spread evenly over the grid.
std::vector<std::size_t> default_green_sources(const Backend& backend, int count);

/// (A_ref + A_k) + I(ω, ω_ψ) - ‖ψ‖∞ for the zero-mean potential ψ of ω_k
/// relative to the reference form (complex dimension n = 1).
double green_bound_slack(const Field& psi, double a_reference, double a_state);

/// Cap on diagnostic worker threads (RICCI_ITER_THREADS, default: hardware).
int diagnostic_thread_cap();

FunctionalValues evaluate_functionals(const Field& psi, const std::optional<Field>& ding_potential,
                                      bool kahler, int path_nodes = 16);

}  // namespace ricci
