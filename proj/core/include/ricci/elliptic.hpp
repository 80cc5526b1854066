#pragma once

#include <vector>

#include "ricci/field.hpp"

namespace ricci {

struct SolveReport {
  int iterations = 0;
  double final_residual_sup = 0.0;
  int damping_events = 0;
  /// Minimum of the density produced by the solve.
  double positivity_margin = 0.0;
  /// Sup-residual after every accepted step, starting with the initial guess.
  std::vector<double> residual_history;
};

/// ½Δu = exp(source + coefficient·u) - target_constant, coefficient > 0.
struct SemilinearProblem {
  Field source;
  double coefficient = 1.0;
  double target_constant = 1.0;
};

struct SemilinearOptions {
  double tol_sup = 1e-10;
  int max_newton = 50;
  int max_halvings = 30;
  int max_cg = 500;
  double cg_relative_tol = 1e-14;
  /// Backends with at most this many nodes solve the Newton system densely.
  std::size_t dense_fallback_size = 64;
};

struct EllipticSolution {
  Field u;
  SolveReport report;
};

/// Zero-mean ψ with ½Δψ = rhs_density - 1. rhs_density must be positive and
/// integrate to V (relative tolerance 1e-9).
EllipticSolution solve_poisson_step(const Field& rhs_density);

/// Damped Newton for the monotone semilinear problem. Throws
/// SolverStallError with the residual history when the tolerance is not met.
EllipticSolution solve_semilinear(const SemilinearProblem& problem, const Field& initial_guess,
                                  const SemilinearOptions& options = {});

/// Sup-norm of ½Δu - exp(source + a·u) + target_constant.
double semilinear_residual(const SemilinearProblem& problem, const Field& u);

}  // namespace ricci
