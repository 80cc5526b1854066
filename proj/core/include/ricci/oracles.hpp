#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ricci/elliptic.hpp"
#include "ricci/functionals.hpp"
#include "ricci/geometry.hpp"
#include "ricci/kahler.hpp"

// Naive dense reference implementations. They share no code path with the
// FFT and Legendre transforms and are capped at 32 nodes per axis.
namespace ricci::oracles {

inline constexpr int max_resolution = 32;

/// Throws OracleRefusal when the backend exceeds the resolution cap.
void require_oracle_size(const Backend& backend);

/// Explicit matrix of Δ acting on nodal values. Torus: Fourier collocation
/// second-derivative matrices in Kronecker-sum form. Sphere: (1-x²)D² - 2xD
/// with the barycentric differentiation matrix D on the Gauss nodes.
Eigen::MatrixXd dense_laplacian(const Backend& backend);

/// Zero-mean u with Δu = g - mean(g), via a bordered dense system.
Field dense_inverse_laplacian(const Field& g);

/// Damped Newton on the dense discretization of ½Δu = exp(s + a u) - t.
/// Pointwise exponential, LU inner solve. Throws SolverStallError.
Field dense_semilinear_solve(const SemilinearProblem& problem, double tol_sup = 1e-12, int max_newton = 60);

/// Green columns by dense inversion of -½Δ_ref G = V e_y / w_y - v with
/// zero v-weighted mean.
GreenData dense_green(const MetricState& m, const std::vector<std::size_t>& sources);

/// Σ_{k≠0} (2/|k|²) cos(k·(x - y)) over the grid's Fourier modes: the flat
/// torus Green function of the reference metric at nodes i and j.
double lattice_green(const Backend& torus, std::size_t i, std::size_t j);

/// Eigenvalue l(l+1) of -Δ on the l-th zonal harmonic.
double sphere_eigenvalue(int l);

/// Derivative of the step map ψ_{k-1} ↦ ψ_k at the fixed point on an
/// eigenmode with -Δ e = λ e. μ = 1: 2/λ (0 on constants, which are gauged
/// away). μ = 0: 1/(1 + λ/2). μ = -1: 1/(2 + λ/2).
double linearized_step_factor(int mu, double lambda);

/// Growth factor λ/2 of the forward map ω ↦ Ric ω at the round sphere.
double linearized_forward_factor(double lambda);

}  // namespace ricci::oracles
