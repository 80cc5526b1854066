#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "ricci/field.hpp"

namespace ricci {

enum class BackendKind { torus, sphere };

/// Spectral coefficients of a field.
///
/// Torus: normalized 2-D Fourier coefficients, full n1 x n2 complex layout
/// (row-major, x index outermost). Sphere: coefficients of the standard
/// Legendre polynomials P_l, l = 0..n-1.
struct SpectralCoeffs {
  BackendKind kind = BackendKind::sphere;
  std::vector<std::complex<double>> fourier;
  std::vector<double> legendre;
  int band_limit = 0;
};

/// A model surface carrying the reference Kähler form.
///
/// Conventions: the Laplacian is the Laplace-Beltrami operator of the
/// reference metric (nonpositive spectrum) and i∂∂̄φ = ½(Δφ)ω, so the
/// conformal density of ω_ψ relative to ω is 1 + ½Δψ.
///
/// Backends are immutable after construction and safe to share between
/// threads.
class Backend : public std::enable_shared_from_this<Backend> {
 public:
  virtual ~Backend() = default;

  virtual BackendKind kind() const = 0;
  /// Kind, resolution and periods; fields combine only when these agree.
  virtual std::string signature() const = 0;
  virtual std::size_t size() const = 0;
  /// Total area ∫ω.
  virtual double volume() const = 0;
  virtual int euler_characteristic() const = 0;
  /// Gauss curvature of the reference metric.
  virtual double reference_curvature() const = 0;
  /// Sign μ with c₁ = μ[ω] for the reference class.
  virtual int canonical_mu() const = 0;

  /// Area weights of the collocation quadrature; they sum to volume().
  virtual const std::vector<double>& area_weights() const = 0;

  virtual SpectralCoeffs transform(const Field& f) const = 0;
  virtual Field inverse_transform(const SpectralCoeffs& c) const = 0;

  /// Applies the multiplier m(λ) to every eigenmode, where -Δ e = λ e.
  virtual Field spectral_multiply(const Field& f, const std::function<double(double)>& multiplier) const = 0;

  /// Pointwise nonlinearity. With dealiasing on, fn is applied on a 2x
  /// oversampled grid and the result projected back to the band limit.
  virtual Field nonlinear(const Field& f, const std::function<double(double)>& fn) const = 0;

  /// Eigenvalues λ of -Δ for every retained spectral mode (used by oracles
  /// and linearization checks).
  virtual std::vector<double> eigenvalues() const = 0;

  bool dealias() const { return dealias_; }

  std::shared_ptr<const Backend> handle() const { return shared_from_this(); }

  // Field construction helpers.
  Field constant(double value) const;
  Field zeros() const { return constant(0.0); }
  Field from_values(std::vector<double> values) const;

 protected:
  explicit Backend(bool dealias) : dealias_(dealias) {}

 private:
  bool dealias_;
};

/// Flat torus ℝ²/(L1 ℤ × L2 ℤ) sampled on an n1 x n2 uniform grid.
class TorusBackend;
/// Round unit sphere restricted to axisymmetric data, Gauss-Legendre nodes
/// in x = cos θ.
class SphereBackend;

struct TorusSpec {
  int n1 = 128;
  int n2 = 128;
  double l1 = 2.0 * std::numbers::pi;
  double l2 = 2.0 * std::numbers::pi;
  bool dealias = true;
};

struct SphereSpec {
  int n = 256;
  bool dealias = true;
};

std::shared_ptr<const TorusBackend> make_torus(const TorusSpec& spec = {});
std::shared_ptr<const SphereBackend> make_sphere(const SphereSpec& spec = {});

/// ∫ f·weight dA with the backend's quadrature. weight must be strictly
/// positive when given.
double integrate(const Field& f);
double integrate(const Field& f, const Field& weight);
double mean(const Field& f);

Field laplacian(const Field& f);

/// Zero-mean u with Δu = g - mean(g). Throws InfeasibleRhsError when
/// |mean(g)| exceeds solvability_tol (relative to max(1, ‖g‖∞)).
Field inverse_laplacian_zero_mean(const Field& g, double solvability_tol = 1e-10);

/// v = 1 + ½Δψ, the density of ω_ψ against ω. Positivity is not enforced.
Field conformal_density(const Field& psi);

Field remove_mean(const Field& f);

}  // namespace ricci
