#pragma once

#include <vector>

#include "ricci/geometry.hpp"

namespace ricci {

class SphereBackend final : public Backend {
 public:
  explicit SphereBackend(const SphereSpec& spec);

  BackendKind kind() const override { return BackendKind::sphere; }
  std::string signature() const override;
  std::size_t size() const override { return static_cast<std::size_t>(n_); }
  double volume() const override { return 4.0 * std::numbers::pi; }
  int euler_characteristic() const override { return 2; }
  double reference_curvature() const override { return 1.0; }
  int canonical_mu() const override { return 1; }
  const std::vector<double>& area_weights() const override { return area_weights_; }

  SpectralCoeffs transform(const Field& f) const override;
  Field inverse_transform(const SpectralCoeffs& c) const override;
  Field spectral_multiply(const Field& f, const std::function<double(double)>& multiplier) const override;
  Field nonlinear(const Field& f, const std::function<double(double)>& fn) const override;
  std::vector<double> eigenvalues() const override;

  int n() const { return n_; }
  /// Gauss-Legendre nodes in x = cos θ, ascending.
  const std::vector<double>& nodes() const { return nodes_; }
  /// Gauss-Legendre weights on [-1, 1] (sum 2).
  const std::vector<double>& gauss_weights() const { return gauss_weights_; }

  /// Legendre coefficients a_l (f = Σ a_l P_l).
  std::vector<double> legendre_coefficients(const Field& f) const;
  Field from_legendre(const std::vector<double>& coeffs) const;
  /// Evaluates the degree < n interpolant of f at arbitrary x in [-1, 1].
  double evaluate(const std::vector<double>& coeffs, double x) const;

  Field from_function(const std::function<double(double)>& fn) const;

 private:
  std::vector<double> analyse(std::span<const double> values, const std::vector<double>& basis,
                              const std::vector<double>& weights, int points) const;
  std::vector<double> synthesise(const std::vector<double>& normalized, const std::vector<double>& basis,
                                 int points) const;

  int n_;
  std::vector<double> nodes_, gauss_weights_, area_weights_;
  // Orthonormal Legendre p̃_l(x) = sqrt((2l+1)/2) P_l(x), row-major [point][l].
  std::vector<double> basis_;
  std::vector<double> fine_nodes_, fine_weights_, fine_basis_;
};

/// Standard Legendre polynomial P_l(x) by three-term recurrence.
double legendre_p(int l, double x);

}  // namespace ricci
