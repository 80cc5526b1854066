#pragma once

#include <complex>
#include <vector>

#include "ricci/geometry.hpp"

namespace ricci {

class TorusBackend final : public Backend {
 public:
  explicit TorusBackend(const TorusSpec& spec);
  ~TorusBackend() override;

  TorusBackend(const TorusBackend&) = delete;
  TorusBackend& operator=(const TorusBackend&) = delete;

  BackendKind kind() const override { return BackendKind::torus; }
  std::string signature() const override;
  std::size_t size() const override { return static_cast<std::size_t>(n1_) * n2_; }
  double volume() const override { return l1_ * l2_; }
  int euler_characteristic() const override { return 0; }
  double reference_curvature() const override { return 0.0; }
  int canonical_mu() const override { return 0; }
  const std::vector<double>& area_weights() const override { return weights_; }

  SpectralCoeffs transform(const Field& f) const override;
  Field inverse_transform(const SpectralCoeffs& c) const override;
  Field spectral_multiply(const Field& f, const std::function<double(double)>& multiplier) const override;
  Field nonlinear(const Field& f, const std::function<double(double)>& fn) const override;
  std::vector<double> eigenvalues() const override;

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  double l1() const { return l1_; }
  double l2() const { return l2_; }
  /// Node (i, j) sits at (x_i, y_j); flat index is i*n2 + j.
  double x(int i) const { return l1_ * i / n1_; }
  double y(int j) const { return l2_ * j / n2_; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n2_ + j; }

  /// Signed integer wavenumber for FFT index m of an n-point axis.
  static int signed_mode(int m, int n) { return m <= n / 2 ? m : m - n; }
  double wavevector_x(int i) const;
  double wavevector_y(int j) const;

  Field from_function(const std::function<double(double, double)>& fn) const;

 private:
  struct Plans;

  std::vector<std::complex<double>> forward_complex(std::span<const double> values, int n1, int n2) const;
  std::vector<double> inverse_real(const std::vector<std::complex<double>>& coeffs, int n1, int n2) const;

  int n1_, n2_;
  double l1_, l2_;
  std::vector<double> weights_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace ricci
