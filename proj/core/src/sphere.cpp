#include "ricci/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <numbers>
#include <sstream>

#include "ricci/errors.hpp"
#include "ricci/quadrature.hpp"

namespace ricci {

namespace {

// Orthonormal Legendre values p̃_l(x) for l < modes at every point.
std::vector<double> orthonormal_basis(const std::vector<double>& points, int modes) {
  const std::size_t np = points.size();
  std::vector<double> basis(np * modes);
  for (std::size_t i = 0; i < np; ++i) {
    const double x = points[i];
    double p0 = 1.0, p1 = x;
    for (int l = 0; l < modes; ++l) {
      double p;
      if (l == 0) {
        p = 1.0;
      } else if (l == 1) {
        p = x;
      } else {
        p = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = p;
      }
      basis[i * modes + l] = std::sqrt((2.0 * l + 1.0) / 2.0) * p;
    }
  }
  return basis;
}

// Midrange of the values. Transforms act on f - c so that a dominant
// constant does not leak roundoff into high modes, where Δ amplifies it.
double centre_of(std::span<const double> v) {
  double lo = v[0], hi = v[0];
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return 0.5 * (lo + hi);
}

std::vector<double> shifted(std::span<const double> v, double c) {
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x -= c;
  return out;
}

}  // namespace

double legendre_p(int l, double x) {
  if (l == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

SphereBackend::SphereBackend(const SphereSpec& spec) : Backend(spec.dealias), n_(spec.n) {
  if (n_ < 2) throw Error("sphere: resolution must be at least 2");
  auto rule = gauss_legendre(n_);
  nodes_ = std::move(rule.nodes);
  gauss_weights_ = std::move(rule.weights);
  area_weights_.resize(n_);
  for (int i = 0; i < n_; ++i) area_weights_[i] = 2.0 * std::numbers::pi * gauss_weights_[i];
  basis_ = orthonormal_basis(nodes_, n_);
  if (spec.dealias) {
    auto fine = gauss_legendre(2 * n_);
    fine_nodes_ = std::move(fine.nodes);
    fine_weights_ = std::move(fine.weights);
    fine_basis_ = orthonormal_basis(fine_nodes_, n_);
  }
}

std::string SphereBackend::signature() const { return "sphere(" + std::to_string(n_) + ")"; }

std::vector<double> SphereBackend::analyse(std::span<const double> values, const std::vector<double>& basis,
                                           const std::vector<double>& weights, int points) const {
  std::vector<double> c(n_, 0.0);
  for (int i = 0; i < points; ++i) {
    const double wf = weights[i] * values[i];
    const double* row = &basis[static_cast<std::size_t>(i) * n_];
    for (int l = 0; l < n_; ++l) c[l] += wf * row[l];
  }
  return c;
}

std::vector<double> SphereBackend::synthesise(const std::vector<double>& normalized,
                                              const std::vector<double>& basis, int points) const {
  std::vector<double> v(points, 0.0);
  for (int i = 0; i < points; ++i) {
    const double* row = &basis[static_cast<std::size_t>(i) * n_];
    double s = 0.0;
    for (int l = 0; l < n_; ++l) s += normalized[l] * row[l];
    v[i] = s;
  }
  return v;
}

std::vector<double> SphereBackend::legendre_coefficients(const Field& f) const {
  if (f.backend().signature() != signature()) throw ShapeError("sphere transform: backend mismatch");
  const double centre = centre_of(f.values());
  auto c = analyse(shifted(f.values(), centre), basis_, gauss_weights_, n_);
  for (int l = 0; l < n_; ++l) c[l] *= std::sqrt((2.0 * l + 1.0) / 2.0);
  c[0] += centre;
  return c;
}

Field SphereBackend::from_legendre(const std::vector<double>& coeffs) const {
  if (coeffs.size() > static_cast<std::size_t>(n_)) throw ShapeError("sphere: too many Legendre coefficients");
  std::vector<double> normalized(n_, 0.0);
  for (std::size_t l = 0; l < coeffs.size(); ++l) normalized[l] = coeffs[l] / std::sqrt((2.0 * l + 1.0) / 2.0);
  return from_values(synthesise(normalized, basis_, n_));
}

double SphereBackend::evaluate(const std::vector<double>& coeffs, double x) const {
  // Clenshaw for Σ a_l P_l(x).
  double b1 = 0.0, b2 = 0.0;
  for (int l = static_cast<int>(coeffs.size()) - 1; l >= 0; --l) {
    const double alpha = (2.0 * l + 1.0) / (l + 1.0) * x;
    const double beta = -(l + 1.0) / (l + 2.0);
    const double b0 = coeffs[l] + alpha * b1 + beta * b2;
    b2 = b1;
    b1 = b0;
  }
  return b1;
}

SpectralCoeffs SphereBackend::transform(const Field& f) const {
  SpectralCoeffs c;
  c.kind = BackendKind::sphere;
  c.legendre = legendre_coefficients(f);
  c.band_limit = n_ - 1;
  return c;
}

Field SphereBackend::inverse_transform(const SpectralCoeffs& c) const {
  if (c.kind != BackendKind::sphere) throw ShapeError("sphere inverse_transform: coefficient layout mismatch");
  return from_legendre(c.legendre);
}

Field SphereBackend::spectral_multiply(const Field& f, const std::function<double(double)>& multiplier) const {
  if (f.backend().signature() != signature()) throw ShapeError("sphere spectral_multiply: backend mismatch");
  const double centre = centre_of(f.values());
  auto c = analyse(shifted(f.values(), centre), basis_, gauss_weights_, n_);
  for (int l = 0; l < n_; ++l) c[l] *= multiplier(static_cast<double>(l) * (l + 1));
  auto v = synthesise(c, basis_, n_);
  const double constant_part = multiplier(0.0) * centre;
  for (double& x : v) x += constant_part;
  return from_values(std::move(v));
}

std::vector<double> SphereBackend::eigenvalues() const {
  std::vector<double> lambda(n_);
  for (int l = 0; l < n_; ++l) lambda[l] = static_cast<double>(l) * (l + 1);
  return lambda;
}

Field SphereBackend::nonlinear(const Field& f, const std::function<double(double)>& fn) const {
  if (f.backend().signature() != signature()) throw ShapeError("sphere nonlinear: backend mismatch");
  if (!dealias()) return f.map(fn).require_finite("nonlinear");
  const int m = 2 * n_;
  const double centre_in = centre_of(f.values());
  const auto c = analyse(shifted(f.values(), centre_in), basis_, gauss_weights_, n_);
  auto fine = synthesise(c, fine_basis_, m);
  for (double& v : fine) v = fn(v + centre_in);
  const double centre_out = centre_of(fine);
  const auto projected = analyse(shifted(fine, centre_out), fine_basis_, fine_weights_, m);
  auto out = synthesise(projected, basis_, n_);
  for (double& v : out) v += centre_out;
  return from_values(std::move(out)).require_finite("nonlinear");
}

Field SphereBackend::from_function(const std::function<double(double)>& fn) const {
  std::vector<double> v(n_);
  for (int i = 0; i < n_; ++i) v[i] = fn(nodes_[i]);
  return from_values(std::move(v));
}

}  // namespace ricci
