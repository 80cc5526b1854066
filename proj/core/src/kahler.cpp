#include "ricci/kahler.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ricci/elliptic.hpp"
#include "ricci/errors.hpp"
#include "ricci/geometry.hpp"
#include "ricci/sphere.hpp"

namespace ricci {

namespace {

const SphereBackend& require_sphere(const Backend& b, const char* what) {
  const auto* s = dynamic_cast<const SphereBackend*>(&b);
  if (!s) throw UnsupportedError(std::string(what) + " requires the sphere backend");
  return *s;
}

Field exp_of(const Field& f) {
  return f.backend().nonlinear(f, [](double t) { return std::exp(t); });
}

}  // namespace

MetricState::MetricState(Field psi, Field v) : psi_(std::move(psi)), v_(std::move(v)), margin_(v_.min()) {}

MetricState MetricState::from_potential(const Field& psi) {
  Field p = remove_mean(psi);
  Field v = conformal_density(p);
  const double margin = v.min();
  if (!(margin > 0.0)) {
    std::ostringstream os;
    os << "potential does not define a Kähler form (min density " << margin << ")";
    throw NotKahlerError(os.str(), margin);
  }
  return MetricState(std::move(p), std::move(v));
}

MetricState MetricState::from_density(const Field& density) {
  return from_potential(solve_poisson_step(density).u);
}

MetricState MetricState::reference(const std::shared_ptr<const Backend>& backend) {
  return from_potential(backend->zeros());
}

RicciData ricci_form(const MetricState& m) {
  const auto& backend = m.backend();
  const Field log_v = backend.nonlinear(m.density(), [](double t) { return std::log(t); });
  RicciData out{backend.reference_curvature() - 0.5 * laplacian(log_v), false, 0.0};
  out.minimum = out.ricci_density.min();
  out.positive = out.minimum > 0.0;
  return out;
}

Field ricci_potential(const MetricState& m, int mu) {
  const auto& backend = m.backend();
  const Field g = ricci_form(m).ricci_density - static_cast<double>(mu) * m.density();
  const double total = integrate(g);
  if (std::abs(total) > 1e-8 * backend.volume()) {
    std::ostringstream os;
    os << "ricci_potential: Ric - mu*omega has total " << total << " (wrong sign mu = " << mu << "?)";
    throw ClassMismatchError(os.str());
  }
  Field f = inverse_laplacian_zero_mean(2.0 * g, 1e-7);
  const double c = std::log(backend.volume() / integrate(exp_of(f) * m.density()));
  return f + c;
}

MetricState inverse_ricci(const Field& target_density) {
  const auto& backend = target_density.backend();
  require_sphere(backend, "inverse_ricci");
  const double v = backend.volume();
  const double total = integrate(target_density);
  if (std::abs(total - v) > 1e-9 * v) {
    std::ostringstream os;
    os.precision(17);
    os << "inverse_ricci: target integrates to " << total << ", not to 2*pi*chi = " << v;
    throw ClassMismatchError(os.str());
  }
  // Ric ω_φ = h ω  <=>  ½Δ log v = 1 - h  <=>  log v = -F + c with ½ΔF = h - 1.
  const Field potential = inverse_laplacian_zero_mean(2.0 * (target_density - 1.0), 1e-8);
  Field density = exp_of(-potential);
  density *= v / integrate(density);
  MetricState result = MetricState::from_density(density);

  const double err = sup_distance(ricci_form(result).ricci_density, target_density);
  // Ric is fourth order in the potential: roundoff of the O(1) density in
  // its top mode is amplified by (½λ_max)².
  const auto lambdas = backend.eigenvalues();
  const double top = 0.5 * *std::max_element(lambdas.begin(), lambdas.end());
  const double scale = std::max(1.0, target_density.sup_norm());
  const double tol = (1e-8 + 4.0 * std::numeric_limits<double>::epsilon() * top * top) * scale;
  if (err > tol) {
    std::ostringstream os;
    os << "inverse_ricci: verification failed, |Ric - h| = " << err << " (resolution too low?)";
    throw InternalConsistencyError(os.str());
  }
  return result;
}

ForwardOutcome forward_ricci(const MetricState& m) {
  require_sphere(m.backend(), "forward_ricci");
  RicciData r = ricci_form(m);
  ForwardOutcome out;
  out.ricci_minimum = r.minimum;
  if (r.positive) out.state = MetricState::from_density(r.ricci_density);
  return out;
}

NormalizedPotential normalize_for_step(const Field& psi, const Field& f) {
  const double v = psi.backend().volume();
  const double c = std::log(integrate(exp_of(f - psi)) / v);
  return {psi + c, c};
}

double area_moment(const MetricState& m) {
  const auto& s = require_sphere(m.backend(), "area_moment");
  const auto& w = s.area_weights();
  const auto& x = s.nodes();
  double sum = 0.0;
  for (int i = 0; i < s.n(); ++i) sum += w[i] * x[i] * m.density()[i];
  return sum;
}

double mobius_parameter(const MetricState& m) {
  const auto& s = require_sphere(m.backend(), "mobius_gauge_fix");
  const auto& w = s.area_weights();
  const auto& x = s.nodes();
  const Field& v = m.density();
  // Moment of the pulled-back density, written on the original grid:
  // ∫ x v'(x) dA = ∫ F⁻¹(y) v(y) dA with F⁻¹(y) = (y + t)/(1 + t y).
  auto moment = [&](double t) {
    double sum = 0.0;
    for (int i = 0; i < s.n(); ++i) sum += w[i] * (x[i] + t) / (1.0 + t * x[i]) * v[i];
    return sum;
  };
  const double m0 = moment(0.0);
  if (std::abs(m0) <= 1e-15 * s.volume()) return 0.0;

  const double lo = -1.0 + 1e-12, hi = 1.0 - 1e-12;
  const double flo = moment(lo), fhi = moment(hi);
  if (!(flo < 0.0 && fhi > 0.0)) throw GaugeFixError("mobius_gauge_fix: moment root is not bracketed");
  std::uintmax_t iterations = 200;
  auto [a, b] = boost::math::tools::toms748_solve(moment, lo, hi, flo, fhi,
                                                  boost::math::tools::eps_tolerance<double>(52), iterations);
  return 0.5 * (a + b);
}

MetricState mobius_pullback(const MetricState& m, double t) {
  const auto& s = require_sphere(m.backend(), "mobius_pullback");
  if (!(std::abs(t) < 1.0)) throw GaugeFixError("mobius_pullback: parameter outside (-1, 1)");
  const auto coeffs = s.legendre_coefficients(m.density());
  const auto& x = s.nodes();
  std::vector<double> pulled(s.n());
  for (int i = 0; i < s.n(); ++i) {
    const double denom = 1.0 - t * x[i];
    const double y = (x[i] - t) / denom;
    pulled[i] = s.evaluate(coeffs, y) * (1.0 - t * t) / (denom * denom);
  }
  Field density = s.from_values(std::move(pulled));
  const double total = integrate(density);
  if (std::abs(total - s.volume()) > 1e-9 * s.volume() || !(density.min() > 0.0)) {
    throw GaugeFixError("mobius_pullback: pulled-back metric is under-resolved");
  }
  density *= s.volume() / total;
  return MetricState::from_density(density);
}

MetricState mobius_gauge_fix(const MetricState& m) {
  const double t = mobius_parameter(m);
  if (t == 0.0) return m;
  return mobius_pullback(m, t);
}

}  // namespace ricci
