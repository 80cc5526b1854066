#include <cmath>
#include <sstream>

#include "ricci/errors.hpp"
#include "ricci/geometry.hpp"
#include "ricci/sphere.hpp"
#include "ricci/torus.hpp"

namespace ricci {

Field Backend::constant(double value) const { return Field::constant(handle(), value); }

Field Backend::from_values(std::vector<double> values) const { return Field(handle(), std::move(values)); }

std::shared_ptr<const TorusBackend> make_torus(const TorusSpec& spec) {
  return std::make_shared<const TorusBackend>(spec);
}

std::shared_ptr<const SphereBackend> make_sphere(const SphereSpec& spec) {
  return std::make_shared<const SphereBackend>(spec);
}

double integrate(const Field& f) {
  const auto& w = f.backend().area_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i];
  return s;
}

double integrate(const Field& f, const Field& weight) {
  f.require_compatible(weight);
  if (weight.min() <= 0.0) throw Error("integrate: weight must be strictly positive");
  const auto& w = f.backend().area_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i] * weight[i];
  return s;
}

double mean(const Field& f) { return integrate(f) / f.backend().volume(); }

Field remove_mean(const Field& f) { return f - mean(f); }

Field laplacian(const Field& f) {
  return f.backend().spectral_multiply(f, [](double lambda) { return -lambda; }).require_finite("laplacian");
}

Field inverse_laplacian_zero_mean(const Field& g, double solvability_tol) {
  const double m = mean(g);
  const double scale = std::max(1.0, g.sup_norm());
  if (std::abs(m) > solvability_tol * scale) {
    std::ostringstream os;
    os << "inverse_laplacian_zero_mean: right-hand side has mean " << m << " (tolerance "
       << solvability_tol * scale << ")";
    throw InfeasibleRhsError(os.str(), m);
  }
  return g.backend()
      .spectral_multiply(g, [](double lambda) { return lambda > 0.0 ? -1.0 / lambda : 0.0; })
      .require_finite("inverse_laplacian_zero_mean");
}

Field conformal_density(const Field& psi) { return 1.0 + 0.5 * laplacian(psi); }

}  // namespace ricci
