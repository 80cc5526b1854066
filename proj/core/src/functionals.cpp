#include "ricci/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

#include "ricci/errors.hpp"
#include "ricci/geometry.hpp"
#include "ricci/quadrature.hpp"

namespace ricci {

namespace {

double mean_scalar_curvature(const Backend& b) {
  return 4.0 * std::numbers::pi * b.euler_characteristic() / b.volume();
}

}  // namespace

double aubin_I(const Field& psi) {
  const Field v = conformal_density(psi);
  return integrate(psi * (1.0 - v)) / psi.backend().volume();
}

double aubin_J(const Field& psi, int path_nodes) {
  const auto rule = gauss_legendre(path_nodes, 0.0, 1.0);
  const Field lap = 0.5 * laplacian(psi);
  double sum = 0.0;
  for (int q = 0; q < path_nodes; ++q) {
    const Field v_t = 1.0 + rule.nodes[q] * lap;
    sum += rule.weights[q] * integrate(psi * (1.0 - v_t));
  }
  return sum / psi.backend().volume();
}

double ding_functional(const Field& psi, const Field& f) {
  const auto& b = psi.backend();
  const double v = b.volume();
  const Field e = b.nonlinear(f - psi, [](double t) { return std::exp(t); });
  return aubin_J(psi) - integrate(psi) / v - std::log(integrate(e) / v);
}

double k_energy(const Field& psi, int path_nodes) {
  const auto& b = psi.backend();
  const auto rule = gauss_legendre(path_nodes, 0.0, 1.0);
  const Field lap = 0.5 * laplacian(psi);
  const double sbar = mean_scalar_curvature(b);
  // ∫ψ·(-½Δ log v_t) is evaluated as ∫(-½Δψ)·log v_t.
  double sum = 0.0;
  for (int q = 0; q < path_nodes; ++q) {
    const Field v_t = 1.0 + rule.nodes[q] * lap;
    if (!(v_t.min() > 0.0)) throw PathError("k_energy: density vanishes along the affine path");
    const Field log_v = b.nonlinear(v_t, [](double t) { return std::log(t); });
    const Field integrand = psi * (2.0 * b.reference_curvature() - sbar * v_t) - 2.0 * (lap * log_v);
    sum += rule.weights[q] * integrate(integrand);
  }
  return -sum / b.volume();
}

double k_energy_differential(const Field& psi, const Field& direction) {
  const auto& b = psi.backend();
  const Field v = conformal_density(psi);
  if (!(v.min() > 0.0)) throw PathError("k_energy_differential: potential is not Kähler");
  const Field log_v = b.nonlinear(v, [](double t) { return std::log(t); });
  const Field r = b.reference_curvature() - 0.5 * laplacian(log_v);
  return -integrate(direction * (2.0 * r - mean_scalar_curvature(b) * v)) / b.volume();
}

int diagnostic_thread_cap() {
  int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("RICCI_ITER_THREADS")) {
    const int requested = std::atoi(env);
    if (requested > 0) cap = requested;
  }
  return cap;
}

GreenData green_function(const MetricState& m, const std::vector<std::size_t>& sources) {
  const auto& b = m.backend();
  const auto& w = b.area_weights();
  const double vol = b.volume();
  const Field& v = m.density();
  for (auto s : sources) {
    if (s >= b.size()) throw Error("green_function: source index out of range");
  }

  GreenData out;
  out.sources = sources;
  out.columns.assign(sources.size(), b.zeros());

  // -½Δ_ref G = V e_y / w_y - v, then shift to zero v-weighted mean.
  auto column = [&](std::size_t k) {
    Field rhs = -1.0 * v;
    rhs[sources[k]] += vol / w[sources[k]];
    Field g = -2.0 * inverse_laplacian_zero_mean(rhs, 1e-9);
    g -= integrate(g * v) / vol;
    out.columns[k] = std::move(g);
  };

  const int threads = std::min<int>(diagnostic_thread_cap(), static_cast<int>(sources.size()));
  if (threads <= 1) {
    for (std::size_t k = 0; k < sources.size(); ++k) column(k);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t k = t; k < sources.size(); k += threads) column(k);
      });
    }
    for (auto& th : pool) th.join();
  }

  double lowest = 0.0;
  for (const auto& c : out.columns) lowest = std::min(lowest, c.min());
  out.A = -lowest;
  return out;
}

std::vector<std::size_t> default_green_sources(const Backend& backend, int count) {
  const std::size_t n = backend.size();
  const std::size_t c = std::min<std::size_t>(static_cast<std::size_t>(std::max(count, 1)), n);
  std::vector<std::size_t> idx(c);
  for (std::size_t k = 0; k < c; ++k) idx[k] = static_cast<std::size_t>((k + 0.5) * static_cast<double>(n) / c);
  return idx;
}

double green_bound_slack(const Field& psi, double a_reference, double a_state) {
  const Field p = remove_mean(psi);
  return a_reference + a_state + aubin_I(p) - p.sup_norm();
}

FunctionalValues evaluate_functionals(const Field& psi, const std::optional<Field>& ding_potential,
                                      bool kahler, int path_nodes) {
  FunctionalValues out;
  out.I = aubin_I(psi);
  out.J = aubin_J(psi);
  if (ding_potential) out.ding = ding_functional(psi, *ding_potential);
  if (kahler) out.k_energy = k_energy(psi, path_nodes);
  return out;
}

}  // namespace ricci
