#include "ricci/elliptic.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "ricci/errors.hpp"
#include "ricci/geometry.hpp"

namespace ricci {

namespace {

double weighted_dot(const Field& a, const Field& b) {
  const auto& w = a.backend().area_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
  return s;
}

Field density_of(const SemilinearProblem& problem, const Field& u) {
  return problem.source.backend().nonlinear(problem.source + problem.coefficient * u,
                                            [](double t) { return std::exp(t); });
}

Field residual_field(const SemilinearProblem& problem, const Field& u) {
  return 0.5 * laplacian(u) - density_of(problem, u) + problem.target_constant;
}

// Solves (-½Δ + a·E) δ = rhs. The operator is symmetric positive definite in
// the quadrature inner product; preconditioned by the constant-coefficient
// operator -½Δ + a·mean(E), which is diagonal in spectral space.
Field solve_newton_system_cg(const Field& multiplier, double a, const Field& rhs, const SemilinearOptions& opt) {
  const auto& backend = rhs.backend();
  const double shift = a * mean(multiplier);
  auto apply = [&](const Field& x) { return -0.5 * laplacian(x) + a * (multiplier * x); };
  auto precondition = [&](const Field& r) {
    return backend.spectral_multiply(r, [shift](double lambda) { return 1.0 / (0.5 * lambda + shift); });
  };

  Field x = backend.zeros();
  Field r = rhs;
  Field z = precondition(r);
  Field p = z;
  double rz = weighted_dot(r, z);
  const double target = opt.cg_relative_tol * std::sqrt(weighted_dot(rhs, rhs));
  for (int it = 0; it < opt.max_cg; ++it) {
    if (std::sqrt(weighted_dot(r, r)) <= target) return x;
    const Field ap = apply(p);
    const double alpha = rz / weighted_dot(p, ap);
    x += alpha * p;
    r -= alpha * ap;
    z = precondition(r);
    const double rz_next = weighted_dot(r, z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  // Loose convergence is tolerated: Newton only needs a descent direction and
  // the outer sup-residual test decides acceptance.
  return x;
}

Field solve_newton_system_dense(const Field& multiplier, double a, const Field& rhs) {
  const auto& backend = rhs.backend();
  const auto n = static_cast<Eigen::Index>(rhs.size());
  Eigen::MatrixXd op(n, n);
  Field unit = backend.zeros();
  for (Eigen::Index j = 0; j < n; ++j) {
    unit[j] = 1.0;
    const Field col = laplacian(unit);
    for (Eigen::Index i = 0; i < n; ++i) op(i, j) = -0.5 * col[i];
    op(j, j) += a * multiplier[j];
    unit[j] = 0.0;
  }
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) b(i) = rhs[i];
  const Eigen::VectorXd x = op.partialPivLu().solve(b);
  return backend.from_values(std::vector<double>(x.data(), x.data() + n));
}

}  // namespace

EllipticSolution solve_poisson_step(const Field& rhs_density) {
  const auto& backend = rhs_density.backend();
  const double margin = rhs_density.min();
  if (!(margin > 0.0)) {
    throw InfeasibleRhsError("solve_poisson_step: density is not strictly positive", margin);
  }
  const double total = integrate(rhs_density);
  const double v = backend.volume();
  if (std::abs(total - v) > 1e-9 * v) {
    std::ostringstream os;
    os.precision(17);
    os << "solve_poisson_step: density integrates to " << total << ", expected " << v;
    throw InfeasibleRhsError(os.str(), total / v - 1.0);
  }
  const Field g = 2.0 * (rhs_density - 1.0);
  Field psi = inverse_laplacian_zero_mean(g, 1e-8);
  EllipticSolution out{std::move(psi), {}};
  out.report.iterations = 1;
  out.report.final_residual_sup = sup_distance(0.5 * laplacian(out.u), rhs_density - 1.0 - (total / v - 1.0));
  out.report.positivity_margin = margin;
  out.report.residual_history = {out.report.final_residual_sup};
  return out;
}

double semilinear_residual(const SemilinearProblem& problem, const Field& u) {
  return residual_field(problem, u).sup_norm();
}

EllipticSolution solve_semilinear(const SemilinearProblem& problem, const Field& initial_guess,
                                  const SemilinearOptions& options) {
  if (!(problem.coefficient > 0.0)) throw Error("solve_semilinear: coefficient must be positive");
  if (!(options.tol_sup > 0.0)) throw Error("solve_semilinear: tolerance must be positive");
  problem.source.require_compatible(initial_guess);

  const auto& backend = problem.source.backend();
  const double a = problem.coefficient;
  const bool dense = backend.size() <= options.dense_fallback_size;

  Field u = initial_guess;
  Field residual = residual_field(problem, u);
  double rsup = residual.sup_norm();
  SolveReport report;
  report.residual_history.push_back(rsup);

  while (rsup > options.tol_sup) {
    if (report.iterations >= options.max_newton) {
      std::ostringstream os;
      os << "solve_semilinear: no convergence after " << options.max_newton << " Newton steps (residual " << rsup
         << ")";
      throw SolverStallError(os.str(), report.residual_history);
    }
    const Field multiplier = (problem.source + a * u).map([](double t) { return std::exp(t); });
    const Field delta = dense ? solve_newton_system_dense(multiplier, a, residual)
                              : solve_newton_system_cg(multiplier, a, residual, options);

    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h) {
      Field trial = u + step * delta;
      Field trial_residual = residual_field(problem, trial);
      const double trial_sup = trial_residual.sup_norm();
      if (trial_sup < rsup) {
        u = std::move(trial);
        residual = std::move(trial_residual);
        rsup = trial_sup;
        accepted = true;
        break;
      }
      step *= 0.5;
      ++report.damping_events;
    }
    if (!accepted) {
      std::ostringstream os;
      os << "solve_semilinear: line search stalled at residual " << rsup;
      throw SolverStallError(os.str(), report.residual_history);
    }
    ++report.iterations;
    report.residual_history.push_back(rsup);
  }

  report.final_residual_sup = rsup;
  report.positivity_margin = density_of(problem, u).min();
  u.require_finite("solve_semilinear");
  return {std::move(u), std::move(report)};
}

}  // namespace ricci
