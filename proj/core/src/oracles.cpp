#include "ricci/oracles.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ricci/errors.hpp"
#include "ricci/sphere.hpp"
#include "ricci/torus.hpp"

namespace ricci::oracles {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Periodic second derivative on n equispaced points of [0, L). The Nyquist
// mode is treated as a cosine, so its symbol is -(n/2)²(2π/L)².
MatrixXd periodic_second_derivative(int n, double length) {
  MatrixXd d(n, n);
  const double h = 2.0 * std::numbers::pi / n;
  const double scale = std::pow(2.0 * std::numbers::pi / length, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int k = i - j;
      if (k == 0) {
        d(i, j) = -std::numbers::pi * std::numbers::pi / (3.0 * h * h) - 1.0 / 6.0;
      } else {
        const double s = std::sin(k * h / 2.0);
        d(i, j) = -((k % 2 == 0) ? 1.0 : -1.0) / (2.0 * s * s);
      }
      d(i, j) *= scale;
    }
  }
  if (n % 2 == 1) {
    // Odd n has no Nyquist mode; the diagonal constant differs.
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int k = i - j;
        if (k == 0) {
          d(i, j) = scale * (-std::numbers::pi * std::numbers::pi / (3.0 * h * h) + 1.0 / 12.0);
        } else {
          const double s = std::sin(k * h / 2.0);
          d(i, j) = scale * (-((k % 2 == 0) ? 1.0 : -1.0) * std::cos(k * h / 2.0) / (2.0 * s * s));
        }
      }
    }
  }
  return d;
}

MatrixXd barycentric_first_derivative(const std::vector<double>& x, const std::vector<double>& gauss_w) {
  const int n = static_cast<int>(x.size());
  std::vector<double> bw(n);
  for (int j = 0; j < n; ++j) bw[j] = ((j % 2 == 0) ? 1.0 : -1.0) * std::sqrt((1.0 - x[j] * x[j]) * gauss_w[j]);
  MatrixXd d = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      d(i, j) = (bw[j] / bw[i]) / (x[i] - x[j]);
      diag -= d(i, j);
    }
    d(i, i) = diag;
  }
  return d;
}

VectorXd to_vector(const Field& f) {
  VectorXd v(static_cast<Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) v(static_cast<Index>(i)) = f[i];
  return v;
}

Field to_field(const Backend& b, const VectorXd& v) {
  return b.from_values(std::vector<double>(v.data(), v.data() + v.size()));
}

// Solves op u + c·1 = rhs subject to Σ w u = 0.
VectorXd bordered_solve(const MatrixXd& op, const std::vector<double>& w, const VectorXd& rhs) {
  const Index n = op.rows();
  MatrixXd big = MatrixXd::Zero(n + 1, n + 1);
  big.topLeftCorner(n, n) = op;
  for (Index i = 0; i < n; ++i) {
    big(i, n) = 1.0;
    big(n, i) = w[static_cast<std::size_t>(i)];
  }
  VectorXd b = VectorXd::Zero(n + 1);
  b.head(n) = rhs;
  return big.fullPivLu().solve(b).head(n);
}

}  // namespace

void require_oracle_size(const Backend& backend) {
  bool too_big = false;
  if (const auto* t = dynamic_cast<const TorusBackend*>(&backend)) {
    too_big = t->n1() > max_resolution || t->n2() > max_resolution;
  } else {
    too_big = backend.size() > static_cast<std::size_t>(max_resolution);
  }
  if (too_big) {
    std::ostringstream os;
    os << "oracle refuses backend " << backend.signature() << " (cap " << max_resolution << " per axis)";
    throw OracleRefusal(os.str());
  }
}

MatrixXd dense_laplacian(const Backend& backend) {
  require_oracle_size(backend);
  if (const auto* t = dynamic_cast<const TorusBackend*>(&backend)) {
    const MatrixXd dx = periodic_second_derivative(t->n1(), t->l1());
    const MatrixXd dy = periodic_second_derivative(t->n2(), t->l2());
    const Index n1 = t->n1(), n2 = t->n2();
    MatrixXd lap = MatrixXd::Zero(n1 * n2, n1 * n2);
    // Flat index i*n2 + j, x index outermost.
    for (Index i = 0; i < n1; ++i) {
      for (Index j = 0; j < n2; ++j) {
        const Index row = i * n2 + j;
        for (Index k = 0; k < n1; ++k) lap(row, k * n2 + j) += dx(i, k);
        for (Index k = 0; k < n2; ++k) lap(row, i * n2 + k) += dy(j, k);
      }
    }
    return lap;
  }
  const auto& s = dynamic_cast<const SphereBackend&>(backend);
  const auto& x = s.nodes();
  const MatrixXd d = barycentric_first_derivative(x, s.gauss_weights());
  const MatrixXd d2 = d * d;
  const Index n = s.n();
  MatrixXd lap(n, n);
  for (Index i = 0; i < n; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    lap.row(i) = (1.0 - xi * xi) * d2.row(i) - 2.0 * xi * d.row(i);
  }
  return lap;
}

Field dense_inverse_laplacian(const Field& g) {
  const auto& b = g.backend();
  const MatrixXd lap = dense_laplacian(b);
  const VectorXd rhs = to_vector(g - mean(g));
  return to_field(b, bordered_solve(lap, b.area_weights(), rhs));
}

Field dense_semilinear_solve(const SemilinearProblem& problem, double tol_sup, int max_newton) {
  const auto& b = problem.source.backend();
  const MatrixXd half_lap = 0.5 * dense_laplacian(b);
  const VectorXd s = to_vector(problem.source);
  const double a = problem.coefficient;
  const Index n = half_lap.rows();

  auto residual = [&](const VectorXd& u) -> VectorXd {
    VectorXd e = (s + a * u).array().exp().matrix();
    return half_lap * u - e + VectorXd::Constant(n, problem.target_constant);
  };

  VectorXd u = VectorXd::Zero(n);
  VectorXd r = residual(u);
  double norm = r.lpNorm<Eigen::Infinity>();
  std::vector<double> history{norm};
  for (int it = 0; it < max_newton && norm > tol_sup; ++it) {
    const VectorXd e = (s + a * u).array().exp().matrix();
    MatrixXd jac = half_lap;
    jac.diagonal() -= a * e;
    const VectorXd step = jac.fullPivLu().solve(-r);
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= 40; ++h, t *= 0.5) {
      const VectorXd trial = u + t * step;
      const VectorXd rt = residual(trial);
      const double nt = rt.lpNorm<Eigen::Infinity>();
      if (nt < norm) {
        u = trial;
        r = rt;
        norm = nt;
        accepted = true;
        break;
      }
    }
    history.push_back(norm);
    if (!accepted) break;
  }
  if (!(norm <= tol_sup)) throw SolverStallError("dense_semilinear_solve: stalled", history);
  return to_field(b, u);
}

GreenData dense_green(const MetricState& m, const std::vector<std::size_t>& sources) {
  const auto& b = m.backend();
  const MatrixXd op = -0.5 * dense_laplacian(b);
  const auto& w = b.area_weights();
  const double vol = b.volume();
  const Field& v = m.density();
  std::vector<double> vw(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) vw[i] = w[i] * v[i];

  GreenData out;
  out.sources = sources;
  double lowest = 0.0;
  for (auto y : sources) {
    VectorXd rhs = -to_vector(v);
    rhs(static_cast<Index>(y)) += vol / w[y];
    const VectorXd g = bordered_solve(op, vw, rhs);
    out.columns.push_back(to_field(b, g));
    lowest = std::min(lowest, g.minCoeff());
  }
  out.A = -lowest;
  return out;
}

double lattice_green(const Backend& torus, std::size_t i, std::size_t j) {
  const auto* t = dynamic_cast<const TorusBackend*>(&torus);
  if (!t) throw UnsupportedError("lattice_green requires the torus backend");
  require_oracle_size(torus);
  const int n1 = t->n1(), n2 = t->n2();
  const double dx = t->x(static_cast<int>(i) / n2) - t->x(static_cast<int>(j) / n2);
  const double dy = t->y(static_cast<int>(i) % n2) - t->y(static_cast<int>(j) % n2);
  double sum = 0.0;
  for (int a = 0; a < n1; ++a) {
    for (int c = 0; c < n2; ++c) {
      if (a == 0 && c == 0) continue;
      const double kx = 2.0 * std::numbers::pi / t->l1() * TorusBackend::signed_mode(a, n1);
      const double ky = 2.0 * std::numbers::pi / t->l2() * TorusBackend::signed_mode(c, n2);
      sum += 2.0 / (kx * kx + ky * ky) * std::cos(kx * dx + ky * dy);
    }
  }
  return sum;
}

double sphere_eigenvalue(int l) { return static_cast<double>(l) * (l + 1); }

double linearized_step_factor(int mu, double lambda) {
  switch (mu) {
    case 1:
      return lambda == 0.0 ? 0.0 : 2.0 / lambda;
    case 0:
      return 1.0 / (1.0 + lambda / 2.0);
    case -1:
      return 1.0 / (2.0 + lambda / 2.0);
    default:
      throw Error("linearized_step_factor: mu must be -1, 0 or 1");
  }
}

double linearized_forward_factor(double lambda) { return lambda / 2.0; }

}  // namespace ricci::oracles
