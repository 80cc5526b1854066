#include "ricci/torus.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <sstream>

#include "ricci/errors.hpp"

namespace ricci {

namespace {

// The FFTW planner is not thread-safe; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)), size(n) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
  std::size_t size;
};

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  void create(int n1, int n2) {
    std::lock_guard lock(planner_mutex());
    FftwBuffer a(static_cast<std::size_t>(n1) * n2), b(static_cast<std::size_t>(n1) * n2);
    forward = fftw_plan_dft_2d(n1, n2, a.data, b.data, FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft_2d(n1, n2, a.data, b.data, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!forward || !backward) throw Error("torus: FFTW plan creation failed");
  }

  void destroy() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

// Targets of a coarse mode on a finer axis. The Nyquist mode of an even
// axis stands for a cosine and is split between ±n/2.
struct AxisTarget {
  int index;
  double weight;
};

int axis_targets(int m, int n, int fine_n, AxisTarget out[2]) {
  const int k = TorusBackend::signed_mode(m, n);
  if (n % 2 == 0 && std::abs(k) == n / 2) {
    out[0] = {n / 2, 0.5};
    out[1] = {fine_n - n / 2, 0.5};
    return 2;
  }
  out[0] = {k >= 0 ? k : fine_n + k, 1.0};
  return 1;
}

}  // namespace

struct TorusBackend::Plans {
  PlanPair coarse, fine;
  ~Plans() {
    coarse.destroy();
    fine.destroy();
  }
};

TorusBackend::TorusBackend(const TorusSpec& spec)
    : Backend(spec.dealias), n1_(spec.n1), n2_(spec.n2), l1_(spec.l1), l2_(spec.l2) {
  if (n1_ < 2 || n2_ < 2) throw Error("torus: resolution must be at least 2 x 2");
  if (!(l1_ > 0.0) || !(l2_ > 0.0)) throw Error("torus: periods must be positive");
  weights_.assign(size(), l1_ * l2_ / (static_cast<double>(n1_) * n2_));
  plans_ = std::make_unique<Plans>();
  plans_->coarse.create(n1_, n2_);
  if (spec.dealias) plans_->fine.create(2 * n1_, 2 * n2_);
}

TorusBackend::~TorusBackend() = default;

std::string TorusBackend::signature() const {
  std::ostringstream os;
  os.precision(17);
  os << "torus(" << n1_ << "x" << n2_ << ", L=" << l1_ << "x" << l2_ << ")";
  return os.str();
}

double TorusBackend::wavevector_x(int i) const { return 2.0 * std::numbers::pi / l1_ * signed_mode(i, n1_); }
double TorusBackend::wavevector_y(int j) const { return 2.0 * std::numbers::pi / l2_ * signed_mode(j, n2_); }

std::vector<std::complex<double>> TorusBackend::forward_complex(std::span<const double> values, int n1,
                                                                 int n2) const {
  const std::size_t n = static_cast<std::size_t>(n1) * n2;
  FftwBuffer in(n), out(n);
  for (std::size_t i = 0; i < n; ++i) {
    in.data[i][0] = values[i];
    in.data[i][1] = 0.0;
  }
  const auto& plan = (n1 == n1_ && n2 == n2_) ? plans_->coarse : plans_->fine;
  fftw_execute_dft(plan.forward, in.data, out.data);
  std::vector<std::complex<double>> c(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = {out.data[i][0] * scale, out.data[i][1] * scale};
  return c;
}

std::vector<double> TorusBackend::inverse_real(const std::vector<std::complex<double>>& coeffs, int n1,
                                               int n2) const {
  const std::size_t n = static_cast<std::size_t>(n1) * n2;
  FftwBuffer in(n), out(n);
  for (std::size_t i = 0; i < n; ++i) {
    in.data[i][0] = coeffs[i].real();
    in.data[i][1] = coeffs[i].imag();
  }
  const auto& plan = (n1 == n1_ && n2 == n2_) ? plans_->coarse : plans_->fine;
  fftw_execute_dft(plan.backward, in.data, out.data);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = out.data[i][0];
  return v;
}

SpectralCoeffs TorusBackend::transform(const Field& f) const {
  if (f.backend().signature() != signature()) throw ShapeError("torus transform: backend mismatch");
  SpectralCoeffs c;
  c.kind = BackendKind::torus;
  c.fourier = forward_complex(f.values(), n1_, n2_);
  c.band_limit = std::max(n1_, n2_) / 2;
  return c;
}

Field TorusBackend::inverse_transform(const SpectralCoeffs& c) const {
  if (c.kind != BackendKind::torus || c.fourier.size() != size()) {
    throw ShapeError("torus inverse_transform: coefficient layout mismatch");
  }
  return from_values(inverse_real(c.fourier, n1_, n2_));
}

Field TorusBackend::spectral_multiply(const Field& f, const std::function<double(double)>& multiplier) const {
  if (f.backend().signature() != signature()) throw ShapeError("torus spectral_multiply: backend mismatch");
  auto c = forward_complex(f.values(), n1_, n2_);
  for (int i = 0; i < n1_; ++i) {
    const double kx = wavevector_x(i);
    for (int j = 0; j < n2_; ++j) {
      const double ky = wavevector_y(j);
      c[index(i, j)] *= multiplier(kx * kx + ky * ky);
    }
  }
  return from_values(inverse_real(c, n1_, n2_));
}

std::vector<double> TorusBackend::eigenvalues() const {
  std::vector<double> lambda(size());
  for (int i = 0; i < n1_; ++i) {
    for (int j = 0; j < n2_; ++j) {
      const double kx = wavevector_x(i), ky = wavevector_y(j);
      lambda[index(i, j)] = kx * kx + ky * ky;
    }
  }
  return lambda;
}

Field TorusBackend::nonlinear(const Field& f, const std::function<double(double)>& fn) const {
  if (f.backend().signature() != signature()) throw ShapeError("torus nonlinear: backend mismatch");
  if (!dealias()) return f.map(fn).require_finite("nonlinear");

  const int m1 = 2 * n1_, m2 = 2 * n2_;
  const auto coarse = forward_complex(f.values(), n1_, n2_);
  std::vector<std::complex<double>> fine(static_cast<std::size_t>(m1) * m2);
  AxisTarget tx[2], ty[2];
  for (int i = 0; i < n1_; ++i) {
    const int nx = axis_targets(i, n1_, m1, tx);
    for (int j = 0; j < n2_; ++j) {
      const int ny = axis_targets(j, n2_, m2, ty);
      const auto value = coarse[index(i, j)];
      for (int a = 0; a < nx; ++a) {
        for (int b = 0; b < ny; ++b) {
          fine[static_cast<std::size_t>(tx[a].index) * m2 + ty[b].index] += value * (tx[a].weight * ty[b].weight);
        }
      }
    }
  }
  auto values = inverse_real(fine, m1, m2);
  for (double& v : values) v = fn(v);
  const auto projected = forward_complex(values, m1, m2);

  std::vector<std::complex<double>> back(size());
  for (int i = 0; i < n1_; ++i) {
    const int nx = axis_targets(i, n1_, m1, tx);
    for (int j = 0; j < n2_; ++j) {
      const int ny = axis_targets(j, n2_, m2, ty);
      std::complex<double> sum = 0.0;
      for (int a = 0; a < nx; ++a) {
        for (int b = 0; b < ny; ++b) sum += projected[static_cast<std::size_t>(tx[a].index) * m2 + ty[b].index];
      }
      back[index(i, j)] = sum;
    }
  }
  return from_values(inverse_real(back, n1_, n2_)).require_finite("nonlinear");
}

Field TorusBackend::from_function(const std::function<double(double, double)>& fn) const {
  std::vector<double> v(size());
  for (int i = 0; i < n1_; ++i) {
    for (int j = 0; j < n2_; ++j) v[index(i, j)] = fn(x(i), y(j));
  }
  return from_values(std::move(v));
}

}  // namespace ricci
