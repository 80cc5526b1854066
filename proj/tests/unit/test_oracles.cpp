#include <gtest/gtest.h>

#include <cmath>

#include "ricci/config.hpp"
#include "ricci/errors.hpp"
#include "ricci/oracles.hpp"
#include "ricci/sphere.hpp"
#include "ricci/torus.hpp"

using namespace ricci;

namespace {

Eigen::VectorXd as_vector(const Field& f) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) v(static_cast<Eigen::Index>(i)) = f[i];
  return v;
}

double sup_gap(const Eigen::VectorXd& a, const Field& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) worst = std::max(worst, std::abs(a(static_cast<Eigen::Index>(i)) - b[i]));
  return worst;
}

}  // namespace

TEST(Oracles, RefuseLargeResolutions) {
  EXPECT_THROW(oracles::dense_laplacian(*make_sphere({48})), OracleRefusal);
  EXPECT_THROW(oracles::dense_laplacian(*make_torus({64, 16})), OracleRefusal);
  EXPECT_NO_THROW(oracles::dense_laplacian(*make_torus({32, 32})));
}

TEST(Oracles, ConstantsMapToZero) {
  const auto t = make_torus({16, 12});
  EXPECT_LE((oracles::dense_laplacian(*t) * as_vector(t->constant(1.0))).cwiseAbs().maxCoeff(), 1e-11);
  const auto s = make_sphere({24});
  EXPECT_LE((oracles::dense_laplacian(*s) * as_vector(s->constant(1.0))).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Oracles, DenseLaplacianAgreesWithSpectralPath) {
  const auto t = make_torus({16, 12, 3.0, 2.0, false});
  const Field f = random_field(*t, {4, 1.0, 5});
  EXPECT_LE(sup_gap(oracles::dense_laplacian(*t) * as_vector(f), laplacian(f)), 1e-10);
  const auto s = make_sphere({24, false});
  const Field g = random_field(*s, {12, 1.0, 5});
  EXPECT_LE(sup_gap(oracles::dense_laplacian(*s) * as_vector(g), laplacian(g)), 1e-10);
}

TEST(Oracles, DenseLaplacianEigenfunctions) {
  const auto s = make_sphere({24});
  for (int l = 1; l <= 6; ++l) {
    const Field p = mode_field(*s, {l, 0, 0, false, 1.0});
    EXPECT_LE(sup_gap(oracles::dense_laplacian(*s) * as_vector(p), -oracles::sphere_eigenvalue(l) * p), 1e-10);
  }
  const auto t = make_torus({16, 16});
  const Field c = mode_field(*t, {0, 2, 1, true, 1.0});
  EXPECT_LE(sup_gap(oracles::dense_laplacian(*t) * as_vector(c), -5.0 * c), 1e-10);
}

TEST(Oracles, DenseSemilinearTrivialCases) {
  const auto t = make_torus({8, 8});
  EXPECT_LE(oracles::dense_semilinear_solve({t->zeros(), 2.0, 1.0}).sup_norm(), 1e-14);
  EXPECT_LE(sup_distance(oracles::dense_semilinear_solve({t->constant(0.3), 1.0, 1.0}), t->constant(-0.3)), 1e-12);
}

TEST(Oracles, LinearizedFactors) {
  EXPECT_DOUBLE_EQ(oracles::linearized_step_factor(1, oracles::sphere_eigenvalue(1)), 1.0);
  EXPECT_DOUBLE_EQ(oracles::linearized_step_factor(1, oracles::sphere_eigenvalue(2)), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(oracles::linearized_step_factor(-1, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(oracles::linearized_step_factor(0, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(oracles::linearized_forward_factor(oracles::sphere_eigenvalue(2)), 3.0);
}

TEST(Oracles, SphereEigenvalues) {
  for (int l = 0; l <= 10; ++l) EXPECT_EQ(oracles::sphere_eigenvalue(l), l * (l + 1.0));
}

TEST(Oracles, LatticeGreenIsSymmetric) {
  const auto t = make_torus({8, 8});
  for (std::size_t i = 0; i < t->size(); i += 7) {
    for (std::size_t j = 0; j < t->size(); j += 5) {
      EXPECT_NEAR(oracles::lattice_green(*t, i, j), oracles::lattice_green(*t, j, i), 1e-13);
    }
  }
}
