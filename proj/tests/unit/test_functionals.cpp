#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ricci/config.hpp"
#include "ricci/errors.hpp"
#include "ricci/functionals.hpp"
#include "ricci/iteration.hpp"
#include "ricci/kahler.hpp"
#include "ricci/oracles.hpp"
#include "ricci/sphere.hpp"
#include "ricci/torus.hpp"

using namespace ricci;
using std::numbers::pi;

namespace {

Field legendre(const SphereBackend& s, int l, double amp) { return mode_field(s, {l, 0, 0, false, amp}); }

// (2/V)∫v log v - s̄J: the path integral done by hand in complex dimension 1.
double k_energy_closed_form(const Field& psi) {
  const auto& b = psi.backend();
  const Field v = conformal_density(psi);
  const double s_bar = 4.0 * pi * b.euler_characteristic() / b.volume();
  return 2.0 / b.volume() * integrate(v * v.map([](double x) { return std::log(x); })) - s_bar * aubin_J(psi);
}

}  // namespace

TEST(AubinI, TrivialCases) {
  const auto s = make_sphere({32});
  EXPECT_EQ(aubin_I(s->zeros()), 0.0);
  EXPECT_LE(std::abs(aubin_I(s->constant(2.0))), 1e-15);
}

TEST(AubinI, TorusCosineByHand) {
  const auto t = make_torus({32, 32});
  const Field psi = t->from_function([](double x, double) { return 0.1 * std::cos(x); });
  // v = 1 - 0.05 cos x; I = V⁻¹·0.005·π·L2.
  const double expected = 0.005 * pi * t->l2() / t->volume();
  EXPECT_NEAR(aubin_I(psi), expected, 1e-12);
  // Direct quadrature -V⁻¹∫ψ·½Δψ on the grid.
  double direct = 0.0;
  for (int i = 0; i < t->n1(); ++i) {
    for (int j = 0; j < t->n2(); ++j) {
      const double p = 0.1 * std::cos(t->x(i));
      direct += p * 0.05 * std::cos(t->x(i)) * t->area_weights()[t->index(i, j)];
    }
  }
  EXPECT_NEAR(aubin_I(psi), direct / t->volume(), 1e-12);
}

TEST(AubinI, NonNegative) {
  const auto s = make_sphere({64});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) EXPECT_GE(aubin_I(random_field(*s, {8, 0.05, seed})), 0.0);
}

TEST(AubinJ, HalfOfI) {
  const auto s = make_sphere({64});
  const auto t = make_torus({32, 32});
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Field a = random_field(*s, {8, 0.05, seed});
    EXPECT_NEAR(aubin_J(a) / aubin_I(a), 0.5, 0.5e-9);
    const Field b = random_field(*t, {4, 0.05, seed});
    EXPECT_NEAR(aubin_J(b) / aubin_I(b), 0.5, 0.5e-9);
  }
}

TEST(AubinJ, TrivialCases) {
  const auto s = make_sphere({32});
  EXPECT_EQ(aubin_J(s->zeros()), 0.0);
  EXPECT_LE(std::abs(aubin_J(s->constant(-3.0))), 1e-15);
}

TEST(Ding, ZeroAtTheRoundMetric) {
  const auto s = make_sphere({32});
  EXPECT_LE(std::abs(ding_functional(s->zeros(), s->zeros())), 1e-15);
  EXPECT_LE(std::abs(ding_functional(s->constant(0.4), s->zeros())), 1e-14);
}

TEST(Ding, StationaryAtTheRoundMetric) {
  const auto s = make_sphere({64});
  const double h = 1e-5;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Field eta = random_field(*s, {8, 1.0, seed});
    const double d = (ding_functional(h * eta, s->zeros()) - ding_functional(-h * eta, s->zeros())) / (2 * h);
    EXPECT_LE(std::abs(d), 1e-8);
  }
}

TEST(Functionals, InvariantUnderConstants) {
  const auto s = make_sphere({64});
  const Field psi = random_field(*s, {6, 0.1, 3});
  const Field f = s->zeros();
  const Field moved = psi - 1.3;
  EXPECT_NEAR(aubin_I(psi), aubin_I(moved), 1e-10);
  EXPECT_NEAR(aubin_J(psi), aubin_J(moved), 1e-10);
  EXPECT_NEAR(ding_functional(psi, f), ding_functional(moved, f), 1e-10);
  EXPECT_NEAR(k_energy(psi), k_energy(moved), 1e-10);
}

TEST(KEnergy, ZeroAtReference) {
  EXPECT_EQ(k_energy(make_sphere({32})->zeros()), 0.0);
  EXPECT_EQ(k_energy(make_torus({16, 16})->zeros()), 0.0);
}

TEST(KEnergy, QuadratureRefinement) {
  const auto s = make_sphere({64});
  const Field psi = legendre(*s, 2, 0.2);
  EXPECT_NEAR(k_energy(psi, 16), k_energy(psi, 32), 1e-9);
}

TEST(KEnergy, MatchesClosedForm) {
  // The closed form evaluates log pointwise, so compare without dealiasing.
  const auto s = make_sphere({64, false});
  const auto t = make_torus({32, 32, 2 * pi, 2 * pi, false});
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Field a = random_field(*s, {6, 0.05, seed});
    EXPECT_NEAR(k_energy(a), k_energy_closed_form(a), 1e-10);
    const Field b = random_field(*t, {3, 0.1, seed});
    EXPECT_NEAR(k_energy(b), k_energy_closed_form(b), 1e-10);
  }
}

TEST(KEnergy, GradientMatchesFiniteDifferences) {
  const auto s = make_sphere({64});
  const Field psi = random_field(*s, {6, 0.1, 13});
  const Field eta = random_field(*s, {6, 1.0, 17});
  const double h = 1e-4;
  const double fd = (k_energy(psi + h * eta) - k_energy(psi - h * eta)) / (2 * h);
  const double exact = k_energy_differential(psi, eta);
  EXPECT_LE(std::abs(fd - exact), 1e-6 * std::abs(exact));
}

TEST(KEnergy, NonKahlerPathIsRejected) {
  const auto s = make_sphere({32});
  EXPECT_THROW(k_energy(legendre(*s, 1, 1.5)), PathError);
}

TEST(Energies, MonotoneAlongSphereIteration) {
  const auto s = make_sphere({64});
  IterationConfig cfg;
  cfg.mu = 1;
  cfg.backend = s;
  cfg.initial_potential = legendre(*s, 2, 0.2) + legendre(*s, 3, 0.05);
  cfg.max_steps = 12;
  const auto t = run_iteration(cfg);
  double ding = *t.initial_functionals.ding, kin = *t.initial_functionals.k_energy;
  for (const auto& st : t.steps) {
    if (st.c0_increment < 1e-9) break;
    EXPECT_LT(*st.functionals.ding, ding) << "k = " << st.k;
    EXPECT_LE(*st.functionals.k_energy, kin + 1e-12) << "k = " << st.k;
    ding = *st.functionals.ding;
    kin = *st.functionals.k_energy;
  }
}

TEST(Green, FlatTorusMatchesLatticeSum) {
  const auto t = make_torus({16, 16, 2 * pi, 2 * pi, false});
  const auto src = default_green_sources(*t, 4);
  const auto g = green_function(MetricState::reference(t), src);
  for (std::size_t a = 0; a < src.size(); ++a) {
    for (std::size_t i = 0; i < t->size(); ++i) EXPECT_NEAR(g.columns[a][i], oracles::lattice_green(*t, i, src[a]), 1e-9);
  }
}

TEST(Green, SymmetricWithWeightedZeroMean) {
  const auto s = make_sphere({64});
  const auto m = MetricState::from_potential(random_field(*s, {5, 0.05, 2}));
  const auto src = default_green_sources(*s, 10);
  const auto g = green_function(m, src);
  for (std::size_t a = 0; a < src.size(); ++a) {
    EXPECT_LE(std::abs(integrate(g.columns[a] * m.density())), 1e-8);
    for (std::size_t b = 0; b < src.size(); ++b) EXPECT_NEAR(g.columns[a][src[b]], g.columns[b][src[a]], 1e-7);
  }
  EXPECT_GT(g.A, 0.0);
}

TEST(Green, MatchesDenseInversion) {
  const auto s = make_sphere({24, false});
  const auto m = MetricState::from_potential(random_field(*s, {4, 0.05, 43}));
  const auto src = default_green_sources(*s, 6);
  const auto g = green_function(m, src);
  const auto d = oracles::dense_green(m, src);
  EXPECT_NEAR(g.A, d.A, 1e-9);
  for (std::size_t a = 0; a < src.size(); ++a) EXPECT_LE(sup_distance(g.columns[a], d.columns[a]), 1e-9);
}

TEST(Green, SourcesAreValidAndDistinct) {
  const auto t = make_torus({32, 32});
  const auto src = default_green_sources(*t, 48);
  EXPECT_EQ(src.size(), 48u);
  for (std::size_t a = 0; a < src.size(); ++a) {
    EXPECT_LT(src[a], t->size());
    for (std::size_t b = a + 1; b < src.size(); ++b) EXPECT_NE(src[a], src[b]);
  }
}

TEST(GreenBound, ReferenceSlackIsTwiceA) {
  const auto s = make_sphere({32});
  const auto g = green_function(MetricState::reference(s), default_green_sources(*s, 16));
  EXPECT_DOUBLE_EQ(green_bound_slack(s->zeros(), g.A, g.A), 2.0 * g.A);
}

TEST(GreenBound, SlackShrinksWithAmplitude) {
  double previous = std::numeric_limits<double>::infinity();
  for (double a : {0.05, 0.1, 0.2, 0.3}) {
    const auto s = make_sphere({32});
    IterationConfig cfg;
    cfg.mu = 1;
    cfg.backend = s;
    cfg.initial_potential = legendre(*s, 2, a);
    cfg.max_steps = 1;
    cfg.functionals = false;
    cfg.green_bounds = true;
    cfg.green_sources = 16;
    const auto t = run_iteration(cfg);
    ASSERT_EQ(t.steps.size(), 1u);
    const double slack = *t.steps[0].green_slack;
    EXPECT_GE(slack, -1e-6);
    EXPECT_LT(slack, previous) << "amplitude " << a;
    previous = slack;
  }
}

TEST(Threads, CapIsPositive) { EXPECT_GE(diagnostic_thread_cap(), 1); }
