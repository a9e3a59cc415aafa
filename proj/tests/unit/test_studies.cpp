#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kgs/error.hpp"
#include "kgs/random_states.hpp"
#include "kgs/studies.hpp"

namespace kgs {
namespace {

ModelSpec harmonic_polaron(double g) {
  ModelSpec m;
  m.potential = PotentialSpec::harmonic();
  m.dispersion = DispersionSpec::constant_one();
  m.coupling = CouplingSpec::polaron();
  m.g = g;
  return m;
}

ModelSpec massless_nelson(double g, double kappa) {
  ModelSpec m;
  m.potential = PotentialSpec::harmonic();
  m.dispersion = DispersionSpec::relativistic(0.0);
  m.coupling = CouplingSpec::nelson(kappa);
  m.g = g;
  return m;
}

SweepOptions tight() {
  SweepOptions o;
  o.minimize.residual_tol = 1e-10;
  return o;
}

TEST(SmallGSweep, NegativeRemainderQuarticOrder) {
  const SmallGSweep s = small_g_sweep(harmonic_polaron(0.0), {0.1, 0.2, 0.4}, make_grid(16, 10.0), tight());
  ASSERT_TRUE(s.all_converged);
  for (const auto& r : s.records) EXPECT_LT(r.remainder, 0.0);
  EXPECT_GE(s.fitted_exponent, 3.5);
  EXPECT_LE(s.fitted_exponent, 4.5);
  for (std::size_t i = 1; i < s.records.size(); ++i) EXPECT_GT(s.records[i].sweep_parameter, s.records[i - 1].sweep_parameter);
}

TEST(SmallGSweep, RejectsUnsortedList) {
  EXPECT_THROW(small_g_sweep(harmonic_polaron(0.0), {0.2, 0.1}, make_grid(8, 6.0), {}), InvalidArgument);
}

TEST(SmallGSweep, ReproducibleAcrossThreadCounts) {
  SweepOptions a = tight(), b = tight();
  b.threads = 3;
  const GridSpec g = make_grid(12, 8.0);
  const SmallGSweep x = small_g_sweep(harmonic_polaron(0.0), {0.1, 0.2, 0.3}, g, a);
  const SmallGSweep y = small_g_sweep(harmonic_polaron(0.0), {0.1, 0.2, 0.3}, g, b);
  for (std::size_t i = 0; i < x.records.size(); ++i) EXPECT_EQ(x.records[i].energy, y.records[i].energy);
}

TEST(UvSweep, MonotoneEnergiesAndZeroReferenceDistance) {
  const GridSpec g = make_grid(16, 10.0);
  const UvSweep s = uv_sweep(harmonic_polaron(0.5), {1.0, 2.0, 4.0, g.k_max()}, g, tight());
  ASSERT_TRUE(s.all_converged);
  EXPECT_TRUE(s.energies_monotone);
  EXPECT_TRUE(s.distances_monotone);
  EXPECT_EQ(s.records.back().u_qv_distance, 0.0);
  EXPECT_EQ(s.records.back().f_zomega_distance, 0.0);
}

TEST(UvSweep, LastLambdaMustBeLatticeMaximum) {
  EXPECT_THROW(uv_sweep(harmonic_polaron(0.5), {1.0, 2.0}, make_grid(8, 6.0), {}), InvalidArgument);
}

TEST(IrStudy, MasslessNelsonGrowsWithBox) {
  const IrStudy s = ir_study(massless_nelson(0.3, 0.0), {5.0, 10.0}, 0.625, tight());
  ASSERT_TRUE(s.all_converged);
  ASSERT_EQ(s.increments.size(), 1u);
  EXPECT_GT(s.increments[0], 0.0);
  EXPECT_TRUE(s.records[0].f_l2_origin_divergent);
  for (const auto& r : s.records) EXPECT_TRUE(std::isfinite(r.f_zomega_norm_sq));
}

TEST(IrStudy, SpacingMustDivideBox) {
  EXPECT_THROW(ir_study(massless_nelson(0.3, 0.0), {5.0, 10.3}, 0.625, {}), InvalidArgument);
}

class SplitFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    p = Problem::make(harmonic_polaron(0.1), make_grid(12, 8.0));
    basis = lowest_eigenpairs(p.op, 24, 1e-9);
  }
  Problem p;
  Eigenpairs basis;
};

TEST_F(SplitFixture, ZeroCouplingHasNoShift) {
  EXPECT_EQ(second_order_split(p.with_coupling(0.0), basis, 10).predicted_full_shift, 0.0);
}

TEST_F(SplitFixture, NonCoherentTermPositiveAndMonotone) {
  double prev = 0.0;
  for (int n : {2, 6, 12, 24}) {
    const SecondOrderSplit s = second_order_split(p, basis, n);
    EXPECT_GE(s.t_nc, prev);
    EXPECT_GE(s.t_nc_k_norm, 0.0);
    prev = s.t_nc;
  }
  EXPECT_GT(prev, 0.0);
}

TEST_F(SplitFixture, RefusesInaccurateBasis) {
  Eigenpairs bad = basis;
  bad.residuals[3] = 1e-3;
  EXPECT_THROW(second_order_split(p, bad, 10), InvalidArgument);
}

TEST(InequalityRatios, FinitePositiveAndHomogeneous) {
  const GridSpec g = make_grid(16, 10.0);
  const Problem p = Problem::make(harmonic_polaron(1.0), g);
  const RealField u1 = random_normalized_state(g, 1), u2 = random_normalized_state(g, 2), u3 = random_normalized_state(g, 3);
  const InequalityRatios r = inequality_ratios(p.kernel, p.op, u1, u1, u3);
  EXPECT_GT(r.convolution_weak, 0.0);
  EXPECT_TRUE(std::isfinite(r.convolution_weak));
  const InequalityRatios a = inequality_ratios(p.kernel, p.op, u1, u2, u3);
  const InequalityRatios b = inequality_ratios(p.kernel, p.op, cplx(3.0, -1.0) * u1, u2, u3);
  EXPECT_NEAR(b.convolution_l1, a.convolution_l1, 1e-12 * a.convolution_l1);
  EXPECT_NEAR(b.convolution_weak, a.convolution_weak, 1e-12 * a.convolution_weak);
  EXPECT_NEAR(b.convolution_weak_product, a.convolution_weak_product, 1e-12 * a.convolution_weak_product);
}

TEST(InequalityProbe, ReproducibleAndThreadIndependent) {
  const GridSpec g = make_grid(12, 10.0);
  const Problem p = Problem::make(harmonic_polaron(1.0), g);
  const InequalityProbe a = inequality_probe(p.kernel, p.op, 12, 4, 1);
  const InequalityProbe b = inequality_probe(p.kernel, p.op, 12, 4, 3);
  EXPECT_EQ(a.convolution_weak.max, b.convolution_weak.max);
  EXPECT_EQ(a.convolution_l1.p95, b.convolution_l1.p95);
  EXPECT_LE(a.convolution_weak.p95, a.convolution_weak.max);
  EXPECT_EQ(a.trials, 12);
}

TEST(RandomStates, SameAnalyticFunctionOnTwoGrids) {
  std::mt19937_64 r1(3), r2(3);
  const BumpState a = random_bump_state(r1, 10.0), b = random_bump_state(r2, 10.0);
  ASSERT_EQ(a.bumps.size(), b.bumps.size());
  EXPECT_GE(a.bumps.size(), 1u);
  EXPECT_LE(a.bumps.size(), 5u);
  for (const auto& bump : a.bumps) {
    EXPECT_GE(bump.width, 0.3);
    EXPECT_LE(bump.width, 2.0);
    for (double c : bump.center) EXPECT_LE(std::abs(c), 2.5);
  }
  EXPECT_EQ(a({0.1, 0.2, 0.3}), b({0.1, 0.2, 0.3}));
}

}  // namespace
}  // namespace kgs
