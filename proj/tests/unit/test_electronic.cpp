#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kgs/electronic.hpp"
#include "kgs/error.hpp"
#include "kgs/random_states.hpp"

namespace kgs {
namespace {

constexpr double kPi = 3.14159265358979323846;

RealField gaussian(const GridSpec& g) {
  return sample_position(g, [](const auto& x) {
    return cplx(std::pow(kPi, -0.75) * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2));
  });
}

TEST(ApplyHv, HarmonicGroundState) {
  const GridSpec g = make_grid(48, 14.0);
  const ElectronicOperator op = ElectronicOperator::from_spec(PotentialSpec::harmonic(), g);
  const RealField u = gaussian(g);
  const RealField hu = apply_hv(op, u);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.x_norm(i) > 3.0) continue;  // bulk
    worst = std::max(worst, std::abs(hu[i] - 3.0 * u[i]) / std::abs(u[i]));
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(ApplyHv, PlaneWaveEigenfunction) {
  const GridSpec g = make_grid(8, 2 * kPi);
  const ElectronicOperator op(g, RealField(g));
  const std::array<double, 3> k0{1.0, -2.0, 3.0};
  const RealField e = sample_position(g, [&](const auto& x) { return std::polar(1.0, k0[0] * x[0] + k0[1] * x[1] + k0[2] * x[2]); });
  const RealField he = apply_hv(op, e);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(he[i] - 14.0 * e[i]), 0.0, 1e-12);
}

TEST(ApplyHv, Linear) {
  const GridSpec g = make_grid(12, 8.0);
  const ElectronicOperator op = ElectronicOperator::from_spec(PotentialSpec::soft_coulomb(1.0, 0.5), g);
  for (std::uint64_t s = 1; s <= 4; ++s) {
    const RealField a = random_normalized_state(g, s), b = random_normalized_state(g, s + 100);
    const cplx alpha(0.3, -1.2), beta(2.0, 0.5);
    const RealField lhs = apply_hv(op, alpha * a + beta * b);
    const RealField rhs = alpha * apply_hv(op, a) + beta * apply_hv(op, b);
    EXPECT_LE(l2_norm(lhs - rhs), 1e-12 * l2_norm(lhs));
  }
}

TEST(LowestEigenpairs, HarmonicSpectrum) {
  const GridSpec g = make_grid(32, 12.0);
  const ElectronicOperator op = ElectronicOperator::from_spec(PotentialSpec::harmonic(), g);
  const Eigenpairs p = lowest_eigenpairs(op, 5, 1e-9);
  EXPECT_NEAR(p.values[0], 3.0, 1e-6);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(p.values[static_cast<std::size_t>(i)], 5.0, 1e-6);
  EXPECT_NEAR(p.gap(), 2.0, 1e-5);
  EXPECT_EQ(p.first_excited_degeneracy(), 3);
  for (double r : p.residuals) EXPECT_LE(r, 1e-9);
}

TEST(LowestEigenpairs, FreeBoxHasConstantGround) {
  const GridSpec g = make_grid(8, 5.0);
  const ElectronicOperator op(g, RealField(g));
  const Eigenpairs p = lowest_eigenpairs(op, 1, 1e-10);
  EXPECT_NEAR(p.values[0], 0.0, 1e-10);
  const auto& u = p.states[0];
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(u[i] - u[0]), 0.0, 1e-9);
}

TEST(LowestEigenpairs, GaussianWellVariationalBounds) {
  const GridSpec g = make_grid(24, 12.0);
  const ElectronicOperator op = ElectronicOperator::from_spec(PotentialSpec::gaussian_well(10.0, 1.0), g);
  const double e0 = lowest_eigenpairs(op, 1, 1e-9).values[0];
  EXPECT_LT(e0, 0.0);
  EXPECT_GE(e0, -10.0);
}

TEST(LowestEigenpairs, ReproducibleForSeed) {
  const GridSpec g = make_grid(12, 8.0);
  const ElectronicOperator op = ElectronicOperator::from_spec(PotentialSpec::harmonic(), g);
  const Eigenpairs a = lowest_eigenpairs(op, 3, 1e-9, 42), b = lowest_eigenpairs(op, 3, 1e-9, 42);
  EXPECT_EQ(a.values, b.values);
}

TEST(DenseEigenpairs, AgreesWithIterativeSolver) {
  const GridSpec g = make_grid(8, 6.0);
  const ElectronicOperator op = ElectronicOperator::from_spec(PotentialSpec::harmonic(), g);
  const Eigenpairs dense = dense_eigenpairs(op);
  const Eigenpairs it = lowest_eigenpairs(op, 4, 1e-10);
  ASSERT_EQ(dense.values.size(), g.size());
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(dense.values[static_cast<std::size_t>(i)], it.values[static_cast<std::size_t>(i)], 1e-8);
  EXPECT_NEAR(inner_product(dense.states[0], dense.states[0]).real(), 1.0, 1e-12);
}

TEST(QvNorm, Oracles) {
  const GridSpec g = make_grid(48, 14.0);
  const RealField v = sample_potential(PotentialSpec::harmonic(), g);
  const double q = qv_norm(gaussian(g), v);
  EXPECT_NEAR(q * q, 4.0, 1e-6);
  EXPECT_EQ(qv_norm(RealField(g), v), 0.0);
}

TEST(QvNorm, NonPositivePotentialGivesH1Norm) {
  const GridSpec g = make_grid(12, 8.0);
  const RealField v = sample_potential(PotentialSpec::gaussian_well(3.0, 1.0), g);
  const RealField u = random_normalized_state(g, 9);
  EXPECT_NEAR(qv_norm(u, v), std::sqrt(1.0 + h1dot_seminorm(u)), 1e-12);
}

TEST(Coercivity, HarmonicHoldsWithZeroConstants) {
  const GridSpec g = make_grid(16, 10.0);
  const ElectronicOperator op = ElectronicOperator::from_spec(PotentialSpec::harmonic(), g);
  for (std::uint64_t s = 0; s < 20; ++s) EXPECT_TRUE(coercivity_check(op, random_normalized_state(g, s), 0.0, 0.0).holds);
}

TEST(Coercivity, WellHoldsWithDepth) {
  const GridSpec g = make_grid(16, 10.0);
  const ElectronicOperator op = ElectronicOperator::from_spec(PotentialSpec::gaussian_well(4.0, 1.0), g);
  for (std::uint64_t s = 0; s < 20; ++s) EXPECT_TRUE(coercivity_check(op, random_normalized_state(g, s), 0.0, 4.0).holds);
}

TEST(Coercivity, MinimalBoundIsTightAndSufficient) {
  const GridSpec g = make_grid(16, 10.0);
  const ElectronicOperator op = ElectronicOperator::from_spec(PotentialSpec::soft_coulomb(1.0, 0.3), g);
  std::vector<RealField> states;
  for (std::uint64_t s = 0; s < 100; ++s) states.push_back(random_normalized_state(g, s));
  const std::vector<double> a{0.0, 0.25, 0.5};
  const std::vector<double> b = minimal_form_bound(op, states, a);
  for (std::size_t j = 0; j < a.size(); ++j) {
    bool tight = false;
    for (const auto& u : states) {
      EXPECT_TRUE(coercivity_check(op, u, a[j], b[j]).holds);
      tight = tight || !coercivity_check(op, u, a[j], b[j] - 1e-6).holds;
    }
    EXPECT_TRUE(tight);
  }
  EXPECT_GE(b[0], b[1]);
  EXPECT_THROW(coercivity_check(op, states[0], 1.0, 0.0), InvalidArgument);
}

TEST(ConfiningGap, BoostOpensGap) {
  const GridSpec g = make_grid(24, 12.0);
  const GapProbe p = confining_gap_probe(PotentialSpec::harmonic(), 1.0, 2.5, g, 1e-8);
  EXPECT_TRUE(p.gap_ok);
  const GapProbe z = confining_gap_probe(PotentialSpec::harmonic(), 0.0, 2.5, g, 1e-8);
  EXPECT_GE(z.mu_v1c, z.mu_v - 1e-8);
}

TEST(ConfiningGap, RadiusBeyondBoxRejected) {
  EXPECT_THROW(confining_gap_probe(PotentialSpec::harmonic(), 1.0, 10.0, make_grid(16, 12.0)), InvalidArgument);
}

TEST(PhaseFixed, LargestSampleRealPositive) {
  const GridSpec g = make_grid(8, 4.0);
  RealField u = random_normalized_state(g, 3);
  u *= std::polar(1.0, 1.1);
  const RealField f = phase_fixed(u);
  std::size_t arg = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (std::abs(f[i]) > std::abs(f[arg])) arg = i;
  EXPECT_GT(f[arg].real(), 0.0);
  EXPECT_NEAR(f[arg].imag(), 0.0, 1e-14);
}

}  // namespace
}  // namespace kgs
