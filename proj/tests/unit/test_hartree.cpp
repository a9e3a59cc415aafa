#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kgs/error.hpp"
#include "kgs/hartree.hpp"
#include "kgs/minimize.hpp"
#include "kgs/random_states.hpp"

namespace kgs {
namespace {

constexpr double kPi = 3.14159265358979323846;

ModelSpec harmonic_polaron(double g) {
  ModelSpec m;
  m.potential = PotentialSpec::harmonic();
  m.dispersion = DispersionSpec::constant_one();
  m.coupling = CouplingSpec::polaron();
  m.g = g;
  return m;
}

RealField gaussian(const GridSpec& g) {
  return sample_position(g, [](const auto& x) {
    return cplx(std::pow(kPi, -0.75) * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2));
  });
}

RealField random_tangent(const RealField& u, std::uint64_t seed) {
  RealField d = random_normalized_state(u.grid(), seed);
  d.axpy(-inner_product(u, d).real(), u);
  return d;
}

class HartreeSmall : public ::testing::Test {
 protected:
  void SetUp() override { p = Problem::make(harmonic_polaron(0.7), make_grid(16, 10.0)); }
  Problem p;
};

TEST(DensityHat, NormalizedStateHasUnitMass) {
  const RealField u = random_normalized_state(make_grid(12, 8.0), 4);
  const SpectralField r = density_hat(u);
  EXPECT_NEAR(r[u.grid().origin_index()].real(), 1.0, 1e-12);
}

TEST(DensityHat, GaussianAnalytic) {
  const GridSpec g = make_grid(48, 14.0);
  const SpectralField r = density_hat(gaussian(g));
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(r[i] - std::exp(-g.k_norm(i) * g.k_norm(i) / 4)));
  EXPECT_LE(worst, 1e-8);
}

TEST(DensityHat, HermitianSymmetry) {
  const GridSpec g = make_grid(12, 8.0);
  const SpectralField r = density_hat(random_normalized_state(g, 5));
  const int n = g.n();
  for (int a = 1; a < n; ++a)
    for (int b = 1; b < n; ++b)
      for (int c = 1; c < n; ++c) {
        const cplx lhs = r[g.flatten(n - a, n - b, n - c)];
        EXPECT_NEAR(std::abs(lhs - std::conj(r[g.flatten(a, b, c)])), 0.0, 1e-12);
      }
}

TEST_F(HartreeSmall, InteractionOfZeroState) { EXPECT_EQ(interaction_term(RealField(p.grid), p.kernel), 0.0); }

TEST_F(HartreeSmall, InteractionScalesWithCouplingSquared) {
  const RealField u = random_normalized_state(p.grid, 2);
  const double one = interaction_term(u, p.with_coupling(1.0).kernel);
  EXPECT_NEAR(interaction_term(u, p.kernel), 0.49 * one, 1e-13 * one);
}

TEST(Interaction, HarmonicGaussianPolaronIntegral) {
  const GridSpec g = make_grid(64, 14.0);
  const KernelW w = build_kernel(harmonic_polaron(1.0), g);
  const double exact = 4 * kPi * std::sqrt(kPi / 2);
  EXPECT_NEAR(interaction_term(gaussian(g), w) / exact, 1.0, 0.01);
}

TEST_F(HartreeSmall, GaugeInvariance) {
  const RealField u = random_normalized_state(p.grid, 8);
  const double j = hartree_energy(u, p.op, p.kernel).total;
  for (double th : {0.3, 1.7, 3.0}) EXPECT_NEAR(hartree_energy(std::polar(1.0, th) * u, p.op, p.kernel).total, j, 1e-12 * std::abs(j));
}

TEST_F(HartreeSmall, HartreePotentialExpectationIsInteraction) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const RealField u = random_normalized_state(p.grid, s);
    const double i = interaction_term(u, p.kernel);
    EXPECT_NEAR(inner_product(u, [&] {
                  RealField vu = hartree_potential(u, p.kernel);
                  for (std::size_t k = 0; k < vu.size(); ++k) vu[k] *= u[k];
                  return vu;
                }()).real(),
                i, 1e-12 * i);
  }
}

TEST(HartreePotential, ZeroKernel) {
  const GridSpec g = make_grid(8, 5.0);
  const RealField vh = hartree_potential(random_normalized_state(g, 1), build_kernel(harmonic_polaron(0.0), g));
  for (const auto& v : vh.samples()) EXPECT_EQ(v, cplx(0.0));
}

TEST(HartreePotential, RadialSymmetry) {
  const GridSpec g = make_grid(16, 10.0);
  const RealField u = gaussian(g);
  const RealField vh = hartree_potential(u, build_kernel(harmonic_polaron(1.0), g));
  const int n = g.n();
  double worst = 0.0;
  for (int a = 1; a < n; ++a)
    for (int b = 1; b < n; ++b)
      for (int c = 1; c < n; ++c) {
        const cplx v = vh[g.flatten(a, b, c)];
        for (const auto& o : {g.flatten(n - a, b, c), g.flatten(a, n - b, c), g.flatten(a, b, n - c), g.flatten(b, c, a)})
          worst = std::max(worst, std::abs(vh[o] - v));
      }
  EXPECT_LE(worst, 1e-10);
}

TEST(HartreeEnergy, LinearLimitAtGroundState) {
  const GridSpec g = make_grid(16, 10.0);
  const Problem p = Problem::make(harmonic_polaron(0.0), g);
  const ElectronicGround gr = electronic_ground(p.op, 1e-10);
  EXPECT_NEAR(hartree_energy(gr.u, p.op, p.kernel).total, gr.mu, 1e-10);
  const EulerLagrangeReport el = euler_lagrange(gr.u, p.op, p.kernel);
  EXPECT_NEAR(el.lambda, gr.mu, 1e-10);
  EXPECT_LE(el.residual_l2, 1e-10);
  EXPECT_LE(l2_norm(sphere_gradient(gr.u, p.op, p.kernel)), 2e-10);
}

TEST_F(HartreeSmall, TrialStateBound) {
  const ElectronicGround gr = electronic_ground(p.op, 1e-10);
  const double i2 = interaction_term(gr.u, p.with_coupling(1.0).kernel);
  EXPECT_NEAR(hartree_energy(gr.u, p.op, p.kernel).total, gr.mu - 0.49 * i2, 1e-10);
}

TEST_F(HartreeSmall, LambdaIdentity) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const RealField u = random_normalized_state(p.grid, s);
    const double j = hartree_energy(u, p.op, p.kernel).total;
    const EulerLagrangeReport el = euler_lagrange(u, p.op, p.kernel);
    EXPECT_NEAR(el.lambda, j - interaction_term(u, p.kernel), 1e-12 * std::abs(el.lambda));
  }
}

TEST_F(HartreeSmall, GradientTangentAndFiniteDifferences) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const RealField u = random_normalized_state(p.grid, s);
    const RealField grad = sphere_gradient(u, p.op, p.kernel);
    EXPECT_NEAR(std::abs(inner_product(u, grad)), 0.0, 1e-10 * l2_norm(grad));
    const RealField d = random_tangent(u, 1000 + s);
    const double t = 1e-5;
    const double jp = hartree_energy(normalized(u + t * d), p.op, p.kernel).total;
    const double jm = hartree_energy(normalized(u - t * d), p.op, p.kernel).total;
    const double fd = (jp - jm) / (2 * t);
    const double an = inner_product(grad, d).real();
    EXPECT_NEAR(fd, an, 1e-6 * std::abs(an));
  }
}

TEST_F(HartreeSmall, RejectsUnnormalizedState) {
  RealField u = random_normalized_state(p.grid, 1);
  u *= 2.0;
  EXPECT_THROW(euler_lagrange(u, p.op, p.kernel), InvalidArgument);
}

TEST_F(HartreeSmall, FieldFromStateIdentities) {
  const RealField u = random_normalized_state(p.grid, 3);
  const FieldState fs = field_from_state(u, p.modes, p.model.g);
  EXPECT_NEAR(fs.zomega_norm2, interaction_term(u, p.kernel), 1e-12 * fs.zomega_norm2);
  const FieldState zero = field_from_state(u, p.modes, 0.0);
  for (const auto& v : zero.f.samples()) EXPECT_EQ(std::abs(v), 0.0);
}

TEST_F(HartreeSmall, FieldSignForRealDensity) {
  const RealField u = gaussian(p.grid);
  const FieldState fs = field_from_state(normalized(u), p.modes, p.model.g);
  const SpectralField r = density_hat(normalized(u));
  for (std::size_t i = 0; i < p.grid.size(); ++i)
    if (std::abs(r[i].imag()) < 1e-14 && r[i].real() >= 0) {
      EXPECT_LE(fs.f[i].real(), 1e-15);
    }
}

TEST_F(HartreeSmall, ReductionAndFieldOptimality) {
  std::mt19937_64 rng(77);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const RealField u = random_normalized_state(p.grid, s);
    const double j = hartree_energy(u, p.op, p.kernel).total;
    const FieldState fs = field_from_state(u, p.modes, p.model.g);
    const double e = kgs_energy(u, fs.f, p.op, p.modes, p.model.g).total;
    EXPECT_NEAR(e, j, 1e-12 * std::abs(j));
    const SpectralField delta = random_spectral_field(p.grid, rng, 0.1);
    const double shifted = kgs_energy(u, fs.f + delta, p.op, p.modes, p.model.g).total;
    const double expected = field_energy(delta, p.modes);
    EXPECT_NEAR(shifted - e, expected, 1e-10 * (std::abs(e) + expected));
  }
}

TEST_F(HartreeSmall, ZeroFieldGivesElectronicEnergy) {
  const RealField u = random_normalized_state(p.grid, 6);
  EXPECT_NEAR(kgs_energy(u, SpectralField(p.grid), p.op, p.modes, p.model.g).total, p.op.expectation(u), 1e-12);
}

}  // namespace
}  // namespace kgs
