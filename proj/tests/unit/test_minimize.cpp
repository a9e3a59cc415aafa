#include <gtest/gtest.h>

#include <cmath>

#include "kgs/error.hpp"
#include "kgs/minimize.hpp"
#include "kgs/random_states.hpp"

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

struct Fixture {
  explicit Fixture(double g, int n = 16, double l = 10.0)
      : p(Problem::make(harmonic_polaron(g), make_grid(n, l))), ground(electronic_ground(p.op, 1e-10, 2)) {}
  Problem p;
  ElectronicGround ground;
};

TEST(Minimize, LinearLimitReturnsElectronicGround) {
  Fixture f(0.0);
  const GroundStateResult r = minimize(f.p, f.ground, {});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.energy, f.ground.mu, 1e-10);
  EXPECT_LE(l2_norm(phase_aligned(r.u_gs, f.ground.u) - f.ground.u), 1e-8);
}

TEST(Minimize, BelowTrialStateBoundAndStationary) {
  Fixture f(0.5);
  const double trial = hartree_energy(f.ground.u, f.p.op, f.p.kernel).total;
  MinimizeOptions o;
  const GroundStateResult r = minimize(f.p, f.ground, o);
  ASSERT_TRUE(r.converged);
  EXPECT_LE(r.energy, trial);
  const EulerLagrangeReport el = euler_lagrange(r.u_gs, f.p.op, f.p.kernel);
  EXPECT_LE(el.residual_l2, o.residual_tol);
  EXPECT_NEAR(el.lambda, r.energy - el.interaction_value, 1e-12 * std::abs(el.lambda));
  for (std::size_t i = 1; i < r.energy_trace.size(); ++i)
    EXPECT_LE(r.energy_trace[i], r.energy_trace[i - 1] + 1e-12);
}

TEST(Minimize, MethodsAgree) {
  Fixture f(0.5);
  MinimizeOptions o;
  o.method = Method::both_crosscheck;
  const GroundStateResult r = minimize(f.p, f.ground, o);
  ASSERT_TRUE(r.crosscheck.has_value());
  EXPECT_TRUE(r.crosscheck->agree);
  EXPECT_LE(std::abs(r.crosscheck->energy_difference), 10 * o.energy_tol);
  EXPECT_LE(r.crosscheck->state_distance, 1e-5);
}

TEST(Minimize, ReproducibleBitForBit) {
  Fixture f(0.4);
  MinimizeOptions o;
  o.start = StartKind::random;
  o.seed = 9;
  const GroundStateResult a = minimize(f.p, f.ground, o), b = minimize(f.p, f.ground, o);
  EXPECT_EQ(a.energy, b.energy);
  EXPECT_EQ(a.energy_trace, b.energy_trace);
}

TEST(Minimize, IterationCapReportsNonConvergence) {
  Fixture f(0.5);
  MinimizeOptions o;
  o.max_iter = 2;
  o.start = StartKind::random;
  const GroundStateResult r = minimize(f.p, f.ground, o);
  EXPECT_FALSE(r.converged);
  EXPECT_FALSE(r.energy_trace.empty());
}

TEST(Minimize, OptionValidation) {
  MinimizeOptions o;
  o.mixing = 0.0;
  EXPECT_THROW(o.validate(), InvalidArgument);
  o = {};
  o.max_iter = 0;
  EXPECT_THROW(o.validate(), InvalidArgument);
}

TEST(PhiCheck, VanishesAtZeroCoupling) {
  Fixture f(0.0);
  const GroundStateResult r = minimize(f.p, f.ground, {});
  const Eigenpairs basis = lowest_eigenpairs(f.p.op, 10, 1e-9);
  const PhiCheck c = phi_fixed_point_check(r, f.p, basis, 10);
  EXPECT_LE(c.phi_norm, 1e-8);
  EXPECT_LE(c.lhs_rhs_gap, 1e-8);
}

TEST(PhiCheck, ImprovesWithBasis) {
  Fixture f(0.05);
  MinimizeOptions o;
  o.residual_tol = 1e-10;
  const GroundStateResult r = minimize(f.p, f.ground, o);
  const Eigenpairs basis = lowest_eigenpairs(f.p.op, 40, 1e-9);
  const PhiCheck small = phi_fixed_point_check(r, f.p, basis, 20);
  const PhiCheck large = phi_fixed_point_check(r, f.p, basis, 40);
  EXPECT_LT(large.lhs_rhs_gap, small.lhs_rhs_gap);
  EXPECT_LE(large.lhs_rhs_gap, std::max(1e-6, large.tail_estimate));
}

TEST(Uniqueness, ZeroCouplingCollapses) {
  Fixture f(0.0);
  const UniquenessReport u = uniqueness_probe(f.p, f.ground, {}, 3, 5);
  EXPECT_LE(u.max_pairwise_l2, 1e-8);
  EXPECT_LE(u.energy_spread, 10 * MinimizeOptions{}.energy_tol);
}

TEST(Uniqueness, SmallCoupling) {
  Fixture f(0.05);
  MinimizeOptions o;
  o.residual_tol = 1e-10;
  const UniquenessReport u = uniqueness_probe(f.p, f.ground, o, 3, 5, 2);
  EXPECT_LE(u.max_pairwise_l2, 1e-6);
  EXPECT_LE(u.energy_spread, 10 * o.energy_tol);
}

TEST(Existence, ScalesWithCoupling) {
  Fixture a(0.5, 12, 8.0);
  const Problem b = a.p.with_coupling(1.0);
  const ExistenceReport ra = existence_condition_report(a.p, a.ground.mu);
  const ExistenceReport rb = existence_condition_report(b, a.ground.mu);
  EXPECT_NEAR(rb.w1_l1, 4 * ra.w1_l1, 1e-12 * rb.w1_l1);
  EXPECT_NEAR(rb.w2_weak3, 4 * ra.w2_weak3, 1e-12 * rb.w2_weak3);
  const ExistenceReport z = existence_condition_report(a.p.with_coupling(0.0), a.ground.mu);
  EXPECT_EQ(z.w1_l1, 0.0);
  EXPECT_EQ(z.smallness_ratio, 0.0);
}

TEST(Existence, ConfiningBoostOpensGap) {
  Fixture f(0.2, 24, 12.0);
  const ExistenceReport r = existence_condition_report(f.p, f.ground.mu, 5.0, 2.5, 1e-8);
  EXPECT_GE(r.gap_mu, 5.0);
}

}  // namespace
}  // namespace kgs
