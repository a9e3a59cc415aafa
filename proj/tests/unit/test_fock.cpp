#include <gtest/gtest.h>

#include <cmath>

#include "kgs/error.hpp"
#include "kgs/fock.hpp"
#include "kgs/studies.hpp"

namespace kgs {
namespace {

FockSpec spec(int modes, int n_max, std::vector<double> omegas) {
  FockSpec s;
  s.n_modes = modes;
  s.n_max = n_max;
  s.omegas = std::move(omegas);
  return s;
}

double distance(const FockVector& a, const FockVector& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i) d += std::norm(a.amplitudes[i] - b.amplitudes[i]);
  return std::sqrt(d);
}

TEST(CoherentVector, ZeroIsVacuum) {
  const FockVector v = coherent_vector({0.0, 0.0}, spec(2, 5, {1.0, 1.0}));
  EXPECT_EQ(v.amplitudes[0], cplx(1.0));
  for (std::size_t i = 1; i < v.amplitudes.size(); ++i) EXPECT_EQ(v.amplitudes[i], cplx(0.0));
}

TEST(CoherentVector, EigenvectorOfAnnihilation) {
  const FockVector v = coherent_vector({0.5}, spec(1, 12, {1.0}));
  FockVector av = annihilate(v, 0);
  FockVector scaled = v;
  for (auto& a : scaled.amplitudes) a *= 0.5;
  EXPECT_LE(distance(av, scaled), 1e-8);
  EXPECT_NEAR(v.norm(), 1.0, 1e-10);
}

TEST(CoherentVector, TwoModeNormAndEigenvalues) {
  const std::vector<cplx> f{cplx(0.3, 0.1), cplx(-0.2, 0.25)};
  const FockVector v = coherent_vector(f, spec(2, 12, {1.0, 2.0}));
  EXPECT_NEAR(v.norm(), 1.0, 1e-10);
  for (int m = 0; m < 2; ++m) {
    FockVector scaled = v;
    for (auto& a : scaled.amplitudes) a *= f[static_cast<std::size_t>(m)];
    EXPECT_LE(distance(annihilate(v, m), scaled), 1e-8);
  }
}

TEST(CoherentVector, LargeAmplitudeRejected) {
  try {
    coherent_vector({3.0}, spec(1, 4, {1.0}));
    FAIL() << "accepted a truncated coherent state";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("n_max"), std::string::npos);
  }
}

TEST(CreateAnnihilate, CanonicalCommutatorBelowCutoff) {
  const FockSpec s = spec(1, 10, {1.0});
  const FockVector v = coherent_vector({0.3}, s);
  const FockVector aad = annihilate(create(v, 0), 0);
  const FockVector ada = create(annihilate(v, 0), 0);
  double d = 0.0;
  for (std::size_t i = 0; i + 1 < v.amplitudes.size(); ++i) d += std::norm(aad.amplitudes[i] - ada.amplitudes[i] - v.amplitudes[i]);
  EXPECT_LE(std::sqrt(d), 1e-12);
}

TEST(ExpectNumber, ClosedForms) {
  EXPECT_NEAR(expect_number({0.0}, spec(1, 12, {1.0})), 0.0, 1e-14);
  EXPECT_NEAR(expect_number({0.5}, spec(1, 12, {1.0})), 0.25, 1e-8);
  EXPECT_NEAR(expect_number({0.3, 0.4}, spec(2, 12, {1.0, 2.0})), 0.41, 1e-8);
}

TEST(ExpectField, ClosedForms) {
  const FockSpec s = spec(1, 12, {1.0});
  EXPECT_NEAR(expect_field({0.5}, {0.0}, s), 0.0, 1e-14);
  EXPECT_NEAR(expect_field({0.5}, {0.5}, s), std::sqrt(2.0) * 0.25, 1e-8);
  EXPECT_NEAR(expect_field({cplx(0.0, 0.5)}, {0.5}, s), 0.0, 1e-8);
}

TEST(TruncationTail, MatchesComplement) {
  double partial = 0.0, term = std::exp(-0.25);
  for (int n = 0; n <= 3; ++n) {
    partial += term;
    term *= 0.25 / (n + 1);
  }
  EXPECT_NEAR(truncation_tail(0.25, 3), 1.0 - partial, 1e-15);
}

TEST(FockSpec, DimensionCap) {
  FockSpec s = spec(3, 12, {1.0, 1.0, 1.0});
  s.dimension_cap = 1000;
  EXPECT_THROW(s.dimension(), InvalidArgument);
}

ModelSpec harmonic_polaron(double g) {
  ModelSpec m;
  m.potential = PotentialSpec::harmonic();
  m.dispersion = DispersionSpec::constant_one();
  m.coupling = CouplingSpec::polaron();
  m.g = g;
  return m;
}

TEST(MiniPauliFierz, DecoupledLimit) {
  const GridSpec g = make_grid(8, 8.0);
  const Problem p = Problem::make(harmonic_polaron(0.0), g);
  const MiniPauliFierz r = mini_pauli_fierz(p, axis_modes(g, 1), 3);
  EXPECT_NEAR(r.e_full, r.mu_v, 1e-8);
  EXPECT_NEAR(r.e_quasi, r.mu_v, 1e-8);
}

TEST(MiniPauliFierz, VariationalOrderingAndSecondOrder) {
  const GridSpec g = make_grid(8, 8.0);
  const Problem p = Problem::make(harmonic_polaron(0.05), g);
  const MiniPauliFierz r = mini_pauli_fierz(p, axis_modes(g, 2), 3);
  EXPECT_LE(r.e_full, r.e_quasi + 1e-9);
  EXPECT_GE(r.t_nc, 0.0);
  EXPECT_NEAR((r.e_quasi - r.e_full) / (0.05 * 0.05 * r.t_nc), 1.0, 0.25);
}

TEST(MiniPauliFierz, RejectsLargeGrid) {
  const Problem p = Problem::make(harmonic_polaron(0.1), make_grid(10, 8.0));
  EXPECT_THROW(mini_pauli_fierz(p, {1}, 2), InvalidArgument);
}

}  // namespace
}  // namespace kgs
