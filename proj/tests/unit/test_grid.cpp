#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kgs/error.hpp"
#include "kgs/grid.hpp"
#include "kgs/lattice_sums.hpp"

namespace kgs {
namespace {

constexpr double kPi = 3.14159265358979323846;

RealField random_field(const GridSpec& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  RealField f(grid);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = cplx(n(rng), n(rng));
  return f;
}

double max_abs(const RealField& f) {
  double m = 0.0;
  for (const auto& v : f.samples()) m = std::max(m, std::abs(v));
  return m;
}

TEST(MakeGrid, SpacingFromBox) {
  const GridSpec g = make_grid(16, 8.0);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.5);
  EXPECT_NEAR(g.freq_spacing(), kPi / 4, 1e-15);
  EXPECT_EQ(g.size(), 16u * 16 * 16);
}

TEST(MakeGrid, UnitFrequencySpacing) { EXPECT_NEAR(make_grid(8, 2 * kPi).freq_spacing(), 1.0, 4e-16); }

TEST(MakeGrid, RejectsOddN) {
  try {
    make_grid(7, 8.0);
    FAIL() << "odd N accepted";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("n_per_axis must be even"), std::string::npos);
  }
}

TEST(MakeGrid, RejectsNonPositiveBox) { EXPECT_THROW(make_grid(8, 0.0), InvalidArgument); }

TEST(MakeGrid, Invariants) {
  for (int n : {8, 12, 32, 48}) {
    for (double l : {1.0, 7.3, 14.0}) {
      const GridSpec g = make_grid(n, l);
      EXPECT_DOUBLE_EQ(g.spacing() * n, l);
      EXPECT_NEAR(g.freq_spacing() * g.spacing() * n, 2 * kPi, 4 * 2 * kPi * 2.2e-16);
      const auto x0 = g.position(g.origin_index());
      const auto k0 = g.wavevector(g.origin_index());
      for (int a = 0; a < 3; ++a) {
        EXPECT_EQ(x0[a], 0.0);
        EXPECT_EQ(k0[a], 0.0);
      }
    }
  }
}

TEST(ForwardTransform, ZeroMapsToZero) {
  const GridSpec g = make_grid(8, 5.0);
  const SpectralField f = forward_transform(RealField(g));
  for (const auto& v : f.samples()) EXPECT_EQ(v, cplx(0.0));
}

TEST(ForwardTransform, GaussianAnalytic) {
  const GridSpec g = make_grid(48, 14.0);
  const RealField f = sample_position(g, [](const auto& x) {
    return cplx(std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2));
  });
  const SpectralField F = forward_transform(f);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double k2 = g.k_norm(i) * g.k_norm(i);
    const double exact = std::pow(2 * kPi, 1.5) * std::exp(-k2 / 2);
    if (exact < 1e-3) continue;
    worst = std::max(worst, std::abs(F[i] - exact) / exact);
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(ForwardTransform, MatchesBruteForceDft) {
  const GridSpec g = make_grid(8, 3.7);
  const RealField f = random_field(g, 7);
  const SpectralField F = forward_transform(f);
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto kv = g.wavevector(k);
    cplx sum = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x) {
      const auto xv = g.position(x);
      sum += std::polar(1.0, -(kv[0] * xv[0] + kv[1] * xv[1] + kv[2] * xv[2])) * f[x];
    }
    sum *= g.cell_volume();
    worst = std::max(worst, std::abs(sum - F[k]));
    scale = std::max(scale, std::abs(sum));
  }
  EXPECT_LE(worst, 1e-12 * scale);
}

TEST(BarTransform, RoundTrip) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const GridSpec g = make_grid(12, 4.5);
    const RealField f = random_field(g, seed);
    RealField back = bar_transform(forward_transform(f));
    back *= 1.0 / std::pow(2 * kPi, 3);
    EXPECT_LE(max_abs(back - f), 1e-12 * max_abs(f));
  }
}

TEST(BarTransform, GaussianAnalytic) {
  const GridSpec g = make_grid(48, 14.0);
  const SpectralField G = sample_frequency(g, [](const auto& k) {
    return cplx(std::pow(2 * kPi, 1.5) * std::exp(-(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) / 2));
  });
  const RealField x = bar_transform(G);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double exact = std::pow(2 * kPi, 3) * std::exp(-g.x_norm(i) * g.x_norm(i) / 2);
    if (exact < 1e-3 * std::pow(2 * kPi, 3)) continue;
    worst = std::max(worst, std::abs(x[i] - exact) / exact);
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(InnerProduct, SelfProductRealNonNegative) {
  const GridSpec g = make_grid(8, 3.0);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const RealField f = random_field(g, s);
    const cplx p = inner_product(f, f);
    EXPECT_GE(p.real(), 0.0);
    EXPECT_EQ(p.imag(), 0.0);
  }
}

TEST(InnerProduct, NormalizedGaussian) {
  const GridSpec g = make_grid(48, 14.0);
  const RealField u = sample_position(g, [](const auto& x) {
    return cplx(std::pow(kPi, -0.75) * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2));
  });
  EXPECT_NEAR(inner_product(u, u).real(), 1.0, 1e-10);
}

TEST(InnerProduct, Parseval) {
  const GridSpec g = make_grid(10, 6.0);
  const RealField f = random_field(g, 11), h = random_field(g, 12);
  const SpectralField F = forward_transform(f), H = forward_transform(h);
  SpectralField prod(g);
  for (std::size_t i = 0; i < g.size(); ++i) prod[i] = std::conj(F[i]) * H[i];
  const cplx rhs = spectral_integral(prod) / std::pow(2 * kPi, 3);
  const cplx lhs = inner_product(f, h);
  EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
}

TEST(H1dot, ConstantIsZero) {
  const GridSpec g = make_grid(8, 3.0);
  const RealField c = sample_position(g, [](const auto&) { return cplx(2.5, -1.0); });
  EXPECT_NEAR(h1dot_seminorm(c), 0.0, 1e-20);
}

TEST(H1dot, GaussianKinetic) {
  const GridSpec g = make_grid(48, 14.0);
  const RealField u = sample_position(g, [](const auto& x) {
    return cplx(std::pow(kPi, -0.75) * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2));
  });
  EXPECT_NEAR(h1dot_seminorm(u), 1.5, 1e-8);
}

TEST(H1dot, Homogeneous) {
  const GridSpec g = make_grid(8, 3.0);
  const RealField u = random_field(g, 3);
  const cplx alpha(0.5, 2.0);
  EXPECT_NEAR(h1dot_seminorm(alpha * u), std::norm(alpha) * h1dot_seminorm(u), 1e-13 * h1dot_seminorm(u));
}

TEST(SpectralIntegral, Constant) {
  const GridSpec g = make_grid(8, 2 * kPi);
  SpectralField one(g);
  for (auto& v : one.samples()) v = 1.0;
  EXPECT_NEAR(spectral_integral(one).real(), 512.0, 1e-10);
  EXPECT_EQ(spectral_integral(SpectralField(g)), cplx(0.0));
}

TEST(SpectralIntegral, Gaussian) {
  const GridSpec g = make_grid(32, 14.0);
  const SpectralField G = sample_frequency(g, [](const auto& k) {
    return cplx(std::exp(-(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) / 2));
  });
  EXPECT_NEAR(spectral_integral(G).real(), std::pow(2 * kPi, 1.5), 1e-8);
}

TEST(Fields, MismatchedGridsRejected) {
  RealField a(make_grid(8, 1.0)), b(make_grid(8, 2.0));
  EXPECT_THROW(a += b, InvalidArgument);
}

TEST(LatticeSums, ZetaAtZero) { EXPECT_NEAR(epstein_zeta(0.0), -1.0, 1e-10); }

TEST(LatticeSums, ZetaAbsolutelyConvergentRegion) {
  // Z(6) from a direct sum with a tail estimate.
  double direct = 0.0;
  const int r = 40;
  for (int i = -r; i <= r; ++i)
    for (int j = -r; j <= r; ++j)
      for (int k = -r; k <= r; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        direct += std::pow(double(i * i + j * j + k * k), -3.0);
      }
  EXPECT_NEAR(epstein_zeta(6.0), direct, 1e-3);
}

TEST(LatticeSums, CellAverageOfConstant) {
  const GridSpec g = make_grid(16, 10.0);
  EXPECT_NEAR(k_zero_cell_average([](const auto&) { return 3.25; }, g), 3.25, 1e-12);
}

TEST(LatticeSums, CellAverageInverseSquareMonteCarlo) {
  const GridSpec g = make_grid(16, 10.0);
  const double dk = g.freq_spacing();
  const double avg = k_zero_cell_average(
      [](const auto& k) { return 1.0 / (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]); }, g, -2.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-dk / 2, dk / 2);
  double mc = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    mc += 1.0 / (a * a + b * b + c * c);
  }
  mc /= n;
  EXPECT_NEAR(avg / mc, 1.0, 0.005);
  EXPECT_NEAR(avg, cube_power_mean(-2.0) / (dk * dk), 1e-8 * avg);
}

TEST(LatticeSums, CellAverageInverseLinearFinite) {
  const GridSpec g = make_grid(16, 10.0);
  const double avg =
      k_zero_cell_average([](const auto& k) { return 1.0 / std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]); }, g, -1.0);
  EXPECT_TRUE(std::isfinite(avg));
  EXPECT_GT(avg, 0.0);
}

TEST(WeakLorentz, SingleCell) {
  const GridSpec g = make_grid(8, 5.0);
  SpectralField s(g);
  s[17] = 2.5;
  EXPECT_NEAR(weak_lorentz_norm(s, 3.0), 2.5 * std::pow(g.freq_cell_volume(), 1.0 / 3), 1e-14);
}

TEST(WeakLorentz, Homogeneous) {
  const GridSpec g = make_grid(12, 5.0);
  const SpectralField s = sample_frequency(g, [](const auto& k) { return cplx(std::exp(-k[0] * k[0]) + k[1]); });
  EXPECT_DOUBLE_EQ(weak_lorentz_norm(-3.0 * s, 3.0), 3.0 * weak_lorentz_norm(s, 3.0));
}

}  // namespace
}  // namespace kgs
