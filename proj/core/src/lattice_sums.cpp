#include "kgs/lattice_sums.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace kgs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kEwaldRange = 6;

// Upper incomplete gamma for any real a, x > 0, stepping up to a > 0 with
// Gamma(a, x) = (Gamma(a+1, x) - x^a e^-x) / a.
double upper_gamma(double a, double x) {
  if (a > 0.0) return boost::math::tgamma(a, x);
  if (a == 0.0) return boost::math::expint(1, x);
  return (upper_gamma(a + 1.0, x) - std::pow(x, a) * std::exp(-x)) / a;
}

// Ewald splitting at the self-dual point:
// pi^-s Gamma(s) Z(2s) = sum' [ (pi m^2)^-s Gamma(s, pi m^2)
//                              + (pi m^2)^(s-3/2) Gamma(3/2-s, pi m^2) ]
//                        + 1/(s-3/2) - 1/s
double epstein_ewald(double s) {
  double acc = 0.0;
  for (int a = -kEwaldRange; a <= kEwaldRange; ++a)
    for (int b = -kEwaldRange; b <= kEwaldRange; ++b)
      for (int c = -kEwaldRange; c <= kEwaldRange; ++c) {
        const int m2 = a * a + b * b + c * c;
        if (m2 == 0) continue;
        const double x = kPi * m2;
        acc += std::pow(x, -s) * upper_gamma(s, x);
        acc += std::pow(x, s - 1.5) * upper_gamma(1.5 - s, x);
      }
  acc += 1.0 / (s - 1.5) - 1.0 / s;
  return acc * std::pow(kPi, s) / boost::math::tgamma(s);
}

}  // namespace

double epstein_zeta(double p) {
  if (p == 3.0) return std::numeric_limits<double>::infinity();
  if (p == 0.0) return -1.0;
  if (p > 0.0) return epstein_ewald(0.5 * p);
  // Trivial zeros at negative even p.
  if (std::fmod(-p, 2.0) == 0.0) return 0.0;
  // Reflection: pi^-s Gamma(s) Z(2s) = pi^(s-3/2) Gamma(3/2-s) Z(3-2s).
  const double s = 0.5 * p;
  return std::pow(kPi, 2.0 * s - 1.5) * boost::math::tgamma(1.5 - s) / boost::math::tgamma(s) *
         epstein_ewald(1.5 - s);
}

double cube_power_mean(double q) {
  if (!(q > -3.0)) return std::numeric_limits<double>::infinity();
  if (q == 0.0) return 1.0;
  // Six pyramids over the faces; the radial integral is done in closed form,
  // leaving the face integral of (1/4 + y^2 + z^2)^(q/2) on one quadrant.
  using Gauss = boost::math::quadrature::gauss<double, 30>;
  const auto face = [q](double y) {
    return Gauss::integrate([q, y](double z) { return std::pow(0.25 + y * y + z * z, 0.5 * q); },
                            0.0, 0.5);
  };
  const double quadrant = Gauss::integrate(face, 0.0, 0.5);
  return 3.0 / (3.0 + q) * 4.0 * quadrant;
}

double origin_weight(const PowerLaw& law, double freq_spacing, KZeroPolicy policy) {
  if (law.coefficient == 0.0) return law.regular;
  if (!law.integrable()) return std::numeric_limits<double>::infinity();
  if (law.exponent == 0.0) return law.coefficient + law.regular;
  const double scale = law.coefficient * std::pow(freq_spacing, law.exponent);
  if (policy == KZeroPolicy::cell_average) return scale * cube_power_mean(law.exponent) + law.regular;
  return -scale * epstein_zeta(-law.exponent) + law.regular;
}

double k_zero_cell_average(const std::function<double(const std::array<double, 3>&)>& f,
                           const GridSpec& grid, double singular_exponent) {
  if (!(singular_exponent > -3.0)) throw InvalidArgument("singular exponent must exceed -3");
  using Gauss = boost::math::quadrature::gauss<double, 20>;
  const double a = 0.5 * grid.freq_spacing();
  // r = t^beta makes r^(2+q) dr smooth in t.
  const double beta = 1.0 / (3.0 + singular_exponent);
  double total = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    for (double side : {-1.0, 1.0}) {
      const auto on_face = [&](double y, double z) {
        std::array<double, 3> p{};
        p[axis] = side * a;
        p[(axis + 1) % 3] = y;
        p[(axis + 2) % 3] = z;
        const auto radial = [&](double t) {
          if (t <= 0.0) return 0.0;
          const double r = std::pow(t, beta);
          const double dr = beta * std::pow(t, beta - 1.0);
          const std::array<double, 3> k{r * p[0], r * p[1], r * p[2]};
          return f(k) * r * r * dr;
        };
        return Gauss::integrate(radial, 0.0, 1.0) * a;
      };
      total += Gauss::integrate(
          [&](double y) { return Gauss::integrate([&](double z) { return on_face(y, z); }, -a, a); },
          -a, a);
    }
  }
  return total / (8.0 * a * a * a);
}

double weak_lorentz_norm(const SpectralField& g, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("weak Lorentz exponent must be at least 1");
  std::vector<double> mags(g.size());
  std::transform(g.samples().begin(), g.samples().end(), mags.begin(),
                 [](const cplx& z) { return std::abs(z); });
  std::sort(mags.begin(), mags.end(), std::greater<>());
  const double cell = g.grid().freq_cell_volume();
  double best = 0.0;
  for (std::size_t j = 0; j < mags.size() && mags[j] > 0.0; ++j)
    best = std::max(best, mags[j] * std::pow(static_cast<double>(j + 1) * cell, 1.0 / p));
  return best;
}

}  // namespace kgs
