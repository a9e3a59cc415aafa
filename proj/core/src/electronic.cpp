#include "kgs/electronic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "fft.hpp"

namespace kgs {

namespace {

using detail::fft_wavenumber;
using detail::FftPlans;

double sqr(double x) { return x * x; }

}  // namespace

ElectronicOperator::ElectronicOperator(const GridSpec& grid, RealField potential)
    : grid_(grid), potential_(std::move(potential)) {
  if (!(potential_.grid() == grid_)) throw InvalidArgument("potential lives on a different grid");
  const int n = grid_.n();
  const double dk = grid_.freq_spacing();
  v_real_.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const cplx v = potential_[i];
    if (!std::isfinite(v.real()) || std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v.real())))
      throw InvalidArgument("potential must be real and finite");
    v_real_[i] = v.real();
    potential_[i] = v.real();
  }
  k2_full_.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const auto [a, b, c] = grid_.unflatten(i);
    k2_full_[i] = dk * dk * (sqr(fft_wavenumber(a, n)) + sqr(fft_wavenumber(b, n)) + sqr(fft_wavenumber(c, n)));
  }
  const int nh = n / 2 + 1;
  k2_half_.resize(static_cast<std::size_t>(n) * n * nh);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < nh; ++c)
        k2_half_[(static_cast<std::size_t>(a) * n + b) * nh + c] =
            dk * dk * (sqr(fft_wavenumber(a, n)) + sqr(fft_wavenumber(b, n)) + sqr(c));
}

ElectronicOperator ElectronicOperator::from_spec(const PotentialSpec& spec, const GridSpec& grid) {
  return ElectronicOperator(grid, sample_potential(spec, grid));
}

void ElectronicOperator::apply_real(const double* in, double* out, const double* extra) const {
  const auto& plans = FftPlans::get(grid_.n());
  const std::size_t total = grid_.size();
  std::vector<double> tmp(in, in + total);
  std::vector<cplx> half(plans.half_size());
  plans.r2c(tmp.data(), half.data());
  const double inv = 1.0 / static_cast<double>(total);
  for (std::size_t i = 0; i < half.size(); ++i) half[i] *= k2_half_[i] * inv;
  plans.c2r(half.data(), out);
  for (std::size_t i = 0; i < total; ++i) {
    double v = v_real_[i];
    if (extra) v += extra[i];
    out[i] += v * in[i];
  }
}

void ElectronicOperator::precondition_real(const double* in, double* out, double shift) const {
  const auto& plans = FftPlans::get(grid_.n());
  const std::size_t total = grid_.size();
  std::vector<double> tmp(in, in + total);
  std::vector<cplx> half(plans.half_size());
  plans.r2c(tmp.data(), half.data());
  const double inv = 1.0 / static_cast<double>(total);
  for (std::size_t i = 0; i < half.size(); ++i) half[i] *= inv / (k2_half_[i] + shift);
  plans.c2r(half.data(), out);
}

void ElectronicOperator::apply_complex(const cplx* in, cplx* out, const double* extra) const {
  const auto& plans = FftPlans::get(grid_.n());
  const std::size_t total = grid_.size();
  std::vector<cplx> tmp(in, in + total);
  plans.forward(tmp.data());
  const double inv = 1.0 / static_cast<double>(total);
  for (std::size_t i = 0; i < total; ++i) tmp[i] *= k2_full_[i] * inv;
  plans.backward(tmp.data());
  for (std::size_t i = 0; i < total; ++i) {
    double v = v_real_[i];
    if (extra) v += extra[i];
    out[i] = tmp[i] + v * in[i];
  }
}

void ElectronicOperator::precondition_complex(const cplx* in, cplx* out, double shift) const {
  const auto& plans = FftPlans::get(grid_.n());
  const std::size_t total = grid_.size();
  std::copy(in, in + total, out);
  plans.forward(out);
  const double inv = 1.0 / static_cast<double>(total);
  for (std::size_t i = 0; i < total; ++i) out[i] *= inv / (k2_full_[i] + shift);
  plans.backward(out);
}

RealField ElectronicOperator::apply(const RealField& u) const {
  if (!(u.grid() == grid_)) throw InvalidArgument("field lives on a different grid than the operator");
  RealField out(grid_);
  apply_complex(u.data(), out.data());
  return out;
}

RealField ElectronicOperator::kinetic(const RealField& u) const {
  if (!(u.grid() == grid_)) throw InvalidArgument("field lives on a different grid than the operator");
  const auto& plans = FftPlans::get(grid_.n());
  RealField out = u;
  plans.forward(out.data());
  const double inv = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) out[i] *= k2_full_[i] * inv;
  plans.backward(out.data());
  return out;
}

double ElectronicOperator::expectation(const RealField& u) const { return inner_product(u, apply(u)).real(); }

RealField apply_hv(const ElectronicOperator& op, const RealField& u) { return op.apply(u); }

double Eigenpairs::gap() const {
  if (values.empty()) return 0.0;
  const double e0 = values.front();
  for (double e : values)
    if (e > e0 + 1e-8 * std::abs(e0)) return e - e0;
  return 0.0;
}

int Eigenpairs::first_excited_degeneracy() const {
  const double g = gap();
  if (g == 0.0) return 0;
  const double e1 = values.front() + g;
  const double window = 1e-6 * std::max(1.0, std::abs(e1));
  return static_cast<int>(std::count_if(values.begin(), values.end(),
                                        [&](double e) { return std::abs(e - e1) <= window; }));
}

RealField phase_fixed(const RealField& u) {
  std::size_t imax = 0;
  for (std::size_t i = 1; i < u.size(); ++i)
    if (std::abs(u[i]) > std::abs(u[imax])) imax = i;
  const double mag = std::abs(u[imax]);
  if (mag == 0.0) return u;
  return (std::conj(u[imax]) / mag) * u;
}

namespace {

Eigenpairs solve_real(const ElectronicOperator& op, int count, double tol, std::uint64_t seed,
                      const std::vector<double>* extra, const std::vector<RealField>* start) {
  const GridSpec& grid = op.grid();
  const auto dim = static_cast<Eigen::Index>(grid.size());
  const double* ex = extra ? extra->data() : nullptr;
  if (extra && extra->size() != grid.size()) throw InvalidArgument("extra potential has the wrong size");
  BlockOperator<double> apply = [&](const Block<double>& in, Block<double>& out) {
    out.resize(in.rows(), in.cols());
    for (Eigen::Index j = 0; j < in.cols(); ++j) op.apply_real(in.col(j).data(), out.col(j).data(), ex);
  };
  // s D^-1/2 (-Lap + s)^-1 D^-1/2 with D = (V_+ + s)/s, as in the minimizer.
  // s is the geometric mean of the kinetic scale 1 and the largest V_+.
  std::vector<double> vplus(grid.size());
  double vmax = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    vplus[i] = std::max(0.0, op.potential()[i].real() + (ex ? ex[i] : 0.0));
    vmax = std::max(vmax, vplus[i]);
  }
  const double shift = std::max(1.0, std::sqrt(vmax));
  std::vector<double> damp(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) damp[i] = std::sqrt(shift / (vplus[i] + shift));
  BlockOperator<double> precond = [&](const Block<double>& in, Block<double>& out) {
    out.resize(in.rows(), in.cols());
    std::vector<double> tmp(grid.size());
    for (Eigen::Index j = 0; j < in.cols(); ++j) {
      for (std::size_t i = 0; i < grid.size(); ++i) tmp[i] = damp[i] * in(static_cast<Eigen::Index>(i), j);
      op.precondition_real(tmp.data(), out.col(j).data(), shift);
      for (std::size_t i = 0; i < grid.size(); ++i) out(static_cast<Eigen::Index>(i), j) *= shift * damp[i];
    }
  };
  const double scale = std::pow(grid.cell_volume(), 0.5);
  Block<double> init;
  const Block<double>* init_ptr = nullptr;
  if (start && !start->empty()) {
    init.resize(dim, static_cast<Eigen::Index>(start->size()));
    for (std::size_t j = 0; j < start->size(); ++j)
      for (Eigen::Index i = 0; i < dim; ++i)
        init(i, static_cast<Eigen::Index>(j)) = (*start)[j][static_cast<std::size_t>(i)].real() * scale;
    init_ptr = &init;
  }

  // Large requests are solved in chunks, deflating the converged ones.
  constexpr int kChunk = 24;
  Block<double> vectors(dim, 0);
  Eigen::VectorXd values(0), residuals(0);
  int iterations = 0;
  while (vectors.cols() < count) {
    LobpcgOptions opts;
    opts.count = std::min<int>(kChunk, count - static_cast<int>(vectors.cols()));
    opts.guard = std::max(3, opts.count / 3);
    opts.tol = tol;
    opts.seed = seed + static_cast<std::uint64_t>(vectors.cols());
    const LobpcgResult<double> res =
        lobpcg<double>(dim, apply, precond, opts, vectors.cols() == 0 ? init_ptr : nullptr, &vectors);
    iterations += res.iterations;
    const Eigen::Index old = vectors.cols();
    vectors.conservativeResize(dim, old + res.vectors.cols());
    vectors.rightCols(res.vectors.cols()) = res.vectors;
    values.conservativeResize(old + res.values.size());
    values.tail(res.values.size()) = res.values;
    residuals.conservativeResize(old + res.residuals.size());
    residuals.tail(res.residuals.size()) = res.residuals;
  }
  LobpcgResult<double> res;
  res.values = values;
  res.vectors = std::move(vectors);
  res.residuals = residuals;
  res.iterations = iterations;

  std::vector<int> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return res.values(a) < res.values(b); });
  Eigenpairs out;
  out.iterations = res.iterations;
  for (int j : order) {
    RealField u(grid);
    for (Eigen::Index i = 0; i < dim; ++i) u[static_cast<std::size_t>(i)] = res.vectors(i, j) / scale;
    out.values.push_back(res.values(j));
    out.states.push_back(phase_fixed(u));
    out.residuals.push_back(res.residuals(j));
  }
  return out;
}

}  // namespace

Eigenpairs lowest_eigenpairs(const ElectronicOperator& op, int count, double tol, std::uint64_t seed,
                             const std::vector<double>* extra_potential) {
  return solve_real(op, count, tol, seed, extra_potential, nullptr);
}

Eigenpairs lowest_eigenpairs_from(const ElectronicOperator& op, int count, double tol,
                                  const std::vector<RealField>& start, std::uint64_t seed,
                                  const std::vector<double>* extra_potential) {
  return solve_real(op, count, tol, seed, extra_potential, &start);
}

Eigenpairs dense_eigenpairs(const ElectronicOperator& op, std::size_t max_dim) {
  const GridSpec& grid = op.grid();
  const std::size_t n = grid.size();
  if (n > max_dim) throw InvalidArgument("dense eigensolve limited to " + std::to_string(max_dim) + " points");
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd h(dim, dim);
  std::vector<double> e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply_real(e.data(), col.data());
    for (std::size_t i = 0; i < n; ++i) h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    e[j] = 0.0;
  }
  h = 0.5 * (h + h.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolve failed", 0.0, 0);
  const double scale = std::sqrt(grid.cell_volume());
  Eigenpairs out;
  for (Eigen::Index j = 0; j < dim; ++j) {
    RealField u(grid);
    for (Eigen::Index i = 0; i < dim; ++i) u[static_cast<std::size_t>(i)] = es.eigenvectors()(i, j) / scale;
    u = phase_fixed(u);
    const RealField hu = op.apply(u);
    RealField r = hu;
    r.axpy(-es.eigenvalues()(j), u);
    out.values.push_back(es.eigenvalues()(j));
    out.residuals.push_back(l2_norm(r));
    out.states.push_back(std::move(u));
  }
  return out;
}

ElectronicGround electronic_ground(const ElectronicOperator& op, double tol, int count, std::uint64_t seed) {
  if (count < 2) throw InvalidArgument("electronic_ground needs at least two eigenpairs for the gap");
  Eigenpairs pairs = lowest_eigenpairs(op, count, tol, seed);
  ElectronicGround out;
  out.mu = pairs.values.front();
  out.u = pairs.states.front();
  out.gap = pairs.gap();
  out.first_excited_degeneracy = pairs.first_excited_degeneracy();
  out.pairs = std::move(pairs);
  return out;
}

double qv_norm(const RealField& u, const RealField& potential) {
  u.check_same(potential);
  double vplus = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) vplus += std::max(0.0, potential[i].real()) * std::norm(u[i]);
  vplus *= u.grid().cell_volume();
  const double l2 = inner_product(u, u).real();
  return std::sqrt(l2 + h1dot_seminorm(u) + vplus);
}

CoercivityResult coercivity_check(const ElectronicOperator& op, const RealField& u, double a, double b) {
  if (!(a >= 0.0 && a < 1.0)) throw InvalidArgument("coercivity parameter a must lie in [0, 1)");
  CoercivityResult out;
  out.lhs = h1dot_seminorm(u);
  out.rhs = (op.expectation(u) + b * inner_product(u, u).real()) / (1.0 - a);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-10);
  return out;
}

std::vector<double> minimal_form_bound(const ElectronicOperator& op, const std::vector<RealField>& states,
                                       const std::vector<double>& a_values) {
  std::vector<double> lhs, energy, norm2;
  for (const auto& u : states) {
    lhs.push_back(h1dot_seminorm(u));
    energy.push_back(op.expectation(u));
    norm2.push_back(inner_product(u, u).real());
  }
  std::vector<double> out;
  for (double a : a_values) {
    if (!(a >= 0.0 && a < 1.0)) throw InvalidArgument("coercivity parameter a must lie in [0, 1)");
    double b = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) b = std::max(b, ((1.0 - a) * lhs[i] - energy[i]) / norm2[i]);
    out.push_back(b);
  }
  return out;
}

double eta_profile(double r) noexcept {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * (r - 1.0));
  return c * c;
}

RealField confining_potential(const RealField& potential, double c, double radius) {
  const GridSpec& grid = potential.grid();
  if (!(radius > 0.0)) throw InvalidArgument("confining radius must be positive");
  if (!(2.0 * radius < 0.5 * grid.box_length()))
    throw InvalidArgument("confining radius too large for the box (need 2R < L/2)");
  RealField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double eta = eta_profile(grid.x_norm(i) / radius);
    out[i] = std::max(0.0, potential[i].real()) + 2.0 * c * eta * eta;
  }
  return out;
}

GapProbe confining_gap_probe(const PotentialSpec& potential, double c, double radius, const GridSpec& grid,
                             double tol) {
  if (!potential.confining()) throw InvalidArgument("confining_gap_probe needs a confining potential");
  if (!(c >= 0.0)) throw InvalidArgument("confining boost C must be non-negative");
  const RealField v = sample_potential(potential, grid);
  const RealField v1 = confining_potential(v, c, radius);
  GapProbe out;
  out.mu_v = lowest_eigenpairs(ElectronicOperator(grid, v), 1, tol).values.front();
  out.mu_v1c = lowest_eigenpairs(ElectronicOperator(grid, v1), 1, tol).values.front();
  out.gap_ok = out.mu_v1c - out.mu_v >= c;
  return out;
}

}  // namespace kgs
