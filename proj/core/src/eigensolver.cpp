#include "kgs/eigensolver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "kgs/error.hpp"

namespace kgs {

namespace {

template <class Scalar>
using Mat = Block<Scalar>;
using Eigen::Index;

template <class Scalar>
Scalar random_scalar(std::mt19937_64& rng, std::normal_distribution<double>& nd) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return nd(rng);
  } else {
    const double re = nd(rng);
    return Scalar(re, nd(rng));
  }
}

template <class Scalar>
Mat<Scalar> take_columns(const Mat<Scalar>& a, const std::vector<Index>& cols) {
  Mat<Scalar> out(a.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = a.col(cols[j]);
  return out;
}

// Y <- Y - Q (Q^* Y), applied to the image block as well when given.
template <class Scalar>
void project_out(const Mat<Scalar>& q, const Mat<Scalar>* aq, Mat<Scalar>& y, Mat<Scalar>* ay) {
  if (q.cols() == 0 || y.cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const Mat<Scalar> c = q.adjoint() * y;
    y.noalias() -= q * c;
    if (ay && aq) ay->noalias() -= *aq * c;
  }
}

// Orthonormalize the columns of Y through the eigendecomposition of its Gram
// matrix, dropping numerically dependent directions. Two passes.
template <class Scalar>
void orthonormalize(Mat<Scalar>& y, Mat<Scalar>* ay) {
  for (int pass = 0; pass < 2 && y.cols() > 0; ++pass) {
    Mat<Scalar> g = y.adjoint() * y;
    g = (0.5 * (g + g.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(g);
    const Eigen::VectorXd& d = es.eigenvalues();
    const double dmax = d.maxCoeff();
    if (!(dmax > 0.0)) {
      y.resize(y.rows(), 0);
      if (ay) ay->resize(ay->rows(), 0);
      return;
    }
    std::vector<Index> keep;
    for (Index i = 0; i < d.size(); ++i)
      if (d(i) > 1e-13 * dmax) keep.push_back(i);
    Mat<Scalar> m(y.cols(), static_cast<Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
      m.col(static_cast<Index>(j)) = es.eigenvectors().col(keep[j]) / std::sqrt(d(keep[j]));
    y = (y * m).eval();
    if (ay) *ay = (*ay * m).eval();
  }
}

}  // namespace

template <class Scalar>
LobpcgResult<Scalar> lobpcg(Index dim, const BlockOperator<Scalar>& apply,
                            const BlockOperator<Scalar>& precondition, const LobpcgOptions& opts,
                            const Mat<Scalar>* start, const Mat<Scalar>* locked) {
  if (opts.count < 1) throw InvalidArgument("eigenpair count must be at least 1");
  if (!(opts.tol > 0.0)) throw InvalidArgument("eigensolver tolerance must be positive");
  if (opts.count > dim) throw InvalidArgument("more eigenpairs requested than the dimension");
  const Index m_cap = std::max<Index>(opts.count, std::min<Index>(dim / 3, 2 * opts.count + 16));
  Index m = std::min<Index>(opts.count + std::max(0, opts.guard), m_cap);

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> nd;
  Mat<Scalar> x(dim, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < dim; ++i) x(i, j) = random_scalar<Scalar>(rng, nd);
  if (start) {
    const Index c = std::min(m, start->cols());
    x.leftCols(c) = start->leftCols(c);
  }
  const Mat<Scalar> none(dim, 0);
  const Mat<Scalar>& lock = locked ? *locked : none;
  if (lock.cols() + m > dim) throw InvalidArgument("too many locked vectors for the dimension");
  project_out<Scalar>(lock, nullptr, x, nullptr);
  orthonormalize<Scalar>(x, nullptr);
  if (x.cols() < m) throw InvalidArgument("eigensolver start block is rank deficient");

  Mat<Scalar> ax(dim, m);
  apply(x, ax);

  Eigen::VectorXd lambda(m);
  const auto rayleigh_ritz_x = [&] {
    Mat<Scalar> h = x.adjoint() * ax;
    h = (0.5 * (h + h.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(h);
    x = (x * es.eigenvectors()).eval();
    ax = (ax * es.eigenvectors()).eval();
    lambda = es.eigenvalues();
  };
  rayleigh_ritz_x();

  Mat<Scalar> p(dim, 0), ap(dim, 0);
  Eigen::VectorXd res(m);
  double best = std::numeric_limits<double>::infinity();

  for (int it = 0; it < opts.max_iter; ++it) {
    if (it > 0 && opts.refresh_every > 0 && it % opts.refresh_every == 0) {
      project_out<Scalar>(lock, nullptr, x, nullptr);
      orthonormalize<Scalar>(x, nullptr);
      apply(x, ax);
      rayleigh_ritz_x();
      if (p.cols() > 0) apply(p, ap);
    }

    // A near-degenerate cluster straddling the block edge stalls convergence
    // of the wanted columns; widen the block until its edge clears the last
    // wanted Ritz value.
    if (it > 0 && it % 10 == 0 && m < m_cap) {
      const double spread = std::max(1.0, std::abs(lambda(m - 1) - lambda(0)));
      if (lambda(m - 1) - lambda(opts.count - 1) < 1e-2 * spread) {
        const Index extra = std::min<Index>(std::max<Index>(2, m / 4), m_cap - m);
        Mat<Scalar> y(dim, extra);
        for (Index j = 0; j < extra; ++j)
          for (Index i = 0; i < dim; ++i) y(i, j) = random_scalar<Scalar>(rng, nd);
        project_out<Scalar>(lock, nullptr, y, nullptr);
        project_out<Scalar>(x, nullptr, y, nullptr);
        project_out<Scalar>(p, nullptr, y, nullptr);
        orthonormalize<Scalar>(y, nullptr);
        if (y.cols() > 0) {
          Mat<Scalar> ay(dim, y.cols());
          apply(y, ay);
          Mat<Scalar> xn(dim, m + y.cols()), axn(dim, m + y.cols());
          xn << x, y;
          axn << ax, ay;
          x = std::move(xn);
          ax = std::move(axn);
          m = x.cols();
          lambda.resize(m);
          res.resize(m);
          rayleigh_ritz_x();
        }
      }
    }

    Mat<Scalar> r = ax - x * lambda.asDiagonal();
    for (Index j = 0; j < m; ++j) res(j) = r.col(j).norm();
    const double worst = res.head(opts.count).maxCoeff();
    best = std::min(best, worst);
    if (worst <= opts.tol) {
      LobpcgResult<Scalar> out;
      out.values = lambda.head(opts.count);
      out.vectors = x.leftCols(opts.count);
      out.residuals = res.head(opts.count);
      out.iterations = it;
      return out;
    }

    std::vector<Index> active;
    for (Index j = 0; j < m; ++j)
      if (res(j) > opts.tol) active.push_back(j);

    Mat<Scalar> ra = take_columns<Scalar>(r, active);
    Mat<Scalar> w(dim, ra.cols());
    precondition(ra, w);

    // P is kept orthonormal and orthogonal to X; W orthogonal to both.
    project_out<Scalar>(x, &ax, p, &ap);
    orthonormalize<Scalar>(p, &ap);
    project_out<Scalar>(lock, nullptr, w, nullptr);
    project_out<Scalar>(x, nullptr, w, nullptr);
    project_out<Scalar>(p, nullptr, w, nullptr);
    orthonormalize<Scalar>(w, nullptr);
    if (w.cols() == 0 && p.cols() == 0) break;
    Mat<Scalar> aw(dim, w.cols());
    if (w.cols() > 0) apply(w, aw);

    // Rayleigh-Ritz on span[X, W, P], assembled block by block.
    const Index nw = w.cols(), np = p.cols(), ns = m + nw + np;
    const std::array<const Mat<Scalar>*, 3> blk{&x, &w, &p};
    const std::array<const Mat<Scalar>*, 3> ablk{&ax, &aw, &ap};
    const std::array<Index, 3> off{0, m, m + nw};
    Mat<Scalar> gram(ns, ns), hs(ns, ns);
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        const Index ri = blk[i]->cols(), cj = blk[j]->cols();
        if (ri == 0 || cj == 0) continue;
        const Mat<Scalar> gij = blk[i]->adjoint() * *blk[j];
        const Mat<Scalar> hij = blk[i]->adjoint() * *ablk[j];
        gram.block(off[i], off[j], ri, cj) = gij;
        hs.block(off[i], off[j], ri, cj) = hij;
        if (i != j) {
          gram.block(off[j], off[i], cj, ri) = gij.adjoint();
          hs.block(off[j], off[i], cj, ri) = hij.adjoint();
        }
      }
    }
    gram = (0.5 * (gram + gram.adjoint())).eval();
    hs = (0.5 * (hs + hs.adjoint())).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat<Scalar>> ges(hs, gram);
    if (ges.info() != Eigen::Success) {
      // Lost positive definiteness: restart without the history block.
      p.resize(dim, 0);
      ap.resize(dim, 0);
      continue;
    }
    const Mat<Scalar> c = ges.eigenvectors().leftCols(m);
    lambda = ges.eigenvalues().head(m);

    const Mat<Scalar> cw = take_columns<Scalar>(Mat<Scalar>(c.middleRows(m, nw)), active);
    const Mat<Scalar> cp = take_columns<Scalar>(Mat<Scalar>(c.bottomRows(np)), active);
    Mat<Scalar> pn = Mat<Scalar>::Zero(dim, static_cast<Index>(active.size()));
    Mat<Scalar> apn = Mat<Scalar>::Zero(dim, static_cast<Index>(active.size()));
    if (nw > 0) {
      pn.noalias() += w * cw;
      apn.noalias() += aw * cw;
    }
    if (np > 0) {
      pn.noalias() += p * cp;
      apn.noalias() += ap * cp;
    }

    Mat<Scalar> xn = x * c.topRows(m);
    Mat<Scalar> axn = ax * c.topRows(m);
    if (nw > 0) {
      xn.noalias() += w * c.middleRows(m, nw);
      axn.noalias() += aw * c.middleRows(m, nw);
    }
    if (np > 0) {
      xn.noalias() += p * c.bottomRows(np);
      axn.noalias() += ap * c.bottomRows(np);
    }
    x = std::move(xn);
    ax = std::move(axn);
    p = std::move(pn);
    ap = std::move(apn);
  }

  throw ConvergenceError("eigensolver did not converge", best, opts.max_iter);
}

template LobpcgResult<double> lobpcg<double>(Index, const BlockOperator<double>&, const BlockOperator<double>&,
                                             const LobpcgOptions&, const Mat<double>*, const Mat<double>*);
template LobpcgResult<std::complex<double>> lobpcg<std::complex<double>>(
    Index, const BlockOperator<std::complex<double>>&, const BlockOperator<std::complex<double>>&,
    const LobpcgOptions&, const Mat<std::complex<double>>*, const Mat<std::complex<double>>*);

}  // namespace kgs
