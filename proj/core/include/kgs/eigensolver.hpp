#pragma once

#include <complex>
#include <cstdint>
#include <functional>

#include <Eigen/Dense>

namespace kgs {

template <class Scalar>
using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

struct LobpcgOptions {
  int count = 1;
  /// Extra block columns that are iterated but not required to converge.
  int guard = 2;
  double tol = 1e-9;
  int max_iter = 10000;
  std::uint64_t seed = 1;
  /// Recompute A X from scratch every this many iterations.
  int refresh_every = 25;
};

template <class Scalar>
struct LobpcgResult {
  Eigen::VectorXd values;
  Block<Scalar> vectors;
  Eigen::VectorXd residuals;
  int iterations = 0;
};

/// Block Hermitian operator application: out = A in (same shape).
template <class Scalar>
using BlockOperator = std::function<void(const Block<Scalar>& in, Block<Scalar>& out)>;

/// Locally optimal block preconditioned conjugate gradient for the lowest
/// `count` eigenpairs of a Hermitian operator in the Euclidean inner product.
///
/// Converged columns are soft-locked: they stay in the Rayleigh-Ritz basis but
/// get no new search directions. Throws ConvergenceError when `max_iter` is hit.
/// `start` (optional) seeds the leading columns; remaining columns are random.
/// `locked` (optional, orthonormal) columns are deflated: the search runs in
/// their orthogonal complement.
template <class Scalar>
LobpcgResult<Scalar> lobpcg(Eigen::Index dim, const BlockOperator<Scalar>& apply,
                            const BlockOperator<Scalar>& precondition, const LobpcgOptions& opts,
                            const Block<Scalar>* start = nullptr, const Block<Scalar>* locked = nullptr);

extern template LobpcgResult<double> lobpcg<double>(Eigen::Index, const BlockOperator<double>&,
                                                    const BlockOperator<double>&, const LobpcgOptions&,
                                                    const Block<double>*, const Block<double>*);
extern template LobpcgResult<std::complex<double>> lobpcg<std::complex<double>>(
    Eigen::Index, const BlockOperator<std::complex<double>>&, const BlockOperator<std::complex<double>>&,
    const LobpcgOptions&, const Block<std::complex<double>>*, const Block<std::complex<double>>*);

}  // namespace kgs
