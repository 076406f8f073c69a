#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "wvsim/errors.hpp"
#include "wvsim/grid.hpp"
#include "wvsim/params.hpp"

namespace wvsim {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Dense operator on a finite-dimensional Hilbert space.
struct OperatorMatrix {
  Matrix entries;

  OperatorMatrix() = default;
  explicit OperatorMatrix(Matrix m) : entries(std::move(m)) {
    if (entries.rows() != entries.cols())
      throw DimensionMismatch("OperatorMatrix must be square");
  }

  Eigen::Index dim() const { return entries.rows(); }

  double hermiticity_defect() const {
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  }

  bool is_hermitian(double tol = 1e-12) const {
    return hermiticity_defect() < tol;
  }

  void require_hermitian(double tol = 1e-12) const {
    if (!is_hermitian(tol))
      throw DimensionMismatch("operator fails hermiticity check: defect " +
                              std::to_string(hermiticity_defect()));
  }
};

inline OperatorMatrix identity_op(Eigen::Index dim) {
  return OperatorMatrix(Matrix::Identity(dim, dim));
}

inline OperatorMatrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return OperatorMatrix(m);
}

inline OperatorMatrix pauli_y() {
  using C = std::complex<double>;
  Matrix m(2, 2);
  m << C(0, 0), C(0, -1), C(0, 1), C(0, 0);
  return OperatorMatrix(m);
}

inline OperatorMatrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return OperatorMatrix(m);
}

inline OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
  const auto da = a.dim(), db = b.dim();
  Matrix m(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      m.block(i * db, j * db, db, db) = a.entries(i, j) * b.entries;
  return OperatorMatrix(m);
}

// Momentum operator in the discrete position basis, built from the same DFT
// convention the spectral routines use: P = W^H diag(hbar k) W / n. Intended
// for desk-scale embeddings of grid problems into the finite-dimensional
// machinery (n <= a few hundred; the matrix is dense).
inline OperatorMatrix momentum_matrix(const Grid1D& grid,
                                      const PhysicalParams& params) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Matrix w(n, n);
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index j = 0; j < n; ++j)
      w(m, j) = std::polar(1.0, -2.0 * M_PI * static_cast<double>(m * j) /
                                    static_cast<double>(n));
  Matrix diag = Matrix::Zero(n, n);
  for (Eigen::Index m = 0; m < n; ++m)
    diag(m, m) = params.hbar * grid.k(static_cast<std::size_t>(m));
  Matrix p = w.adjoint() * diag * w / static_cast<double>(n);
  return OperatorMatrix(std::move(p));
}

}  // namespace wvsim
