/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qlsys/types.hpp"

namespace qlsys {

//=========================================================================
// Dense helpers templated on the scalar type
//=========================================================================

template <typename Derived>
using RealOf = typename Eigen::NumTraits<typename Derived::Scalar>::Real;

/// max_ij |A_ij - conj(A_ji)|
template <typename Derived>
RealOf<Derived> hermiticity_defect(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<RealOf<Derived>>::infinity();
  if (a.size() == 0) return RealOf<Derived>(0);
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

/// max_ij |(U^dagger U - I)_ij|
template <typename Derived>
RealOf<Derived> unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<RealOf<Derived>>::infinity();
  using Plain = typename Derived::PlainObject;
  return (u.adjoint() * u - Plain::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  DenseMatrix<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Eigen-decomposition of a Hermitian matrix with ascending real eigenvalues.
template <typename R>
struct BasicSpectrum {
  DenseVector<R> eigenvalues;
  DenseMatrix<std::complex<R>> eigenvectors;  // column j pairs with eigenvalues(j)

  Eigen::Index size() const { return eigenvalues.size(); }
  R min() const { return eigenvalues.minCoeff(); }
  R max() const { return eigenvalues.maxCoeff(); }
  R condition_number() const {
    return eigenvalues.cwiseAbs().maxCoeff() / eigenvalues.cwiseAbs().minCoeff();
  }
  DenseMatrix<std::complex<R>> reconstruct() const {
    return eigenvectors * eigenvalues.template cast<std::complex<R>>().asDiagonal() *
           eigenvectors.adjoint();
  }
};

using Spectrum = BasicSpectrum<Real>;

/// Rotates `v` so its first amplitude with magnitude above `tol` is real and
/// positive. A global phase is unobservable, so this is the canonical form used
/// whenever pure states are compared.
template <typename Derived>
auto canonicalize_phase(const Eigen::MatrixBase<Derived>& v, RealOf<Derived> tol = 1e-12) {
  typename Derived::PlainObject out = v;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (std::abs(out(i)) > tol) {
      out *= std::conj(out(i)) / std::abs(out(i));
      break;
    }
  }
  return out;
}

/// Multiplies `v` by the unit phase that makes <reference|v> real and
/// non-negative.
template <typename DerivedV, typename DerivedR>
auto align_phase(const Eigen::MatrixBase<DerivedV>& v, const Eigen::MatrixBase<DerivedR>& reference) {
  typename DerivedV::PlainObject out = v;
  const auto overlap = reference.dot(v);  // conjugates reference
  if (std::abs(overlap) > 0) out *= std::conj(overlap) / std::abs(overlap);
  return out;
}

template <typename Derived>
auto eig_hermitian(const Eigen::MatrixBase<Derived>& a) {
  using R = RealOf<Derived>;
  using C = std::complex<R>;
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "eig_hermitian needs a square matrix");
  }
  const R defect = hermiticity_defect(a);
  if (!(defect <= R(kStructuralTol))) {
    throw Error(ErrorKind::NotHermitian,
                "max |A - A^dagger| = " + std::to_string(static_cast<double>(defect)));
  }
  const DenseMatrix<C> herm = (a.template cast<C>() + a.template cast<C>().adjoint()) * C(0.5);
  Eigen::SelfAdjointEigenSolver<DenseMatrix<C>> solver(herm);
  BasicSpectrum<R> out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  for (Eigen::Index j = 0; j < out.eigenvectors.cols(); ++j) {
    out.eigenvectors.col(j) = canonicalize_phase(out.eigenvectors.col(j), R(1e-12));
  }
  return out;
}

/// exp(-i A t) for Hermitian A, through the eigen-decomposition.
template <typename Derived>
auto matrix_exp_hermitian(const Eigen::MatrixBase<Derived>& a, RealOf<Derived> t) {
  using R = RealOf<Derived>;
  using C = std::complex<R>;
  const auto spectrum = eig_hermitian(a);
  DenseVector<C> phases(spectrum.size());
  for (Eigen::Index j = 0; j < spectrum.size(); ++j) {
    phases(j) = std::polar(R(1), -spectrum.eigenvalues(j) * t);
  }
  DenseMatrix<C> u = spectrum.eigenvectors * phases.asDiagonal() * spectrum.eigenvectors.adjoint();
  return u;
}

/// Normalized overlap Tr(ab) / sqrt(Tr(a^2) Tr(b^2)) of two Hermitian matrices.
template <typename DerivedA, typename DerivedB>
RealOf<DerivedA> normalized_overlap(const Eigen::MatrixBase<DerivedA>& a,
                                    const Eigen::MatrixBase<DerivedB>& b) {
  using R = RealOf<DerivedA>;
  // Tr(XY) = sum_ij X_ij Y_ji; for Hermitian Y that is sum_ij X_ij conj(Y_ij).
  const R cross = std::real((a.array() * b.array().conjugate()).sum());
  const R aa = a.squaredNorm();
  const R bb = b.squaredNorm();
  if (aa <= 0 || bb <= 0) return R(0);
  return cross / std::sqrt(aa * bb);
}

//=========================================================================
// Quantum states
//=========================================================================

/// Number of qubits n with 2^n == dim, or -1.
int qubit_count_for_dimension(Eigen::Index dim);

/// Bit of basis label `index` that encodes qubit `q` (qubit 0 is the most
/// significant bit, matching ket notation |q0 q1 ... >).
inline std::size_t qubit_bit(int n_qubits, int q) {
  return std::size_t{1} << static_cast<unsigned>(n_qubits - 1 - q);
}

class PureState {
 public:
  /// Throws NotNormalized unless sum |a_i|^2 == 1 within 1e-10.
  explicit PureState(ComplexVector amplitudes);

  static PureState normalized(const ComplexVector& amplitudes);
  static PureState basis(int n_qubits, std::size_t index);

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dimension() const { return amplitudes_.size(); }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  Complex operator[](Eigen::Index i) const { return amplitudes_(i); }
  Real probability(Eigen::Index i) const { return std::norm(amplitudes_(i)); }

 private:
  int n_qubits_ = 0;
  ComplexVector amplitudes_;
};

/// |a> (x) |b> with `a` on the most significant qubits.
PureState tensor(const PureState& a, const PureState& b);

class DensityMatrix {
 public:
  /// Throws InvalidDensityMatrix unless Hermitian and trace-1 within 1e-10
  /// with eigenvalues >= -1e-9.
  explicit DensityMatrix(ComplexMatrix matrix);

  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(int n_qubits);
  /// Nearest valid state: Hermitian part, negative eigenvalues clipped to zero,
  /// trace renormalized to one.
  static DensityMatrix project_to_physical(const ComplexMatrix& raw);

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dimension() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  Real purity() const { return matrix_.squaredNorm(); }
  RealVector populations() const { return matrix_.diagonal().real(); }

 private:
  int n_qubits_ = 0;
  ComplexMatrix matrix_;
};

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Tr(rho1 rho2) / sqrt(Tr(rho1^2) Tr(rho2^2)), clamped to [0, 1].
Real fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2);

/// Reduced state on `keep` (0-based qubit indices, output ordered ascending).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

/// U = e^{i alpha} Rz(beta) Ry(gamma) Rz(delta), with
/// Rz(phi) = diag(e^{-i phi/2}, e^{i phi/2}).
struct ZyzAngles {
  Real alpha = 0;
  Real beta = 0;
  Real gamma = 0;
  Real delta = 0;

  ComplexMatrix matrix() const;
};

ZyzAngles zyz_decompose(const ComplexMatrix& u);

ComplexMatrix rz_matrix(Real phi);
ComplexMatrix ry_matrix(Real theta);

}  // namespace qlsys
