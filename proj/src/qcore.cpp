/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#include "qlsys/qcore.hpp"

#include <algorithm>
#include <numbers>

namespace qlsys {

int qubit_count_for_dimension(Eigen::Index dim) {
  if (dim <= 0) return -1;
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return (Eigen::Index{1} << n) == dim ? n : -1;
}

//-------------------------------------------------------------------------
// PureState
//-------------------------------------------------------------------------

PureState::PureState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  n_qubits_ = qubit_count_for_dimension(amplitudes_.size());
  if (n_qubits_ < 0) {
    throw Error(ErrorKind::DimensionMismatch,
                "state length " + std::to_string(amplitudes_.size()) + " is not a power of two");
  }
  if (!amplitudes_.allFinite()) {
    throw Error(ErrorKind::NotNormalized, "state has non-finite amplitudes");
  }
  const Real norm2 = amplitudes_.squaredNorm();
  if (std::abs(norm2 - 1.0) > kStructuralTol) {
    throw Error(ErrorKind::NotNormalized, "sum |a|^2 = " + std::to_string(norm2));
  }
}

PureState PureState::normalized(const ComplexVector& amplitudes) {
  const Real norm = amplitudes.norm();
  if (!(norm > 0)) throw Error(ErrorKind::NotNormalized, "cannot normalize a zero vector");
  return PureState(amplitudes / norm);
}

PureState PureState::basis(int n_qubits, std::size_t index) {
  const auto dim = Eigen::Index{1} << n_qubits;
  if (n_qubits < 0 || static_cast<Eigen::Index>(index) >= dim) {
    throw Error(ErrorKind::IndexOutOfRange, "basis index out of range");
  }
  ComplexVector v = ComplexVector::Zero(dim);
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(std::move(v));
}

PureState tensor(const PureState& a, const PureState& b) {
  return PureState(kron(a.amplitudes(), b.amplitudes()));
}

//-------------------------------------------------------------------------
// DensityMatrix
//-------------------------------------------------------------------------

DensityMatrix::DensityMatrix(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw Error(ErrorKind::InvalidDensityMatrix, "density matrix must be square");
  }
  n_qubits_ = qubit_count_for_dimension(matrix_.rows());
  if (n_qubits_ < 0) {
    throw Error(ErrorKind::DimensionMismatch, "density matrix dimension is not a power of two");
  }
  if (!matrix_.allFinite()) {
    throw Error(ErrorKind::InvalidDensityMatrix, "non-finite entries");
  }
  if (hermiticity_defect(matrix_) > kStructuralTol) {
    throw Error(ErrorKind::InvalidDensityMatrix, "not Hermitian");
  }
  const Real tr = matrix_.trace().real();
  if (std::abs(tr - 1.0) > kStructuralTol) {
    throw Error(ErrorKind::InvalidDensityMatrix, "trace = " + std::to_string(tr));
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kRoundTripTol) {
    throw Error(ErrorKind::InvalidDensityMatrix,
                "negative eigenvalue " + std::to_string(solver.eigenvalues().minCoeff()));
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const auto& a = psi.amplitudes();
  return DensityMatrix(a * a.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
  const auto dim = Eigen::Index{1} << n_qubits;
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<Real>(dim));
}

DensityMatrix DensityMatrix::project_to_physical(const ComplexMatrix& raw) {
  if (raw.rows() != raw.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "cannot project a non-square matrix");
  }
  const ComplexMatrix herm = 0.5 * (raw + raw.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm);
  RealVector w = solver.eigenvalues().cwiseMax(0.0);
  const Real total = w.sum();
  if (!(total > 0)) {
    throw Error(ErrorKind::InvalidDensityMatrix, "no positive weight left after clipping");
  }
  w /= total;
  const ComplexMatrix& v = solver.eigenvectors();
  ComplexMatrix rho = v * w.cast<Complex>().asDiagonal() * v.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(std::move(rho));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.matrix(), b.matrix()));
}

Real fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  if (rho1.dimension() != rho2.dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "fidelity of states with different dimensions");
  }
  return std::clamp(normalized_overlap(rho1.matrix(), rho2.matrix()), 0.0, 1.0);
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  if (keep.empty()) throw Error(ErrorKind::EmptyKeepSet, "partial_trace needs at least one qubit");
  const int n = rho.n_qubits();
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) {
    throw Error(ErrorKind::InvalidArgument, "duplicate qubit in keep set");
  }
  for (int q : kept) {
    if (q < 0 || q >= n) throw Error(ErrorKind::IndexOutOfRange, "keep qubit " + std::to_string(q));
  }
  std::vector<int> traced;
  for (int q = 0; q < n; ++q) {
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);
  }

  const int k = static_cast<int>(kept.size());
  const auto kdim = Eigen::Index{1} << k;
  const auto tdim = Eigen::Index{1} << traced.size();
  // full basis label from (kept label, traced label)
  auto compose = [&](Eigen::Index kl, Eigen::Index tl) {
    std::size_t idx = 0;
    for (int i = 0; i < k; ++i) {
      if (kl & (Eigen::Index{1} << (k - 1 - i))) idx |= qubit_bit(n, kept[i]);
    }
    const int t = static_cast<int>(traced.size());
    for (int i = 0; i < t; ++i) {
      if (tl & (Eigen::Index{1} << (t - 1 - i))) idx |= qubit_bit(n, traced[i]);
    }
    return static_cast<Eigen::Index>(idx);
  };

  ComplexMatrix out = ComplexMatrix::Zero(kdim, kdim);
  const ComplexMatrix& m = rho.matrix();
  for (Eigen::Index i = 0; i < kdim; ++i) {
    for (Eigen::Index j = 0; j < kdim; ++j) {
      Complex acc = 0;
      for (Eigen::Index t = 0; t < tdim; ++t) acc += m(compose(i, t), compose(j, t));
      out(i, j) = acc;
    }
  }
  return DensityMatrix(std::move(out));
}

//-------------------------------------------------------------------------
// ZYZ
//-------------------------------------------------------------------------

ComplexMatrix rz_matrix(Real phi) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = std::polar(1.0, -phi / 2);
  m(1, 1) = std::polar(1.0, phi / 2);
  return m;
}

ComplexMatrix ry_matrix(Real theta) {
  ComplexMatrix m(2, 2);
  const Real c = std::cos(theta / 2);
  const Real s = std::sin(theta / 2);
  m << c, -s, s, c;
  return m;
}

ComplexMatrix ZyzAngles::matrix() const {
  return std::polar(1.0, alpha) * rz_matrix(beta) * ry_matrix(gamma) * rz_matrix(delta);
}

ZyzAngles zyz_decompose(const ComplexMatrix& u) {
  if (u.rows() != 2 || u.cols() != 2) {
    throw Error(ErrorKind::DimensionMismatch, "zyz_decompose takes a 2x2 matrix");
  }
  if (!(unitarity_defect(u) < 1e-8)) throw Error(ErrorKind::NotUnitary, "zyz_decompose input");

  ZyzAngles out;
  const Complex det = u.determinant();
  out.alpha = std::arg(det) / 2;
  const ComplexMatrix v = u * std::polar(1.0, -out.alpha);  // special unitary
  const Complex a = v(0, 0);
  const Complex b = v(1, 0);
  out.gamma = 2 * std::atan2(std::abs(b), std::abs(a));
  constexpr Real eps = 1e-12;
  if (std::abs(b) < eps) {
    out.beta = -2 * std::arg(a);
  } else if (std::abs(a) < eps) {
    out.beta = 2 * std::arg(b);
  } else {
    const Real sum = -2 * std::arg(a);   // beta + delta
    const Real diff = 2 * std::arg(b);   // beta - delta
    out.beta = (sum + diff) / 2;
    out.delta = (sum - diff) / 2;
  }
  // avoid printing -0
  for (Real* x : {&out.alpha, &out.beta, &out.gamma, &out.delta}) {
    if (std::abs(*x) < eps) *x = 0.0;
  }
  return out;
}

}  // namespace qlsys
