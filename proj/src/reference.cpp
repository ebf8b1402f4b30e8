/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#include "qlsys/reference.hpp"

#include <cmath>

namespace qlsys::reference {

namespace {

constexpr Real kPivotThreshold = 1e-12;

void check_shapes(const ComplexMatrix& a, const ComplexVector& b) {
  if (a.rows() != a.cols() || a.rows() != b.size() || a.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "A must be N x N and b length N");
  }
}

}  // namespace

ComplexVector direct_solve(const ComplexMatrix& a, const ComplexVector& b) {
  check_shapes(a, b);
  const Eigen::Index n = a.rows();
  ComplexMatrix lu = a;
  ComplexVector x = b;

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index pivot = k;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(lu(i, k)) > std::abs(lu(pivot, k))) pivot = i;
    }
    if (std::abs(lu(pivot, k)) < kPivotThreshold) {
      throw Error(ErrorKind::SingularMatrix, "pivot " + std::to_string(std::abs(lu(pivot, k))) +
                                                 " in column " + std::to_string(k));
    }
    if (pivot != k) {
      lu.row(k).swap(lu.row(pivot));
      std::swap(x(k), x(pivot));
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const Complex f = lu(i, k) / lu(k, k);
      lu.row(i).tail(n - k) -= f * lu.row(k).tail(n - k);
      x(i) -= f * x(k);
    }
  }
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    Complex acc = x(k);
    for (Eigen::Index j = k + 1; j < n; ++j) acc -= lu(k, j) * x(j);
    x(k) = acc / lu(k, k);
  }
  return x;
}

CGReport conjugate_gradient(const ComplexMatrix& a, const ComplexVector& b, Real tol, int max_iterations) {
  check_shapes(a, b);
  const Eigen::Index n = a.rows();
  if (max_iterations < 0) max_iterations = static_cast<int>(4 * n + 10);

  CGReport report;
  ComplexVector x = ComplexVector::Zero(n);
  ComplexVector r = b;
  ComplexVector p = r;
  Real rr = r.squaredNorm();

  while (report.iterations < max_iterations) {
    if (std::sqrt(rr) < tol) {
      // the recursive residual drifts from b - Ax; restart if they disagree
      r = b - a * x;
      rr = r.squaredNorm();
      if (std::sqrt(rr) < tol) break;
      p = r;
    }
    const ComplexVector ap = a * p;
    const Complex curvature = p.dot(ap);  // p^H A p
    if (!(curvature.real() > 0)) {
      throw Error(ErrorKind::NotPositiveDefinite,
                  "p^H A p = " + std::to_string(curvature.real()) + " at iteration " +
                      std::to_string(report.iterations));
    }
    const Real alpha = rr / curvature.real();
    x += alpha * p;
    r -= alpha * ap;
    const Real rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
    ++report.iterations;
  }

  report.residual_norm = (a * x - b).norm();
  report.converged = report.residual_norm < tol;
  report.solution = std::move(x);
  return report;
}

}  // namespace qlsys::reference
