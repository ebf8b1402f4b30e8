/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#pragma once

#include "qlsys/types.hpp"

namespace qlsys::reference {

/// Gaussian elimination with partial pivoting. Throws SingularMatrix when a
/// pivot magnitude falls below 1e-12.
ComplexVector direct_solve(const ComplexMatrix& a, const ComplexVector& b);

struct CGReport {
  ComplexVector solution;
  int iterations = 0;
  Real residual_norm = 0;  // ||A x - b|| recomputed from `solution`
  bool converged = false;
};

/// Conjugate gradients for Hermitian positive definite A, stopping once
/// ||r|| < tol. Throws NotPositiveDefinite on non-positive curvature p^H A p.
CGReport conjugate_gradient(const ComplexMatrix& a, const ComplexVector& b, Real tol = 1e-10,
                            int max_iterations = -1);

}  // namespace qlsys::reference
