/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace qlsys {

using Real = double;
using Complex = std::complex<Real>;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using ComplexMatrix = DenseMatrix<Complex>;
using ComplexVector = DenseVector<Complex>;
using RealMatrix = DenseMatrix<Real>;
using RealVector = DenseVector<Real>;

// Structural checks (hermiticity, normalization, unitarity).
inline constexpr Real kStructuralTol = 1e-10;
// Numerical round trips (reconstruction, semigroup, oracle comparisons).
inline constexpr Real kRoundTripTol = 1e-9;

enum class ErrorKind {
  InvalidArgument,
  NotHermitian,
  NotUnitary,
  NotNormalized,
  InvalidDensityMatrix,
  DimensionMismatch,
  EmptyKeepSet,
  IndexOutOfRange,
  WidthMismatch,
  IncompleteKrausSet,
  ZeroProbabilityBranch,
  EigenvalueNotEncodable,
  NonPositiveEigenvalue,
  SwapPathUnavailable,
  ZeroReferenceComponent,
  SingularMatrix,
  NotPositiveDefinite,
  OutOfCalibrationRange,
  FitDiverged,
  InsufficientRecords,
  SubspaceMassTooSmall,
  ConfigParseError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::InvalidDensityMatrix: return "InvalidDensityMatrix";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyKeepSet: return "EmptyKeepSet";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::WidthMismatch: return "WidthMismatch";
    case ErrorKind::IncompleteKrausSet: return "IncompleteKrausSet";
    case ErrorKind::ZeroProbabilityBranch: return "ZeroProbabilityBranch";
    case ErrorKind::EigenvalueNotEncodable: return "EigenvalueNotEncodable";
    case ErrorKind::NonPositiveEigenvalue: return "NonPositiveEigenvalue";
    case ErrorKind::SwapPathUnavailable: return "SwapPathUnavailable";
    case ErrorKind::ZeroReferenceComponent: return "ZeroReferenceComponent";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::OutOfCalibrationRange: return "OutOfCalibrationRange";
    case ErrorKind::FitDiverged: return "FitDiverged";
    case ErrorKind::InsufficientRecords: return "InsufficientRecords";
    case ErrorKind::SubspaceMassTooSmall: return "SubspaceMassTooSmall";
    case ErrorKind::ConfigParseError: return "ConfigParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind so the
/// CLI can report it as a structured object.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace qlsys
