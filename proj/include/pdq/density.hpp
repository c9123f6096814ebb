// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace pdq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Spin-summed one-particle density in the orthonormal orbital basis.
/// Occupations run from 0 to 2.
struct DensityMatrix {
  Matrix values;

  DensityMatrix() = default;
  explicit DensityMatrix(Matrix m) : values(std::move(m)) {}

  static DensityMatrix zero(int n) { return DensityMatrix(Matrix::Zero(n, n)); }

  int size() const { return static_cast<int>(values.rows()); }
  double trace() const { return values.trace(); }

  /// max |D D - 2 D|, zero for a closed-shell determinant.
  double idempotency_error() const {
    return (values * values - 2.0 * values).cwiseAbs().maxCoeff();
  }
};

}  // namespace pdq
