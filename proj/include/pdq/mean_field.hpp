// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "pdq/density.hpp"
#include "pdq/fcidump.hpp"

namespace pdq {

struct RhfOptions {
  int max_iter = 500;
  double density_tol = 1e-10;
  /// Added to the virtual block of the Fock matrix (hartree).
  double level_shift = 0.0;
};

struct ScfResult {
  Vector orbital_energies;
  Matrix coefficients;  // columns are molecular orbitals
  DensityMatrix density;
  double total_energy = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> energy_history;  // energy of each iterate's input density
};

/// F = h + J(D) - K(D)/2.
Matrix fock_matrix(const DensityMatrix& d, const IntegralSet& s);

/// Eigenpairs of a symmetric matrix ordered by (eigenvalue, column index).
struct Eigenpairs {
  Vector values;
  Matrix vectors;
};
Eigenpairs sorted_eigenpairs(const Matrix& m);

/// 2 C_occ C_occ^T over the first n_elec/2 columns.
DensityMatrix aufbau_density(const Matrix& coefficients, int n_elec);

/// Closed-shell Roothaan iteration in an orthonormal basis. Odd electron
/// counts raise UnsupportedInputError; running out of iterations only clears
/// the `converged` flag.
ScfResult run_rhf(const IntegralSet& s, const RhfOptions& opts = {});

/// 1/2 Tr[D (h + F(D))] + core.
double mean_field_energy(const IntegralSet& s, const DensityMatrix& d);

}  // namespace pdq
