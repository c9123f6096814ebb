// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdq/density.hpp"
#include "pdq/fcidump.hpp"
#include "pdq/solvers.hpp"

namespace pdq {

struct DcSubsystem {
  OrbitalSet fragment;
  OrbitalSet buffer;

  /// fragment followed by buffer
  OrbitalSet orbitals() const;
};

/// Buffers of each fragment from its k nearest fragments along a chain
/// (ring = wrap around). k >= number of other fragments gives full buffers.
std::vector<DcSubsystem> k_neighbor_subsystems(const std::vector<OrbitalSet>& fragments, int k, bool ring = false);

/// Entries 1 (both in fragment), 1/2 (one in fragment, one in buffer), else 0.
Matrix partition_matrix(const DcSubsystem& sub, int n_orb);

struct SubsystemSpectrum {
  Vector eps;
  Matrix coeffs;     // n_orb x m, zero outside the subsystem
  Matrix partition;  // n_orb x n_orb
};

/// Diagonalizes the subsystem block of F(global_density).
SubsystemSpectrum subsystem_hf(const IntegralSet& s, const DcSubsystem& sub, const DensityMatrix& global_density);

/// 1 / (1 + exp(-beta x)), argument clamped to +-500.
double fermi_function(double x, double beta);

/// Total electron count sum_a Tr[D^a(eps_f)].
double dc_electron_count(const std::vector<SubsystemSpectrum>& spectra, double eps_f, double beta);

/// Midpoint of the eps_f interval on which the count matches n_elec.
double fermi_level(const std::vector<SubsystemSpectrum>& spectra, int n_elec, double beta);

DensityMatrix assemble_dc_density(const std::vector<SubsystemSpectrum>& spectra, double eps_f, double beta);

struct DcOptions {
  double beta = 1000.0;
  double outer_tol = 1e-8;
  int max_outer = 200;
};

struct DcResult {
  DensityMatrix density;
  double fermi_level = 0.0;
  double mean_field_energy = 0.0;
  int outer_iterations = 0;
  bool converged = false;
  int max_subsystem_orbitals = 0;
};

DcResult dc_scf_loop(const IntegralSet& s, const std::vector<DcSubsystem>& subs, const DcOptions& opts = {});

/// Correlated-minus-RHF energy of each subsystem embedded in the DC density.
/// These are not additive and are not summed into a total.
std::vector<double> dc_subsystem_correlation(const IntegralSet& s, const std::vector<DcSubsystem>& subs,
                                             const DensityMatrix& d, const FragmentSolverOptions& solver);

}  // namespace pdq
