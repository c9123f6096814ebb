// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pdq/density.hpp"
#include "pdq/dmet.hpp"
#include "pdq/fcidump.hpp"
#include "pdq/solvers.hpp"

namespace pdq {

using PairMap = std::map<std::pair<int, int>, double>;  // keys (I, J) with I < J

/// Even electron counts per fragment, proportional to orbital count, the
/// rounding residual going to the largest fragment.
std::vector<int> assign_fragment_electrons(int n_elec, const FragmentSpec& frags);

struct FmoOptions {
  double scc_tol = 1e-6;
  int max_scc_iter = 100;
};

struct FmoState {
  FragmentSpec fragmentation;
  std::vector<int> electrons;
  std::vector<DensityMatrix> monomer_densities;  // full-basis, one fragment block each
  std::vector<double> monomer_energies;          // electronic, in the frozen field
  PairMap dimer_energies;
  int scc_iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

struct FmoCorrelation {
  std::vector<double> monomer_corr;
  PairMap dimer_corr;
};

/// Frozen field for `exclude`: sum of the monomer densities of all other fragments.
DensityMatrix frozen_density(const FmoState& state, const std::vector<int>& exclude);

/// Problem seen by fragment (or fragment union) `members` in the frozen field.
IntegralSet fmo_subproblem(const IntegralSet& s, const FmoState& state, const std::vector<int>& members);

FmoState monomer_scc_loop(const IntegralSet& s, const FragmentSpec& frags, const FmoOptions& opts = {});
void dimer_energies(const IntegralSet& s, FmoState& state);

double assemble_fmo_energy(const std::vector<double>& monomer, const PairMap& dimer);
double assemble_fmo_correlation(const FmoCorrelation& c);

/// Correlated-minus-RHF energies of every monomer and dimer subproblem.
FmoCorrelation fmo_correlation(const IntegralSet& s, const FmoState& state, const FragmentSolverOptions& solver);

struct FmoResult {
  FmoState state;
  double total_energy = 0.0;  // monomer sum plus pair corrections, plus the nuclear core
  PairMap pair_corrections;   // E_IJ - E_I - E_J
  std::optional<FmoCorrelation> correlation;
  double correlation_energy = 0.0;
  int max_subproblem_orbitals = 0;
};

/// Monomer loop, dimers and, when `solver` is given, the correlation stage.
FmoResult run_fmo(const IntegralSet& s, const FragmentSpec& frags, const FmoOptions& opts = {},
                  const std::optional<FragmentSolverOptions>& solver = std::nullopt);

}  // namespace pdq
