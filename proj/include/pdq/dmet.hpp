// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "pdq/density.hpp"
#include "pdq/fcidump.hpp"
#include "pdq/solvers.hpp"

namespace pdq {

/// Disjoint orbital sets covering 0..n_orb-1.
struct FragmentSpec {
  std::vector<OrbitalSet> fragments;

  std::size_t size() const { return fragments.size(); }
  /// Throws DimensionError on empty, overlapping, out-of-range or
  /// incomplete fragments.
  void validate(int n_orb) const;
  static FragmentSpec single(int n_orb);
  /// Consecutive blocks of `block` orbitals (last one may be shorter).
  static FragmentSpec blocks(int n_orb, int block);
};

struct Bath {
  Matrix transform;          // n_orb x (fragment + bath), fragment columns first
  DensityMatrix core;        // frozen environment density
  int n_elec_emb = 0;
  double electron_residue = 0.0;  // |projected trace - n_elec_emb|
  Vector entanglement;       // eigenvalues of the kept bath orbitals (of D/2)
  int n_bath() const { return static_cast<int>(entanglement.size()); }
};

/// Schmidt bath of `fragment` from a closed-shell mean-field density.
Bath build_bath(const DensityMatrix& d, const OrbitalSet& fragment);

struct EmbeddingProblem {
  IntegralSet integrals;  // in embedding orbitals, dressed and mu-shifted
  Matrix env_potential;   // J - K/2 of the frozen density, embedding basis
  Matrix transform;
  int n_elec_emb = 0;
  int fragment_size = 0;
  double mu_applied = 0.0;
  double nuclear_core = 0.0;  // core energy of the full problem
};

EmbeddingProblem build_embedding_hamiltonian(const IntegralSet& s, const Bath& bath,
                                             const OrbitalSet& fragment, double mu);

/// Sum of the first fragment_size diagonal elements.
double fragment_electron_count(const Matrix& rdm1, int fragment_size);

/// Democratic-partition energy of the fragment block (no core term).
double fragment_energy(const EmbeddingProblem& p, const Rdms& rdms);

struct DmetOptions {
  double mu_tol_electrons = 1e-6;
  double mu_bracket = 0.1;
  int max_bracket_expansions = 4;
  int max_mu_iter = 60;
  double bisection_width = 1e-3;
};

struct DmetResult {
  double total_energy = 0.0;
  std::vector<double> fragment_energies;
  std::vector<double> fragment_electrons;
  std::vector<int> embedding_sizes;  // spatial orbitals per fragment problem
  double mu_star = 0.0;
  double total_electrons = 0.0;
  int mu_iterations = 0;
  SolverKind solver = SolverKind::Fci;
  bool converged = false;
  std::vector<std::string> warnings;
};

DmetResult solve_single_shot(const IntegralSet& s, const FragmentSpec& frags,
                             const FragmentSolverOptions& solver, const DmetOptions& opts = {});

}  // namespace pdq
