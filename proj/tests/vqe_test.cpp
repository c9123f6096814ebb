// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <numbers>

#include "pdq/analysis.hpp"
#include "pdq/mean_field.hpp"
#include "pdq/qubit_map.hpp"
#include "pdq/solvers.hpp"
#include "test_support.hpp"

namespace pdq {
namespace {

using testing::load;

TEST(MolecularVqe, ExactExpectationsReachFciOnH2) {
  const auto s = load("h2");
  const double e_fci = fci_ground_state(s, 2).energy;
  const auto r = run_molecular_vqe(s, {});
  EXPECT_TRUE(r.vqe.converged);
  EXPECT_NEAR(r.energy, e_fci, 1e-6);
  EXPECT_GE(r.energy, e_fci - 1e-9);
  for (double e : r.vqe.energy_trace) EXPECT_GE(e, e_fci - 1e-9);
  EXPECT_EQ(r.n_qubits, 4);
  EXPECT_EQ(r.n_parameters, 3);
}

TEST(MolecularVqe, SampledEnergyStaysWithinShotNoise) {
  const auto s = load("h2");
  const double e_fci = fci_ground_state(s, 2).energy;
  FragmentSolverOptions opts;
  opts.vqe.optimizer = Optimizer::Spsa;
  opts.vqe.max_evals = 2001;
  opts.sampling = SamplingPlan::shots(100000, 17);
  const auto r = run_molecular_vqe(s, opts);
  const auto mo = transform_orbitals(s, run_rhf(s).coefficients);
  const double bound = variance_bound_hamiltonian(jordan_wigner(to_spin_orbital(mo)), 100000);
  EXPECT_LE(std::abs(r.energy - e_fci), 3.0 * std::sqrt(bound));
}

TEST(MolecularVqe, FixedSeedsGiveIdenticalRuns) {
  const auto s = load("h2");
  FragmentSolverOptions opts;
  opts.vqe.optimizer = Optimizer::Spsa;
  opts.vqe.max_evals = 201;
  opts.sampling = SamplingPlan::shots(1000, 5);
  EXPECT_EQ(run_molecular_vqe(s, opts).energy, run_molecular_vqe(s, opts).energy);
}

TEST(MolecularVqe, H4ChainWithExcitationAnsatzIsNearFci) {
  const auto s = load("h4_chain");
  const double e_fci = fci_ground_state(s, 4).energy;
  const auto r = run_molecular_vqe(s, {});
  EXPECT_GE(r.energy, e_fci - 1e-9);
  EXPECT_LT(r.energy - e_fci, 1e-3);
}

TEST(RunVqe, OneParameterRotationFindsTheMinimum) {
  // H = Z: minimum -1 at Ry(pi)
  const auto h = QubitHamiltonian::from_pauli_sum(1, PauliSum(PauliString::from_word("Z"), 1.0));
  const Ansatz a(1, {{GateKind::Ry, 0, -1, 0}});
  const auto r = run_vqe(h, a, Statevector(1), {});
  EXPECT_NEAR(r.energy, -1.0, 1e-6);
  EXPECT_NEAR(std::abs(r.parameters[0]), std::numbers::pi, 1e-2);
}

TEST(RdmFromState, BasisStateOccupations) {
  // spatial 0 doubly occupied, spatial 1 up only
  const auto psi = Statevector::basis_state(4, 0b0111);
  const auto r = rdm_from_state(psi, 2);
  EXPECT_NEAR(r.rdm1(0, 0), 2.0, 1e-15);
  EXPECT_NEAR(r.rdm1(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(r.rdm1(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(r.rdm2_at(0, 0, 0, 0), 2.0, 1e-15);
  EXPECT_NEAR(r.rdm2_at(0, 0, 1, 1), 2.0, 1e-15);
}

TEST(SolveGroundState, VqeRouteMatchesFciRdmsOnH2) {
  const auto s = load("h2");
  FragmentSolverOptions fci_opts, vqe_opts;
  vqe_opts.kind = SolverKind::Vqe;
  const auto a = solve_ground_state(s, fci_opts);
  const auto b = solve_ground_state(s, vqe_opts);
  EXPECT_NEAR(a.energy, b.energy, 1e-6);
  EXPECT_LT((a.rdms.rdm1 - b.rdms.rdm1).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_NEAR(energy_from_rdms(s, b.rdms), b.energy, 1e-8);
}

TEST(ParseKinds, AcceptedNames) {
  EXPECT_EQ(parse_solver_kind("fci"), SolverKind::Fci);
  EXPECT_EQ(parse_solver_kind("vqe"), SolverKind::Vqe);
  EXPECT_THROW(parse_solver_kind("ccsd"), std::invalid_argument);
  EXPECT_EQ(parse_ansatz_kind("qe"), AnsatzKind::QubitExcitation);
  EXPECT_EQ(parse_ansatz_kind("hea"), AnsatzKind::HardwareEfficient);
  EXPECT_THROW(parse_ansatz_kind("uccsd"), std::invalid_argument);
}

}  // namespace
}  // namespace pdq
