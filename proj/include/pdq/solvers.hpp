// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pdq/fcidump.hpp"
#include "pdq/qubit_map.hpp"

namespace pdq {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Exact diagonalization

/// Spin-summed reduced density matrices. rdm2 is dense row-major in the
/// chemists' layout: rdm2[p][q][r][s] = sum_{st} <a+_{p s} a+_{r t} a_{s t} a_{q s}>,
/// so that E = sum h_pq rdm1_pq + 1/2 sum (pq|rs) rdm2_pqrs + core.
struct Rdms {
  Matrix rdm1;
  std::vector<double> rdm2;

  int n_orb() const { return static_cast<int>(rdm1.rows()); }
  double rdm2_at(int p, int q, int r, int s) const {
    const auto n = static_cast<std::size_t>(n_orb());
    return rdm2[((p * n + q) * n + r) * n + s];
  }
};

struct FciResult {
  double energy = 0.0;
  Rdms rdms;
  Vector coefficients;                 // indexed [alpha string][beta string]
  std::vector<std::uint64_t> alpha_strings;
  std::vector<std::uint64_t> beta_strings;
  int n_orb = 0;
};

/// Largest determinant space fci_ground_state accepts.
inline constexpr std::size_t kMaxDeterminants = std::size_t{1} << 20;

/// Lowest eigenpair in the fixed (N, S_z) determinant space. S_z comes from
/// s.ms2() when n_elec equals s.n_elec(), otherwise from n_elec's parity.
FciResult fci_ground_state(const IntegralSet& s, int n_elec);

/// E = sum h rdm1 + 1/2 sum g rdm2 + core.
double energy_from_rdms(const IntegralSet& s, const Rdms& rdms);

// ---------------------------------------------------------------------------
// Statevector simulation

/// Amplitudes over 2^n computational states; basis index bit k is qubit k.
class Statevector {
 public:
  Statevector() = default;
  explicit Statevector(int n_qubits);  // |0...0>
  Statevector(int n_qubits, std::vector<Complex> amplitudes);

  static Statevector basis_state(int n_qubits, std::uint64_t bits);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const Complex> amplitudes() const { return amps_; }
  std::span<Complex> amplitudes() { return amps_; }
  Complex operator[](std::size_t i) const { return amps_[i]; }
  double norm() const;

 private:
  int n_qubits_ = 0;
  std::vector<Complex> amps_;
};

/// FCI vector expressed on the interleaved Jordan-Wigner qubit register.
Statevector fci_to_statevector(const FciResult& fci);

/// Ry, Rz: single-qubit rotations. Cz: fixed entangler on (qubit, target).
/// Givens: rotation by theta/2 between |10> and |01> on (qubit, target).
/// DoubleExcitation: rotation by theta/2 between |1100> and |0011> on
/// (qubit, target, third, fourth), the two bit pairs moved together.
enum class GateKind { Ry, Rz, Cz, Givens, DoubleExcitation };

struct Gate {
  GateKind kind;
  int qubit = 0;
  int target = -1;
  int param = -1;  // parameter slot, -1 for fixed gates
  int third = -1;
  int fourth = -1;
};

/// Parameterized circuit: every parameterized gate reads its own slot.
class Ansatz {
 public:
  Ansatz(int n_qubits, std::vector<Gate> gates);

  /// `layers` blocks of (Ry, Rz on every qubit; Cz chain 0-1, 1-2, ...), then a
  /// final Ry/Rz block. `entangle = false` drops the Cz chains.
  static Ansatz hardware_efficient(int n_qubits, int layers, bool entangle = true);

  /// Particle-number and S_z conserving excitation circuit over an
  /// interleaved register with the first n_elec qubits occupied: one Givens
  /// gate per same-spin single and one DoubleExcitation per spin-allowed
  /// double, repeated `layers` times.
  static Ansatz qubit_excitation(int n_qubits, int n_elec, int layers = 1);

  int n_qubits() const { return n_qubits_; }
  int n_params() const { return n_params_; }
  const std::vector<Gate>& gates() const { return gates_; }

 private:
  int n_qubits_;
  int n_params_ = 0;
  std::vector<Gate> gates_;
};

Statevector apply_ansatz(const Ansatz& a, std::span<const double> params, const Statevector& reference);

double exact_expectation(const Statevector& psi, const QubitHamiltonian& h);

/// Shots per Pauli term; an empty value means exact expectations.
struct SamplingPlan {
  std::optional<long> shots_per_term;
  std::uint64_t seed = 0;

  static SamplingPlan exact() { return {}; }
  static SamplingPlan shots(long m, std::uint64_t seed) { return {m, seed}; }
  bool is_exact() const { return !shots_per_term.has_value(); }
};

struct SampledEstimate {
  double estimate = 0.0;
  double variance_estimate = 0.0;
};

/// Each non-identity term is measured independently with M single-shot +-1
/// outcomes. Identity terms are exact.
SampledEstimate sampled_expectation(const Statevector& psi, const QubitHamiltonian& h, const SamplingPlan& plan);
SampledEstimate sampled_expectation(const Statevector& psi, const QubitHamiltonian& h, long shots,
                                    std::mt19937_64& rng);

enum class Optimizer { NelderMead, Spsa };

struct VqeOptions {
  Optimizer optimizer = Optimizer::NelderMead;
  int max_evals = 20000;
  double f_tol = 1e-7;
  std::uint64_t seed = 1;
  double initial_step = 0.1;  // Nelder-Mead simplex edge
  double spsa_a = 0.2;
  double spsa_c = 0.1;
  int spsa_average_window = 200;
};

struct VqeResult {
  double energy = 0.0;
  std::vector<double> parameters;
  std::vector<double> energy_trace;
  int evaluations = 0;
  bool converged = false;
};

VqeResult run_vqe(const QubitHamiltonian& h, const Ansatz& a, const Statevector& reference, const VqeOptions& opts,
                  const SamplingPlan& plan = SamplingPlan::exact());

/// Spin-summed RDMs of a state on 2 n_spatial interleaved qubits.
Rdms rdm_from_state(const Statevector& psi, int n_spatial);

// ---------------------------------------------------------------------------
// Fragment solver facade used by the decomposition pipelines

enum class SolverKind { Fci, Vqe };

SolverKind parse_solver_kind(const std::string& name);
std::string to_string(SolverKind kind);

enum class AnsatzKind { QubitExcitation, HardwareEfficient };

AnsatzKind parse_ansatz_kind(const std::string& name);

struct FragmentSolverOptions {
  SolverKind kind = SolverKind::Fci;
  VqeOptions vqe;
  AnsatzKind ansatz = AnsatzKind::QubitExcitation;
  int ansatz_layers = 1;
  double number_penalty = 1.0;
  SamplingPlan sampling;
};

struct GroundState {
  double energy = 0.0;
  Rdms rdms;
};

struct MolecularVqe {
  VqeResult vqe;
  Statevector state;
  Matrix mo_coefficients;  // RHF orbitals the qubits refer to
  double energy = 0.0;     // <H> without the number penalty
  int n_qubits = 0;
  int n_parameters = 0;
};

/// VQE in the problem's RHF orbitals from the Hartree-Fock determinant.
MolecularVqe run_molecular_vqe(const IntegralSet& s, const FragmentSolverOptions& opts);

/// Ground state of a closed-shell problem with s.n_elec() electrons.
///
/// The VQE route works in the problem's own RHF orbitals, starts from the
/// Hartree-Fock determinant, pins the particle number with a quadratic
/// penalty and rotates the RDMs back to the input basis.
GroundState solve_ground_state(const IntegralSet& s, const FragmentSolverOptions& opts);

}  // namespace pdq
