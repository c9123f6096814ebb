// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pdq/fcidump.hpp"

namespace pdq {

/// Spin-orbital index with interleaved ordering: spatial p up = 2p, down = 2p + 1.
inline int spin_orbital(int spatial, int spin) { return 2 * spatial + spin; }

struct LadderOp {
  int mode = 0;
  bool create = false;
  bool operator==(const LadderOp&) const = default;
};

struct FermionTerm {
  double coefficient = 0.0;
  std::vector<LadderOp> product;  // applied right to left, written left to right
};

struct FermionOperator {
  int n_modes = 0;
  std::vector<FermionTerm> terms;

  FermionOperator adjoint() const;
};

/// Pauli word as symplectic bit masks: P = i^{|x & z|} X^x Z^z, so a qubit
/// with both bits set carries Y. Bit k is qubit k.
struct PauliString {
  std::uint64_t x = 0;
  std::uint64_t z = 0;

  auto operator<=>(const PauliString&) const = default;
  bool is_identity() const { return x == 0 && z == 0; }

  /// Character k is the operator on qubit k, e.g. "IZII" is Z on qubit 1.
  std::string word(int n_qubits) const;
  static PauliString from_word(const std::string& word);
};

struct PauliTerm {
  double coefficient = 0.0;
  PauliString pauli;
};

/// Complex linear combination of Pauli strings, closed under products.
class PauliSum {
 public:
  using Complex = std::complex<double>;

  PauliSum() = default;
  explicit PauliSum(Complex constant);
  PauliSum(PauliString p, Complex c);

  PauliSum& operator+=(const PauliSum& o);
  PauliSum& operator*=(Complex c);
  friend PauliSum operator*(const PauliSum& a, const PauliSum& b);
  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a += PauliSum(b) *= -1.0; }

  /// Drops terms with |c| below `threshold`.
  void prune(double threshold);
  double max_abs_coefficient() const;
  const std::map<PauliString, Complex>& terms() const { return terms_; }

 private:
  std::map<PauliString, Complex> terms_;
};

/// Hermitian qubit operator with real coefficients and unique Pauli strings.
struct QubitHamiltonian {
  int n_qubits = 0;
  std::vector<PauliTerm> terms;

  /// Coefficient of the identity string.
  double constant() const;
  PauliSum to_pauli_sum() const;

  /// Throws MappingError when an imaginary part above `imag_tol` survives.
  static QubitHamiltonian from_pauli_sum(int n_qubits, const PauliSum& sum, double drop_tol = 1e-12,
                                         double imag_tol = 1e-10);
};

QubitHamiltonian operator+(const QubitHamiltonian& a, const QubitHamiltonian& b);

/// H = sum h_pq a+_p a_q + 1/2 sum <pq|rs> a+_p a+_q a_s a_r + core over 2 n_orb
/// interleaved spin orbitals.
FermionOperator to_spin_orbital(const IntegralSet& s);

/// a+_j -> (X_j - i Y_j)/2 Z_{j-1}...Z_0. Like strings are merged; terms with
/// |c| < 1e-12 dropped. Throws MappingError for non-Hermitian input.
QubitHamiltonian jordan_wigner(const FermionOperator& f);

/// Two qubits per spatial orbital.
int count_qubits(int n_spatial_orbitals);

/// N = sum_j (I - Z_j)/2.
QubitHamiltonian number_operator(int n_qubits);

/// weight * (N - n_target)^2, used to pin variational states to a particle sector.
QubitHamiltonian number_penalty(int n_qubits, int n_target, double weight);

/// Dense matrix of `h` on computational basis states with `n_particles` set bits
/// (ascending basis-index order). Throws MappingError if not real.
Matrix particle_sector_matrix(const QubitHamiltonian& h, int n_particles);

/// One `coefficient word` line per term.
void write_qubit_hamiltonian(std::ostream& out, const QubitHamiltonian& h);
QubitHamiltonian read_qubit_hamiltonian(std::istream& in);

}  // namespace pdq
