// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0

#include "pdq/qubit_map.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "pdq/errors.hpp"

namespace pdq {

namespace {

using Complex = PauliSum::Complex;

Complex i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

/// Product of two Pauli strings: returns phase and resulting string.
std::pair<Complex, PauliString> multiply(PauliString a, PauliString b) {
  const PauliString c{a.x ^ b.x, a.z ^ b.z};
  const int e = std::popcount(a.x & a.z) + std::popcount(b.x & b.z) + 2 * std::popcount(a.z & b.x) -
                std::popcount(c.x & c.z);
  return {i_power(e), c};
}

PauliSum ladder_to_pauli(const LadderOp& op) {
  if (op.mode < 0 || op.mode >= 64) throw MappingError("mode index outside the 64-qubit word");
  const std::uint64_t bit = std::uint64_t{1} << op.mode;
  const std::uint64_t lower = bit - 1;
  // a+ = (X - iY)/2 Z_lower, a = (X + iY)/2 Z_lower.
  PauliSum sum(PauliString{bit, lower}, 0.5);
  sum += PauliSum(PauliString{bit, lower | bit}, Complex(0.0, op.create ? -0.5 : 0.5));
  return sum;
}

}  // namespace

FermionOperator FermionOperator::adjoint() const {
  FermionOperator out{n_modes, {}};
  out.terms.reserve(terms.size());
  for (const auto& t : terms) {
    FermionTerm a{t.coefficient, {}};
    for (auto it = t.product.rbegin(); it != t.product.rend(); ++it) a.product.push_back({it->mode, !it->create});
    out.terms.push_back(std::move(a));
  }
  return out;
}

std::string PauliString::word(int n_qubits) const {
  std::string w(n_qubits, 'I');
  for (int k = 0; k < n_qubits; ++k) {
    const bool xb = (x >> k) & 1, zb = (z >> k) & 1;
    w[k] = xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
  }
  return w;
}

PauliString PauliString::from_word(const std::string& word) {
  if (word.size() > 64) throw MappingError("Pauli word longer than 64 qubits");
  PauliString p;
  for (std::size_t k = 0; k < word.size(); ++k) {
    const std::uint64_t bit = std::uint64_t{1} << k;
    switch (word[k]) {
      case 'I': break;
      case 'X': p.x |= bit; break;
      case 'Y': p.x |= bit; p.z |= bit; break;
      case 'Z': p.z |= bit; break;
      default: throw MappingError(std::string("invalid Pauli letter '") + word[k] + "'");
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// PauliSum

PauliSum::PauliSum(Complex constant) { terms_[PauliString{}] = constant; }

PauliSum::PauliSum(PauliString p, Complex c) { terms_[p] = c; }

PauliSum& PauliSum::operator+=(const PauliSum& o) {
  for (const auto& [p, c] : o.terms_) terms_[p] += c;
  return *this;
}

PauliSum& PauliSum::operator*=(Complex c) {
  for (auto& [p, v] : terms_) v *= c;
  return *this;
}

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
  PauliSum out;
  for (const auto& [pa, ca] : a.terms_)
    for (const auto& [pb, cb] : b.terms_) {
      const auto [phase, pc] = multiply(pa, pb);
      out.terms_[pc] += phase * ca * cb;
    }
  return out;
}

void PauliSum::prune(double threshold) {
  std::erase_if(terms_, [&](const auto& kv) { return std::abs(kv.second) < threshold; });
}

double PauliSum::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [p, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

// ---------------------------------------------------------------------------
// QubitHamiltonian

double QubitHamiltonian::constant() const {
  for (const auto& t : terms)
    if (t.pauli.is_identity()) return t.coefficient;
  return 0.0;
}

PauliSum QubitHamiltonian::to_pauli_sum() const {
  PauliSum s;
  for (const auto& t : terms) s += PauliSum(t.pauli, t.coefficient);
  return s;
}

QubitHamiltonian QubitHamiltonian::from_pauli_sum(int n_qubits, const PauliSum& sum, double drop_tol,
                                                  double imag_tol) {
  QubitHamiltonian h{n_qubits, {}};
  for (const auto& [p, c] : sum.terms()) {
    if (std::abs(c.imag()) > imag_tol) throw MappingError("non-Hermitian operator: imaginary Pauli coefficient");
    if (std::abs(c) < drop_tol) continue;
    h.terms.push_back({c.real(), p});
  }
  return h;
}

QubitHamiltonian operator+(const QubitHamiltonian& a, const QubitHamiltonian& b) {
  return QubitHamiltonian::from_pauli_sum(std::max(a.n_qubits, b.n_qubits), a.to_pauli_sum() + b.to_pauli_sum());
}

// ---------------------------------------------------------------------------
// Mappings

FermionOperator to_spin_orbital(const IntegralSet& s) {
  const int n = s.n_orb();
  FermionOperator f{2 * n, {}};
  if (s.core_energy() != 0.0) f.terms.push_back({s.core_energy(), {}});
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const double h = s.h(p, q);
      if (h == 0.0) continue;
      for (int sigma = 0; sigma < 2; ++sigma)
        f.terms.push_back({h, {{spin_orbital(p, sigma), true}, {spin_orbital(q, sigma), false}}});
    }
  // 1/2 sum (pq|rs) a+_{p s} a+_{r t} a_{s t} a_{q s}
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int t = 0; t < n; ++t) {
          const double g = s.g(p, q, r, t);
          if (g == 0.0) continue;
          for (int sigma = 0; sigma < 2; ++sigma)
            for (int tau = 0; tau < 2; ++tau) {
              const int a = spin_orbital(p, sigma), b = spin_orbital(r, tau);
              const int c = spin_orbital(t, tau), d = spin_orbital(q, sigma);
              if (a == b || c == d) continue;
              f.terms.push_back({0.5 * g, {{a, true}, {b, true}, {c, false}, {d, false}}});
            }
        }
  return f;
}

QubitHamiltonian jordan_wigner(const FermionOperator& f) {
  if (f.n_modes > 64) throw MappingError("more than 64 spin orbitals");
  PauliSum total;
  for (const auto& term : f.terms) {
    PauliSum product(Complex(term.coefficient, 0.0));
    for (const auto& op : term.product) product = product * ladder_to_pauli(op);
    total += product;
  }
  return QubitHamiltonian::from_pauli_sum(f.n_modes, total);
}

int count_qubits(int n_spatial_orbitals) {
  if (n_spatial_orbitals < 1) throw std::invalid_argument("count_qubits: need at least one orbital");
  return 2 * n_spatial_orbitals;
}

QubitHamiltonian number_operator(int n_qubits) {
  PauliSum n;
  for (int j = 0; j < n_qubits; ++j) {
    n += PauliSum(0.5);
    n += PauliSum(PauliString{0, std::uint64_t{1} << j}, -0.5);
  }
  return QubitHamiltonian::from_pauli_sum(n_qubits, n);
}

QubitHamiltonian number_penalty(int n_qubits, int n_target, double weight) {
  PauliSum shifted = number_operator(n_qubits).to_pauli_sum();
  shifted += PauliSum(Complex(-n_target, 0.0));
  PauliSum sq = shifted * shifted;
  sq *= weight;
  return QubitHamiltonian::from_pauli_sum(n_qubits, sq);
}

Matrix particle_sector_matrix(const QubitHamiltonian& h, int n_particles) {
  const int nq = h.n_qubits;
  if (nq > 30) throw CapacityError("particle_sector_matrix: too many qubits");
  std::vector<std::uint64_t> basis;
  std::map<std::uint64_t, int> position;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << nq); ++b)
    if (std::popcount(b) == n_particles) {
      position[b] = static_cast<int>(basis.size());
      basis.push_back(b);
    }
  const int dim = static_cast<int>(basis.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int col = 0; col < dim; ++col) {
    const std::uint64_t b = basis[col];
    for (const auto& t : h.terms) {
      // P|b> = i^{|x&z|} (-1)^{|z&b|} |b ^ x>
      const std::uint64_t target = b ^ t.pauli.x;
      const auto it = position.find(target);
      if (it == position.end()) continue;
      Complex amp = i_power(std::popcount(t.pauli.x & t.pauli.z)) * t.coefficient;
      if (std::popcount(t.pauli.z & b) & 1) amp = -amp;
      m(it->second, col) += amp;
    }
  }
  if (m.imag().cwiseAbs().maxCoeff() > 1e-10) throw MappingError("sector matrix is not real");
  return m.real();
}

void write_qubit_hamiltonian(std::ostream& out, const QubitHamiltonian& h) {
  char buf[64];
  for (const auto& t : h.terms) {
    std::snprintf(buf, sizeof buf, "%.16e", t.coefficient);
    out << buf << ' ' << t.pauli.word(h.n_qubits) << '\n';
  }
}

QubitHamiltonian read_qubit_hamiltonian(std::istream& in) {
  PauliSum sum;
  int n = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    double c;
    std::string w;
    if (!(ls >> c)) continue;
    if (!(ls >> w)) throw MappingError("expected 'coefficient word'");
    n = std::max(n, static_cast<int>(w.size()));
    sum += PauliSum(PauliString::from_word(w), c);
  }
  return QubitHamiltonian::from_pauli_sum(n, sum, 0.0);
}

}  // namespace pdq
