// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "pdq/errors.hpp"
#include "pdq/kernels.hpp"
#include "pdq/solvers.hpp"

namespace pdq {

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits), amps_(std::size_t{1} << n_qubits, 0.0) {
  if (n_qubits < 0 || n_qubits > 30) throw CapacityError("statevector: qubit count outside [0, 30]");
  amps_[0] = 1.0;
}

Statevector::Statevector(int n_qubits, std::vector<Complex> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  if (amps_.size() != (std::size_t{1} << n_qubits)) throw DimensionError("statevector: length must be 2^n");
}

Statevector Statevector::basis_state(int n_qubits, std::uint64_t bits) {
  Statevector s(n_qubits);
  if (bits >= s.dim()) throw DimensionError("basis_state: bits exceed register");
  s.amps_[0] = 0.0;
  s.amps_[bits] = 1.0;
  return s;
}

double Statevector::norm() const {
  double acc = 0.0;
  for (const auto& a : amps_) acc += std::norm(a);
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// Ansatz

Ansatz::Ansatz(int n_qubits, std::vector<Gate> gates) : n_qubits_(n_qubits), gates_(std::move(gates)) {
  std::set<int> slots;
  for (const auto& g : gates_) {
    std::vector<int> qs{g.qubit};
    if (g.kind == GateKind::Cz || g.kind == GateKind::Givens || g.kind == GateKind::DoubleExcitation)
      qs.push_back(g.target);
    if (g.kind == GateKind::DoubleExcitation) {
      qs.push_back(g.third);
      qs.push_back(g.fourth);
    }
    for (int q : qs)
      if (q < 0 || q >= n_qubits_) throw DimensionError("ansatz: gate qubit out of range");
    if (std::set<int>(qs.begin(), qs.end()).size() != qs.size()) throw DimensionError("ansatz: repeated gate qubit");
    if (g.kind == GateKind::Cz) continue;
    if (g.param < 0) throw DimensionError("ansatz: rotation without parameter slot");
    if (!slots.insert(g.param).second) throw DimensionError("ansatz: parameter slot referenced twice");
  }
  n_params_ = static_cast<int>(slots.size());
  if (!slots.empty() && *slots.rbegin() != n_params_ - 1) throw DimensionError("ansatz: parameter slots not contiguous");
}

Ansatz Ansatz::hardware_efficient(int n_qubits, int layers, bool entangle) {
  std::vector<Gate> gates;
  int slot = 0;
  auto rotations = [&] {
    for (int q = 0; q < n_qubits; ++q) gates.push_back({GateKind::Ry, q, -1, slot++});
    for (int q = 0; q < n_qubits; ++q) gates.push_back({GateKind::Rz, q, -1, slot++});
  };
  for (int l = 0; l < layers; ++l) {
    rotations();
    if (entangle)
      for (int q = 0; q + 1 < n_qubits; ++q) gates.push_back({GateKind::Cz, q, q + 1, -1});
  }
  rotations();
  return Ansatz(n_qubits, std::move(gates));
}

Ansatz Ansatz::qubit_excitation(int n_qubits, int n_elec, int layers) {
  std::vector<Gate> gates;
  int slot = 0;
  for (int l = 0; l < layers; ++l) {
    for (int i = 0; i < n_elec; ++i)
      for (int a = n_elec; a < n_qubits; ++a)
        if ((i - a) % 2 == 0) gates.push_back({GateKind::Givens, i, a, slot++});
    for (int i = 0; i < n_elec; ++i)
      for (int j = i + 1; j < n_elec; ++j)
        for (int a = n_elec; a < n_qubits; ++a)
          for (int b = a + 1; b < n_qubits; ++b)
            if ((i % 2) + (j % 2) == (a % 2) + (b % 2)) gates.push_back({GateKind::DoubleExcitation, i, j, slot++, a, b});
  }
  return Ansatz(n_qubits, std::move(gates));
}

namespace {

void apply_single(std::span<Complex> amps, int q, const Complex m00, const Complex m01, const Complex m10,
                  const Complex m11) {
  const std::size_t bit = std::size_t{1} << q;
  const auto half = static_cast<std::int64_t>(amps.size() / 2);
#pragma omp parallel for schedule(static) if (half >= 8192)
  for (std::int64_t k = 0; k < half; ++k) {
    // k with a zero inserted at position q
    const std::size_t i0 = ((static_cast<std::size_t>(k) >> q) << (q + 1)) | (static_cast<std::size_t>(k) & (bit - 1));
    const std::size_t i1 = i0 | bit;
    const Complex a0 = amps[i0], a1 = amps[i1];
    amps[i0] = m00 * a0 + m01 * a1;
    amps[i1] = m10 * a0 + m11 * a1;
  }
}

/// Rotates amplitude between basis states whose `from` bits are all set with
/// `to` bits clear and the mirrored states; other states are untouched.
void apply_pair_rotation(std::span<Complex> amps, std::size_t from, std::size_t to, double theta) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  const std::size_t mask = from | to;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if ((i & mask) != from) continue;
    const std::size_t j = i ^ mask;
    const Complex a = amps[i], b = amps[j];
    amps[i] = c * a - s * b;
    amps[j] = s * a + c * b;
  }
}

}  // namespace

Statevector apply_ansatz(const Ansatz& a, std::span<const double> params, const Statevector& reference) {
  if (static_cast<int>(params.size()) != a.n_params()) throw DimensionError("apply_ansatz: parameter count mismatch");
  if (reference.n_qubits() != a.n_qubits()) throw DimensionError("apply_ansatz: register size mismatch");
  Statevector out = reference;
  auto amps = out.amplitudes();
  for (const auto& g : a.gates()) {
    switch (g.kind) {
      case GateKind::Ry: {
        const double c = std::cos(0.5 * params[g.param]), s = std::sin(0.5 * params[g.param]);
        apply_single(amps, g.qubit, c, -s, s, c);
        break;
      }
      case GateKind::Rz: {
        const double h = 0.5 * params[g.param];
        apply_single(amps, g.qubit, std::polar(1.0, -h), 0.0, 0.0, std::polar(1.0, h));
        break;
      }
      case GateKind::Cz: {
        const std::size_t mask = (std::size_t{1} << g.qubit) | (std::size_t{1} << g.target);
        for (std::size_t i = 0; i < amps.size(); ++i)
          if ((i & mask) == mask) amps[i] = -amps[i];
        break;
      }
      case GateKind::Givens:
        apply_pair_rotation(amps, std::size_t{1} << g.qubit, std::size_t{1} << g.target, params[g.param]);
        break;
      case GateKind::DoubleExcitation:
        apply_pair_rotation(amps, (std::size_t{1} << g.qubit) | (std::size_t{1} << g.target),
                            (std::size_t{1} << g.third) | (std::size_t{1} << g.fourth), params[g.param]);
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Expectations

double exact_expectation(const Statevector& psi, const QubitHamiltonian& h) {
  if (h.n_qubits != psi.n_qubits()) throw DimensionError("exact_expectation: register size mismatch");
  Complex acc = 0.0;
  for (const auto& t : h.terms) acc += t.coefficient * kernels::pauli_expectation(psi.amplitudes(), t.pauli.x, t.pauli.z);
  if (std::abs(acc.imag()) > 1e-10) throw MappingError("expectation value has an imaginary part");
  return acc.real();
}

SampledEstimate sampled_expectation(const Statevector& psi, const QubitHamiltonian& h, long shots,
                                    std::mt19937_64& rng) {
  if (shots < 1) throw std::invalid_argument("sampled_expectation: shots must be >= 1");
  if (h.n_qubits != psi.n_qubits()) throw DimensionError("sampled_expectation: register size mismatch");
  SampledEstimate out;
  for (const auto& t : h.terms) {
    if (t.pauli.is_identity()) {
      out.estimate += t.coefficient;
      continue;
    }
    const double mean = std::clamp(kernels::pauli_expectation(psi.amplitudes(), t.pauli.x, t.pauli.z).real(), -1.0, 1.0);
    // M independent +-1 outcomes: the number of +1 results is binomial.
    std::binomial_distribution<long> outcomes(shots, 0.5 * (1.0 + mean));
    const long plus = outcomes(rng);
    const double sample_mean = static_cast<double>(2 * plus - shots) / static_cast<double>(shots);
    out.estimate += t.coefficient * sample_mean;
    out.variance_estimate += t.coefficient * t.coefficient * (1.0 - sample_mean * sample_mean) / shots;
  }
  return out;
}

SampledEstimate sampled_expectation(const Statevector& psi, const QubitHamiltonian& h, const SamplingPlan& plan) {
  if (plan.is_exact()) throw std::invalid_argument("sampled_expectation: plan has no finite shot count");
  std::mt19937_64 rng(plan.seed);
  return sampled_expectation(psi, h, *plan.shots_per_term, rng);
}

// ---------------------------------------------------------------------------
// RDMs by ladder-operator application

namespace {

/// a_j |psi>, with the Jordan-Wigner parity of the occupied modes below j.
std::vector<Complex> annihilate(std::span<const Complex> psi, int j) {
  std::vector<Complex> out(psi.size(), 0.0);
  const std::size_t bit = std::size_t{1} << j;
  for (std::size_t b = 0; b < psi.size(); ++b) {
    if (!(b & bit) || psi[b] == Complex(0.0)) continue;
    const double sign = (std::popcount(b & (bit - 1)) & 1) ? -1.0 : 1.0;
    out[b ^ bit] += sign * psi[b];
  }
  return out;
}

Complex inner(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

}  // namespace

Rdms rdm_from_state(const Statevector& psi, int n_spatial) {
  if (psi.n_qubits() != 2 * n_spatial) throw DimensionError("rdm_from_state: expected 2 n_spatial qubits");
  const int m = 2 * n_spatial;
  std::vector<std::vector<Complex>> one(m);
  for (int j = 0; j < m; ++j) one[j] = annihilate(psi.amplitudes(), j);
  // two[i][j] = a_i a_j |psi>
  std::vector<std::vector<std::vector<Complex>>> two(m, std::vector<std::vector<Complex>>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) two[i][j] = annihilate(one[j], i);

  const int n = n_spatial;
  Rdms out;
  Eigen::MatrixXcd g1 = Eigen::MatrixXcd::Zero(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int s = 0; s < 2; ++s) g1(p, q) += inner(one[2 * p + s], one[2 * q + s]);
  if ((g1 - g1.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw MappingError("rdm1 is not Hermitian");
  out.rdm1 = g1.real();

  const auto un = static_cast<std::size_t>(n);
  out.rdm2.assign(un * un * un * un, 0.0);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int t = 0; t < n; ++t) {
          Complex v = 0.0;
          for (int s1 = 0; s1 < 2; ++s1)
            for (int s2 = 0; s2 < 2; ++s2) {
              const int a = 2 * p + s1, b = 2 * r + s2, c = 2 * t + s2, d = 2 * q + s1;
              if (a == b || c == d) continue;
              // <a+_a a+_b a_c a_d> = <a_b a_a psi | a_c a_d psi>
              v += inner(two[b][a], two[c][d]);
            }
          out.rdm2[((p * un + q) * un + r) * un + t] = v.real();
        }
  return out;
}

}  // namespace pdq
