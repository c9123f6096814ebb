// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <span>

#include "pdq/density.hpp"

// Hot inner loops. Each kernel has an OpenMP version (the default used by
// the library) and a serial reference kept for tests and benchmarks.
namespace pdq::kernels {

using Complex = std::complex<double>;

/// Coulomb J_pq = sum_rs D_rs (pq|rs) and exchange K_pq = sum_rs D_rs (pr|qs)
/// for a dense row-major two-body table of an n-orbital basis.
struct CoulombExchange {
  Matrix coulomb;
  Matrix exchange;
};

/// <psi| P |psi> for the Pauli string P = i^{|x&z|} X^x Z^z.
namespace serial {
CoulombExchange coulomb_exchange(const Matrix& d, std::span<const double> g);
Complex pauli_expectation(std::span<const Complex> psi, std::uint64_t x, std::uint64_t z);
}  // namespace serial

namespace parallel {
CoulombExchange coulomb_exchange(const Matrix& d, std::span<const double> g);
Complex pauli_expectation(std::span<const Complex> psi, std::uint64_t x, std::uint64_t z);
}  // namespace parallel

using parallel::coulomb_exchange;
using parallel::pauli_expectation;

/// Closed-shell mean-field potential J - K/2.
inline Matrix mean_field_potential(const Matrix& d, std::span<const double> g) {
  auto jk = coulomb_exchange(d, g);
  return jk.coulomb - 0.5 * jk.exchange;
}

}  // namespace pdq::kernels
