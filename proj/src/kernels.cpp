// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0

#include "pdq/kernels.hpp"

#include <bit>

namespace pdq::kernels {

namespace {

// i^k for k mod 4.
Complex i_power(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

int orbital_count(const Matrix& d, std::span<const double> g) {
  const int n = static_cast<int>(d.rows());
  const auto n2 = static_cast<std::size_t>(n) * n;
  if (g.size() != n2 * n2) throw std::invalid_argument("coulomb_exchange: size mismatch");
  return n;
}

}  // namespace

namespace serial {

CoulombExchange coulomb_exchange(const Matrix& d, std::span<const double> g) {
  const int n = orbital_count(d, g);
  const std::size_t un = n;
  CoulombExchange out{Matrix::Zero(n, n), Matrix::Zero(n, n)};
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      double j = 0.0, k = 0.0;
      for (int r = 0; r < n; ++r) {
        for (int s = 0; s < n; ++s) {
          j += d(r, s) * g[((p * un + q) * un + r) * un + s];
          k += d(r, s) * g[((p * un + r) * un + q) * un + s];
        }
      }
      out.coulomb(p, q) = j;
      out.exchange(p, q) = k;
    }
  }
  return out;
}

Complex pauli_expectation(std::span<const Complex> psi, std::uint64_t x, std::uint64_t z) {
  Complex acc = 0.0;
  for (std::uint64_t b = 0; b < psi.size(); ++b) {
    const double sign = (std::popcount(z & b) & 1) ? -1.0 : 1.0;
    acc += std::conj(psi[b ^ x]) * psi[b] * sign;
  }
  return acc * i_power(std::popcount(x & z));
}

}  // namespace serial

namespace parallel {

CoulombExchange coulomb_exchange(const Matrix& d, std::span<const double> g) {
  const int n = orbital_count(d, g);
  const std::size_t un = n;
  CoulombExchange out{Matrix::Zero(n, n), Matrix::Zero(n, n)};
  const double* gp = g.data();
#pragma omp parallel for collapse(2) schedule(static) if (n >= 8)
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      double j = 0.0, k = 0.0;
      for (int r = 0; r < n; ++r) {
        const double* gj = gp + ((p * un + q) * un + r) * un;
        const double* gk = gp + ((p * un + r) * un + q) * un;
        for (int s = 0; s < n; ++s) {
          j += d(r, s) * gj[s];
          k += d(r, s) * gk[s];
        }
      }
      out.coulomb(p, q) = j;
      out.exchange(p, q) = k;
    }
  }
  return out;
}

Complex pauli_expectation(std::span<const Complex> psi, std::uint64_t x, std::uint64_t z) {
  const auto dim = static_cast<std::int64_t>(psi.size());
  double re = 0.0, im = 0.0;
#pragma omp parallel for reduction(+ : re, im) schedule(static) if (dim >= 4096)
  for (std::int64_t i = 0; i < dim; ++i) {
    const auto b = static_cast<std::uint64_t>(i);
    const double sign = (std::popcount(z & b) & 1) ? -1.0 : 1.0;
    const Complex t = std::conj(psi[b ^ x]) * psi[b] * sign;
    re += t.real();
    im += t.imag();
  }
  return Complex(re, im) * i_power(std::popcount(x & z));
}

}  // namespace parallel

}  // namespace pdq::kernels
