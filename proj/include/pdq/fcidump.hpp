// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdq/density.hpp"

namespace pdq {

using OrbitalIndex = int;
using OrbitalSet = std::vector<OrbitalIndex>;

/// Lexicographically smallest of the eight permutation images of (pq|rs).
std::array<int, 4> canonical_key(int p, int q, int r, int s);

/// Second-quantized Hamiltonian in an orthonormal spatial-orbital basis:
/// one-body h_pq, chemists' (pq|rs), electron count and a constant shift.
///
/// Instances are immutable. The two-body table is held dense (n^4) with all
/// eight permutation images populated; construction goes through
/// IntegralSetBuilder or from_dense(), both of which enforce the symmetry.
class IntegralSet {
 public:
  IntegralSet() = default;

  /// Symmetrizes `one_body` and averages `two_body` over its permutation
  /// images. `two_body` is row-major [p][q][r][s].
  static IntegralSet from_dense(int n_elec, int ms2, double core_energy, Matrix one_body,
                                std::vector<double> two_body);

  int n_orb() const { return n_orb_; }
  int n_elec() const { return n_elec_; }
  int ms2() const { return ms2_; }
  double core_energy() const { return core_energy_; }

  const Matrix& one_body() const { return one_body_; }
  double h(int p, int q) const { return one_body_(p, q); }
  double g(int p, int q, int r, int s) const { return two_body_[index(p, q, r, s)]; }
  std::span<const double> two_body() const { return two_body_; }

  std::size_t index(int p, int q, int r, int s) const {
    const auto n = static_cast<std::size_t>(n_orb_);
    return ((static_cast<std::size_t>(p) * n + q) * n + r) * n + s;
  }

  IntegralSet with_n_elec(int n_elec, int ms2 = 0) const;
  IntegralSet with_core_energy(double core) const;
  IntegralSet with_one_body(Matrix h) const;

  /// Exact (bitwise) equality on every field.
  bool operator==(const IntegralSet& other) const;

 private:
  friend class IntegralSetBuilder;

  int n_orb_ = 0;
  int n_elec_ = 0;
  int ms2_ = 0;
  double core_energy_ = 0.0;
  Matrix one_body_;
  std::vector<double> two_body_;
};

/// Incremental construction; each setter writes all symmetry images.
class IntegralSetBuilder {
 public:
  IntegralSetBuilder(int n_orb, int n_elec, int ms2 = 0);

  IntegralSetBuilder& set_core_energy(double e);
  IntegralSetBuilder& set_one_body(int p, int q, double value);
  IntegralSetBuilder& set_two_body(int p, int q, int r, int s, double value);

  IntegralSet build() const;

 private:
  IntegralSet set_;
};

IntegralSet parse_fcidump(std::istream& in);
IntegralSet parse_fcidump(const std::string& text);
IntegralSet read_fcidump_file(const std::string& path);

void write_fcidump(std::ostream& out, const IntegralSet& s);
std::string write_fcidump(const IntegralSet& s);

/// Hamiltonian projected onto `subset` (in the given order).
///
/// With a frozen density, the complement block of that density is held fixed:
/// its closed-shell field J - K/2 dresses the one-body term and its own energy
/// is absorbed into the core energy. The electron count defaults to
/// n_elec - round(Tr D_complement) with a frozen density, and to
/// min(n_elec, 2 |subset|) without one.
IntegralSet restrict_to_orbitals(const IntegralSet& s, const OrbitalSet& subset,
                                 const DensityMatrix* frozen_density = nullptr,
                                 std::optional<int> n_elec = std::nullopt);

/// Integrals in the orbital basis given by the columns of `transform`
/// (n_orb x k, assumed orthonormal). Core energy and electron count copied.
IntegralSet transform_orbitals(const IntegralSet& s, const Matrix& transform);

/// Energy of a density D alone: Tr[D h] + 1/2 Tr[D (J - K/2)(D)], no core.
double density_energy(const IntegralSet& s, const Matrix& d);

}  // namespace pdq
