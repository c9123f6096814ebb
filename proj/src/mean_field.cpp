// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0

#include "pdq/mean_field.hpp"

#include <algorithm>
#include <numeric>

#include "pdq/errors.hpp"
#include "pdq/kernels.hpp"

namespace pdq {

Matrix fock_matrix(const DensityMatrix& d, const IntegralSet& s) {
  if (d.size() != s.n_orb()) throw DimensionError("fock_matrix: density size mismatch");
  return s.one_body() + kernels::mean_field_potential(d.values, s.two_body());
}

Eigenpairs sorted_eigenpairs(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const int n = static_cast<int>(m.rows());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return es.eigenvalues()(a) < es.eigenvalues()(b); });
  Eigenpairs out{Vector(n), Matrix(n, n)};
  for (int k = 0; k < n; ++k) {
    out.values(k) = es.eigenvalues()(order[k]);
    out.vectors.col(k) = es.eigenvectors().col(order[k]);
  }
  return out;
}

DensityMatrix aufbau_density(const Matrix& c, int n_elec) {
  const int n_occ = n_elec / 2;
  const auto occ = c.leftCols(n_occ);
  return DensityMatrix(2.0 * occ * occ.transpose());
}

double mean_field_energy(const IntegralSet& s, const DensityMatrix& d) {
  const Matrix f = fock_matrix(d, s);
  return 0.5 * d.values.cwiseProduct(s.one_body() + f).sum() + s.core_energy();
}

ScfResult run_rhf(const IntegralSet& s, const RhfOptions& opts) {
  if (s.n_elec() % 2 != 0) throw UnsupportedInputError("run_rhf: closed-shell RHF needs an even electron count");
  const int n = s.n_orb();
  ScfResult res;
  DensityMatrix d(Matrix::Identity(n, n) * (static_cast<double>(s.n_elec()) / n));

  for (int it = 1; it <= opts.max_iter; ++it) {
    Matrix f = fock_matrix(d, s);
    res.energy_history.push_back(0.5 * d.values.cwiseProduct(s.one_body() + f).sum() + s.core_energy());
    if (opts.level_shift != 0.0) f += opts.level_shift * (Matrix::Identity(n, n) - 0.5 * d.values);
    const auto eig = sorted_eigenpairs(f);
    DensityMatrix next = aufbau_density(eig.vectors, s.n_elec());
    const double change = (next.values - d.values).cwiseAbs().maxCoeff();
    d = std::move(next);
    res.iterations = it;
    if (change < opts.density_tol) {
      res.converged = true;
      break;
    }
  }

  // Canonical orbitals of the final density's own Fock matrix.
  const Matrix f = fock_matrix(d, s);
  const auto eig = sorted_eigenpairs(f);
  res.orbital_energies = eig.values;
  res.coefficients = eig.vectors;
  res.density = aufbau_density(eig.vectors, s.n_elec());
  res.total_energy = mean_field_energy(s, res.density);
  res.energy_history.push_back(res.total_energy);
  return res;
}

}  // namespace pdq
