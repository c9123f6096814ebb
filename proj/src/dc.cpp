// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0
#include "pdq/dc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "pdq/errors.hpp"
#include "pdq/mean_field.hpp"

namespace pdq {

namespace {

constexpr double kCountTol = 1e-11;

// Per-subsystem orbital weights w_q = 2 sum_mu p_mumu C_muq^2, so that
// Tr D^a = sum_q w_q f(eps_f - eps_q).
std::vector<Vector> occupation_weights(const std::vector<SubsystemSpectrum>& spectra) {
  std::vector<Vector> w;
  for (const auto& sp : spectra) {
    Vector wq(sp.eps.size());
    for (int q = 0; q < sp.eps.size(); ++q)
      wq(q) = 2.0 * (sp.partition.diagonal().array() * sp.coeffs.col(q).array().square()).sum();
    w.push_back(wq);
  }
  return w;
}

double count(const std::vector<SubsystemSpectrum>& spectra, const std::vector<Vector>& w, double eps_f, double beta) {
  double n = 0.0;
  for (std::size_t a = 0; a < spectra.size(); ++a)
    for (int q = 0; q < spectra[a].eps.size(); ++q) n += w[a](q) * fermi_function(eps_f - spectra[a].eps(q), beta);
  return n;
}

}  // namespace

OrbitalSet DcSubsystem::orbitals() const {
  OrbitalSet out = fragment;
  out.insert(out.end(), buffer.begin(), buffer.end());
  return out;
}

std::vector<DcSubsystem> k_neighbor_subsystems(const std::vector<OrbitalSet>& fragments, int k, bool ring) {
  const int nf = static_cast<int>(fragments.size());
  std::vector<DcSubsystem> subs;
  for (int i = 0; i < nf; ++i) {
    DcSubsystem sub{fragments[i], {}};
    std::vector<int> neighbors;
    for (int j = 0; j < nf; ++j) {
      if (j == i) continue;
      int dist = std::abs(i - j);
      if (ring) dist = std::min(dist, nf - dist);
      if (dist <= k) neighbors.push_back(j);
    }
    for (int j : neighbors) sub.buffer.insert(sub.buffer.end(), fragments[j].begin(), fragments[j].end());
    std::sort(sub.buffer.begin(), sub.buffer.end());
    subs.push_back(std::move(sub));
  }
  return subs;
}

Matrix partition_matrix(const DcSubsystem& sub, int n_orb) {
  std::vector<int> role(static_cast<std::size_t>(n_orb), 0);  // 2 fragment, 1 buffer
  for (int p : sub.fragment) {
    if (p < 0 || p >= n_orb) throw DimensionError("partition: fragment orbital out of range");
    role[p] = 2;
  }
  for (int p : sub.buffer) {
    if (p < 0 || p >= n_orb) throw DimensionError("partition: buffer orbital out of range");
    if (role[p] == 2) throw DimensionError("partition: orbital " + std::to_string(p) + " in both fragment and buffer");
    role[p] = 1;
  }
  Matrix m = Matrix::Zero(n_orb, n_orb);
  for (int p = 0; p < n_orb; ++p)
    for (int q = 0; q < n_orb; ++q) {
      if (role[p] == 2 && role[q] == 2)
        m(p, q) = 1.0;
      else if (role[p] + role[q] == 3)
        m(p, q) = 0.5;
    }
  return m;
}

SubsystemSpectrum subsystem_hf(const IntegralSet& s, const DcSubsystem& sub, const DensityMatrix& global_density) {
  const int n = s.n_orb();
  const OrbitalSet orbs = sub.orbitals();
  const int m = static_cast<int>(orbs.size());
  const Matrix f = fock_matrix(global_density, s);
  Matrix block(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) block(a, b) = f(orbs[a], orbs[b]);
  const auto eig = sorted_eigenpairs(block);
  SubsystemSpectrum sp;
  sp.eps = eig.values;
  sp.coeffs = Matrix::Zero(n, m);
  for (int a = 0; a < m; ++a) sp.coeffs.row(orbs[a]) = eig.vectors.row(a);
  sp.partition = partition_matrix(sub, n);
  return sp;
}

double fermi_function(double x, double beta) {
  const double t = std::clamp(beta * x, -500.0, 500.0);
  return 1.0 / (1.0 + std::exp(-t));
}

double dc_electron_count(const std::vector<SubsystemSpectrum>& spectra, double eps_f, double beta) {
  return count(spectra, occupation_weights(spectra), eps_f, beta);
}

double fermi_level(const std::vector<SubsystemSpectrum>& spectra, int n_elec, double beta) {
  if (spectra.empty()) throw DimensionError("fermi_level: no subsystem spectra");
  const auto w = occupation_weights(spectra);
  double emin = spectra.front().eps.minCoeff(), emax = spectra.front().eps.maxCoeff();
  for (const auto& sp : spectra) {
    emin = std::min(emin, sp.eps.minCoeff());
    emax = std::max(emax, sp.eps.maxCoeff());
  }
  const double margin = 1.0 + 600.0 / beta;
  const double lo0 = emin - margin, hi0 = emax + margin;
  const double n_lo = count(spectra, w, lo0, beta), n_hi = count(spectra, w, hi0, beta);
  if (!(n_lo <= n_elec + kCountTol && n_hi >= n_elec - kCountTol)) {
    std::ostringstream os;
    os << "Fermi level: electron count " << n_elec << " outside [" << n_lo << ", " << n_hi << "]";
    throw BracketError(os.str(), n_lo, n_hi);
  }

  // Lower and upper edges of {eps : |N(eps) - n| <= tol}; N is non-decreasing.
  auto edge = [&](auto inside_above) {
    double lo = lo0, hi = hi0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (inside_above(count(spectra, w, mid, beta)) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double lower = edge([&](double n) { return n >= n_elec - kCountTol; });
  const double upper = edge([&](double n) { return n > n_elec + kCountTol; });
  return 0.5 * (lower + upper);
}

DensityMatrix assemble_dc_density(const std::vector<SubsystemSpectrum>& spectra, double eps_f, double beta) {
  if (spectra.empty()) throw DimensionError("assemble_dc_density: no subsystem spectra");
  const int n = static_cast<int>(spectra.front().partition.rows());
  auto d = DensityMatrix::zero(n);
  for (const auto& sp : spectra) {
    Vector occ(sp.eps.size());
    for (int q = 0; q < sp.eps.size(); ++q) occ(q) = fermi_function(eps_f - sp.eps(q), beta);
    const Matrix local = sp.coeffs * occ.asDiagonal() * sp.coeffs.transpose();
    d.values += 2.0 * sp.partition.cwiseProduct(local);
  }
  return d;
}

DcResult dc_scf_loop(const IntegralSet& s, const std::vector<DcSubsystem>& subs, const DcOptions& opts) {
  const int n = s.n_orb();
  if (subs.empty()) throw DimensionError("dc: no subsystems");
  std::vector<int> owner(static_cast<std::size_t>(n), 0);
  for (const auto& sub : subs) {
    for (int p : sub.fragment) {
      if (p < 0 || p >= n) throw DimensionError("dc: fragment orbital out of range");
      if (owner[p]++) throw DimensionError("dc: orbital " + std::to_string(p) + " in two fragments");
    }
    partition_matrix(sub, n);  // validates the buffer
  }
  for (int p = 0; p < n; ++p)
    if (!owner[p]) throw DimensionError("dc: orbital " + std::to_string(p) + " not in any fragment");

  DcResult r;
  for (const auto& sub : subs) r.max_subsystem_orbitals = std::max<int>(r.max_subsystem_orbitals, sub.orbitals().size());
  DensityMatrix d(Matrix::Identity(n, n) * (static_cast<double>(s.n_elec()) / n));
  const int ns = static_cast<int>(subs.size());
  for (int it = 1; it <= opts.max_outer; ++it) {
    std::vector<SubsystemSpectrum> spectra(ns);
#pragma omp parallel for schedule(dynamic)
    for (int a = 0; a < ns; ++a) spectra[a] = subsystem_hf(s, subs[a], d);
    r.fermi_level = fermi_level(spectra, s.n_elec(), opts.beta);
    DensityMatrix next = assemble_dc_density(spectra, r.fermi_level, opts.beta);
    const double change = (next.values - d.values).cwiseAbs().maxCoeff();
    d = std::move(next);
    r.outer_iterations = it;
    if (change < opts.outer_tol) {
      r.converged = true;
      break;
    }
  }
  r.density = d;
  r.mean_field_energy = mean_field_energy(s, d);
  return r;
}

std::vector<double> dc_subsystem_correlation(const IntegralSet& s, const std::vector<DcSubsystem>& subs,
                                             const DensityMatrix& d, const FragmentSolverOptions& solver) {
  const int ns = static_cast<int>(subs.size());
  std::vector<double> out(ns);
  std::vector<std::exception_ptr> errors(ns);
#pragma omp parallel for schedule(dynamic)
  for (int a = 0; a < ns; ++a) {
    try {
      const OrbitalSet orbs = subs[a].orbitals();
      double inside = 0.0;
      for (int p : orbs) inside += d.values(p, p);
      const int electrons = 2 * static_cast<int>(std::lround(0.5 * inside));
      const IntegralSet sub = restrict_to_orbitals(s, orbs, &d, electrons);
      FragmentSolverOptions o = solver;
      o.vqe.seed ^= 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(a + 1);
      o.sampling.seed ^= 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(a + 1);
      out[a] = solve_ground_state(sub, o).energy - run_rhf(sub).total_energy;
    } catch (...) {
      errors[a] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace pdq
