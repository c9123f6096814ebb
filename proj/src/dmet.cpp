// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0
#include "pdq/dmet.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>

#include "pdq/errors.hpp"
#include "pdq/kernels.hpp"
#include "pdq/mean_field.hpp"

namespace pdq {

namespace {

constexpr double kBathTol = 1e-13;
constexpr double kIdempotencyTol = 1e-5;

std::string join(const OrbitalSet& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? " " : "") << s[i];
  return os.str();
}

}  // namespace

void FragmentSpec::validate(int n_orb) const {
  if (fragments.empty()) throw DimensionError("fragment spec is empty");
  std::vector<int> seen(static_cast<std::size_t>(n_orb), 0);
  for (const auto& f : fragments) {
    if (f.empty()) throw DimensionError("empty fragment");
    for (int p : f) {
      if (p < 0 || p >= n_orb)
        throw DimensionError("orbital " + std::to_string(p) + " out of range for " + std::to_string(n_orb) +
                             " orbitals");
      if (seen[p]++) throw DimensionError("orbital " + std::to_string(p) + " appears in two fragments");
    }
  }
  for (int p = 0; p < n_orb; ++p)
    if (!seen[p]) throw DimensionError("orbital " + std::to_string(p) + " not covered by any fragment");
}

FragmentSpec FragmentSpec::single(int n_orb) {
  OrbitalSet all(static_cast<std::size_t>(n_orb));
  std::iota(all.begin(), all.end(), 0);
  return {{all}};
}

FragmentSpec FragmentSpec::blocks(int n_orb, int block) {
  if (block < 1) throw DimensionError("fragment block size must be positive");
  FragmentSpec spec;
  for (int start = 0; start < n_orb; start += block) {
    OrbitalSet f;
    for (int p = start; p < std::min(n_orb, start + block); ++p) f.push_back(p);
    spec.fragments.push_back(f);
  }
  return spec;
}

Bath build_bath(const DensityMatrix& d, const OrbitalSet& fragment) {
  const int n = d.size();
  const double idem = d.idempotency_error();
  if (idem > kIdempotencyTol)
    throw InvalidMeanFieldError("density is not idempotent (max |DD - 2D| = " + std::to_string(idem) + ")");

  std::vector<char> in_frag(static_cast<std::size_t>(n), 0);
  for (int p : fragment) in_frag[p] = 1;
  OrbitalSet env;
  for (int p = 0; p < n; ++p)
    if (!in_frag[p]) env.push_back(p);

  const int nf = static_cast<int>(fragment.size());
  const int ne = static_cast<int>(env.size());
  Bath bath;
  bath.core = DensityMatrix::zero(n);

  std::vector<int> kept;
  Eigenpairs eig;
  if (ne > 0) {
    Matrix block(ne, ne);
    for (int i = 0; i < ne; ++i)
      for (int j = 0; j < ne; ++j) block(i, j) = 0.5 * d.values(env[i], env[j]);
    eig = sorted_eigenpairs(block);

    std::vector<int> candidates;
    for (int k = 0; k < ne; ++k)
      if (eig.values(k) > kBathTol && eig.values(k) < 1.0 - kBathTol) candidates.push_back(k);
    // Schmidt rank cannot exceed the fragment size; drop the least entangled.
    std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
      auto ent = [&](int k) { return std::min(eig.values(k), 1.0 - eig.values(k)); };
      return ent(a) > ent(b);
    });
    if (static_cast<int>(candidates.size()) > nf) candidates.resize(nf);
    std::sort(candidates.begin(), candidates.end());
    kept = candidates;

    for (int k = 0; k < ne; ++k) {
      if (std::find(kept.begin(), kept.end(), k) != kept.end() || eig.values(k) < 0.5) continue;
      for (int i = 0; i < ne; ++i)
        for (int j = 0; j < ne; ++j) bath.core.values(env[i], env[j]) += 2.0 * eig.vectors(i, k) * eig.vectors(j, k);
    }
  }

  const int nb = static_cast<int>(kept.size());
  bath.transform = Matrix::Zero(n, nf + nb);
  bath.entanglement.resize(nb);
  for (int i = 0; i < nf; ++i) bath.transform(fragment[i], i) = 1.0;
  for (int b = 0; b < nb; ++b) {
    bath.entanglement(b) = eig.values(kept[b]);
    for (int i = 0; i < ne; ++i) bath.transform(env[i], nf + b) = eig.vectors(i, kept[b]);
  }

  const double projected = (bath.transform.transpose() * d.values * bath.transform).trace();
  bath.n_elec_emb = 2 * static_cast<int>(std::lround(0.5 * projected));
  bath.electron_residue = std::abs(projected - bath.n_elec_emb);
  return bath;
}

EmbeddingProblem build_embedding_hamiltonian(const IntegralSet& s, const Bath& bath, const OrbitalSet& fragment,
                                             double mu) {
  EmbeddingProblem p;
  p.transform = bath.transform;
  p.fragment_size = static_cast<int>(fragment.size());
  p.n_elec_emb = bath.n_elec_emb;
  p.mu_applied = mu;
  p.nuclear_core = s.core_energy();

  const IntegralSet rotated = transform_orbitals(s, bath.transform);
  p.env_potential = bath.transform.transpose() * kernels::mean_field_potential(bath.core.values, s.two_body()) *
                    bath.transform;
  Matrix h = rotated.one_body() + p.env_potential;
  for (int r = 0; r < p.fragment_size; ++r) h(r, r) -= mu;
  const double core = s.core_energy() + density_energy(s, bath.core.values);
  p.integrals = rotated.with_one_body(h).with_core_energy(core).with_n_elec(bath.n_elec_emb);
  return p;
}

double fragment_electron_count(const Matrix& rdm1, int fragment_size) {
  double n = 0.0;
  for (int r = 0; r < fragment_size; ++r) n += rdm1(r, r);
  return n;
}

double fragment_energy(const EmbeddingProblem& p, const Rdms& rdms) {
  const IntegralSet& s = p.integrals;
  const int n = s.n_orb();
  Matrix h = s.one_body() - 0.5 * p.env_potential;
  for (int r = 0; r < p.fragment_size; ++r) h(r, r) += p.mu_applied;
  double e = 0.0;
  for (int r = 0; r < p.fragment_size; ++r) {
    for (int q = 0; q < n; ++q) e += h(r, q) * rdms.rdm1(q, r);
    for (int q = 0; q < n; ++q)
      for (int t = 0; t < n; ++t)
        for (int u = 0; u < n; ++u) e += 0.5 * s.g(r, q, t, u) * rdms.rdm2_at(r, q, t, u);
  }
  return e;
}

namespace {

struct MuEvaluation {
  double mu = 0.0;
  double electrons = 0.0;
  std::vector<double> energies;
  std::vector<double> counts;
};

FragmentSolverOptions fragment_options(const FragmentSolverOptions& base, std::size_t index) {
  FragmentSolverOptions o = base;
  const std::uint64_t mix = 0x9e3779b97f4a7c15ULL * (index + 1);
  o.vqe.seed ^= mix;
  o.sampling.seed ^= mix;
  return o;
}

}  // namespace

DmetResult solve_single_shot(const IntegralSet& s, const FragmentSpec& frags, const FragmentSolverOptions& solver,
                             const DmetOptions& opts) {
  frags.validate(s.n_orb());
  DmetResult result;
  result.solver = solver.kind;

  const ScfResult rhf = run_rhf(s);
  if (!rhf.converged) result.warnings.push_back("mean-field SCF did not converge");

  const std::size_t nfrag = frags.size();
  std::vector<Bath> baths;
  for (const auto& f : frags.fragments) {
    baths.push_back(build_bath(rhf.density, f));
    result.embedding_sizes.push_back(static_cast<int>(baths.back().transform.cols()));
    if (baths.back().electron_residue > 0.01)
      result.warnings.push_back("fragment {" + join(f) + "}: non-integer embedded electron count (residue " +
                                std::to_string(baths.back().electron_residue) + ")");
  }

  auto evaluate = [&](double mu) {
    MuEvaluation ev;
    ev.mu = mu;
    ev.energies.assign(nfrag, 0.0);
    ev.counts.assign(nfrag, 0.0);
    std::vector<std::exception_ptr> errors(nfrag);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < nfrag; ++i) {
      try {
        const auto p = build_embedding_hamiltonian(s, baths[i], frags.fragments[i], mu);
        const auto gs = solve_ground_state(p.integrals, fragment_options(solver, i));
        ev.counts[i] = fragment_electron_count(gs.rdms.rdm1, p.fragment_size);
        ev.energies[i] = fragment_energy(p, gs.rdms);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    ev.electrons = std::accumulate(ev.counts.begin(), ev.counts.end(), 0.0);
    return ev;
  };

  const double target = s.n_elec();
  auto residual = [&](const MuEvaluation& ev) { return ev.electrons - target; };

  const MuEvaluation zero = evaluate(0.0);
  MuEvaluation best = zero;
  auto consider = [&](const MuEvaluation& ev) {
    if (std::abs(residual(ev)) < std::abs(residual(best))) best = ev;
  };

  if (std::abs(residual(best)) >= opts.mu_tol_electrons) {
    double width = opts.mu_bracket;
    MuEvaluation lo = evaluate(-width), hi = evaluate(width);
    result.mu_iterations += 2;
    consider(lo);
    consider(hi);
    int expansions = 0;
    while (!(residual(lo) <= 0.0 && residual(hi) >= 0.0)) {
      if (expansions++ >= opts.max_bracket_expansions) {
        std::ostringstream os;
        os << "chemical potential not bracketed on [" << lo.mu << ", " << hi.mu << "]: N = " << lo.electrons
           << " and " << hi.electrons << ", target " << target;
        throw BracketError(os.str(), lo.electrons, hi.electrons);
      }
      width *= 2.0;
      lo = evaluate(-width);
      hi = evaluate(width);
      result.mu_iterations += 2;
      consider(lo);
      consider(hi);
    }

    bool bisect_only = false;
    if (residual(zero) < residual(lo) || residual(zero) > residual(hi)) {
      bisect_only = true;
      result.warnings.push_back("electron count not monotone in mu; using bisection only");
    } else if (residual(zero) <= 0.0) {
      lo = zero;
    } else {
      hi = zero;
    }

    MuEvaluation prev = lo, last = hi;
    while (std::abs(residual(best)) >= opts.mu_tol_electrons && result.mu_iterations < opts.max_mu_iter) {
      double mu = 0.5 * (lo.mu + hi.mu);
      if (!bisect_only && hi.mu - lo.mu <= opts.bisection_width) {
        const double df = residual(last) - residual(prev);
        if (df != 0.0) {
          const double secant = last.mu - residual(last) * (last.mu - prev.mu) / df;
          if (secant > lo.mu && secant < hi.mu) mu = secant;
        }
      }
      const MuEvaluation ev = evaluate(mu);
      ++result.mu_iterations;
      consider(ev);
      if (residual(ev) <= 0.0) {
        if (!bisect_only && residual(ev) < residual(lo)) {
          bisect_only = true;
          result.warnings.push_back("electron count not monotone in mu; using bisection only");
        }
        lo = ev;
      } else {
        if (!bisect_only && residual(ev) > residual(hi)) {
          bisect_only = true;
          result.warnings.push_back("electron count not monotone in mu; using bisection only");
        }
        hi = ev;
      }
      prev = last;
      last = ev;
      if (hi.mu - lo.mu < 1e-14) break;
    }
  }

  result.converged = std::abs(residual(best)) < opts.mu_tol_electrons;
  if (!result.converged)
    result.warnings.push_back("electron count not matched; returning nearest mu");
  result.mu_star = best.mu;
  result.total_electrons = best.electrons;
  result.fragment_energies = best.energies;
  result.fragment_electrons = best.counts;
  result.total_energy =
      s.core_energy() + std::accumulate(best.energies.begin(), best.energies.end(), 0.0);
  return result;
}

}  // namespace pdq
