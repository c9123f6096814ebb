// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0
#include "pdq/fmo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "pdq/errors.hpp"
#include "pdq/mean_field.hpp"

namespace pdq {

namespace {

OrbitalSet union_of(const FragmentSpec& frags, const std::vector<int>& members) {
  OrbitalSet out;
  for (int i : members) out.insert(out.end(), frags.fragments[i].begin(), frags.fragments[i].end());
  return out;
}

// RHF density of the subset problem written back into full-basis coordinates.
DensityMatrix embed(const DensityMatrix& local, const OrbitalSet& subset, int n_orb) {
  auto d = DensityMatrix::zero(n_orb);
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = 0; b < subset.size(); ++b) d.values(subset[a], subset[b]) = local.values(a, b);
  return d;
}

std::vector<std::pair<int, int>> all_pairs(int n) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.emplace_back(i, j);
  return out;
}

template <typename F>
void parallel_for(int n, F&& body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<int> assign_fragment_electrons(int n_elec, const FragmentSpec& frags) {
  int n_orb = 0;
  for (const auto& f : frags.fragments) n_orb += static_cast<int>(f.size());
  std::vector<int> out;
  int assigned = 0;
  std::size_t largest = 0;
  for (std::size_t i = 0; i < frags.size(); ++i) {
    const double share = static_cast<double>(n_elec) * frags.fragments[i].size() / n_orb;
    out.push_back(2 * static_cast<int>(std::lround(0.5 * share)));
    assigned += out.back();
    if (frags.fragments[i].size() > frags.fragments[largest].size()) largest = i;
  }
  out[largest] += n_elec - assigned;
  const int cap = 2 * static_cast<int>(frags.fragments[largest].size());
  if (out[largest] < 0 || out[largest] > cap || out[largest] % 2 != 0)
    throw UnsupportedInputError("cannot assign " + std::to_string(n_elec) +
                                " electrons to closed-shell fragments of these sizes");
  return out;
}

DensityMatrix frozen_density(const FmoState& state, const std::vector<int>& exclude) {
  const int n = state.monomer_densities.front().size();
  auto d = DensityMatrix::zero(n);
  for (std::size_t k = 0; k < state.monomer_densities.size(); ++k)
    if (std::find(exclude.begin(), exclude.end(), static_cast<int>(k)) == exclude.end())
      d.values += state.monomer_densities[k].values;
  return d;
}

IntegralSet fmo_subproblem(const IntegralSet& s, const FmoState& state, const std::vector<int>& members) {
  int electrons = 0;
  for (int i : members) electrons += state.electrons[i];
  const auto frozen = frozen_density(state, members);
  return restrict_to_orbitals(s, union_of(state.fragmentation, members), &frozen, electrons);
}

FmoState monomer_scc_loop(const IntegralSet& s, const FragmentSpec& frags, const FmoOptions& opts) {
  frags.validate(s.n_orb());
  const int n = s.n_orb();
  const int nf = static_cast<int>(frags.size());
  FmoState st;
  st.fragmentation = frags;
  st.electrons = assign_fragment_electrons(s.n_elec(), frags);
  st.monomer_densities.assign(nf, DensityMatrix::zero(n));
  st.monomer_energies.assign(nf, 0.0);

  std::vector<Matrix> last_step(nf, Matrix::Zero(n, n));
  std::vector<char> damped(nf, 0), flagged(nf, 0);
  for (int sweep = 0; sweep <= opts.max_scc_iter; ++sweep) {
    // Jacobi update: every fragment sees the previous sweep's densities.
    const FmoState previous = st;
    std::vector<DensityMatrix> next(nf);
    std::vector<double> energies(nf);
    parallel_for(nf, [&](int i) {
      const IntegralSet sub = sweep == 0 ? restrict_to_orbitals(s, frags.fragments[i], nullptr, st.electrons[i])
                                         : fmo_subproblem(s, previous, {i});
      const auto rhf = run_rhf(sub);
      if (!rhf.converged) flagged[i] = 1;
      next[i] = embed(rhf.density, frags.fragments[i], n);
      energies[i] = rhf.total_energy - sub.core_energy();
    });

    double change = 0.0;
    for (int i = 0; i < nf; ++i) {
      Matrix step = next[i].values - previous.monomer_densities[i].values;
      if (sweep > 1 && step.cwiseProduct(last_step[i]).sum() < 0.0) damped[i] = 1;
      if (damped[i]) step *= 0.5;
      change = std::max(change, step.cwiseAbs().maxCoeff());
      st.monomer_densities[i].values = previous.monomer_densities[i].values + step;
      last_step[i] = step;
      st.monomer_energies[i] = energies[i];
    }
    st.scc_iterations = sweep + 1;
    if (sweep > 0 && change < opts.scc_tol) {
      st.converged = true;
      break;
    }
  }
  if (std::any_of(damped.begin(), damped.end(), [](char c) { return c; }))
    st.warnings.push_back("density oscillation detected; damped monomer updates");
  for (int i = 0; i < nf; ++i)
    if (flagged[i]) st.warnings.push_back("monomer " + std::to_string(i) + ": RHF did not converge in some sweep");
  if (!st.converged) st.warnings.push_back("monomer self-consistency not reached");

  // Energies consistent with the final (possibly damped) field.
  parallel_for(nf, [&](int i) {
    const IntegralSet sub = fmo_subproblem(s, st, {i});
    st.monomer_energies[i] = run_rhf(sub).total_energy - sub.core_energy();
  });
  return st;
}

void dimer_energies(const IntegralSet& s, FmoState& state) {
  const auto pairs = all_pairs(static_cast<int>(state.fragmentation.size()));
  std::vector<double> e(pairs.size());
  std::vector<char> flagged(pairs.size(), 0);
  parallel_for(static_cast<int>(pairs.size()), [&](int k) {
    const IntegralSet sub = fmo_subproblem(s, state, {pairs[k].first, pairs[k].second});
    const auto rhf = run_rhf(sub);
    if (!rhf.converged) flagged[k] = 1;
    e[k] = rhf.total_energy - sub.core_energy();
  });
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    state.dimer_energies[pairs[k]] = e[k];
    if (flagged[k])
      state.warnings.push_back("dimer (" + std::to_string(pairs[k].first) + "," + std::to_string(pairs[k].second) +
                               "): RHF did not converge");
  }
}

double assemble_fmo_energy(const std::vector<double>& monomer, const PairMap& dimer) {
  double e = 0.0;
  for (double x : monomer) e += x;
  for (const auto& [i, j] : all_pairs(static_cast<int>(monomer.size()))) {
    const auto it = dimer.find({i, j});
    if (it == dimer.end())
      throw DimensionError("missing dimer energy for pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    e += it->second - monomer[i] - monomer[j];
  }
  return e;
}

double assemble_fmo_correlation(const FmoCorrelation& c) { return assemble_fmo_energy(c.monomer_corr, c.dimer_corr); }

FmoCorrelation fmo_correlation(const IntegralSet& s, const FmoState& state, const FragmentSolverOptions& solver) {
  const int nf = static_cast<int>(state.fragmentation.size());
  std::vector<std::vector<int>> jobs;
  for (int i = 0; i < nf; ++i) jobs.push_back({i});
  for (const auto& [i, j] : all_pairs(nf)) jobs.push_back({i, j});

  std::vector<double> corr(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), [&](int k) {
    const IntegralSet sub = fmo_subproblem(s, state, jobs[k]);
    FragmentSolverOptions o = solver;
    o.vqe.seed ^= 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k + 1);
    o.sampling.seed ^= 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k + 1);
    corr[k] = solve_ground_state(sub, o).energy - run_rhf(sub).total_energy;
  });

  FmoCorrelation c;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    if (jobs[k].size() == 1)
      c.monomer_corr.push_back(corr[k]);
    else
      c.dimer_corr[{jobs[k][0], jobs[k][1]}] = corr[k];
  }
  return c;
}

FmoResult run_fmo(const IntegralSet& s, const FragmentSpec& frags, const FmoOptions& opts,
                  const std::optional<FragmentSolverOptions>& solver) {
  FmoResult r;
  r.state = monomer_scc_loop(s, frags, opts);
  dimer_energies(s, r.state);
  r.total_energy = s.core_energy() + assemble_fmo_energy(r.state.monomer_energies, r.state.dimer_energies);
  for (const auto& [key, e] : r.state.dimer_energies)
    r.pair_corrections[key] = e - r.state.monomer_energies[key.first] - r.state.monomer_energies[key.second];
  const int nf = static_cast<int>(frags.size());
  for (const auto& f : frags.fragments) r.max_subproblem_orbitals = std::max<int>(r.max_subproblem_orbitals, f.size());
  for (const auto& [i, j] : all_pairs(nf))
    r.max_subproblem_orbitals = std::max<int>(r.max_subproblem_orbitals,
                                              frags.fragments[i].size() + frags.fragments[j].size());
  if (solver) {
    r.correlation = fmo_correlation(s, r.state, *solver);
    r.correlation_energy = assemble_fmo_correlation(*r.correlation);
  }
  return r;
}

}  // namespace pdq
