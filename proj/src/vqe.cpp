// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "pdq/errors.hpp"
#include "pdq/mean_field.hpp"
#include "pdq/solvers.hpp"

namespace pdq {

namespace {

using Objective = std::function<double(const std::vector<double>&)>;

struct Budget {
  int used = 0;
  int limit = 0;
  bool exhausted() const { return used >= limit; }
};

/// One Nelder-Mead descent with dimension-adapted coefficients. Returns the
/// best vertex; appends the best value after every iteration to `trace`.
std::pair<std::vector<double>, double> nelder_mead_cycle(const Objective& f, std::vector<double> x0, double fx0,
                                                         double step, double f_tol, Budget& budget,
                                                         std::vector<double>& trace) {
  const int n = static_cast<int>(x0.size());
  const double dn = std::max(n, 1);
  const double alpha = 1.0, beta = 1.0 + 2.0 / dn, gamma = 0.75 - 0.5 / dn, delta = 1.0 - 1.0 / dn;

  std::vector<std::vector<double>> pts{x0};
  std::vector<double> vals{fx0};
  for (int i = 0; i < n && !budget.exhausted(); ++i) {
    auto x = x0;
    x[i] += step;
    pts.push_back(x);
    vals.push_back(f(x));
    ++budget.used;
  }
  if (static_cast<int>(pts.size()) < n + 1) return {x0, fx0};

  std::vector<int> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
  };
  auto combine = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = c[i] + t * (w[i] - c[i]);
    return x;
  };

  while (!budget.exhausted()) {
    sort_simplex();
    const int best = order.front(), worst = order.back(), second = order[n - 1];
    trace.push_back(vals[best]);
    if (vals[worst] - vals[best] < f_tol) break;

    std::vector<double> c(n, 0.0);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) c[i] += pts[order[k]][i] / n;

    const auto xr = combine(c, pts[worst], -alpha);
    const double fr = f(xr);
    ++budget.used;
    if (fr < vals[best]) {
      const auto xe = combine(c, pts[worst], -alpha * beta);
      const double fe = f(xe);
      ++budget.used;
      if (fe < fr) {
        pts[worst] = xe, vals[worst] = fe;
      } else {
        pts[worst] = xr, vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = xr, vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      const auto xc = combine(c, outside ? xr : pts[worst], gamma);
      const double fc = f(xc);
      ++budget.used;
      if (fc < std::min(fr, vals[worst])) {
        pts[worst] = xc, vals[worst] = fc;
      } else {
        for (int k = 1; k <= n; ++k) {
          const int idx = order[k];
          pts[idx] = combine(pts[best], pts[idx], delta);
          vals[idx] = f(pts[idx]);
          ++budget.used;
        }
      }
    }
  }
  sort_simplex();
  return {pts[order.front()], vals[order.front()]};
}

VqeResult minimize_nelder_mead(const Objective& f, std::vector<double> x, const VqeOptions& opts) {
  VqeResult res;
  Budget budget{0, opts.max_evals};
  double fx = f(x);
  ++budget.used;
  res.energy_trace.push_back(fx);
  double step = opts.initial_step;
  while (!budget.exhausted()) {
    auto [xn, fn] = nelder_mead_cycle(f, x, fx, step, opts.f_tol, budget, res.energy_trace);
    const double gain = fx - fn;
    x = std::move(xn);
    fx = fn;
    // A restart that no longer lowers the energy by f_tol ends the run.
    if (gain < opts.f_tol) {
      res.converged = true;
      break;
    }
    step = std::max(0.25 * step, 1e-3);
  }
  res.parameters = std::move(x);
  res.energy = fx;
  if (res.energy_trace.back() != fx) res.energy_trace.push_back(fx);
  res.evaluations = budget.used;
  return res;
}

VqeResult minimize_spsa(const Objective& f, std::vector<double> x, const VqeOptions& opts, std::mt19937_64& rng) {
  VqeResult res;
  const int n = static_cast<int>(x.size());
  const int iterations = std::max(1, (opts.max_evals - 1) / 2);
  const double big_a = 0.1 * iterations;
  const int window = std::max(1, std::min(opts.spsa_average_window, iterations / 2));
  std::bernoulli_distribution coin(0.5);
  std::vector<double> avg(n, 0.0);
  int averaged = 0;

  for (int k = 0; k < iterations; ++k) {
    const double ak = opts.spsa_a / std::pow(k + 1 + big_a, 0.602);
    const double ck = opts.spsa_c / std::pow(k + 1, 0.101);
    std::vector<double> delta(n), xp(x), xm(x);
    for (int i = 0; i < n; ++i) {
      delta[i] = coin(rng) ? 1.0 : -1.0;
      xp[i] += ck * delta[i];
      xm[i] -= ck * delta[i];
    }
    const double yp = f(xp), ym = f(xm);
    res.evaluations += 2;
    const double slope = (yp - ym) / (2.0 * ck);
    for (int i = 0; i < n; ++i) x[i] -= ak * slope * delta[i];
    res.energy_trace.push_back(0.5 * (yp + ym));
    if (k >= iterations - window) {
      for (int i = 0; i < n; ++i) avg[i] += x[i];
      ++averaged;
    }
  }
  for (auto& v : avg) v /= averaged;

  // Drift between the last two windows, judged against their spread.
  const auto& tr = res.energy_trace;
  if (static_cast<int>(tr.size()) >= 2 * window) {
    auto stats = [&](std::size_t from) {
      double m = 0.0, m2 = 0.0;
      for (int i = 0; i < window; ++i) m += tr[from + i];
      m /= window;
      for (int i = 0; i < window; ++i) m2 += (tr[from + i] - m) * (tr[from + i] - m);
      return std::pair{m, std::sqrt(m2 / std::max(window - 1, 1) / window)};
    };
    const auto [m1, e1] = stats(tr.size() - 2 * window);
    const auto [m2, e2] = stats(tr.size() - window);
    res.converged = std::abs(m2 - m1) < std::max(opts.f_tol, 3.0 * std::hypot(e1, e2));
  }

  res.parameters = avg;
  res.energy = f(avg);
  ++res.evaluations;
  res.energy_trace.push_back(res.energy);
  return res;
}

}  // namespace

VqeResult run_vqe(const QubitHamiltonian& h, const Ansatz& a, const Statevector& reference, const VqeOptions& opts,
                  const SamplingPlan& plan) {
  if (h.n_qubits != a.n_qubits() || reference.n_qubits() != a.n_qubits())
    throw DimensionError("run_vqe: register size mismatch");
  std::mt19937_64 opt_rng(opts.seed);
  std::mt19937_64 shot_rng(plan.seed);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  std::vector<double> x(a.n_params());
  for (auto& v : x) v = jitter(opt_rng);

  Objective f = [&](const std::vector<double>& p) {
    const Statevector psi = apply_ansatz(a, p, reference);
    if (plan.is_exact()) return exact_expectation(psi, h);
    return sampled_expectation(psi, h, *plan.shots_per_term, shot_rng).estimate;
  };
  if (opts.optimizer == Optimizer::Spsa) return minimize_spsa(f, std::move(x), opts, opt_rng);
  return minimize_nelder_mead(f, std::move(x), opts);
}

// ---------------------------------------------------------------------------

SolverKind parse_solver_kind(const std::string& name) {
  if (name == "fci") return SolverKind::Fci;
  if (name == "vqe") return SolverKind::Vqe;
  throw std::invalid_argument("unknown solver '" + name + "' (expected fci or vqe)");
}

std::string to_string(SolverKind kind) { return kind == SolverKind::Fci ? "fci" : "vqe"; }

AnsatzKind parse_ansatz_kind(const std::string& name) {
  if (name == "qubit_excitation" || name == "qe") return AnsatzKind::QubitExcitation;
  if (name == "hardware_efficient" || name == "hea") return AnsatzKind::HardwareEfficient;
  throw std::invalid_argument("unknown ansatz '" + name + "' (expected qubit_excitation or hardware_efficient)");
}

namespace {

Rdms rotate_rdms(const Rdms& mo, const Matrix& c) {
  const int n = static_cast<int>(c.rows());
  Rdms out;
  out.rdm1 = c * mo.rdm1 * c.transpose();
  Matrix pair(n * n, n * n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) pair(p * n + q, a * n + b) = c(p, a) * c(q, b);
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> g(mo.rdm2.data(), n * n, n * n);
  const RowMajor rotated = pair * g * pair.transpose();
  out.rdm2.assign(rotated.data(), rotated.data() + rotated.size());
  return out;
}

}  // namespace

MolecularVqe run_molecular_vqe(const IntegralSet& s, const FragmentSolverOptions& opts) {
  const int n = s.n_orb();
  const auto rhf = run_rhf(s);
  const IntegralSet mo = transform_orbitals(s, rhf.coefficients);
  const QubitHamiltonian h = jordan_wigner(to_spin_orbital(mo));
  const QubitHamiltonian target = h + number_penalty(2 * n, s.n_elec(), opts.number_penalty);
  const auto reference = Statevector::basis_state(2 * n, (std::uint64_t{1} << s.n_elec()) - 1);
  const auto ansatz = opts.ansatz == AnsatzKind::QubitExcitation
                          ? Ansatz::qubit_excitation(2 * n, s.n_elec(), opts.ansatz_layers)
                          : Ansatz::hardware_efficient(2 * n, opts.ansatz_layers);

  MolecularVqe out{run_vqe(target, ansatz, reference, opts.vqe, opts.sampling), Statevector(2 * n),
                   rhf.coefficients};
  out.state = apply_ansatz(ansatz, out.vqe.parameters, reference);
  out.n_qubits = 2 * n;
  out.n_parameters = ansatz.n_params();
  if (opts.sampling.is_exact()) {
    out.energy = exact_expectation(out.state, h);
  } else {
    std::mt19937_64 rng(opts.sampling.seed ^ 0x9e3779b97f4a7c15ULL);
    out.energy = sampled_expectation(out.state, h, *opts.sampling.shots_per_term, rng).estimate;
  }
  return out;
}

GroundState solve_ground_state(const IntegralSet& s, const FragmentSolverOptions& opts) {
  if (opts.kind == SolverKind::Fci) {
    auto fci = fci_ground_state(s, s.n_elec());
    return {fci.energy, std::move(fci.rdms)};
  }
  const auto run = run_molecular_vqe(s, opts);
  return {run.energy, rotate_rdms(rdm_from_state(run.state, s.n_orb()), run.mo_coefficients)};
}

}  // namespace pdq
