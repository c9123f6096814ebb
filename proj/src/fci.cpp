// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "pdq/errors.hpp"
#include "pdq/mean_field.hpp"
#include "pdq/solvers.hpp"

namespace pdq {

namespace {

struct Excitation {
  int pq;      // p * n + q for E_pq
  int target;  // string index after E_pq
  double sign;
};

/// Occupation strings of fixed popcount and their single-excitation tables.
struct StringSpace {
  int n = 0;
  std::vector<std::uint64_t> strings;
  std::vector<std::vector<Excitation>> excitations;  // per source string

  StringSpace(int n_orb, int n_el) : n(n_orb) {
    std::vector<int> lookup(std::size_t{1} << n_orb, -1);
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << n_orb); ++b)
      if (std::popcount(b) == n_el) {
        lookup[b] = static_cast<int>(strings.size());
        strings.push_back(b);
      }
    excitations.resize(strings.size());
    for (std::size_t i = 0; i < strings.size(); ++i) {
      const std::uint64_t src = strings[i];
      for (int q = 0; q < n_orb; ++q) {
        if (!((src >> q) & 1)) continue;
        const std::uint64_t removed = src ^ (std::uint64_t{1} << q);
        const int sign_q = std::popcount(src & ((std::uint64_t{1} << q) - 1)) & 1;
        for (int p = 0; p < n_orb; ++p) {
          if ((removed >> p) & 1) continue;
          const std::uint64_t dst = removed | (std::uint64_t{1} << p);
          const int sign_p = std::popcount(removed & ((std::uint64_t{1} << p) - 1)) & 1;
          excitations[i].push_back({p * n_orb + q, lookup[dst], (sign_p ^ sign_q) ? -1.0 : 1.0});
        }
      }
    }
  }
  int size() const { return static_cast<int>(strings.size()); }
};

class FciHamiltonian {
 public:
  FciHamiltonian(const IntegralSet& s, int n_alpha, int n_beta)
      : s_(s), n_(s.n_orb()), alpha_(n_, n_alpha), beta_(n_, n_beta) {
    const int n2 = n_ * n_;
    gmat_ = Matrix(n2, n2);
    for (int p = 0; p < n_; ++p)
      for (int q = 0; q < n_; ++q)
        for (int r = 0; r < n_; ++r)
          for (int t = 0; t < n_; ++t) gmat_(p * n_ + q, r * n_ + t) = s.g(p, q, r, t);
    hprime_ = s.one_body();
    for (int p = 0; p < n_; ++p)
      for (int q = 0; q < n_; ++q)
        for (int r = 0; r < n_; ++r) hprime_(p, q) -= 0.5 * s.g(p, r, r, q);
  }

  int dim() const { return alpha_.size() * beta_.size(); }
  const StringSpace& alpha() const { return alpha_; }
  const StringSpace& beta() const { return beta_; }

  /// D(pq, I) = (E_pq c)_I.
  Matrix replacement_vectors(const Vector& c) const {
    const int nb = beta_.size();
    Matrix d = Matrix::Zero(n_ * n_, dim());
#pragma omp parallel for schedule(static) if (dim() >= 256)
    for (int i = 0; i < dim(); ++i) {
      const int ia = i / nb, ib = i % nb;
      // <I|E_qp|J> = <J|E_pq|I>
      for (const auto& e : alpha_.excitations[ia]) {
        const int qp = (e.pq % n_) * n_ + e.pq / n_;
        d(qp, i) += e.sign * c(e.target * nb + ib);
      }
      for (const auto& e : beta_.excitations[ib]) {
        const int qp = (e.pq % n_) * n_ + e.pq / n_;
        d(qp, i) += e.sign * c(ia * nb + e.target);
      }
    }
    return d;
  }

  Vector sigma(const Vector& c) const {
    const int nb = beta_.size();
    const Matrix d = replacement_vectors(c);
    const Matrix g = 0.5 * gmat_ * d;
    const Eigen::Map<const Vector> hp(hprime_.data(), n_ * n_);
    // hprime_ is column-major: hp(q * n + p) = h'_pq; transpose symmetric anyway.
    Vector out = s_.core_energy() * c + d.transpose() * hp;
#pragma omp parallel for schedule(static) if (dim() >= 256)
    for (int i = 0; i < dim(); ++i) {
      const int ia = i / nb, ib = i % nb;
      double acc = 0.0;
      for (const auto& e : alpha_.excitations[ia]) {
        const int qp = (e.pq % n_) * n_ + e.pq / n_;
        acc += e.sign * g(qp, e.target * nb + ib);
      }
      for (const auto& e : beta_.excitations[ib]) {
        const int qp = (e.pq % n_) * n_ + e.pq / n_;
        acc += e.sign * g(qp, ia * nb + e.target);
      }
      out(i) += acc;
    }
    return out;
  }

  Vector diagonal() const {
    const int nb = beta_.size();
    Vector diag(dim());
    for (int i = 0; i < dim(); ++i) {
      const auto a = alpha_.strings[i / nb], b = beta_.strings[i % nb];
      double e = s_.core_energy();
      std::vector<std::pair<int, int>> occ;  // (orbital, spin)
      for (int p = 0; p < n_; ++p) {
        if ((a >> p) & 1) occ.emplace_back(p, 0);
        if ((b >> p) & 1) occ.emplace_back(p, 1);
      }
      for (auto [p, sp] : occ) e += s_.h(p, p);
      for (std::size_t x = 0; x < occ.size(); ++x)
        for (std::size_t y = x + 1; y < occ.size(); ++y) {
          const auto [p, sp] = occ[x];
          const auto [q, sq] = occ[y];
          e += s_.g(p, p, q, q);
          if (sp == sq) e -= s_.g(p, q, q, p);
        }
      diag(i) = e;
    }
    return diag;
  }

  Rdms rdms(const Vector& c) const {
    const Matrix d = replacement_vectors(c);
    const int n2 = n_ * n_;
    Rdms out;
    out.rdm1 = Matrix(n_, n_);
    const Vector dc = d * c;
    for (int p = 0; p < n_; ++p)
      for (int q = 0; q < n_; ++q) out.rdm1(p, q) = dc(p * n_ + q);
    const Matrix m = d * d.transpose();  // m(ab, cd) = <E_ab c | E_cd c>
    out.rdm2.assign(static_cast<std::size_t>(n2) * n2, 0.0);
    for (int p = 0; p < n_; ++p)
      for (int q = 0; q < n_; ++q)
        for (int r = 0; r < n_; ++r)
          for (int t = 0; t < n_; ++t) {
            // <E_pq E_rt> = <E_qp c | E_rt c>, minus delta_qr <E_pt>
            double v = m(q * n_ + p, r * n_ + t);
            if (q == r) v -= out.rdm1(p, t);
            out.rdm2[((static_cast<std::size_t>(p) * n_ + q) * n_ + r) * n_ + t] = v;
          }
    out.rdm1 = 0.5 * (out.rdm1 + out.rdm1.transpose()).eval();
    return out;
  }

 private:
  const IntegralSet& s_;
  int n_;
  StringSpace alpha_, beta_;
  Matrix gmat_;
  Matrix hprime_;
};

/// Lowest eigenpair by Davidson iteration with a diagonal preconditioner.
std::pair<double, Vector> davidson(const FciHamiltonian& h) {
  const int dim = h.dim();
  const Vector diag = h.diagonal();
  if (dim <= 64) {
    Matrix full(dim, dim);
    for (int i = 0; i < dim; ++i) full.col(i) = h.sigma(Vector::Unit(dim, i));
    const auto eig = sorted_eigenpairs(0.5 * (full + full.transpose()));
    return {eig.values(0), eig.vectors.col(0)};
  }

  std::vector<int> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return diag(a) < diag(b); });

  const int max_space = std::min(dim, 40);
  Matrix basis(dim, 0), sigmas(dim, 0);
  auto add = [&](Vector v) {
    for (int k = 0; k < 2; ++k) v -= basis * (basis.transpose() * v);
    const double nrm = v.norm();
    if (nrm < 1e-12) return false;
    v /= nrm;
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    sigmas.conservativeResize(Eigen::NoChange, sigmas.cols() + 1);
    basis.col(basis.cols() - 1) = v;
    sigmas.col(sigmas.cols() - 1) = h.sigma(v);
    return true;
  };
  for (int k = 0; k < std::min(dim, 3); ++k) add(Vector::Unit(dim, order[k]));

  double theta = 0.0;
  Vector x;
  for (int iter = 0; iter < 500; ++iter) {
    const Matrix sub = basis.transpose() * sigmas;
    const auto eig = sorted_eigenpairs(0.5 * (sub + sub.transpose()));
    theta = eig.values(0);
    x = basis * eig.vectors.col(0);
    const Vector hx = sigmas * eig.vectors.col(0);
    Vector r = hx - theta * x;
    if (r.norm() < 1e-10) break;
    for (int i = 0; i < dim; ++i) {
      const double den = theta - diag(i);
      r(i) /= std::abs(den) > 1e-8 ? den : 1e-8;
    }
    if (basis.cols() >= max_space) {
      const Vector hxn = hx;
      basis = x;
      sigmas = hxn;
    }
    if (!add(r)) break;
  }
  return {theta, x.normalized()};
}

}  // namespace

FciResult fci_ground_state(const IntegralSet& s, int n_elec) {
  const int n = s.n_orb();
  if (n_elec < 0 || n_elec > 2 * n) throw UnsupportedInputError("fci: electron count outside [0, 2 n_orb]");
  const int ms2 = n_elec == s.n_elec() ? s.ms2() : n_elec % 2;
  if ((n_elec + ms2) % 2 != 0 || std::abs(ms2) > n_elec)
    throw UnsupportedInputError("fci: inconsistent electron count and MS2");
  const int n_alpha = (n_elec + ms2) / 2, n_beta = (n_elec - ms2) / 2;
  if (n_alpha > n || n_beta > n) throw UnsupportedInputError("fci: too many electrons of one spin");
  if (n > 30) throw CapacityError("fci: too many orbitals");

  auto binom = [](int a, int b) {
    double r = 1.0;
    for (int k = 1; k <= b; ++k) r = r * (a - b + k) / k;
    return r;
  };
  if (binom(n, n_alpha) * binom(n, n_beta) > static_cast<double>(kMaxDeterminants))
    throw CapacityError("fci: determinant space exceeds 2^20");

  FciHamiltonian h(s, n_alpha, n_beta);
  auto [energy, vec] = davidson(h);
  FciResult res;
  res.energy = energy;
  res.coefficients = std::move(vec);
  res.rdms = h.rdms(res.coefficients);
  res.alpha_strings = h.alpha().strings;
  res.beta_strings = h.beta().strings;
  res.n_orb = n;
  return res;
}

double energy_from_rdms(const IntegralSet& s, const Rdms& rdms) {
  double e = s.core_energy() + s.one_body().cwiseProduct(rdms.rdm1).sum();
  const auto g = s.two_body();
  for (std::size_t i = 0; i < g.size(); ++i) e += 0.5 * g[i] * rdms.rdm2[i];
  return e;
}

Statevector fci_to_statevector(const FciResult& fci) {
  const int n = fci.n_orb;
  const int nb = static_cast<int>(fci.beta_strings.size());
  std::vector<Complex> amps(std::size_t{1} << (2 * n), 0.0);
  for (std::size_t ia = 0; ia < fci.alpha_strings.size(); ++ia)
    for (int ib = 0; ib < nb; ++ib) {
      const auto a = fci.alpha_strings[ia], b = fci.beta_strings[ib];
      std::uint64_t bits = 0;
      int swaps = 0;
      for (int p = 0; p < n; ++p) {
        if ((a >> p) & 1) {
          bits |= std::uint64_t{1} << (2 * p);
          swaps += std::popcount(b & ((std::uint64_t{1} << p) - 1));  // beta orbitals q < p
        }
        if ((b >> p) & 1) bits |= std::uint64_t{1} << (2 * p + 1);
      }
      const double sign = (swaps & 1) ? -1.0 : 1.0;
      amps[bits] = sign * fci.coefficients(static_cast<int>(ia) * nb + ib);
    }
  return Statevector(2 * n, std::move(amps));
}

}  // namespace pdq
