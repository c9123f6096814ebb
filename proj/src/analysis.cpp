// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0
#include "pdq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "pdq/errors.hpp"

namespace pdq {

namespace {

std::vector<double> column(const std::vector<ConformerRecord>& r, double ConformerRecord::*field) {
  std::vector<double> out;
  out.reserve(r.size());
  for (const auto& x : r) out.push_back(x.*field);
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t resample_seed(std::uint64_t seed, std::size_t sigma_index, long resample) {
  return splitmix64(splitmix64(splitmix64(seed) ^ sigma_index) ^ static_cast<std::uint64_t>(resample));
}

struct Correlations {
  double p, s;
};

Correlations one_resample(const std::vector<double>& exact, const std::vector<double>& exact_ranks,
                          const std::vector<double>& pd, double sigma, std::uint64_t seed) {
  std::vector<double> noisy = pd;
  if (sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& e : noisy) e += noise(rng);
  }
  return {pearson(exact, noisy), pearson(exact_ranks, average_ranks(noisy))};
}

struct Welford {
  long n = 0;
  double mean = 0.0, m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double stddev() const { return n > 0 ? std::sqrt(m2 / static_cast<double>(n)) : 0.0; }
};

void check_sweep_input(const std::vector<ConformerRecord>& records, const std::vector<double>& sigmas, long nb) {
  if (records.size() < 3) throw std::invalid_argument("bootstrap sweep needs at least 3 records");
  if (nb < 1) throw std::invalid_argument("n_bootstrap must be positive");
  for (double s : sigmas)
    if (!(s >= 0.0)) throw std::invalid_argument("sigma must be non-negative");
}

template <bool Parallel>
NoiseSweep sweep_impl(const std::vector<ConformerRecord>& records, const std::vector<double>& sigmas, long nb,
                      std::uint64_t seed) {
  check_sweep_input(records, sigmas, nb);
  const auto exact = column(records, &ConformerRecord::e_exact);
  const auto pd = column(records, &ConformerRecord::e_pd);
  const auto exact_ranks = average_ranks(exact);
  NoiseSweep out;
  out.sigmas = sigmas;
  out.n_bootstrap = nb;
  out.seed = seed;
  std::vector<Correlations> draws(static_cast<std::size_t>(nb));
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    std::vector<std::exception_ptr> errors(Parallel ? static_cast<std::size_t>(nb) : 0);
    if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
      for (long b = 0; b < nb; ++b) {
        try {
          draws[b] = one_resample(exact, exact_ranks, pd, sigmas[i], resample_seed(seed, i, b));
        } catch (...) {
          errors[b] = std::current_exception();
        }
      }
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    } else {
      for (long b = 0; b < nb; ++b) draws[b] = one_resample(exact, exact_ranks, pd, sigmas[i], resample_seed(seed, i, b));
    }
    Welford wp, ws;
    for (const auto& c : draws) {
      wp.add(c.p);
      ws.add(c.s);
    }
    out.mean_rho_p.push_back(wp.mean);
    out.std_rho_p.push_back(wp.stddev());
    out.mean_rho_s.push_back(ws.mean);
    out.std_rho_s.push_back(ws.stddev());
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

std::string format_significant(double v, int digits) {
  if (v == 0.0 || !std::isfinite(v)) return fmt("%g", v);
  const int mag = static_cast<int>(std::floor(std::log10(std::abs(v))));
  const double unit = std::pow(10.0, mag - digits + 1);
  const double rounded = std::round(v / unit) * unit;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", std::max(0, digits - 1 - mag), rounded);
  return buf;
}

double mad(const std::vector<ConformerRecord>& records) {
  if (records.empty()) throw std::invalid_argument("mad: no records");
  double s = 0.0;
  for (const auto& r : records) s += std::abs(r.e_pd - r.e_exact);
  return s / static_cast<double>(records.size());
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("pearson: column lengths differ");
  if (x.size() < 2) throw UndefinedCorrelationError("correlation needs at least 2 records");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelationError("correlation undefined: a column has zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(average_ranks(x), average_ranks(y));
}

double pearson(const std::vector<ConformerRecord>& r) {
  return pearson(column(r, &ConformerRecord::e_exact), column(r, &ConformerRecord::e_pd));
}

double spearman(const std::vector<ConformerRecord>& r) {
  return spearman(column(r, &ConformerRecord::e_exact), column(r, &ConformerRecord::e_pd));
}

QubitRatio qubit_ratio(long qubits_pd, long qubits_full) {
  if (qubits_pd < 0 || qubits_full <= 0) throw std::invalid_argument("qubit ratio needs positive qubit counts");
  return {qubits_pd, qubits_full};
}

double efficiency_index(double rho_p, double rho_s, double mad_value, double ratio) {
  if (!(mad_value > 0.0)) throw std::invalid_argument("efficiency index undefined for MAD = 0");
  if (!(ratio > 0.0)) throw std::invalid_argument("efficiency index undefined for ratio = 0");
  return rho_p * rho_s / mad_value / ratio;
}

double efficiency_index(const MetricsReport& m) { return efficiency_index(m.rho_p, m.rho_s, m.mad, m.ratio.value()); }

MetricsReport compute_metrics(const std::vector<ConformerRecord>& records, QubitRatio ratio) {
  MetricsReport m;
  m.n_records = records.size();
  m.ratio = ratio;
  m.mad = mad(records);
  m.rho_p = pearson(records);
  m.rho_s = spearman(records);
  m.i_eff = m.mad > 0.0 ? efficiency_index(m) : std::numeric_limits<double>::infinity();
  return m;
}

double variance_bound_hamiltonian(const QubitHamiltonian& h, long m_per_term) {
  if (m_per_term < 1) throw std::invalid_argument("shots per term must be >= 1");
  double s = 0.0;
  for (const auto& t : h.terms)
    if (!t.pauli.is_identity()) s += t.coefficient * t.coefficient;
  return s / static_cast<double>(m_per_term);
}

double variance_bound_total(const std::vector<QubitHamiltonian>& hams, const std::vector<long>& m) {
  if (hams.size() != m.size()) throw DimensionError("one shot count per fragment Hamiltonian required");
  double s = 0.0;
  for (std::size_t i = 0; i < hams.size(); ++i) s += variance_bound_hamiltonian(hams[i], m[i]);
  return s;
}

double variance_bound_electron_number(int n_spin_orbitals, long m) {
  if (m < 1) throw std::invalid_argument("shots must be >= 1");
  return static_cast<double>(n_spin_orbitals) / static_cast<double>(m);
}

NoiseSweep bootstrap_noise_sweep(const std::vector<ConformerRecord>& records, const std::vector<double>& sigmas,
                                 long n_bootstrap, std::uint64_t seed) {
  return sweep_impl<true>(records, sigmas, n_bootstrap, seed);
}

namespace serial {
NoiseSweep bootstrap_noise_sweep(const std::vector<ConformerRecord>& records, const std::vector<double>& sigmas,
                                 long n_bootstrap, std::uint64_t seed) {
  return sweep_impl<false>(records, sigmas, n_bootstrap, seed);
}
}  // namespace serial

std::vector<ConformerRecord> read_records_csv(std::istream& in) {
  std::vector<ConformerRecord> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(trim(c));
    if (!header) {
      if (cols != std::vector<std::string>{"id", "e_exact", "e_pd"})
        throw ParseError(lineno, "expected header 'id,e_exact,e_pd'");
      header = true;
      continue;
    }
    if (cols.size() != 3) throw ParseError(lineno, "expected 3 columns");
    ConformerRecord r;
    r.id = cols[0];
    try {
      std::size_t used = 0;
      r.e_exact = std::stod(cols[1], &used);
      if (used != cols[1].size()) throw std::invalid_argument("");
      r.e_pd = std::stod(cols[2], &used);
      if (used != cols[2].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ParseError(lineno, "bad number");
    }
    if (!std::isfinite(r.e_exact) || !std::isfinite(r.e_pd)) throw ParseError(lineno, "non-finite energy");
    out.push_back(r);
  }
  if (!header) throw ParseError(lineno, "missing header");
  return out;
}

std::vector<ConformerRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_records_csv(in);
}

void write_records_csv(std::ostream& out, const std::vector<ConformerRecord>& records) {
  out << "id,e_exact,e_pd\n";
  for (const auto& r : records) out << r.id << ',' << fmt("%.12g", r.e_exact) << ',' << fmt("%.12g", r.e_pd) << '\n';
}

void write_metrics_csv(std::ostream& out, const MetricsReport& m) {
  out << "n,ratio,mad,rho_p,rho_s,i_eff\n";
  out << m.n_records << ',' << m.ratio.str() << ',' << fmt("%.6g", m.mad) << ',' << fmt("%.6g", m.rho_p) << ','
      << fmt("%.6g", m.rho_s) << ',' << format_significant(m.i_eff, 2) << '\n';
}

void write_sweep_csv(std::ostream& out, const NoiseSweep& sw) {
  out << "sigma,mean_rho_p,std_rho_p,mean_rho_s,std_rho_s\n";
  for (std::size_t i = 0; i < sw.sigmas.size(); ++i)
    out << fmt("%.6g", sw.sigmas[i]) << ',' << fmt("%.6g", sw.mean_rho_p[i]) << ',' << fmt("%.6g", sw.std_rho_p[i])
        << ',' << fmt("%.6g", sw.mean_rho_s[i]) << ',' << fmt("%.6g", sw.std_rho_s[i]) << '\n';
}

}  // namespace pdq
