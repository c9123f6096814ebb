// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdq/qubit_map.hpp"

namespace pdq {

struct ConformerRecord {
  std::string id;
  double e_exact = 0.0;
  double e_pd = 0.0;
};

/// Qubit-count ratio kept as an unreduced fraction, as printed in tables.
struct QubitRatio {
  long numerator = 0;
  long denominator = 1;
  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  std::string str() const { return std::to_string(numerator) + "/" + std::to_string(denominator); }
};

struct MetricsReport {
  QubitRatio ratio;
  double mad = 0.0;
  double rho_p = 0.0;
  double rho_s = 0.0;
  double i_eff = 0.0;
  std::size_t n_records = 0;
};

double mad(const std::vector<ConformerRecord>& records);
double pearson(const std::vector<ConformerRecord>& records);
double spearman(const std::vector<ConformerRecord>& records);

double pearson(const std::vector<double>& x, const std::vector<double>& y);
double spearman(const std::vector<double>& x, const std::vector<double>& y);
/// 1-based ranks, ties get the average rank.
std::vector<double> average_ranks(const std::vector<double>& x);

QubitRatio qubit_ratio(long qubits_pd, long qubits_full);

/// (rho_p * rho_s) / mad / ratio.
double efficiency_index(double rho_p, double rho_s, double mad, double ratio);
double efficiency_index(const MetricsReport& m);

/// mad, correlations and I^eff of a record set.
MetricsReport compute_metrics(const std::vector<ConformerRecord>& records, QubitRatio ratio);

/// Sum of |h|^2 / M over non-identity terms.
double variance_bound_hamiltonian(const QubitHamiltonian& h, long m_per_term);
double variance_bound_total(const std::vector<QubitHamiltonian>& hams, const std::vector<long>& m_per_fragment);
double variance_bound_electron_number(int n_spin_orbitals, long m);

struct NoiseSweep {
  std::vector<double> sigmas;
  std::vector<double> mean_rho_p, std_rho_p, mean_rho_s, std_rho_s;
  long n_bootstrap = 0;
  std::uint64_t seed = 0;
};

/// Each resample perturbs every e_pd with independent N(0, sigma^2) noise.
/// Resample (sigma index i, resample b) draws from its own stream seeded by
/// (seed, i, b), so results do not depend on the thread count.
NoiseSweep bootstrap_noise_sweep(const std::vector<ConformerRecord>& records, const std::vector<double>& sigmas,
                                 long n_bootstrap = 20000, std::uint64_t seed = 0);

namespace serial {
NoiseSweep bootstrap_noise_sweep(const std::vector<ConformerRecord>& records, const std::vector<double>& sigmas,
                                 long n_bootstrap = 20000, std::uint64_t seed = 0);
}

/// Rounds to `digits` significant figures, printed without an exponent
/// (51.7 -> "52", 320.4 -> "320", 0.01234 -> "0.012").
std::string format_significant(double v, int digits);

std::vector<ConformerRecord> read_records_csv(std::istream& in);
std::vector<ConformerRecord> read_records_csv(const std::string& path);
void write_records_csv(std::ostream& out, const std::vector<ConformerRecord>& records);
void write_metrics_csv(std::ostream& out, const MetricsReport& m);
void write_sweep_csv(std::ostream& out, const NoiseSweep& sweep);

}  // namespace pdq
