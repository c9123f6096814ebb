// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pdq/analysis.hpp"
#include "pdq/errors.hpp"
#include "pdq/qubit_map.hpp"
#include "test_support.hpp"

namespace pdq {
namespace {

std::vector<ConformerRecord> records_of(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<ConformerRecord> out;
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back({"c" + std::to_string(i), x[i], y[i]});
  return out;
}

std::vector<ConformerRecord> ensemble_records() {
  return read_records_csv(testing::fixture("h6_ensemble/dmet_records.csv"));
}

TEST(Mad, Examples) {
  EXPECT_DOUBLE_EQ(mad(records_of({1, 2}, {1, 2})), 0.0);
  EXPECT_DOUBLE_EQ(mad(records_of({0, 0}, {0.1, -0.1})), 0.1);
  EXPECT_THROW(mad({}), std::invalid_argument);
}

TEST(Mad, ShiftChangesItPredictably) {
  const auto r = records_of({1.0, 2.0, 3.0}, {1.1, 1.9, 3.3});
  auto shifted = r;
  for (auto& x : shifted) x.e_pd += 0.05;
  double direct = 0.0;
  for (const auto& x : r) direct += std::abs(x.e_pd + 0.05 - x.e_exact);
  EXPECT_NEAR(mad(shifted), direct / 3.0, 1e-15);
}

TEST(Correlation, Examples) {
  const auto same = records_of({1, 5, 2, 7}, {1, 5, 2, 7});
  EXPECT_DOUBLE_EQ(pearson(same), 1.0);
  EXPECT_DOUBLE_EQ(spearman(same), 1.0);
  EXPECT_NEAR(pearson(records_of({-1, 0, 1}, {1, 0, -1})), -1.0, 1e-15);
  EXPECT_NEAR(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}), 0.8, 1e-15);
}

TEST(Correlation, ZeroVarianceIsUndefined) {
  EXPECT_THROW(pearson(records_of({1, 2, 3}, {4, 4, 4})), UndefinedCorrelationError);
  EXPECT_THROW(spearman(records_of({1, 1, 1}, {1, 2, 3})), UndefinedCorrelationError);
  EXPECT_THROW(pearson(records_of({1}, {1})), UndefinedCorrelationError);
}

TEST(AverageRanks, TiesShareTheMean) {
  EXPECT_EQ(average_ranks({10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
}

TEST(Correlation, SpearmanIgnoresMonotoneTransforms) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> x(30), y(30), ty(30);
  for (int i = 0; i < 30; ++i) {
    x[i] = g(rng);
    y[i] = x[i] + 0.5 * g(rng);
    ty[i] = std::exp(3.0 * y[i]) - 7.0;
  }
  EXPECT_EQ(spearman(x, y), spearman(x, ty));
}

TEST(Correlation, PearsonIsAffineInvariant) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<double> x(25), y(25), ay(25), ny(25);
  for (int i = 0; i < 25; ++i) {
    x[i] = g(rng);
    y[i] = 0.3 * x[i] + g(rng);
    ay[i] = 4.0 * y[i] - 2.0;
    ny[i] = -0.5 * y[i] + 1.0;
  }
  EXPECT_NEAR(pearson(x, ay), pearson(x, y), 1e-12);
  EXPECT_NEAR(pearson(x, ny), -pearson(x, y), 1e-12);
}

TEST(QubitRatio, Examples) {
  EXPECT_EQ(qubit_ratio(46, 216).str(), "46/216");
  EXPECT_NEAR(qubit_ratio(46, 216).value(), 0.213, 5e-4);
  EXPECT_DOUBLE_EQ(qubit_ratio(12, 12).value(), 1.0);
  EXPECT_DOUBLE_EQ(qubit_ratio(46, 320).value(), 0.14375);
}

TEST(EfficiencyIndex, KnownRowsRoundToTwoFigures) {
  struct Row {
    double rho_p, rho_s, mad;
    long num, den;
    const char* expected;
  };
  const Row rows[] = {{0.96, 0.86, 0.075, 46, 216, "52"},  {0.87, 0.87, 0.084, 86, 216, "23"},
                      {0.89, 0.84, 0.047, 158, 216, "22"}, {0.93, 0.88, 0.10, 74, 404, "45"},
                      {0.77, 0.81, 0.086, 136, 404, "22"}, {0.85, 0.83, 0.048, 252, 404, "24"},
                      {0.83, 0.81, 0.14, 160, 984, "30"},  {0.66, 0.70, 0.099, 290, 984, "16"},
                      {0.74, 0.70, 0.052, 542, 984, "18"}};
  for (const auto& r : rows) {
    const double v = efficiency_index(r.rho_p, r.rho_s, r.mad, qubit_ratio(r.num, r.den).value());
    EXPECT_EQ(format_significant(v, 2), r.expected) << r.num << "/" << r.den;
  }
  EXPECT_DOUBLE_EQ(efficiency_index(1, 1, 1, 1), 1.0);
  EXPECT_THROW(efficiency_index(1, 1, 0, 1), std::invalid_argument);
  EXPECT_THROW(efficiency_index(1, 1, 1, 0), std::invalid_argument);
}

TEST(FormatSignificant, NoExponent) {
  EXPECT_EQ(format_significant(51.7, 2), "52");
  EXPECT_EQ(format_significant(320.4, 2), "320");
  EXPECT_EQ(format_significant(0.01234, 2), "0.012");
  EXPECT_EQ(format_significant(-4.56, 2), "-4.6");
}

TEST(ComputeMetrics, PerfectAgreementHasInfiniteIndex) {
  const auto m = compute_metrics(records_of({1, 2, 3}, {1, 2, 3}), qubit_ratio(4, 8));
  EXPECT_EQ(m.mad, 0.0);
  EXPECT_TRUE(std::isinf(m.i_eff));
  EXPECT_EQ(m.n_records, 3u);
}

TEST(VarianceBounds, Examples) {
  const auto z = QubitHamiltonian::from_pauli_sum(1, PauliSum(PauliString::from_word("Z"), 0.5));
  EXPECT_DOUBLE_EQ(variance_bound_hamiltonian(z, 100), 0.0025);
  const auto id = QubitHamiltonian::from_pauli_sum(2, PauliSum(3.0));
  EXPECT_DOUBLE_EQ(variance_bound_hamiltonian(id, 1), 0.0);
  EXPECT_DOUBLE_EQ(variance_bound_electron_number(4, 1000), 0.004);
  EXPECT_DOUBLE_EQ(variance_bound_electron_number(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(variance_bound_total({z}, {100}), 0.0025);
  EXPECT_DOUBLE_EQ(variance_bound_total({z, z, z}, {100, 50, 25}), 0.0025 + 0.005 + 0.01);
}

TEST(BootstrapNoiseSweep, ZeroNoiseReproducesTheRecords) {
  const auto r = ensemble_records();
  const auto s = bootstrap_noise_sweep(r, {0.0, 1e-9}, 200, 3);
  EXPECT_EQ(s.mean_rho_p[0], pearson(r));
  EXPECT_EQ(s.std_rho_p[0], 0.0);
  EXPECT_EQ(s.std_rho_s[0], 0.0);
  EXPECT_NEAR(s.mean_rho_p[1], pearson(r), 1e-6);
  EXPECT_NEAR(s.mean_rho_s[1], spearman(r), 1e-6);
}

TEST(BootstrapNoiseSweep, CorrelationsDecayWithNoise) {
  std::vector<double> x, y;
  for (int i = 0; i < 15; ++i) {
    x.push_back(-3.0 + 0.004 * i);
    y.push_back(-2.9 + 0.004 * i);
  }
  const std::vector<double> grid{0.001, 0.002, 0.005, 0.01, 0.02};
  const auto s = bootstrap_noise_sweep(records_of(x, y), grid, 2000, 11);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    EXPECT_LT(s.mean_rho_p[i], s.mean_rho_p[i - 1]);
    EXPECT_LT(s.mean_rho_s[i], s.mean_rho_s[i - 1]);
  }
}

TEST(BootstrapNoiseSweep, SameSeedSameSweep) {
  const auto r = ensemble_records();
  const auto a = bootstrap_noise_sweep(r, {0.01}, 300, 8);
  const auto b = bootstrap_noise_sweep(r, {0.01}, 300, 8);
  EXPECT_EQ(a.mean_rho_p, b.mean_rho_p);
  EXPECT_NE(a.mean_rho_p, bootstrap_noise_sweep(r, {0.01}, 300, 9).mean_rho_p);
}

TEST(RecordsCsv, RoundTripAndErrors) {
  const auto r = records_of({-1.5, -2.25}, {-1.25, -2.0});
  std::stringstream ss;
  write_records_csv(ss, r);
  const auto back = read_records_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].id, "c1");
  EXPECT_EQ(back[1].e_pd, -2.0);
  std::stringstream bad("id,e_exact,e_pd\nx,1.0\n");
  EXPECT_THROW(read_records_csv(bad), ParseError);
  std::stringstream header("id,energy\n");
  EXPECT_THROW(read_records_csv(header), ParseError);
}

TEST(MetricsCsv, ColumnOrder) {
  MetricsReport m{qubit_ratio(8, 12), 0.0045, 0.99, 0.97, 320.4, 10};
  std::stringstream ss;
  write_metrics_csv(ss, m);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "n,ratio,mad,rho_p,rho_s,i_eff");
}

}  // namespace
}  // namespace pdq
