// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pdq/cli.hpp"
#include "pdq/errors.hpp"
#include "test_support.hpp"

namespace pdq {
namespace {

namespace fs = std::filesystem;
using testing::fixture;

struct Run {
  int rc;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int rc = cli::run(args, out, err);
  return {rc, out.str(), err.str()};
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string x;
  while (std::getline(ss, x, sep)) f.push_back(x);
  return f;
}

// second line, first column
double first_value(const std::string& csv) {
  std::stringstream ss(csv);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  return std::stod(split(row).at(0));
}

fs::path temp_file(const std::string& name, const std::string& content) {
  const auto p = fs::temp_directory_path() / ("pdq_cli_" + name);
  std::ofstream(p) << content;
  return p;
}

TEST(ParseFragments, ListsAndRanges) {
  EXPECT_EQ(cli::parse_fragments("0,1;2,3"), (std::vector<OrbitalSet>{{0, 1}, {2, 3}}));
  EXPECT_EQ(cli::parse_fragments("0-2;3"), (std::vector<OrbitalSet>{{0, 1, 2}, {3}}));
  EXPECT_THROW(cli::parse_fragments("0,1;;2"), DimensionError);
}

TEST(Cli, ScfOnH2PrintsTheReferenceEnergy) {
  const auto r = run({"scf", "--input", fixture("h2.fcidump")});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "energy,iterations,converged");
  EXPECT_NEAR(first_value(r.out), testing::references().at("h2").e_rhf, 1e-9);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).rc, 1);
  EXPECT_EQ(run({"scf", "--bogus"}).rc, 1);
  EXPECT_EQ(run({"scf", "--input", "/nonexistent/x.fcidump"}).rc, 2);
  EXPECT_EQ(run({"dmet", "--input", fixture("h4_chain.fcidump"), "--fragments", "0,1;1,2,3"}).rc, 1);
  const auto r = run({"scf", "--input", fixture("h4_chain.fcidump"), "--max-iter", "1"});
  EXPECT_EQ(r.rc, 0);
  EXPECT_NE(r.out.find(",1,0"), std::string::npos) << r.out;
}

TEST(Cli, SingleFragmentDmetEqualsFci) {
  const auto r = run({"dmet", "--input", fixture("h2.fcidump"), "--fragment-size", "2"});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_NEAR(first_value(r.out), testing::references().at("h2").e_fci, 1e-9);
}

TEST(Cli, FmoOnBlockFixtureHasNoPairCorrection) {
  const auto r = run({"fmo", "--input", fixture("h2_h2_block.fcidump"), "--fragment-size", "2"});
  ASSERT_EQ(r.rc, 0) << r.err;
  std::stringstream ss(r.out);
  std::string line;
  int dimers = 0;
  while (std::getline(ss, line)) {
    const auto f = split(line);
    if (f.at(0) != "dimer") continue;
    ++dimers;
    EXPECT_LT(std::abs(std::stod(f.at(4))), 1e-10) << line;
  }
  EXPECT_EQ(dimers, 1);
}

TEST(Cli, DcWithFullBuffersIsRhf) {
  const auto r = run({"dc", "--input", fixture("h4_chain.fcidump"), "--fragment-size", "2", "--buffer-k", "4"});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_NEAR(first_value(r.out), testing::references().at("h4_chain").e_rhf, 1e-6);
}

TEST(Cli, ConfigFileIsReadAndFlagsOverrideIt) {
  const auto cfg = temp_file("scf.ini", "input = " + fixture("h4_chain.fcidump") + "\n[scf]\nmax-iter = 1\n");
  const auto a = run({"--config", cfg.string(), "scf"});
  ASSERT_EQ(a.rc, 0) << a.err;
  EXPECT_NE(a.out.find(",1,0"), std::string::npos);
  const auto b = run({"--config", cfg.string(), "scf", "--max-iter", "200"});
  EXPECT_EQ(b.rc, 0);
  EXPECT_NE(b.out.find(",1\n"), std::string::npos) << b.out;
  const auto bad = temp_file("bad.ini", "[scf]\nmax_iterations = 3\n");
  EXPECT_EQ(run({"--config", bad.string(), "scf", "--input", fixture("h2.fcidump")}).rc, 1);
  fs::remove(cfg);
  fs::remove(bad);
}

TEST(Cli, VqeOnH2) {
  const auto r = run({"vqe", "--input", fixture("h2.fcidump")});
  ASSERT_EQ(r.rc, 0) << r.err;
  std::stringstream ss(r.out);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  const auto f = split(row);
  EXPECT_LT(std::abs(std::stod(f.at(2))), 1e-6);
}

TEST(Cli, RankIsDeterministicAcrossJobCounts) {
  const auto manifest = fixture("h6_ensemble/manifest10.csv");
  const auto a = run({"rank", "--input", manifest, "--method", "dmet", "--fragment-size", "2", "--jobs", "1"});
  const auto b = run({"rank", "--input", manifest, "--method", "dmet", "--fragment-size", "2", "--jobs", "3"});
  ASSERT_EQ(a.rc, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("n,ratio,mad,rho_p,rho_s,i_eff"), std::string::npos);
}

TEST(Cli, RankAgainstItselfIsPerfect) {
  const auto r = run({"rank", "--input", fixture("h6_ensemble/manifest10.csv"), "--method", "fci"});
  ASSERT_EQ(r.rc, 0) << r.err;
  const auto tail = r.out.substr(r.out.find("n,ratio"));
  std::stringstream ss(tail);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  const auto f = split(row);
  EXPECT_EQ(std::stod(f.at(2)), 0.0);
  EXPECT_EQ(std::stod(f.at(3)), 1.0);
  EXPECT_EQ(std::stod(f.at(4)), 1.0);
}

TEST(Cli, RankWithOneConformerFailsCleanly) {
  const auto dir = fs::path(fixture("h6_ensemble"));
  const auto m = dir / "manifest_one_tmp.csv";
  std::ofstream(m) << "id,fcidump_path\nconf00,conf00.fcidump\n";
  const auto r = run({"rank", "--input", m.string(), "--method", "fci"});
  fs::remove(m);
  EXPECT_EQ(r.rc, 2);
  EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST(Cli, SampleNoiseWithZeroSigmaGivesErrorFreeCorrelations) {
  const auto records = temp_file("rec.csv", "id,e_exact,e_pd\na,1,1.1\nb,2,2.3\nc,3,2.9\nd,4,4.2\n");
  const auto r = run({"sample-noise", "--input", records.string(), "--sigmas", "0", "--n-bootstrap", "50"});
  fs::remove(records);
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "sigma,mean_rho_p,std_rho_p,mean_rho_s,std_rho_s");
  EXPECT_NE(r.out.find(",0,1,0"), std::string::npos) << r.out;
  EXPECT_EQ(run({"sample-noise", "--input", "/nonexistent.csv"}).rc, 2);
}

TEST(Cli, OutputFlagWritesAFile) {
  const auto p = fs::temp_directory_path() / "pdq_cli_out.csv";
  const auto r = run({"scf", "--input", fixture("h2.fcidump"), "--output", p.string()});
  ASSERT_EQ(r.rc, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "energy,iterations,converged");
  fs::remove(p);
}

}  // namespace
}  // namespace pdq
