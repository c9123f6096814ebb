// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "pdq/errors.hpp"
#include "pdq/fcidump.hpp"
#include "pdq/mean_field.hpp"
#include "pdq/solvers.hpp"
#include "test_support.hpp"

namespace pdq {
namespace {

using testing::load;

const char* kTiny = R"(&FCI NORB=2,NELEC=2,MS2=0,
 ORBSYM=1,1,
 ISYM=1,
&END
 0.5 1 1 1 1
 0.1 2 1 1 1
 0.25 2 2 1 1
 0.05 2 1 2 1
 0.6 2 2 2 2
 -1.0 1 1 0 0
 0.2 2 1 0 0
 -0.5 2 2 0 0
 0.7 0 0 0 0
)";

TEST(CanonicalKey, AllImagesShareTheSmallestKey) {
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) {
          const auto k = canonical_key(p, q, r, s);
          for (const auto& img : {std::array{q, p, r, s}, std::array{p, q, s, r}, std::array{q, p, s, r},
                                  std::array{r, s, p, q}, std::array{s, r, p, q}, std::array{r, s, q, p},
                                  std::array{s, r, q, p}}) {
            EXPECT_EQ(canonical_key(img[0], img[1], img[2], img[3]), k);
            EXPECT_LE(k, img);
          }
        }
}

TEST(ParseFcidump, ReadsHeaderAndExpandsSymmetry) {
  const auto s = parse_fcidump(std::string(kTiny));
  EXPECT_EQ(s.n_orb(), 2);
  EXPECT_EQ(s.n_elec(), 2);
  EXPECT_EQ(s.ms2(), 0);
  EXPECT_DOUBLE_EQ(s.core_energy(), 0.7);
  EXPECT_DOUBLE_EQ(s.h(0, 1), 0.2);
  EXPECT_DOUBLE_EQ(s.h(1, 0), 0.2);
  EXPECT_DOUBLE_EQ(s.g(0, 1, 0, 0), 0.1);
  EXPECT_DOUBLE_EQ(s.g(0, 0, 1, 0), 0.1);
  EXPECT_DOUBLE_EQ(s.g(0, 0, 0, 1), 0.1);
  EXPECT_DOUBLE_EQ(s.g(1, 1, 0, 0), 0.25);
  EXPECT_DOUBLE_EQ(s.g(1, 0, 1, 0), 0.05);
  EXPECT_DOUBLE_EQ(s.g(0, 1, 1, 0), 0.05);
}

TEST(ParseFcidump, AcceptsFortranExponentsAndSlashTerminator) {
  const std::string text = "&FCI NORB=1,NELEC=2,MS2=0\n&END\n 1.5D-01 1 1 1 1\n -2.0d0 1 1 0 0\n";
  const auto s = parse_fcidump(text);
  EXPECT_DOUBLE_EQ(s.g(0, 0, 0, 0), 0.15);
  EXPECT_DOUBLE_EQ(s.h(0, 0), -2.0);
  const auto t = parse_fcidump(std::string("&FCI NORB=1,NELEC=2\n/\n 1.0 1 1 0 0\n"));
  EXPECT_DOUBLE_EQ(t.h(0, 0), 1.0);
}

TEST(ParseFcidump, IgnoresOrbitalEnergyLines) {
  const std::string text = "&FCI NORB=1,NELEC=2,MS2=0\n&END\n -1.0 1 1 0 0\n -0.3 1 0 0 0\n";
  EXPECT_DOUBLE_EQ(parse_fcidump(text).h(0, 0), -1.0);
}

void expect_parse_error(const std::string& text, std::size_t line) {
  try {
    parse_fcidump(text);
    FAIL() << "no error for:\n" << text;
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
  }
}

TEST(ParseFcidump, ErrorsCarryLineNumbers) {
  // header problems point at the namelist line
  expect_parse_error("&FCI NELEC=2\n&END\n", 1);
  expect_parse_error("&FCI NORB=2\n&END\n", 1);
  expect_parse_error("NORB=2\n", 1);
  expect_parse_error("&FCI NORB=2,NELEC=2\n&END\n 0.1 3 1 1 1\n", 3);
  expect_parse_error("&FCI NORB=2,NELEC=2\n&END\n 0.1 1 1\n", 3);
  expect_parse_error("&FCI NORB=2,NELEC=2\n&END\n 0.1 0 1 1 1\n", 3);
  expect_parse_error("&FCI NORB=2,NELEC=2\n&END\n 0.1 2 1 1 1\n 0.2 1 2 1 1\n", 4);
}

TEST(ParseFcidump, ConsistentDuplicatesAreAccepted) {
  const auto s = parse_fcidump(std::string("&FCI NORB=2,NELEC=2\n&END\n 0.1 2 1 1 1\n 0.1 1 2 1 1\n"));
  EXPECT_DOUBLE_EQ(s.g(1, 0, 0, 0), 0.1);
}

TEST(WriteFcidump, RoundTripIsBitwise) {
  for (const char* id : {"h2", "h4_chain", "h6_ring", "h2_h2_block"}) {
    const auto s = load(id);
    const auto again = parse_fcidump(write_fcidump(s));
    EXPECT_TRUE(again == s) << id;
    EXPECT_EQ(write_fcidump(again), write_fcidump(s)) << id;
  }
}

TEST(WriteFcidump, RoundTripOfRandomIntegrals) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    IntegralSetBuilder b(3, 2);
    b.set_core_energy(u(rng));
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q <= p; ++q) b.set_one_body(p, q, u(rng));
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q)
        for (int r = 0; r < 3; ++r)
          for (int s = 0; s < 3; ++s)
            if (canonical_key(p, q, r, s) == std::array{p, q, r, s}) b.set_two_body(p, q, r, s, u(rng));
    const auto s = b.build();
    EXPECT_TRUE(parse_fcidump(write_fcidump(s)) == s);
  }
}

TEST(IntegralSetBuilder, RejectsBadIndices) {
  IntegralSetBuilder b(2, 2);
  EXPECT_THROW(b.set_one_body(2, 0, 1.0), std::out_of_range);
  EXPECT_THROW(b.set_two_body(0, 0, -1, 0, 1.0), std::out_of_range);
}

TEST(RestrictToOrbitals, FullSubsetInSameOrderIsIdentity) {
  const auto s = load("h4_chain");
  EXPECT_TRUE(restrict_to_orbitals(s, {0, 1, 2, 3}) == s);
}

TEST(RestrictToOrbitals, FrozenDensityDressesOneBodyAndCore) {
  const auto s = load("h4_chain");
  const auto rhf = run_rhf(s);
  const auto sub = restrict_to_orbitals(s, {1, 2}, &rhf.density);
  EXPECT_EQ(sub.n_orb(), 2);
  // complement block only
  Matrix dc = Matrix::Zero(4, 4);
  for (int r : {0, 3})
    for (int t : {0, 3}) dc(r, t) = rhf.density.values(r, t);
  EXPECT_EQ(sub.n_elec(), 4 - static_cast<int>(std::lround(dc.trace())));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const int p = a + 1, q = b + 1;
      double v = 0.0;
      for (int r = 0; r < 4; ++r)
        for (int t = 0; t < 4; ++t) v += dc(r, t) * (s.g(p, q, r, t) - 0.5 * s.g(p, r, q, t));
      EXPECT_NEAR(sub.h(a, b), s.h(p, q) + v, 1e-12);
    }
  EXPECT_NEAR(sub.core_energy(), s.core_energy() + density_energy(s, dc), 1e-12);
}

TEST(RestrictToOrbitals, RejectsRepeatedOrEmptySubsets) {
  const auto s = load("h2");
  EXPECT_THROW(restrict_to_orbitals(s, {}), std::invalid_argument);
  EXPECT_THROW(restrict_to_orbitals(s, {0, 0}), std::invalid_argument);
}

TEST(TransformOrbitals, RotationLeavesFciEnergyInvariant) {
  std::mt19937_64 rng(11);
  for (const char* id : {"h2", "h4_chain"}) {
    const auto s = load(id);
    const auto u = testing::random_orthogonal(s.n_orb(), rng);
    const auto rotated = transform_orbitals(s, u);
    EXPECT_NEAR(fci_ground_state(rotated, s.n_elec()).energy, fci_ground_state(s, s.n_elec()).energy, 1e-10) << id;
    EXPECT_NEAR(run_rhf(rotated).total_energy, run_rhf(s).total_energy, 1e-9) << id;
  }
}

TEST(DensityEnergy, MatchesMeanFieldEnergyWithoutCore) {
  const auto s = load("h6_chain");
  const auto rhf = run_rhf(s);
  EXPECT_NEAR(density_energy(s, rhf.density.values) + s.core_energy(), rhf.total_energy, 1e-12);
}

}  // namespace
}  // namespace pdq
