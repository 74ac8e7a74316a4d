#include "partysim/error.hpp"
#include "partysim/groundtruth.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace partysim;

namespace {

StanceMatrix parse(const std::string& text) {
  std::istringstream in(text);
  return read_stances(in);
}

StanceMatrix random_stances(std::mt19937& gen, std::size_t k, std::size_t m) {
  std::vector<std::string> parties, issues;
  for (std::size_t i = 0; i < k; ++i) parties.push_back("P" + std::to_string(i));
  for (std::size_t j = 0; j < m; ++j) issues.push_back("i" + std::to_string(j));
  std::vector<std::int8_t> s(k * m);
  for (auto& x : s) x = static_cast<std::int8_t>(static_cast<int>(gen() % 3) - 1);
  return StanceMatrix(parties, issues, s);
}

}  // namespace

TEST(LoadStances, TwoByThree) {
  const auto s = parse("party,issue_1,issue_2,issue_3\nA,1,0,-1\nB,+1,1,-1\n");
  EXPECT_EQ(s.party_count(), 2u);
  EXPECT_EQ(s.issue_count(), 3u);
  EXPECT_EQ(s.stance(1, 0), 1);
  EXPECT_EQ(s.stance(0, 2), -1);
}

TEST(LoadStances, OutOfAlphabetCell) {
  try {
    parse("party,i1,i2\nA,1,0\nB,2,0\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::value);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("i1"), std::string::npos) << msg;
  }
}

TEST(LoadStances, RaggedRow) {
  try {
    parse("party,i1,i2\nA,1,0\nB,1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::format);
  }
}

TEST(LoadStances, SixPartyFixture) {
  const auto s = load_stances(PARTYSIM_TEST_DATA_DIR "/stances_6x38.csv");
  EXPECT_EQ(s.party_count(), 6u);
  EXPECT_EQ(s.issue_count(), 38u);
}

TEST(StanceDistance, Examples) {
  const auto s = parse("party,a,b,c\nX,1,0,-1\nY,1,1,-1\nZ,1,0,-1\n");
  const auto d = stance_distance_matrix(s);
  EXPECT_EQ(d.role(), MatrixRole::distance);
  EXPECT_NEAR(d(0, 1), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(d(0, 2), 0.0);
  EXPECT_EQ(d(1, 1), 0.0);
}

TEST(StanceDistance, L1CountsOppositesDouble) {
  const auto s = parse("party,a,b\nX,1,0\nY,-1,1\n");
  EXPECT_DOUBLE_EQ(stance_distance_matrix(s, StanceMetric::hamming)(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(stance_distance_matrix(s, StanceMetric::l1)(0, 1), 3.0 / 4.0);
  EXPECT_EQ(parse_metric("l1"), StanceMetric::l1);
  EXPECT_THROW(parse_metric("cosine"), Error);
}

TEST(StanceDistance, FixtureValues) {
  const auto d = stance_distance_matrix(load_stances(PARTYSIM_TEST_DATA_DIR "/stances_6x38.csv"));
  const auto g = *d.index_of("Gruene"), l = *d.index_of("Linke");
  const auto afd = *d.index_of("AfD"), cdu = *d.index_of("CDU");
  EXPECT_NEAR(d(g, l), 7.0 / 38.0, 1e-15);
  EXPECT_NEAR(d(afd, cdu), 17.0 / 38.0, 1e-15);
  // Reported to two decimals as 0.18 and 0.45.
  EXPECT_NEAR(d(g, l), 0.18, 0.005);
  EXPECT_NEAR(d(afd, cdu), 0.45, 0.005);
  double min_off = 1.0;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) min_off = std::min(min_off, d(i, j));
  }
  EXPECT_EQ(min_off, d(g, l));
}

TEST(StanceDistance, MetricAxioms) {
  std::mt19937 gen(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_stances(gen, 2 + gen() % 7, 1 + gen() % 40);
    for (auto metric : {StanceMetric::hamming, StanceMetric::l1}) {
      const auto d = stance_distance_matrix(s, metric);
      const auto k = d.size();
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
          EXPECT_EQ(d(a, b), d(b, a));
          bool same = true;
          for (std::size_t j = 0; j < s.issue_count(); ++j) same = same && s.stance(a, j) == s.stance(b, j);
          EXPECT_EQ(d(a, b) == 0.0, same);
          EXPECT_LE(d(a, b), 1.0);
          for (std::size_t c = 0; c < k; ++c) EXPECT_LE(d(a, c), d(a, b) + d(b, c) + 1e-12);
        }
      }
    }
  }
}

TEST(StanceDistance, IssuePermutationInvariance) {
  std::mt19937 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_stances(gen, 5, 38);
    std::vector<std::size_t> perm(38);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<std::string> issues;
    std::vector<std::int8_t> values;
    for (std::size_t j : perm) issues.push_back(s.issues()[j]);
    for (std::size_t p = 0; p < 5; ++p) {
      for (std::size_t j : perm) values.push_back(static_cast<std::int8_t>(s.stance(p, j)));
    }
    const StanceMatrix shuffled(s.parties(), issues, values);
    EXPECT_EQ(stance_distance_matrix(s).values(), stance_distance_matrix(shuffled).values());
  }
}
