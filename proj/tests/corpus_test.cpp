#include "partysim/corpus.hpp"
#include "partysim/error.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

using namespace partysim;
using testing_support::record;
using testing_support::TempDir;
using testing_support::WarningCapture;
using testing_support::write_file;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no partysim::Error thrown";
  return ErrorCode::usage;
}

std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

Corpus random_corpus(std::uint32_t seed, std::size_t n) {
  std::mt19937 gen(seed);
  std::vector<SentenceRecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    auto r = record("s" + std::to_string(i), "P" + std::to_string(gen() % 4),
                    "d" + std::to_string(gen() % 3), gen() % 2 == 0, "text " + std::to_string(i));
    if (gen() % 3 == 0) r.year = 2000 + static_cast<int>(gen() % 30);
    records.push_back(r);
  }
  return Corpus(records);
}

}  // namespace

TEST(LoadCorpus, ThreeLineJsonl) {
  TempDir dir;
  write_file(dir / "c.jsonl",
             R"({"id":"a","text":"Wir fordern mehr Schulen.","party":"X","domain":"d1","is_claim":true}
{"id":"b","text":"Hallo.","party":"Y","domain":null,"is_claim":false}
{"id":"c","text":"Steuern senken!","party":"X","domain":"d2","year":2021,"is_claim":true}
)");
  const Corpus c = load_corpus(dir / "c.jsonl", CorpusFormat::jsonl);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.records()[0].id, "a");
  EXPECT_EQ(c.records()[1].domain, std::nullopt);
  EXPECT_EQ(c.records()[2].year, 2021);
  EXPECT_EQ(c.parties(), (std::vector<std::string>{"X", "Y"}));
  EXPECT_EQ(c.domains(), (std::vector<std::string>{"d1", "d2"}));
  EXPECT_EQ(c.claim_count(), 2u);
}

TEST(LoadCorpus, MissingPartyCitesLine) {
  TempDir dir;
  write_file(dir / "c.jsonl", R"({"id":"a","text":"t","party":"X","is_claim":true}
{"id":"b","text":"t","is_claim":false}
)");
  const auto f = [&] { load_corpus(dir / "c.jsonl"); };
  EXPECT_EQ(code_of(f), ErrorCode::schema);
  EXPECT_NE(error_text(f).find("line 2"), std::string::npos);
}

TEST(LoadCorpus, DuplicateIdAndEmptyFile) {
  TempDir dir;
  write_file(dir / "dup.jsonl", R"({"id":"a","text":"t","party":"X"}
{"id":"a","text":"u","party":"Y"}
)");
  EXPECT_EQ(code_of([&] { load_corpus(dir / "dup.jsonl"); }), ErrorCode::uniqueness);
  write_file(dir / "empty.jsonl", "");
  EXPECT_EQ(code_of([&] { load_corpus(dir / "empty.jsonl"); }), ErrorCode::empty_corpus);
}

TEST(LoadCorpus, BlankTextRejected) {
  EXPECT_THROW(Corpus({record("a", "X", {}, false, "   ")}), Error);
  EXPECT_THROW(Corpus({record("a", "", {}, false, "t")}), Error);
}

TEST(LoadCorpus, CsvHeaderAndNulls) {
  TempDir dir;
  write_file(dir / "c.csv",
             "id,text,party,domain,year,is_claim\n"
             "a,\"Hello, world\",X,d1,2021,true\n"
             "b,\"He said \"\"no\"\"\",Y,,,false\n");
  const Corpus c = load_corpus(dir / "c.csv");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.records()[0].text, "Hello, world");
  EXPECT_EQ(c.records()[1].text, "He said \"no\"");
  EXPECT_FALSE(c.records()[1].domain.has_value());
  EXPECT_FALSE(c.records()[1].year.has_value());
  write_file(dir / "bad.csv", "id,party,text,domain,year,is_claim\n");
  EXPECT_THROW(load_corpus(dir / "bad.csv"), Error);
}

// Manifesto-sized export (17052 sentences, 9814 claims).
TEST(LoadCorpus, ManifestoSizedExport) {
  const std::vector<std::string> parties{"AfD", "CDU", "FDP", "Gruene", "Linke", "SPD"};
  std::ostringstream out;
  for (int i = 0; i < 17052; ++i) {
    out << R"({"id":"m)" << i << R"(","text":"Satz )" << i << R"(","party":")" << parties[i % 6]
        << R"(","domain":"d)" << (i % 7) << R"(","is_claim":)" << (i < 9814 ? "true" : "false") << "}\n";
  }
  std::istringstream in(out.str());
  const Corpus c = read_corpus(in, CorpusFormat::jsonl);
  EXPECT_EQ(c.size(), 17052u);
  EXPECT_EQ(c.claim_count(), 9814u);
  EXPECT_EQ(filter_claims(c).size(), 9814u);
}

TEST(FilterClaims, KeepsClaimsInOrder) {
  const Corpus c({record("1", "X", {}, false), record("2", "X", {}, true), record("3", "Y", {}, false),
                  record("4", "Y", {}, true), record("5", "Z", {}, false)});
  const Corpus f = filter_claims(c);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f.records()[0].id, "2");
  EXPECT_EQ(f.records()[1].id, "4");
  EXPECT_EQ(f.parties(), (std::vector<std::string>{"X", "Y"}));
}

TEST(FilterClaims, EmptyResultWarns) {
  WarningCapture warnings;
  const Corpus f = filter_claims(Corpus({record("1", "X"), record("2", "Y")}));
  EXPECT_TRUE(f.empty());
  EXPECT_EQ(warnings.messages.size(), 1u);
}

TEST(FilterClaims, Idempotent) {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    const Corpus c = random_corpus(seed, 50);
    const Corpus once = filter_claims(c);
    EXPECT_EQ(filter_claims(once), once);
    for (const auto& r : once.records()) EXPECT_NE(c.find(r.id), nullptr);
  }
}

TEST(GroupSentences, ByParty) {
  const Corpus c({record("1", "X"), record("2", "X"), record("3", "Y"), record("4", "Y")});
  const Groups g = group_sentences(c, GroupKey::party);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g.at({"X", ""}), (std::vector<std::string>{"1", "2"}));
  EXPECT_EQ(g.at({"Y", ""}), (std::vector<std::string>{"3", "4"}));
}

TEST(GroupSentences, PartyDomainSingletons) {
  const Corpus c({record("1", "X", "d1"), record("2", "X", "d2"), record("3", "Y", "d1"), record("4", "Y", "d2")});
  const Groups g = group_sentences(c, GroupKey::party_domain);
  ASSERT_EQ(g.size(), 4u);
  for (const auto& [label, ids] : g) EXPECT_EQ(ids.size(), 1u) << label.to_string();
}

TEST(GroupSentences, MissingDomain) {
  const Corpus c({record("1", "X", "d1"), record("2", "X"), record("3", "Y")});
  const auto f = [&] { group_sentences(c, GroupKey::domain); };
  EXPECT_EQ(code_of(f), ErrorCode::labeling);
  const auto text = error_text(f);
  EXPECT_NE(text.find('2'), std::string::npos);
  EXPECT_NE(text.find('3'), std::string::npos);

  WarningCapture warnings;
  const Groups g = group_sentences(c, GroupKey::domain, MissingDomain::exclude);
  EXPECT_EQ(g.size(), 1u);
  EXPECT_EQ(warnings.messages.size(), 1u);
  EXPECT_EQ(group_sentences(c, GroupKey::party).size(), 2u);
}

TEST(GroupSentences, PartitionProperty) {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    const Corpus c = random_corpus(seed, 80);
    for (GroupKey key : {GroupKey::party, GroupKey::domain, GroupKey::party_domain}) {
      std::multiset<std::string> seen;
      for (const auto& [label, ids] : group_sentences(c, key)) {
        EXPECT_FALSE(ids.empty());
        seen.insert(ids.begin(), ids.end());
      }
      std::multiset<std::string> all;
      for (const auto& r : c.records()) all.insert(r.id);
      EXPECT_EQ(seen, all);
    }
  }
}

TEST(CorpusRoundTrip, BothFormats) {
  TempDir dir;
  for (std::uint32_t seed = 0; seed < 5; ++seed) {
    auto c = random_corpus(seed, 40);
    std::vector<SentenceRecord> recs = c.records();
    recs[0].text = "comma, \"quote\"\nnewline und Umlaute äöü";
    c = Corpus(recs);
    for (auto fmt : {CorpusFormat::jsonl, CorpusFormat::csv}) {
      const auto path = dir / (fmt == CorpusFormat::csv ? "rt.csv" : "rt.jsonl");
      save_corpus(c, path, fmt);
      EXPECT_EQ(load_corpus(path, fmt), c);
    }
  }
}
