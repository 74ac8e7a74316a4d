#include "partysim/embeddings.hpp"
#include "partysim/error.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

using namespace partysim;
using testing_support::record;
using testing_support::TempDir;
using testing_support::WarningCapture;

namespace {

WordVectorTable table_from(const std::string& text) {
  std::istringstream in(text);
  return read_word_vectors(in);
}

EmbeddingStore random_store(std::uint32_t seed, std::size_t n, std::size_t dim) {
  std::mt19937 gen(seed);
  std::normal_distribution<float> dist;
  EmbeddingStore s(dim);
  std::vector<float> v(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : v) x = dist(gen);
    s.add("id_" + std::to_string(i), v);
  }
  return s;
}

std::string raw_store_bytes(const EmbeddingStore& s) {
  std::ostringstream out;
  write_store(s, out);
  return out.str();
}

}  // namespace

TEST(WordVectors, SmallTable) {
  const auto t = table_from("2 3\na 1 0 0\nb 0 1 0\n");
  EXPECT_EQ(t.dim(), 3u);
  EXPECT_EQ(t.size(), 2u);
  ASSERT_NE(t.find("b"), nullptr);
  EXPECT_EQ(*t.find("b"), (std::vector<float>{0, 1, 0}));
}

TEST(WordVectors, WrongArityIsFormatError) {
  try {
    table_from("2 3\na 1 0 0\nc 1 2\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::format);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(WordVectors, DuplicateLastWins) {
  WarningCapture warnings;
  const auto t = table_from("2 2\na 1 0\na 0 1\n");
  EXPECT_EQ(*t.find("a"), (std::vector<float>{0, 1}));
  EXPECT_FALSE(warnings.messages.empty());
}

TEST(WordVectors, GeneratedTenThousandRows) {
  TempDir dir;
  const std::size_t count = 10000;
  {
    std::ofstream out(dir / "wv.txt");
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> u(-1, 1);
    out << count << " 8\n";
    for (std::size_t i = 0; i < count; ++i) {
      out << "tok" << i;
      for (int k = 0; k < 8; ++k) out << ' ' << u(gen);
      out << '\n';
    }
  }
  const auto t = load_word_vectors(dir / "wv.txt");
  EXPECT_EQ(t.size(), count);
  EXPECT_EQ(t.dim(), 8u);
}

TEST(WordVectors, CountMismatch) { EXPECT_THROW(table_from("3 2\na 1 0\nb 0 1\n"), Error); }

TEST(Tokenize, LowercaseAndPunctuation) {
  EXPECT_EQ(tokenize("  Hallo, WELT!  \"Äpfel\" (ÖKO)"),
            (std::vector<std::string>{"hallo", "welt", "äpfel", "öko"}));
  EXPECT_EQ(tokenize("... -- !!"), std::vector<std::string>{});
  EXPECT_EQ(tokenize("e-mail straße"), (std::vector<std::string>{"e-mail", "straße"}));
}

TEST(EmbedAverage, Examples) {
  const auto t = table_from("2 2\na 1 0\nb 0 1\n");
  EXPECT_EQ(embed_average("a b", t), (std::vector<float>{0.5f, 0.5f}));
  EXPECT_EQ(embed_average("a a", t), (std::vector<float>{1.0f, 0.0f}));
  EXPECT_EQ(embed_average("A, zzz b.", t), (std::vector<float>{0.5f, 0.5f}));
  try {
    embed_average("zzz", t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::out_of_vocabulary);
  }
}

// The average is a convex combination, so each coordinate lies within the
// coordinate range of the tokens used; a single token reproduces itself.
TEST(EmbedAverage, ConvexHullProperty) {
  std::mt19937 gen(11);
  std::normal_distribution<float> dist;
  WordVectorTable t(5);
  for (int i = 0; i < 20; ++i) {
    std::vector<float> v(5);
    for (auto& x : v) x = dist(gen);
    t.insert("w" + std::to_string(i), v);
  }
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 6);
    std::string text;
    std::vector<const std::vector<float>*> used;
    for (int j = 0; j < n; ++j) {
      const auto tok = "w" + std::to_string(gen() % 20);
      text += tok + " ";
      used.push_back(t.find(tok));
    }
    const auto avg = embed_average(text, t);
    for (std::size_t k = 0; k < 5; ++k) {
      float lo = (*used[0])[k], hi = lo;
      for (auto* u : used) {
        lo = std::min(lo, (*u)[k]);
        hi = std::max(hi, (*u)[k]);
      }
      EXPECT_GE(avg[k], lo - 1e-6f);
      EXPECT_LE(avg[k], hi + 1e-6f);
    }
    if (n == 1) EXPECT_EQ(avg, *used[0]);
  }
}

TEST(EmbedCorpus, SkipsOutOfVocabulary) {
  const auto t = table_from("1 2\na 1 0\n");
  const Corpus c({record("1", "X", {}, false, "a"), record("2", "X", {}, false, "qqq")});
  WarningCapture warnings;
  const auto result = embed_corpus(c, t);
  EXPECT_EQ(result.store.size(), 1u);
  EXPECT_EQ(result.skipped, std::vector<std::string>{"2"});
  EXPECT_EQ(warnings.messages.size(), 1u);
}

TEST(EmbeddingStore, Invariants) {
  EXPECT_THROW(EmbeddingStore(0), Error);
  EmbeddingStore s(2);
  const float ok[] = {1, 0};
  const float bad[] = {1, std::numeric_limits<float>::quiet_NaN()};
  const float wrong[] = {1, 0, 0};
  s.add("x", ok);
  EXPECT_THROW(s.add("x", ok), Error);
  EXPECT_THROW(s.add("y", bad), Error);
  EXPECT_THROW(s.add("z", wrong), Error);
  EXPECT_EQ(s.size(), 1u);
}

TEST(EmbeddingStore, SingleEntryRoundTrip) {
  TempDir dir;
  EmbeddingStore s(2);
  const float v[] = {1, 0};
  s.add("x1", v);
  save_store(s, dir / "s.emb");
  EXPECT_EQ(load_store(dir / "s.emb"), s);
}

TEST(EmbeddingStore, ByteLayout) {
  EmbeddingStore s(2);
  const float v[] = {1.5f, -2.0f};
  s.add("ab", v);
  const std::string bytes = raw_store_bytes(s);
  ASSERT_EQ(bytes.size(), 4u + 4 + 4 + 2 + 2 + 8);
  EXPECT_EQ(bytes.substr(0, 4), "EMB1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 2);
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 2);
  EXPECT_EQ(bytes.substr(14, 2), "ab");
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= std::uint32_t(static_cast<unsigned char>(bytes[16 + i])) << (8 * i);
  EXPECT_EQ(std::bit_cast<float>(bits), 1.5f);
}

TEST(EmbeddingStore, RandomRoundTripBitExact) {
  TempDir dir;
  const auto s = random_store(42, 1000, 64);
  save_store(s, dir / "r.emb");
  const auto back = load_store(dir / "r.emb");
  ASSERT_EQ(back.ids(), s.ids());
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t k = 0; k < 64; ++k) {
      EXPECT_EQ(std::bit_cast<std::uint32_t>(back.row(i)[k]), std::bit_cast<std::uint32_t>(s.row(i)[k]));
    }
  }
}

TEST(EmbeddingStore, FormatErrors) {
  auto code = [](std::string bytes) {
    std::istringstream in(bytes);
    try {
      read_store(in);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::usage;
  };
  std::string good = raw_store_bytes(random_store(1, 3, 4));
  std::string magic = good;
  magic.replace(0, 4, "XXXX");
  EXPECT_EQ(code(magic), ErrorCode::format);
  EXPECT_EQ(code(good.substr(0, good.size() - 3)), ErrorCode::format);
  std::string zero_dim = good;
  std::memset(zero_dim.data() + 8, 0, 4);
  EXPECT_EQ(code(zero_dim), ErrorCode::format);
  EXPECT_EQ(code(good + "x"), ErrorCode::format);
}

TEST(EmbeddingStore, CoverageReportsAllMissing) {
  const Corpus c({record("a", "X"), record("b", "X"), record("c", "Y")});
  EmbeddingStore s(1);
  const float v[] = {1};
  s.add("b", v);
  EXPECT_EQ(missing_ids(s, c), (std::vector<std::string>{"a", "c"}));
  try {
    require_coverage(s, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::coverage);
    const std::string msg = e.what();
    EXPECT_NE(msg.find('a'), std::string::npos);
    EXPECT_NE(msg.find('c'), std::string::npos);
  }
}
