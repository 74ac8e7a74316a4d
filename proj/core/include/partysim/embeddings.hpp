#pragma once

#include "partysim/corpus.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace partysim {

/// Sentence vectors keyed by sentence id, in insertion order.
///
/// All rows share one dimension and hold finite 32-bit floats. Rows are
/// stored contiguously so `row(i)` is a view into one flat buffer.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dim);

  void add(std::string id, std::span<const float> values);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  std::span<const float> row(std::size_t index) const;
  bool contains(const std::string& id) const { return index_.contains(id); }
  // Throws a coverage error for unknown ids.
  std::span<const float> at(const std::string& id) const;

  friend bool operator==(const EmbeddingStore& a, const EmbeddingStore& b);

 private:
  std::size_t dim_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

void save_store(const EmbeddingStore& store, const std::filesystem::path& path);
EmbeddingStore load_store(const std::filesystem::path& path);
void write_store(const EmbeddingStore& store, std::ostream& out);
EmbeddingStore read_store(std::istream& in);

// Every corpus id lacking an entry, in corpus order.
std::vector<std::string> missing_ids(const EmbeddingStore& store, const Corpus& corpus);
// Throws a coverage error listing all missing ids.
void require_coverage(const EmbeddingStore& store, const Corpus& corpus);

class WordVectorTable {
 public:
  explicit WordVectorTable(std::size_t dim) : dim_(dim) {}

  // Returns false when the token already existed (its vector is replaced).
  bool insert(std::string token, std::vector<float> vector);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  const std::vector<float>* find(const std::string& token) const;

 private:
  std::size_t dim_;
  std::unordered_map<std::string, std::vector<float>> vectors_;
};

// Text format: first line "count dim", then one "token v1 ... v_dim" row per
// entry. Duplicate tokens keep the last row and log a warning.
WordVectorTable load_word_vectors(const std::filesystem::path& path);
WordVectorTable read_word_vectors(std::istream& in);

// Lowercases, splits on Unicode whitespace and strips leading/trailing
// punctuation from each piece. Pieces that become empty are dropped.
std::vector<std::string> tokenize(std::string_view text);

// Unweighted mean of the in-vocabulary token vectors. Throws
// out_of_vocabulary when no token is known.
std::vector<float> embed_average(std::string_view text, const WordVectorTable& table);

struct BaselineEmbedding {
  EmbeddingStore store;
  std::vector<std::string> skipped;  // sentences with no in-vocabulary token
};

// Embeds every corpus sentence with `embed_average`, skipping (and counting)
// out-of-vocabulary sentences.
BaselineEmbedding embed_corpus(const Corpus& corpus, const WordVectorTable& table);

}  // namespace partysim
