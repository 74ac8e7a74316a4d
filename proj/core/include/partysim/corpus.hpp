#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace partysim {

/// One annotated manifesto sentence.
struct SentenceRecord {
  std::string id;
  std::string text;
  std::string party;
  std::optional<std::string> domain;
  std::optional<int> year;
  bool is_claim = false;

  friend bool operator==(const SentenceRecord&, const SentenceRecord&) = default;
};

/// Immutable, ordered collection of sentence records.
///
/// Construction validates that ids are unique, texts are non-blank and
/// every record names a party. The party and domain sets are derived and
/// kept sorted.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<SentenceRecord> records);

  const std::vector<SentenceRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  const std::vector<std::string>& parties() const noexcept { return parties_; }
  const std::vector<std::string>& domains() const noexcept { return domains_; }

  const SentenceRecord* find(const std::string& id) const;
  std::size_t claim_count() const noexcept;

  friend bool operator==(const Corpus& a, const Corpus& b) { return a.records_ == b.records_; }

 private:
  std::vector<SentenceRecord> records_;
  std::vector<std::string> parties_;
  std::vector<std::string> domains_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class CorpusFormat { jsonl, csv };

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
// Picks the format from the extension (".csv" or anything else as JSON Lines).
Corpus load_corpus(const std::filesystem::path& path);
Corpus read_corpus(std::istream& in, CorpusFormat format);

void save_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format);
void write_corpus(const Corpus& corpus, std::ostream& out, CorpusFormat format);

// Keeps only records with is_claim set, in original order. Warns when
// nothing is left.
Corpus filter_claims(const Corpus& corpus);

// Keeps the records accepted by `keep`, in original order.
Corpus filter_records(const Corpus& corpus,
                      const std::function<bool(const SentenceRecord&)>& keep);

enum class GroupKey { party, domain, party_domain };

struct GroupLabel {
  std::string party;   // empty when key == domain
  std::string domain;  // empty when key == party

  auto operator<=>(const GroupLabel&) const = default;
  std::string to_string() const;
};

using Groups = std::map<GroupLabel, std::vector<std::string>>;

enum class MissingDomain {
  error,    // a record without a domain under a domain key is a labeling error
  exclude,  // such records are left out of every group, with a logged count
};

Groups group_sentences(const Corpus& corpus, GroupKey key,
                       MissingDomain policy = MissingDomain::error);

}  // namespace partysim
