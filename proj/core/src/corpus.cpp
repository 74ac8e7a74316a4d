#include "partysim/corpus.hpp"

#include "csv.hpp"
#include "partysim/error.hpp"
#include "partysim/log.hpp"

#include "json_include.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace partysim {

using nlohmann::json;

namespace {

constexpr std::string_view kCsvHeader[] = {"id", "text", "party", "domain", "year", "is_claim"};

[[noreturn]] void schema_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::schema, "line " + std::to_string(line) + ": " + what);
}

void check_record(const SentenceRecord& r, std::size_t line) {
  if (r.id.empty()) schema_error(line, "empty id");
  if (detail::trim(r.text).empty()) schema_error(line, "text is empty after trimming (id '" + r.id + "')");
  if (r.party.empty()) schema_error(line, "empty party (id '" + r.id + "')");
}

class RecordCollector {
 public:
  void add(SentenceRecord r, std::size_t line) {
    check_record(r, line);
    auto [it, inserted] = seen_.emplace(r.id, line);
    if (!inserted) {
      throw Error(ErrorCode::uniqueness, "line " + std::to_string(line) + ": duplicate id '" + r.id +
                                             "' (first seen on line " + std::to_string(it->second) + ")");
    }
    records_.push_back(std::move(r));
  }

  Corpus finish() && {
    if (records_.empty()) throw Error(ErrorCode::empty_corpus, "corpus contains no records");
    return Corpus(std::move(records_));
  }

 private:
  std::vector<SentenceRecord> records_;
  std::unordered_map<std::string, std::size_t> seen_;
};

std::string required_string(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) schema_error(line, std::string("missing required field '") + key + "'");
  if (!it->is_string()) schema_error(line, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

SentenceRecord parse_json_record(const json& obj, std::size_t line) {
  if (!obj.is_object()) schema_error(line, "expected a JSON object");
  SentenceRecord r;
  r.id = required_string(obj, "id", line);
  r.text = required_string(obj, "text", line);
  r.party = required_string(obj, "party", line);
  if (auto it = obj.find("domain"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) schema_error(line, "field 'domain' must be a string or null");
    r.domain = it->get<std::string>();
  }
  if (auto it = obj.find("year"); it != obj.end() && !it->is_null()) {
    if (!it->is_number_integer()) schema_error(line, "field 'year' must be an integer or null");
    r.year = it->get<int>();
  }
  if (auto it = obj.find("is_claim"); it != obj.end() && !it->is_null()) {
    if (!it->is_boolean()) schema_error(line, "field 'is_claim' must be a boolean");
    r.is_claim = it->get<bool>();
  }
  return r;
}

Corpus read_jsonl(std::istream& in) {
  RecordCollector collector;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (detail::trim(text).empty()) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      schema_error(line, std::string("invalid JSON: ") + e.what());
    }
    collector.add(parse_json_record(obj, line), line);
  }
  return std::move(collector).finish();
}

bool parse_bool_cell(std::string_view cell, std::size_t line) {
  std::string lower(detail::trim(cell));
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower.empty() || lower == "false" || lower == "0") return false;
  if (lower == "true" || lower == "1") return true;
  schema_error(line, "is_claim must be true/false/1/0, got '" + std::string(cell) + "'");
}

Corpus read_csv(std::istream& in) {
  detail::CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw Error(ErrorCode::empty_corpus, "corpus contains no records");
  if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
  if (fields.size() != std::size(kCsvHeader) || !std::equal(fields.begin(), fields.end(), std::begin(kCsvHeader))) {
    schema_error(1, "header must be id,text,party,domain,year,is_claim");
  }

  RecordCollector collector;
  while (reader.next(fields)) {
    const std::size_t line = reader.line();
    if (reader.last_row_had_unterminated_quote()) schema_error(line, "unterminated quoted field");
    if (fields.size() == 1 && detail::trim(fields[0]).empty()) continue;
    if (fields.size() != std::size(kCsvHeader)) {
      schema_error(line, "expected 6 columns, got " + std::to_string(fields.size()));
    }
    SentenceRecord r;
    r.id = fields[0];
    r.text = fields[1];
    r.party = fields[2];
    if (r.id.empty()) schema_error(line, "missing required field 'id'");
    if (r.text.empty()) schema_error(line, "missing required field 'text'");
    if (r.party.empty()) schema_error(line, "missing required field 'party'");
    if (!fields[3].empty()) r.domain = fields[3];
    if (const auto year = detail::trim(fields[4]); !year.empty()) {
      int value = 0;
      auto [ptr, ec] = std::from_chars(year.data(), year.data() + year.size(), value);
      if (ec != std::errc() || ptr != year.data() + year.size()) schema_error(line, "year must be an integer");
      r.year = value;
    }
    r.is_claim = parse_bool_cell(fields[5], line);
    collector.add(std::move(r), line);
  }
  return std::move(collector).finish();
}

}  // namespace

Corpus::Corpus(std::vector<SentenceRecord> records) : records_(std::move(records)) {
  std::set<std::string> parties;
  std::set<std::string> domains;
  index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    check_record(r, i + 1);
    if (!index_.emplace(r.id, i).second) {
      throw Error(ErrorCode::uniqueness, "duplicate id '" + r.id + "'");
    }
    parties.insert(r.party);
    if (r.domain) domains.insert(*r.domain);
  }
  parties_.assign(parties.begin(), parties.end());
  domains_.assign(domains.begin(), domains.end());
}

const SentenceRecord* Corpus::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::size_t Corpus::claim_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(records_.begin(), records_.end(), [](const SentenceRecord& r) { return r.is_claim; }));
}

Corpus read_corpus(std::istream& in, CorpusFormat format) {
  return format == CorpusFormat::csv ? read_csv(in) : read_jsonl(in);
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open corpus file " + path.string());
  return read_corpus(in, format);
}

Corpus load_corpus(const std::filesystem::path& path) {
  return load_corpus(path, path.extension() == ".csv" ? CorpusFormat::csv : CorpusFormat::jsonl);
}

void write_corpus(const Corpus& corpus, std::ostream& out, CorpusFormat format) {
  if (format == CorpusFormat::jsonl) {
    for (const auto& r : corpus.records()) {
      json obj = json::object();
      obj["id"] = r.id;
      obj["text"] = r.text;
      obj["party"] = r.party;
      obj["domain"] = r.domain ? json(*r.domain) : json(nullptr);
      obj["year"] = r.year ? json(*r.year) : json(nullptr);
      obj["is_claim"] = r.is_claim;
      out << obj.dump() << '\n';
    }
    return;
  }
  out << "id,text,party,domain,year,is_claim\n";
  for (const auto& r : corpus.records()) {
    detail::write_csv_field(out, r.id);
    out << ',';
    detail::write_csv_field(out, r.text);
    out << ',';
    detail::write_csv_field(out, r.party);
    out << ',';
    if (r.domain) detail::write_csv_field(out, *r.domain);
    out << ',';
    if (r.year) out << *r.year;
    out << ',' << (r.is_claim ? "true" : "false") << '\n';
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write corpus file " + path.string());
  write_corpus(corpus, out, format);
}

Corpus filter_records(const Corpus& corpus, const std::function<bool(const SentenceRecord&)>& keep) {
  std::vector<SentenceRecord> kept;
  for (const auto& r : corpus.records()) {
    if (keep(r)) kept.push_back(r);
  }
  return Corpus(std::move(kept));
}

Corpus filter_claims(const Corpus& corpus) {
  Corpus claims = filter_records(corpus, [](const SentenceRecord& r) { return r.is_claim; });
  if (claims.empty()) log::warn("claim filter left an empty corpus");
  return claims;
}

std::string GroupLabel::to_string() const {
  if (party.empty()) return domain;
  if (domain.empty()) return party;
  return party + "/" + domain;
}

Groups group_sentences(const Corpus& corpus, GroupKey key, MissingDomain policy) {
  Groups groups;
  std::vector<std::string> unlabeled;
  for (const auto& r : corpus.records()) {
    GroupLabel label;
    if (key != GroupKey::domain) label.party = r.party;
    if (key != GroupKey::party) {
      if (!r.domain) {
        unlabeled.push_back(r.id);
        continue;
      }
      label.domain = *r.domain;
    }
    groups[label].push_back(r.id);
  }
  if (!unlabeled.empty()) {
    if (policy == MissingDomain::error) {
      std::ostringstream msg;
      msg << unlabeled.size() << " record(s) lack a domain label:";
      for (const auto& id : unlabeled) msg << ' ' << id;
      throw Error(ErrorCode::labeling, msg.str());
    }
    log::warn(std::to_string(unlabeled.size()) + " sentence(s) without a domain label excluded from domain grouping");
  }
  return groups;
}

}  // namespace partysim
