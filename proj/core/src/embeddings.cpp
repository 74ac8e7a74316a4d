#include "partysim/embeddings.hpp"

#include "partysim/error.hpp"
#include "partysim/log.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace partysim {

namespace {

constexpr std::array<char, 4> kMagic = {'E', 'M', 'B', '1'};

void put_u16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  out.write(b, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

template <typename T>
T get_le(std::istream& in, const char* what) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) {
    throw Error(ErrorCode::format, std::string("truncated EMB1 payload while reading ") + what);
  }
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(b[i]) << (8 * i));
  return v;
}

}  // namespace

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw Error(ErrorCode::format, "embedding dimension must be positive");
}

void EmbeddingStore::add(std::string id, std::span<const float> values) {
  if (values.size() != dim_) {
    throw Error(ErrorCode::shape, "vector for '" + id + "' has " + std::to_string(values.size()) +
                                      " components, expected " + std::to_string(dim_));
  }
  for (float v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::data, "vector for '" + id + "' has a non-finite component");
  }
  if (!index_.emplace(id, ids_.size()).second) {
    throw Error(ErrorCode::uniqueness, "duplicate embedding id '" + id + "'");
  }
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), values.begin(), values.end());
}

std::span<const float> EmbeddingStore::row(std::size_t index) const {
  return std::span<const float>(data_).subspan(index * dim_, dim_);
}

std::span<const float> EmbeddingStore::at(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::coverage, "no embedding for sentence '" + id + "'");
  return row(it->second);
}

bool operator==(const EmbeddingStore& a, const EmbeddingStore& b) {
  if (a.dim_ != b.dim_ || a.ids_ != b.ids_ || a.data_.size() != b.data_.size()) return false;
  for (std::size_t i = 0; i < a.data_.size(); ++i) {
    if (std::bit_cast<std::uint32_t>(a.data_[i]) != std::bit_cast<std::uint32_t>(b.data_[i])) return false;
  }
  return true;
}

void write_store(const EmbeddingStore& store, std::ostream& out) {
  if (store.size() > std::numeric_limits<std::uint32_t>::max() ||
      store.dim() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::format, "store too large for EMB1");
  }
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, static_cast<std::uint32_t>(store.size()));
  put_u32(out, static_cast<std::uint32_t>(store.dim()));
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto& id = store.ids()[i];
    if (id.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(ErrorCode::format, "sentence id longer than 65535 bytes");
    }
    put_u16(out, static_cast<std::uint16_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    for (float v : store.row(i)) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
}

EmbeddingStore read_store(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw Error(ErrorCode::format, "not an EMB1 file (bad magic)");
  }
  const auto count = get_le<std::uint32_t>(in, "count");
  const auto dim = get_le<std::uint32_t>(in, "dim");
  if (dim == 0) throw Error(ErrorCode::format, "EMB1 header declares dim=0");

  EmbeddingStore store(dim);
  std::vector<float> values(dim);
  std::string id;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = get_le<std::uint16_t>(in, "id length");
    id.resize(len);
    if (len > 0 && !in.read(id.data(), len)) throw Error(ErrorCode::format, "truncated EMB1 payload in id");
    for (auto& v : values) v = std::bit_cast<float>(get_le<std::uint32_t>(in, "vector"));
    store.add(id, values);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::format, "trailing bytes after EMB1 payload");
  }
  return store;
}

void save_store(const EmbeddingStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  write_store(store, out);
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

EmbeddingStore load_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return read_store(in);
}

std::vector<std::string> missing_ids(const EmbeddingStore& store, const Corpus& corpus) {
  std::vector<std::string> missing;
  for (const auto& r : corpus.records()) {
    if (!store.contains(r.id)) missing.push_back(r.id);
  }
  return missing;
}

void require_coverage(const EmbeddingStore& store, const Corpus& corpus) {
  const auto missing = missing_ids(store, corpus);
  if (missing.empty()) return;
  std::ostringstream msg;
  msg << missing.size() << " sentence(s) have no embedding:";
  for (const auto& id : missing) msg << ' ' << id;
  throw Error(ErrorCode::coverage, msg.str());
}

bool WordVectorTable::insert(std::string token, std::vector<float> vector) {
  if (vector.size() != dim_) throw Error(ErrorCode::shape, "word vector for '" + token + "' has wrong dimension");
  auto [it, inserted] = vectors_.insert_or_assign(std::move(token), std::move(vector));
  return inserted;
}

const std::vector<float>* WordVectorTable::find(const std::string& token) const {
  auto it = vectors_.find(token);
  return it == vectors_.end() ? nullptr : &it->second;
}

WordVectorTable read_word_vectors(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::format, "line 1: missing 'count dim' header");
  std::istringstream header(line);
  long long count = -1;
  long long dim = -1;
  if (!(header >> count >> dim) || count < 0 || dim <= 0) {
    throw Error(ErrorCode::format, "line 1: header must be 'count dim' with dim > 0");
  }

  WordVectorTable table(static_cast<std::size_t>(dim));
  std::size_t duplicates = 0;
  long long rows = 0;
  std::size_t line_no = 1;
  std::vector<float> vec;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string token;
    row >> token;
    vec.clear();
    std::string cell;
    while (row >> cell) {
      char* end = nullptr;
      const float v = std::strtof(cell.c_str(), &end);
      if (end != cell.c_str() + cell.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::format, "line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
      vec.push_back(v);
    }
    if (vec.size() != static_cast<std::size_t>(dim)) {
      throw Error(ErrorCode::format, "line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                                         " values, got " + std::to_string(vec.size()));
    }
    if (!table.insert(token, vec)) ++duplicates;
    ++rows;
  }
  if (rows != count) {
    throw Error(ErrorCode::format, "header declares " + std::to_string(count) + " rows, file has " +
                                       std::to_string(rows));
  }
  if (duplicates > 0) {
    log::warn(std::to_string(duplicates) + " duplicate token row(s) in word-vector file; last row wins");
  }
  return table;
}

WordVectorTable load_word_vectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return read_word_vectors(in);
}

namespace {

struct Decoded {
  char32_t cp;
  std::size_t len;
  bool valid;
};

Decoded decode_utf8(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1, true};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {b0, 1, false};
  }
  if (i + len > s.size()) return {b0, 1, false};
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {b0, 1, false};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len, true};
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_space(char32_t cp) {
  return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
         cp == 0x3000;
}

bool is_punct(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60) ||
           (cp >= 0x7B && cp <= 0x7E);
  }
  switch (cp) {
    case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB: case 0xBF:
      return true;
    default:
      break;
  }
  return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) || (cp >= 0x3001 && cp <= 0x3003) ||
         (cp >= 0x3008 && cp <= 0x3011);
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp < 0xC0) return cp;
  if (cp <= 0xDE) return cp == 0xD7 ? cp : cp + 0x20;
  if (cp >= 0x100 && cp <= 0x137) {
    if (cp == 0x130) return 'i';
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x14A && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp == 0x178) return 0xFF;
  if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp == 0x1E9E) return 0xDF;
  return cp;
}

// One code point of a token, with the raw bytes kept for invalid input.
struct Glyph {
  char32_t cp;
  bool valid;
  std::string_view raw;
};

void flush_token(std::vector<Glyph>& glyphs, std::vector<std::string>& out) {
  std::size_t b = 0;
  std::size_t e = glyphs.size();
  while (b < e && glyphs[b].valid && is_punct(glyphs[b].cp)) ++b;
  while (e > b && glyphs[e - 1].valid && is_punct(glyphs[e - 1].cp)) --e;
  if (b < e) {
    std::string token;
    for (std::size_t i = b; i < e; ++i) {
      if (glyphs[i].valid) {
        encode_utf8(to_lower(glyphs[i].cp), token);
      } else {
        token.append(glyphs[i].raw);
      }
    }
    out.push_back(std::move(token));
  }
  glyphs.clear();
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::vector<Glyph> current;
  for (std::size_t i = 0; i < text.size();) {
    const Decoded d = decode_utf8(text, i);
    if (d.valid && is_space(d.cp)) {
      flush_token(current, tokens);
    } else {
      current.push_back({d.cp, d.valid, text.substr(i, d.len)});
    }
    i += d.len;
  }
  flush_token(current, tokens);
  return tokens;
}

std::vector<float> embed_average(std::string_view text, const WordVectorTable& table) {
  std::vector<double> sum(table.dim(), 0.0);
  std::size_t hits = 0;
  for (const auto& token : tokenize(text)) {
    const auto* vec = table.find(token);
    if (vec == nullptr) continue;
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += (*vec)[k];
    ++hits;
  }
  if (hits == 0) {
    throw Error(ErrorCode::out_of_vocabulary, "no in-vocabulary token in '" + std::string(text.substr(0, 80)) + "'");
  }
  std::vector<float> mean(sum.size());
  for (std::size_t k = 0; k < sum.size(); ++k) mean[k] = static_cast<float>(sum[k] / static_cast<double>(hits));
  return mean;
}

BaselineEmbedding embed_corpus(const Corpus& corpus, const WordVectorTable& table) {
  BaselineEmbedding result{EmbeddingStore(table.dim()), {}};
  for (const auto& r : corpus.records()) {
    try {
      result.store.add(r.id, embed_average(r.text, table));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::out_of_vocabulary) throw;
      result.skipped.push_back(r.id);
    }
  }
  if (!result.skipped.empty()) {
    log::warn(std::to_string(result.skipped.size()) + " out-of-vocabulary sentence(s) skipped");
  }
  return result;
}

}  // namespace partysim
