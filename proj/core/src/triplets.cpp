#include "partysim/triplets.hpp"

#include "partysim/error.hpp"
#include "partysim/log.hpp"
#include "partysim/random.hpp"

#include "json_include.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace partysim {

using nlohmann::json;

std::string_view to_string(TripletScheme s) noexcept { return s == TripletScheme::domain ? "domain" : "party"; }
std::string_view to_string(Split s) noexcept { return s == Split::train ? "train" : "validation"; }

TripletScheme parse_scheme(std::string_view name) {
  if (name == "domain") return TripletScheme::domain;
  if (name == "party") return TripletScheme::party;
  throw Error(ErrorCode::usage, "unknown triplet scheme '" + std::string(name) + "' (expected domain or party)");
}

namespace {

struct Group {
  std::string label;
  std::vector<std::size_t> members;  // record indices
};

// Validation quota per group, summing to round(ratio * total), using
// largest remainders so every group is split proportionally.
std::vector<std::size_t> validation_quotas(const std::vector<Group>& groups, double ratio) {
  std::size_t total = 0;
  for (const auto& g : groups) total += g.members.size();
  const auto target = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(total)));

  std::vector<std::size_t> quota(groups.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double ideal = ratio * static_cast<double>(groups[g].members.size());
    quota[g] = static_cast<std::size_t>(std::floor(ideal));
    assigned += quota[g];
    remainders.emplace_back(ideal - std::floor(ideal), g);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < target && i < remainders.size(); ++i, ++assigned) {
    ++quota[remainders[i].second];
  }
  return quota;
}

TripletSet build_split(const Corpus& corpus, const std::vector<std::vector<std::size_t>>& pools, TripletScheme scheme,
                       Split split, const TripletOptions& options, Rng& rng, std::size_t& skipped) {
  TripletSet set;
  set.scheme = scheme;
  set.split = split;
  set.seed = options.seed;

  // Members of all groups laid out contiguously; the negatives of group g
  // are everything outside [offset[g], offset[g] + size).
  std::vector<std::size_t> all;
  std::vector<std::size_t> offset;
  std::vector<std::pair<std::size_t, std::size_t>> anchors;  // (record, group)
  for (std::size_t g = 0; g < pools.size(); ++g) {
    offset.push_back(all.size());
    all.insert(all.end(), pools[g].begin(), pools[g].end());
    for (auto r : pools[g]) anchors.emplace_back(r, g);
  }
  std::sort(anchors.begin(), anchors.end());
  if (anchors.empty()) return set;

  const auto& records = corpus.records();
  for (const auto& [record, g] : anchors) {
    const auto& pool = pools[g];
    if (pool.size() < 2) {
      ++skipped;
      continue;
    }
    const std::size_t outside = all.size() - pool.size();
    if (outside == 0) {
      throw Error(ErrorCode::construction, std::string(to_string(split)) +
                                               " split has a single group; no negative is available");
    }
    const auto self = static_cast<std::size_t>(std::find(pool.begin(), pool.end(), record) - pool.begin());
    for (std::size_t t = 0; t < options.per_anchor; ++t) {
      std::size_t pi = rng.uniform_index(pool.size() - 1);
      if (pi >= self) ++pi;
      std::size_t ni = rng.uniform_index(outside);
      if (ni >= offset[g]) ni += pool.size();
      set.triplets.push_back({records[record].id, records[pool[pi]].id, records[all[ni]].id, scheme});
    }
  }
  return set;
}

double euclidean(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = static_cast<double>(a[k]) - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

TripletSplits build_triplets(const Corpus& corpus, TripletScheme scheme, const TripletOptions& options) {
  if (options.per_anchor == 0) throw Error(ErrorCode::usage, "per_anchor must be positive");
  if (!(options.val_ratio >= 0.0 && options.val_ratio < 1.0)) {
    throw Error(ErrorCode::usage, "val_ratio must lie in [0, 1)");
  }

  std::map<std::string, Group> by_label;
  std::size_t unlabeled = 0;
  const auto& records = corpus.records();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (scheme == TripletScheme::domain && !r.domain) {
      ++unlabeled;
      continue;
    }
    const auto& label = scheme == TripletScheme::party ? r.party : *r.domain;
    auto& g = by_label[label];
    g.label = label;
    g.members.push_back(i);
  }
  if (unlabeled > 0) log::warn(std::to_string(unlabeled) + " sentence(s) without a domain left out of domain triplets");

  std::vector<Group> groups;
  for (auto& [label, g] : by_label) groups.push_back(std::move(g));
  const auto usable = std::count_if(groups.begin(), groups.end(), [](const Group& g) { return g.members.size() >= 2; });
  if (usable < 2) {
    throw Error(ErrorCode::construction, std::string("the ") + std::string(to_string(scheme)) +
                                             " scheme needs at least 2 groups with 2 or more sentences");
  }

  Rng rng(options.seed);
  const auto quotas = validation_quotas(groups, options.val_ratio);
  std::vector<std::vector<std::size_t>> train_pools(groups.size());
  std::vector<std::vector<std::size_t>> val_pools(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto members = groups[g].members;
    rng.shuffle(std::span<std::size_t>(members));
    val_pools[g].assign(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(quotas[g]));
    train_pools[g].assign(members.begin() + static_cast<std::ptrdiff_t>(quotas[g]), members.end());
    std::sort(val_pools[g].begin(), val_pools[g].end());
    std::sort(train_pools[g].begin(), train_pools[g].end());
  }

  TripletSplits out;
  out.train = build_split(corpus, train_pools, scheme, Split::train, options, rng, out.skipped_anchors);
  out.validation = build_split(corpus, val_pools, scheme, Split::validation, options, rng, out.skipped_anchors);
  if (out.skipped_anchors > 0) {
    log::warn(std::to_string(out.skipped_anchors) + " anchor(s) skipped: no positive available in their split");
  }
  return out;
}

double triplet_loss(std::span<const float> anchor, std::span<const float> positive, std::span<const float> negative,
                    double epsilon) {
  if (anchor.size() != positive.size() || anchor.size() != negative.size()) {
    throw Error(ErrorCode::shape, "triplet vectors differ in dimension");
  }
  return std::max(euclidean(anchor, positive) - euclidean(anchor, negative) + epsilon, 0.0);
}

TripletEvaluation evaluate_triplets(const TripletSet& set, const EmbeddingStore& embeddings, double epsilon) {
  std::vector<std::string> missing;
  for (const auto& t : set.triplets) {
    for (const auto* id : {&t.anchor, &t.positive, &t.negative}) {
      if (!embeddings.contains(*id)) missing.push_back(*id);
    }
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    std::ostringstream msg;
    msg << missing.size() << " triplet sentence(s) have no embedding:";
    for (const auto& id : missing) msg << ' ' << id;
    throw Error(ErrorCode::coverage, msg.str());
  }

  TripletEvaluation eval;
  eval.count = set.triplets.size();
  if (eval.count == 0) return eval;
  std::size_t correct = 0;
  double loss = 0.0;
  for (const auto& t : set.triplets) {
    const auto a = embeddings.at(t.anchor);
    const auto p = embeddings.at(t.positive);
    const auto n = embeddings.at(t.negative);
    if (euclidean(a, p) < euclidean(a, n)) ++correct;
    loss += triplet_loss(a, p, n, epsilon);
  }
  eval.accuracy = static_cast<double>(correct) / static_cast<double>(eval.count);
  eval.mean_loss = loss / static_cast<double>(eval.count);
  return eval;
}

void write_triplets(const TripletSet& set, std::ostream& out) {
  for (const auto& t : set.triplets) {
    json obj = json::object();
    obj["anchor"] = t.anchor;
    obj["positive"] = t.positive;
    obj["negative"] = t.negative;
    obj["scheme"] = std::string(to_string(t.scheme));
    obj["split"] = std::string(to_string(set.split));
    out << obj.dump() << '\n';
  }
}

void save_triplets(const TripletSplits& splits, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  write_triplets(splits.train, out);
  write_triplets(splits.validation, out);
}

TripletSplits read_triplets(std::istream& in) {
  TripletSplits splits;
  splits.validation.split = Split::validation;
  bool scheme_seen = false;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto obj = json::parse(text);
      Triplet t{obj.at("anchor").get<std::string>(), obj.at("positive").get<std::string>(),
                obj.at("negative").get<std::string>(), parse_scheme(obj.at("scheme").get<std::string>())};
      const auto split = obj.at("split").get<std::string>();
      if (scheme_seen && t.scheme != splits.train.scheme) {
        throw Error(ErrorCode::schema, "line " + std::to_string(line) + ": mixed triplet schemes");
      }
      scheme_seen = true;
      splits.train.scheme = splits.validation.scheme = t.scheme;
      if (split == "train") {
        splits.train.triplets.push_back(std::move(t));
      } else if (split == "validation") {
        splits.validation.triplets.push_back(std::move(t));
      } else {
        throw Error(ErrorCode::schema, "line " + std::to_string(line) + ": unknown split '" + split + "'");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::schema, "line " + std::to_string(line) + ": " + e.what());
    }
  }
  return splits;
}

TripletSplits load_triplets(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return read_triplets(in);
}

}  // namespace partysim
