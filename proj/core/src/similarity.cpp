#include "partysim/similarity.hpp"

#include "partysim/error.hpp"
#include "partysim/log.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace partysim {

namespace {

// Cosines closer than this are treated as ties.
constexpr double kTieTolerance = 1e-12;
constexpr Eigen::Index kBlockRows = 512;

// Id-sorted, unit-normalized rows of one sentence set.
struct PreparedSet {
  std::vector<std::string> ids;
  std::vector<std::size_t> original;  // position in the caller's set
  Eigen::MatrixXd unit;
};

PreparedSet prepare(const SentenceSet& set) {
  const auto n = set.ids.size();
  if (static_cast<Eigen::Index>(n) != set.vectors.rows()) {
    throw Error(ErrorCode::shape, "sentence set has mismatched ids and rows");
  }
  PreparedSet p;
  p.original.resize(n);
  std::iota(p.original.begin(), p.original.end(), std::size_t{0});
  std::sort(p.original.begin(), p.original.end(),
            [&](std::size_t a, std::size_t b) { return set.ids[a] < set.ids[b]; });
  p.ids.reserve(n);
  p.unit.resize(static_cast<Eigen::Index>(n), set.vectors.cols());
  for (std::size_t r = 0; r < n; ++r) {
    const auto src = static_cast<Eigen::Index>(p.original[r]);
    const double norm = set.vectors.row(src).norm();
    if (!(norm > 0.0)) throw Error(ErrorCode::undefined_cosine, "sentence '" + set.ids[p.original[r]] + "' has a zero vector");
    p.unit.row(static_cast<Eigen::Index>(r)) = set.vectors.row(src) / norm;
    p.ids.push_back(set.ids[p.original[r]]);
  }
  return p;
}

// Twin of every source row, as an index into target (id-sorted order).
void scan_twins(const Eigen::MatrixXd& source, const PreparedSet& target, std::vector<std::size_t>& twin,
                std::vector<double>& best) {
  const Eigen::Index n = source.rows();
  const Eigen::Index m = target.unit.rows();
  if (m == 0) throw Error(ErrorCode::degenerate_party, "twin search against an empty sentence set");
  twin.assign(static_cast<std::size_t>(n), 0);
  best.assign(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity());
  Eigen::MatrixXd block;
  for (Eigen::Index start = 0; start < n; start += kBlockRows) {
    const Eigen::Index rows = std::min(kBlockRows, n - start);
    block.noalias() = source.middleRows(start, rows) * target.unit.transpose();
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto out = static_cast<std::size_t>(start + i);
      for (Eigen::Index j = 0; j < m; ++j) {
        if (block(i, j) > best[out] + kTieTolerance) {
          best[out] = block(i, j);
          twin[out] = static_cast<std::size_t>(j);
        }
      }
    }
  }
}

double max_inter(const PreparedSet& set) {
  const Eigen::Index n = set.unit.rows();
  if (n < 2) {
    throw Error(ErrorCode::insufficient_data, "maximum inter-sentence similarity needs at least 2 sentences");
  }
  double best = -std::numeric_limits<double>::infinity();
  Eigen::MatrixXd block;
  for (Eigen::Index start = 0; start < n; start += kBlockRows) {
    const Eigen::Index rows = std::min(kBlockRows, n - start);
    block.noalias() = set.unit.middleRows(start, rows) * set.unit.transpose();
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j != start + i) best = std::max(best, block(i, j));
      }
    }
  }
  return best;
}

double directional(const PreparedSet& source, double c_source, const PreparedSet& target, double c_target,
                   const std::string& source_label, const std::string& target_label) {
  const double norm = c_source + c_target;
  if (!(norm > 0.0)) {
    throw Error(ErrorCode::normalization, "non-positive twin normalizer C(" + source_label + ")+C(" + target_label +
                                              ") = " + format_double(norm));
  }
  std::vector<std::size_t> twin;
  std::vector<double> best;
  scan_twins(source.unit, target, twin, best);
  double sum = 0.0;
  for (double b : best) sum += b;
  return sum / (static_cast<double>(source.unit.rows()) * norm);
}

std::vector<std::string> usable_ids(const Corpus& corpus, const std::string& party, bool claims_only) {
  std::vector<std::string> ids;
  for (const auto& r : corpus.records()) {
    if (r.party == party && (!claims_only || r.is_claim)) ids.push_back(r.id);
  }
  return ids;
}

void require_ids(const EmbeddingStore& embeddings, const std::vector<std::string>& ids) {
  std::vector<std::string> missing;
  for (const auto& id : ids) {
    if (!embeddings.contains(id)) missing.push_back(id);
  }
  if (missing.empty()) return;
  std::ostringstream msg;
  msg << missing.size() << " sentence(s) have no embedding:";
  for (const auto& id : missing) msg << ' ' << id;
  throw Error(ErrorCode::coverage, msg.str());
}

}  // namespace

double cosine(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (u.size() != v.size()) throw Error(ErrorCode::shape, "cosine of vectors with different lengths");
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 0.0) || !(nv > 0.0)) throw Error(ErrorCode::undefined_cosine, "cosine of a zero-norm vector");
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

double cosine(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) throw Error(ErrorCode::shape, "cosine of vectors with different lengths");
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    dot += static_cast<double>(u[k]) * v[k];
    uu += static_cast<double>(u[k]) * u[k];
    vv += static_cast<double>(v[k]) * v[k];
  }
  if (!(uu > 0.0) || !(vv > 0.0)) throw Error(ErrorCode::undefined_cosine, "cosine of a zero-norm vector");
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::claimdom: return "claimdom";
    case Variant::claim: return "claim";
    case Variant::dom: return "dom";
    case Variant::none: return "none";
  }
  return "none";
}

Variant parse_variant(std::string_view name) {
  if (name == "claimdom") return Variant::claimdom;
  if (name == "claim") return Variant::claim;
  if (name == "dom") return Variant::dom;
  if (name == "none") return Variant::none;
  throw Error(ErrorCode::usage, "unknown variant '" + std::string(name) + "' (expected claimdom, claim, dom, none)");
}

SentenceSet sentence_set(const std::vector<std::string>& ids, const EmbeddingStore& embeddings) {
  SentenceSet set;
  set.ids = ids;
  set.vectors.resize(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(embeddings.dim()));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto row = embeddings.at(ids[i]);
    for (std::size_t k = 0; k < row.size(); ++k) {
      set.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
    }
  }
  return set;
}

TwinAssignment find_twins(const SentenceSet& source, const SentenceSet& target) {
  if (source.vectors.cols() != target.vectors.cols()) throw Error(ErrorCode::shape, "sentence sets differ in dimension");
  const PreparedSet src = prepare(source);
  const PreparedSet tgt = prepare(target);
  std::vector<std::size_t> twin;
  std::vector<double> best;
  scan_twins(src.unit, tgt, twin, best);

  TwinAssignment out;
  out.twin.resize(source.ids.size());
  out.cosine.resize(source.ids.size());
  for (std::size_t r = 0; r < twin.size(); ++r) {
    out.twin[src.original[r]] = tgt.original[twin[r]];
    out.cosine[src.original[r]] = best[r];
  }
  return out;
}

double max_inter_similarity(const SentenceSet& set) { return max_inter(prepare(set)); }

double directional_twin_score(const SentenceSet& source, const SentenceSet& target) {
  if (source.vectors.cols() != target.vectors.cols()) throw Error(ErrorCode::shape, "sentence sets differ in dimension");
  const PreparedSet src = prepare(source);
  const PreparedSet tgt = prepare(target);
  return directional(src, max_inter(src), tgt, max_inter(tgt), "source", "target");
}

SimilarityResult twin_similarity(const Corpus& corpus, const EmbeddingStore& embeddings, bool claims_only,
                                 Symmetrization symmetrization) {
  const auto& parties = corpus.parties();
  const std::size_t k = parties.size();
  std::vector<PreparedSet> sets;
  std::vector<double> c_max;
  sets.reserve(k);
  for (const auto& party : parties) {
    const auto ids = usable_ids(corpus, party, claims_only);
    if (ids.size() < 2) {
      throw Error(ErrorCode::degenerate_party, "party '" + party + "' has " + std::to_string(ids.size()) +
                                                   " usable sentence(s); twin matching needs at least 2");
    }
    require_ids(embeddings, ids);
    sets.push_back(prepare(sentence_set(ids, embeddings)));
    c_max.push_back(max_inter(sets.back()));
  }

  SimilarityResult result{SquareMatrix({}, Eigen::MatrixXd(0, 0), MatrixRole::similarity),
                          claims_only ? Variant::claim : Variant::none,
                          {},
                          {}};
  Eigen::MatrixXd dir(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      const double s = directional(sets[a], c_max[a], sets[b], c_max[b], parties[a], parties[b]);
      dir(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s;
      result.directional[{parties[a], parties[b]}] = s;
    }
  }
  Eigen::MatrixXd values(dir.rows(), dir.cols());
  for (Eigen::Index a = 0; a < dir.rows(); ++a) {
    values(a, a) = dir(a, a);
    for (Eigen::Index b = a + 1; b < dir.cols(); ++b) {
      const double v = symmetrization == Symmetrization::mean ? 0.5 * (dir(a, b) + dir(b, a)) : dir(a, b);
      values(a, b) = v;
      values(b, a) = v;
    }
  }
  result.matrix = SquareMatrix(parties, std::move(values), MatrixRole::similarity);
  return result;
}

SimilarityResult grouped_similarity(const Corpus& corpus, const EmbeddingStore& embeddings, bool claims_only) {
  const auto& parties = corpus.parties();
  const std::size_t k = parties.size();
  const Eigen::Index dim = static_cast<Eigen::Index>(embeddings.dim());

  // Per party: domain -> summed vector.
  std::vector<std::map<std::string, Eigen::VectorXd>> domain_sums(k);
  std::size_t unlabeled = 0;
  std::vector<std::string> missing;
  for (const auto& r : corpus.records()) {
    if (claims_only && !r.is_claim) continue;
    if (!r.domain) {
      ++unlabeled;
      continue;
    }
    if (!embeddings.contains(r.id)) {
      missing.push_back(r.id);
      continue;
    }
    const auto p = static_cast<std::size_t>(std::lower_bound(parties.begin(), parties.end(), r.party) - parties.begin());
    auto [it, inserted] = domain_sums[p].try_emplace(*r.domain, Eigen::VectorXd::Zero(dim));
    const auto row = embeddings.at(r.id);
    for (Eigen::Index d = 0; d < dim; ++d) it->second(d) += row[static_cast<std::size_t>(d)];
  }
  if (!missing.empty()) require_ids(embeddings, missing);
  if (unlabeled > 0) {
    log::warn(std::to_string(unlabeled) + " sentence(s) without a domain label excluded from domain grouping");
  }
  for (std::size_t p = 0; p < k; ++p) {
    if (domain_sums[p].empty()) {
      throw Error(ErrorCode::degenerate_party, "party '" + parties[p] + "' has no usable domain-labeled sentences");
    }
  }

  SimilarityResult result{SquareMatrix({}, Eigen::MatrixXd(0, 0), MatrixRole::similarity),
                          claims_only ? Variant::claimdom : Variant::dom,
                          {},
                          {}};
  Eigen::MatrixXd values = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      double sum = 0.0;
      std::size_t shared = 0;
      for (const auto& [domain, vec_a] : domain_sums[a]) {
        auto it = domain_sums[b].find(domain);
        if (it == domain_sums[b].end()) continue;
        sum += cosine(vec_a, it->second);
        ++shared;
      }
      if (shared == 0) {
        throw Error(ErrorCode::no_overlap, "parties '" + parties[a] + "' and '" + parties[b] + "' share no domain");
      }
      const double v = sum / static_cast<double>(shared);
      values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
      values(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
      result.shared_domains[{parties[a], parties[b]}] = shared;
    }
  }
  result.matrix = SquareMatrix(parties, std::move(values), MatrixRole::similarity);
  return result;
}

SimilarityResult similarity_matrix(const Corpus& corpus, const EmbeddingStore& embeddings, Variant variant,
                                   Symmetrization symmetrization) {
  switch (variant) {
    case Variant::claimdom: return grouped_similarity(corpus, embeddings, true);
    case Variant::claim: return twin_similarity(corpus, embeddings, true, symmetrization);
    case Variant::dom: return grouped_similarity(corpus, embeddings, false);
    case Variant::none: return twin_similarity(corpus, embeddings, false, symmetrization);
  }
  throw Error(ErrorCode::usage, "unknown variant");
}

}  // namespace partysim
