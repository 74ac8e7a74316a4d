#pragma once

#include "partysim/corpus.hpp"
#include "partysim/embeddings.hpp"
#include "partysim/matrix.hpp"

#include <Eigen/Core>

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace partysim {

// Throws undefined_cosine when either vector has zero norm.
double cosine(std::span<const float> u, std::span<const float> v);
double cosine(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& v);

/// The four aggregation models, from most to least informed.
enum class Variant { claimdom, claim, dom, none };

std::string_view to_string(Variant v) noexcept;
Variant parse_variant(std::string_view name);
constexpr bool uses_claims(Variant v) noexcept { return v == Variant::claimdom || v == Variant::claim; }
constexpr bool uses_domains(Variant v) noexcept { return v == Variant::claimdom || v == Variant::dom; }

/// How the two directional twin scores of a pair become one matrix entry.
enum class Symmetrization {
  mean,     // average of A->B and B->A
  forward,  // A->B where A precedes B in label order
};

using PartyPair = std::pair<std::string, std::string>;

struct SimilarityResult {
  SquareMatrix matrix;
  Variant variant;
  // Twin variants: score of every ordered pair (including A->A).
  std::map<PartyPair, double> directional;
  // Grouped variants: number of shared domains averaged for each pair.
  std::map<PartyPair, std::size_t> shared_domains;
};

// Domain-grouped model. Per party and domain the sentence vectors are summed;
// a pair's similarity is the mean per-domain cosine over the domains both
// parties cover. Sentences without a domain are left out with a warning.
SimilarityResult grouped_similarity(const Corpus& corpus, const EmbeddingStore& embeddings, bool claims_only);

// Twin-matching model. Each source sentence is scored by the cosine to its
// nearest sentence of the other party, normalized by the sum of both
// parties' maximum inter-sentence cosine and averaged over the source.
SimilarityResult twin_similarity(const Corpus& corpus, const EmbeddingStore& embeddings, bool claims_only,
                                 Symmetrization symmetrization = Symmetrization::mean);

SimilarityResult similarity_matrix(const Corpus& corpus, const EmbeddingStore& embeddings, Variant variant,
                                   Symmetrization symmetrization = Symmetrization::mean);

/// Rows of sentence vectors with their ids. The twin routines below treat
/// it as one party's usable sentences.
struct SentenceSet {
  std::vector<std::string> ids;
  Eigen::MatrixXd vectors;  // one row per id
};

SentenceSet sentence_set(const std::vector<std::string>& ids, const EmbeddingStore& embeddings);

struct TwinAssignment {
  std::vector<std::size_t> twin;  // index into the target set, per source row
  std::vector<double> cosine;     // cosine to that twin
};

// Nearest target (by cosine) of every source row; equal cosines resolve to
// the lexicographically smallest target id.
TwinAssignment find_twins(const SentenceSet& source, const SentenceSet& target);

// Largest cosine between two distinct rows. Needs at least two rows.
double max_inter_similarity(const SentenceSet& set);

// Directional score of `source` towards `target`, normalized by
// max_inter_similarity of both sets.
double directional_twin_score(const SentenceSet& source, const SentenceSet& target);

}  // namespace partysim
