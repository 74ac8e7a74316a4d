#pragma once

#include "partysim/corpus.hpp"
#include "partysim/embeddings.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace partysim {

// domain: anchor and positive share a domain, the negative has another one.
// party:  anchor and positive come from one party, the negative from another.
enum class TripletScheme { domain, party };
enum class Split { train, validation };

std::string_view to_string(TripletScheme s) noexcept;
std::string_view to_string(Split s) noexcept;
TripletScheme parse_scheme(std::string_view name);

struct Triplet {
  std::string anchor;
  std::string positive;
  std::string negative;
  TripletScheme scheme = TripletScheme::party;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

struct TripletSet {
  std::vector<Triplet> triplets;
  TripletScheme scheme = TripletScheme::party;
  Split split = Split::train;
  std::uint64_t seed = 0;

  friend bool operator==(const TripletSet&, const TripletSet&) = default;
};

struct TripletOptions {
  std::size_t per_anchor = 1;
  double val_ratio = 0.2;
  std::uint64_t seed = 0;
};

struct TripletSplits {
  TripletSet train;
  TripletSet validation;
  std::size_t skipped_anchors = 0;  // anchors whose group had no other member in their split
};

// Sentences are split into train and validation first (stratified by group,
// validation size round(val_ratio * n)), so every triplet draws all three
// sentences from one split. Each anchor then gets `per_anchor` triplets with
// a uniformly drawn positive from its group and negative from outside it.
TripletSplits build_triplets(const Corpus& corpus, TripletScheme scheme, const TripletOptions& options = {});

// max(|a - p| - |a - n| + epsilon, 0) with Euclidean distances.
double triplet_loss(std::span<const float> anchor, std::span<const float> positive, std::span<const float> negative,
                    double epsilon = 1.0);

struct TripletEvaluation {
  double accuracy = 0.0;  // fraction with |a - p| < |a - n|
  double mean_loss = 0.0;
  std::size_t count = 0;
};

TripletEvaluation evaluate_triplets(const TripletSet& set, const EmbeddingStore& embeddings, double epsilon = 1.0);

// JSON Lines: {"anchor","positive","negative","scheme","split"} per line.
void write_triplets(const TripletSet& set, std::ostream& out);
void save_triplets(const TripletSplits& splits, const std::filesystem::path& path);
TripletSplits read_triplets(std::istream& in);
TripletSplits load_triplets(const std::filesystem::path& path);

}  // namespace partysim
