#pragma once

#include "partysim/corpus.hpp"
#include "partysim/embeddings.hpp"
#include "partysim/matrix.hpp"

#include <cstddef>
#include <cstdint>

namespace partysim {

/// Generator for corpora with a known party geometry.
///
/// Each party gets a mean vector of norm `mean_radius` whose direction is
/// drawn uniformly within a random `latent_dim`-dimensional subspace (the
/// whole space when latent_dim is 0 or >= dim); each domain a topic offset of
/// norm `domain_scale`. A sentence
/// is party mean + domain offset + isotropic Gaussian noise with
/// per-component deviation sigma, where sigma is chosen so that the smallest
/// distance between party means equals `separation_over_sigma * sigma`.
///
/// Anisotropy knobs: `common_offset` adds a shared vector of that norm to
/// every sentence, and `nuisance_scale` adds N(0, nuisance_scale^2) along a
/// fixed axis independent of the party.
struct PlantedOptions {
  std::size_t parties = 6;
  std::size_t sentences_per_party = 300;
  std::size_t dim = 32;
  std::size_t domains = 7;
  std::size_t latent_dim = 3;
  double claim_fraction = 0.6;
  double mean_radius = 1.0;
  double domain_scale = 0.5;
  double separation_over_sigma = 3.0;
  double common_offset = 0.0;
  double nuisance_scale = 0.0;
  std::uint64_t seed = 0;
};

struct PlantedCorpus {
  Corpus corpus;
  EmbeddingStore embeddings;
  SquareMatrix planted;  // Euclidean distances between party means
  double sigma = 0.0;
  double min_separation = 0.0;
};

PlantedCorpus make_planted_corpus(const PlantedOptions& options);

}  // namespace partysim
