#pragma once

#include "partysim/corpus.hpp"
#include "partysim/embeddings.hpp"
#include "partysim/groundtruth.hpp"
#include "partysim/inference.hpp"
#include "partysim/matrix.hpp"
#include "partysim/similarity.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace partysim {

struct PipelineOptions {
  std::vector<Variant> variants{Variant::claimdom, Variant::claim, Variant::dom, Variant::none};
  // Each entry is one whitening setting to run (false = raw embeddings).
  std::vector<bool> whiten{false, true};
  double whiten_eps = 1e-8;
  Symmetrization symmetrization = Symmetrization::mean;
  CorrelationMethod method = CorrelationMethod::spearman;
  std::size_t permutations = 9999;
  std::uint64_t seed = 0;
  MatrixFormat format = MatrixFormat::json;
};

/// Everything `run_pipeline` reads from disk.
struct PipelineConfig {
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> embeddings;    // EMB1
  std::optional<std::filesystem::path> word_vectors;  // baseline encoder input
  std::optional<std::filesystem::path> stances;
  std::optional<std::filesystem::path> ground_truth;  // distance matrix JSON, instead of stances
  StanceMetric metric = StanceMetric::hamming;
  std::filesystem::path out;
  PipelineOptions options;
};

struct PipelineRow {
  std::string embedding_source;
  bool whiten = false;
  Variant variant = Variant::none;
  std::optional<MantelResult> mantel;
  std::string error_code;  // empty on success
  std::string error_message;
};

struct PipelineReport {
  std::vector<PipelineRow> rows;
};

struct PipelineInputs {
  Corpus corpus;
  EmbeddingStore embeddings;
  SquareMatrix ground_truth;
  std::string embedding_source;
};

// Runs every (variant, whitening) configuration. A failing configuration is
// recorded in its row and does not stop the others. When `out` is set,
// matrices, Mantel results, dendrograms and summary.csv are written there.
PipelineReport run_configurations(const PipelineInputs& inputs, const PipelineOptions& options,
                                  const std::optional<std::filesystem::path>& out = std::nullopt);

PipelineReport run_pipeline(const PipelineConfig& config);

// Columns: embedding_source,whiten,variant,mantel_r,mantel_p,mode,error
void write_summary_csv(const PipelineReport& report, std::ostream& out);

std::string mantel_json(const MantelResult& result);

}  // namespace partysim
