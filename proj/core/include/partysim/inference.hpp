#pragma once

#include "partysim/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace partysim {

// Similarity -> distance. Off-diagonal values already in [0, 1] map to
// 1 - s; otherwise they are min-max scaled to [0, 1] first. A constant
// off-diagonal yields an all-zero matrix and a warning. Needs k >= 3.
SquareMatrix sim_to_dist(const SquareMatrix& similarity);

enum class CorrelationMethod { spearman, pearson };
enum class MantelMode { sampled, exact };

std::string_view to_string(CorrelationMethod m) noexcept;
std::string_view to_string(MantelMode m) noexcept;
CorrelationMethod parse_method(std::string_view name);

// Ranks starting at 1; tied values share their average rank.
std::vector<double> average_ranks(std::span<const double> values);
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

struct MantelOptions {
  CorrelationMethod method = CorrelationMethod::spearman;
  std::size_t permutations = 9999;
  std::uint64_t seed = 0;
  // Enumerate all k! relabelings when k is at most this.
  std::size_t exact_max_k = 7;
  std::optional<MantelMode> force_mode;
};

/// Outcome of a two-tailed Mantel test.
///
/// Sampled mode: p = (1 + extreme) / (1 + permutations_used), where extreme
/// counts sampled relabelings with |r| >= |r_obs|. Exact mode: p = extreme /
/// k!, the identity included.
struct MantelResult {
  double r = 0.0;
  double p = 1.0;
  std::size_t permutations_used = 0;
  std::size_t extreme = 0;
  MantelMode mode = MantelMode::exact;
  CorrelationMethod method = CorrelationMethod::spearman;
  std::uint64_t seed = 0;
};

// Relabelings count as extreme when |r_perm| >= |r_obs| - kMantelTieTolerance.
inline constexpr double kMantelTieTolerance = 1e-12;

// Correlates the strict upper triangles of two distance matrices, aligned by
// label, and builds the null distribution by permuting the objects (rows and
// columns jointly) of `second`.
MantelResult mantel_test(const SquareMatrix& first, const SquareMatrix& second, const MantelOptions& options = {});

}  // namespace partysim
