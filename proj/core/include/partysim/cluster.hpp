#pragma once

#include "partysim/matrix.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace partysim {

/// One agglomeration step. Nodes 0..k-1 are leaves; merge i creates node k+i.
struct Merge {
  std::size_t left;
  std::size_t right;
  double height;
  std::size_t size;  // leaves under the new node
};

struct Dendrogram {
  std::vector<std::string> leaves;
  std::vector<Merge> merges;

  std::size_t node_count() const noexcept { return leaves.size() + merges.size(); }
  // Leaf labels under `node`, sorted.
  std::vector<std::string> members(std::size_t node) const;
  double height(std::size_t node) const { return node < leaves.size() ? 0.0 : merges[node - leaves.size()].height; }
};

enum class Linkage { average };

// Repeatedly joins the closest pair of clusters. After A and B merge, the
// distance to any C is (|A| d(A,C) + |B| d(B,C)) / (|A| + |B|). Ties (within
// 1e-12) go to the lexicographically smallest pair of cluster labels, where a
// cluster is labeled by its smallest leaf label; the left child is the one
// with the smaller label.
Dendrogram agglomerate(const SquareMatrix& distances, Linkage linkage = Linkage::average);

enum class RenderFormat { newick, dot, svg };

RenderFormat parse_render_format(std::string_view name);

// Newick with branch lengths equal to the height difference to the parent.
std::string to_newick(const Dendrogram& tree);
std::string to_dot(const Dendrogram& tree);
// Self-contained SVG; merge heights map linearly to the vertical axis.
std::string dendrogram_svg(const Dendrogram& tree);
// Self-contained SVG value grid, one cell per entry, values to 2 decimals.
std::string heatmap_svg(const SquareMatrix& matrix);

std::string render(const Dendrogram& tree, RenderFormat format);
// Matrices only render as SVG heatmaps; other formats are a usage error.
std::string render(const SquareMatrix& matrix, RenderFormat format);

}  // namespace partysim
