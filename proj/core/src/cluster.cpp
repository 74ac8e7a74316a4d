#include "partysim/cluster.hpp"

#include "partysim/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace partysim {

namespace {

constexpr double kTieTolerance = 1e-12;

struct Cluster {
  std::size_t node;
  std::size_t size;
  std::string label;  // smallest leaf label
};

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string newick_label(const std::string& label) {
  if (label.find_first_of(" \t\n()[]':;,") == std::string::npos && !label.empty()) return label;
  std::string out = "'";
  for (char c : label) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

std::vector<std::string> Dendrogram::members(std::size_t node) const {
  std::vector<std::string> out;
  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    const auto n = stack.back();
    stack.pop_back();
    if (n < leaves.size()) {
      out.push_back(leaves[n]);
    } else {
      const auto& m = merges.at(n - leaves.size());
      stack.push_back(m.left);
      stack.push_back(m.right);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Dendrogram agglomerate(const SquareMatrix& distances, Linkage /*linkage*/) {
  if (distances.role() != MatrixRole::distance) {
    throw Error(ErrorCode::matrix_role, "clustering expects a distance matrix");
  }
  const std::size_t k = distances.size();
  if (k < 2) throw Error(ErrorCode::too_few_groups, "clustering needs at least 2 leaves");
  if (!distances.values().allFinite()) throw Error(ErrorCode::data, "distance matrix contains NaN");

  Dendrogram tree;
  tree.leaves = distances.labels();

  std::vector<Cluster> active;
  for (std::size_t i = 0; i < k; ++i) active.push_back({i, 1, tree.leaves[i]});
  // Distances between active clusters keyed by node id.
  std::map<std::pair<std::size_t, std::size_t>, double> dist;
  auto key = [](std::size_t a, std::size_t b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) dist[key(i, j)] = distances(i, j);
  }

  while (active.size() > 1) {
    std::size_t best_a = 0;
    std::size_t best_b = 0;
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::string, std::string> best_labels;
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        const double d = dist.at(key(active[a].node, active[b].node));
        auto labels = std::minmax(active[a].label, active[b].label);
        const bool better = d < best - kTieTolerance ||
                            (std::abs(d - best) <= kTieTolerance &&
                             std::make_pair(labels.first, labels.second) < best_labels);
        if (better) {
          best = d;
          best_a = a;
          best_b = b;
          best_labels = {labels.first, labels.second};
        }
      }
    }
    Cluster ca = active[best_a];
    Cluster cb = active[best_b];
    if (cb.label < ca.label) std::swap(ca, cb);
    const std::size_t node = k + tree.merges.size();
    tree.merges.push_back({ca.node, cb.node, best, ca.size + cb.size});

    active.erase(active.begin() + static_cast<std::ptrdiff_t>(std::max(best_a, best_b)));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(std::min(best_a, best_b)));
    const double wa = static_cast<double>(ca.size);
    const double wb = static_cast<double>(cb.size);
    for (const auto& c : active) {
      const double d = (wa * dist.at(key(ca.node, c.node)) + wb * dist.at(key(cb.node, c.node))) / (wa + wb);
      dist[key(node, c.node)] = d;
    }
    active.push_back({node, ca.size + cb.size, std::min(ca.label, cb.label)});
  }
  return tree;
}

RenderFormat parse_render_format(std::string_view name) {
  if (name == "newick" || name == "nwk") return RenderFormat::newick;
  if (name == "dot") return RenderFormat::dot;
  if (name == "svg") return RenderFormat::svg;
  throw Error(ErrorCode::usage, "unsupported render format '" + std::string(name) + "' (expected newick, dot, svg)");
}

std::string to_newick(const Dendrogram& tree) {
  const std::size_t k = tree.leaves.size();
  auto emit = [&](auto&& self, std::size_t node, double parent_height) -> std::string {
    std::string s;
    if (node < k) {
      s = newick_label(tree.leaves[node]);
    } else {
      const auto& m = tree.merges[node - k];
      s = "(" + self(self, m.left, m.height) + "," + self(self, m.right, m.height) + ")";
    }
    return s + ":" + format_double(parent_height - tree.height(node));
  };
  if (tree.merges.empty()) return newick_label(tree.leaves.at(0)) + ";";
  const auto& m = tree.merges.back();
  return "(" + emit(emit, m.left, m.height) + "," + emit(emit, m.right, m.height) + ");";
}

std::string to_dot(const Dendrogram& tree) {
  const std::size_t k = tree.leaves.size();
  std::ostringstream out;
  out << "digraph dendrogram {\n  node [shape=box];\n";
  for (std::size_t i = 0; i < k; ++i) {
    out << "  n" << i << " [label=\"" << xml_escape(tree.leaves[i]) << "\"];\n";
  }
  for (std::size_t m = 0; m < tree.merges.size(); ++m) {
    const auto node = k + m;
    const auto& merge = tree.merges[m];
    out << "  n" << node << " [shape=point, xlabel=\"" << format_double(merge.height) << "\"];\n";
    out << "  n" << node << " -> n" << merge.left << ";\n";
    out << "  n" << node << " -> n" << merge.right << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string dendrogram_svg(const Dendrogram& tree) {
  const std::size_t k = tree.leaves.size();
  constexpr double spacing = 70.0;
  constexpr double margin = 50.0;
  constexpr double plot_height = 260.0;
  const double width = 2 * margin + spacing * static_cast<double>(std::max<std::size_t>(k, 2) - 1);
  const double height = plot_height + 2 * margin + 30.0;
  const double baseline = margin + plot_height;
  double max_h = 0.0;
  for (const auto& m : tree.merges) max_h = std::max(max_h, m.height);
  if (max_h <= 0.0) max_h = 1.0;

  // Leaf order from a left-first traversal so branches never cross.
  std::vector<double> x(tree.node_count(), 0.0);
  std::vector<std::size_t> order;
  if (tree.merges.empty()) {
    order.push_back(0);
  } else {
    std::vector<std::size_t> stack{tree.node_count() - 1};
    while (!stack.empty()) {
      const auto n = stack.back();
      stack.pop_back();
      if (n < k) {
        order.push_back(n);
      } else {
        stack.push_back(tree.merges[n - k].right);
        stack.push_back(tree.merges[n - k].left);
      }
    }
  }
  for (std::size_t i = 0; i < order.size(); ++i) x[order[i]] = margin + spacing * static_cast<double>(i);
  auto y = [&](double h) { return baseline - plot_height * h / max_h; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt("%.0f", width) << "\" height=\""
      << fmt("%.0f", height) << "\" viewBox=\"0 0 " << fmt("%.0f", width) << ' ' << fmt("%.0f", height) << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "  <g stroke=\"black\" stroke-width=\"1.5\" fill=\"none\">\n";
  for (std::size_t m = 0; m < tree.merges.size(); ++m) {
    const auto node = k + m;
    const auto& merge = tree.merges[m];
    x[node] = 0.5 * (x[merge.left] + x[merge.right]);
    const double yn = y(merge.height);
    out << "    <path d=\"M" << fmt("%.1f", x[merge.left]) << ' ' << fmt("%.1f", y(tree.height(merge.left))) << " V"
        << fmt("%.1f", yn) << " H" << fmt("%.1f", x[merge.right]) << " V" << fmt("%.1f", y(tree.height(merge.right)))
        << "\"/>\n";
  }
  out << "  </g>\n";
  out << "  <g font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">\n";
  for (std::size_t i = 0; i < k; ++i) {
    out << "    <text x=\"" << fmt("%.1f", x[i]) << "\" y=\"" << fmt("%.1f", baseline + 18) << "\">"
        << xml_escape(tree.leaves[i]) << "</text>\n";
  }
  for (std::size_t m = 0; m < tree.merges.size(); ++m) {
    const auto& merge = tree.merges[m];
    out << "    <text x=\"" << fmt("%.1f", x[k + m]) << "\" y=\"" << fmt("%.1f", y(merge.height) - 4)
        << "\" font-size=\"9\" fill=\"#555\">" << fmt("%.2f", merge.height) << "</text>\n";
  }
  out << "  </g>\n";
  out << "  <line x1=\"" << fmt("%.1f", margin / 2) << "\" y1=\"" << fmt("%.1f", y(0)) << "\" x2=\""
      << fmt("%.1f", margin / 2) << "\" y2=\"" << fmt("%.1f", y(max_h)) << "\" stroke=\"#888\"/>\n";
  out << "</svg>\n";
  return out.str();
}

std::string heatmap_svg(const SquareMatrix& matrix) {
  const std::size_t k = matrix.size();
  constexpr double cell = 56.0;
  constexpr double label_space = 90.0;
  const double side = label_space + cell * static_cast<double>(k) + 10.0;
  const auto& v = matrix.values();
  const double lo = k > 0 ? v.minCoeff() : 0.0;
  const double hi = k > 0 ? v.maxCoeff() : 1.0;
  const double span = hi > lo ? hi - lo : 1.0;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt("%.0f", side) << "\" height=\""
      << fmt("%.0f", side) << "\" viewBox=\"0 0 " << fmt("%.0f", side) << ' ' << fmt("%.0f", side) << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "  <g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t i = 0; i < k; ++i) {
    const double pos = label_space + cell * (static_cast<double>(i) + 0.5);
    const auto label = xml_escape(matrix.labels()[i]);
    out << "    <text x=\"" << fmt("%.1f", label_space - 6) << "\" y=\"" << fmt("%.1f", pos + 4)
        << "\" text-anchor=\"end\">" << label << "</text>\n";
    out << "    <text x=\"" << fmt("%.1f", pos) << "\" y=\"" << fmt("%.1f", label_space - 8)
        << "\" text-anchor=\"middle\">" << label << "</text>\n";
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double t = (matrix(i, j) - lo) / span;
      const int shade = static_cast<int>(std::lround(255.0 - 175.0 * t));
      char color[16];
      std::snprintf(color, sizeof(color), "#%02x%02xff", shade, shade);
      const double cx = label_space + cell * static_cast<double>(j);
      const double cy = label_space + cell * static_cast<double>(i);
      out << "    <rect class=\"cell\" x=\"" << fmt("%.1f", cx) << "\" y=\"" << fmt("%.1f", cy) << "\" width=\""
          << fmt("%.1f", cell) << "\" height=\"" << fmt("%.1f", cell) << "\" fill=\"" << color
          << "\" stroke=\"white\"/>\n";
      out << "    <text x=\"" << fmt("%.1f", cx + cell / 2) << "\" y=\"" << fmt("%.1f", cy + cell / 2 + 4)
          << "\" text-anchor=\"middle\">" << fmt("%.2f", matrix(i, j)) << "</text>\n";
    }
  }
  out << "  </g>\n</svg>\n";
  return out.str();
}

std::string render(const Dendrogram& tree, RenderFormat format) {
  switch (format) {
    case RenderFormat::newick: return to_newick(tree) + "\n";
    case RenderFormat::dot: return to_dot(tree);
    case RenderFormat::svg: return dendrogram_svg(tree);
  }
  throw Error(ErrorCode::usage, "unsupported render format");
}

std::string render(const SquareMatrix& matrix, RenderFormat format) {
  if (format != RenderFormat::svg) {
    throw Error(ErrorCode::usage, "matrices can only be rendered as svg; cluster them first for newick or dot");
  }
  return heatmap_svg(matrix);
}

}  // namespace partysim
