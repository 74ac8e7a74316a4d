#pragma once

// Brute-force reference implementations. They intentionally share no code
// with the library paths they check: everything is recomputed from the raw
// inputs with plain loops.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

inline double cosine(const Vec& a, const Vec& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / std::sqrt(na * nb);
}

struct Sentence {
  std::string id;
  Vec v;
};

// Index (into target) of the max-cosine target; ties go to the smallest id.
inline std::size_t twin(const Vec& s, const std::vector<Sentence>& target) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& t : target) best = std::max(best, cosine(s, t.v));
  std::size_t pick = target.size();
  for (std::size_t j = 0; j < target.size(); ++j) {
    if (cosine(s, target[j].v) >= best - 1e-12 && (pick == target.size() || target[j].id < target[pick].id)) pick = j;
  }
  return pick;
}

inline double max_inter(const std::vector<Sentence>& set) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = 0; j < set.size(); ++j) {
      if (i != j) best = std::max(best, cosine(set[i].v, set[j].v));
    }
  }
  return best;
}

inline double twin_score(const std::vector<Sentence>& source, const std::vector<Sentence>& target) {
  double sum = 0;
  for (const auto& s : source) sum += cosine(s.v, target[twin(s.v, target)].v);
  return sum / (static_cast<double>(source.size()) * (max_inter(source) + max_inter(target)));
}

// Spearman with average ranks, computed the quadratic way.
inline Vec naive_ranks(const Vec& x) {
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] < x[i]) less += 1;
      if (j != i && x[j] == x[i]) equal += 1;
    }
    r[i] = 1 + less + equal / 2;
  }
  return r;
}

inline double naive_pearson(const Vec& x, const Vec& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

using Table = std::vector<Vec>;

inline Vec flatten_upper(const Table& m) {
  Vec out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) out.push_back(m[i][j]);
  }
  return out;
}

struct MantelCount {
  double r_obs;
  std::size_t extreme;
  std::size_t total;
};

// Materializes every relabeled copy of `b`, flattens it and recomputes the
// rank correlation from scratch.
inline MantelCount mantel_exact(const Table& a, const Table& b, bool spearman = true) {
  const std::size_t k = a.size();
  auto corr = [&](const Vec& x, const Vec& y) {
    return spearman ? naive_pearson(naive_ranks(x), naive_ranks(y)) : naive_pearson(x, y);
  };
  const Vec x = flatten_upper(a);
  const double r_obs = corr(x, flatten_upper(b));
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  MantelCount out{r_obs, 0, 0};
  do {
    Table pb(k, Vec(k));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) pb[i][j] = b[perm[i]][perm[j]];
    }
    if (std::abs(corr(x, flatten_upper(pb))) >= std::abs(r_obs) - 1e-12) ++out.extreme;
    ++out.total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

struct OracleMerge {
  std::set<std::string> left, right;
  double height;
};

// Average linkage by rescanning: the distance of two clusters is always the
// mean over all their leaf pairs in the original table.
inline std::vector<OracleMerge> agglomerate(const std::vector<std::string>& labels, const Table& d) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < labels.size(); ++i) clusters.push_back({i});
  auto label_of = [&](const std::vector<std::size_t>& c) {
    std::string best = labels[c[0]];
    for (auto i : c) best = std::min(best, labels[i]);
    return best;
  };
  auto to_set = [&](const std::vector<std::size_t>& c) {
    std::set<std::string> s;
    for (auto i : c) s.insert(labels[i]);
    return s;
  };
  std::vector<OracleMerge> merges;
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 0;
    std::pair<std::string, std::string> best_key;
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        double sum = 0;
        for (auto i : clusters[a]) {
          for (auto j : clusters[b]) sum += d[i][j];
        }
        const double avg = sum / static_cast<double>(clusters[a].size() * clusters[b].size());
        const std::string la = label_of(clusters[a]), lb = label_of(clusters[b]);
        const std::pair<std::string, std::string> k2 = la < lb ? std::make_pair(la, lb) : std::make_pair(lb, la);
        if (avg < best - 1e-12 || (std::abs(avg - best) <= 1e-12 && k2 < best_key)) {
          best = avg;
          ba = a;
          bb = b;
          best_key = k2;
        }
      }
    }
    auto ca = clusters[ba];
    auto cb = clusters[bb];
    if (label_of(cb) < label_of(ca)) std::swap(ca, cb);
    merges.push_back({to_set(ca), to_set(cb), best});
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(ba));
    ca.insert(ca.end(), cb.begin(), cb.end());
    clusters.push_back(ca);
  }
  return merges;
}

}  // namespace oracle
