#include "partysim/inference.hpp"

#include "partysim/error.hpp"
#include "partysim/log.hpp"
#include "partysim/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace partysim {

std::string_view to_string(CorrelationMethod m) noexcept {
  return m == CorrelationMethod::spearman ? "spearman" : "pearson";
}

std::string_view to_string(MantelMode m) noexcept { return m == MantelMode::exact ? "exact" : "sampled"; }

CorrelationMethod parse_method(std::string_view name) {
  if (name == "spearman") return CorrelationMethod::spearman;
  if (name == "pearson") return CorrelationMethod::pearson;
  throw Error(ErrorCode::usage, "unknown correlation method '" + std::string(name) + "'");
}

SquareMatrix sim_to_dist(const SquareMatrix& similarity) {
  const std::size_t k = similarity.size();
  if (k < 3) throw Error(ErrorCode::too_few_groups, "at least 3 groups are needed, got " + std::to_string(k));
  const auto off = similarity.upper_triangle();
  const auto [lo_it, hi_it] = std::minmax_element(off.begin(), off.end());
  const double lo = *lo_it;
  const double hi = *hi_it;

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  if (hi - lo <= 0.0) {
    log::warn("similarity matrix has constant off-diagonal values; distances are all zero");
    return SquareMatrix(similarity.labels(), std::move(d), MatrixRole::distance);
  }
  const bool unit_range = lo >= 0.0 && hi <= 1.0;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < d.cols(); ++j) {
      double s = similarity(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (!unit_range) s = (s - lo) / (hi - lo);
      const double v = std::clamp(1.0 - s, 0.0, 1.0);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return SquareMatrix(similarity.labels(), std::move(d), MatrixRole::distance);
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j - 1) + 1.0;
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = rank;
    i = j;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::shape, "correlation needs two equal-length samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw Error(ErrorCode::data, "correlation undefined for a constant sample");
  return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

namespace {

std::size_t factorial(std::size_t k) {
  std::size_t f = 1;
  for (std::size_t i = 2; i <= k; ++i) f *= i;
  return f;
}

// Correlation of a fixed first triangle against the second matrix
// relabeled by a permutation. The second matrix's triangle always holds the
// same multiset of values, so its mean and spread are permutation-invariant
// and only the cross term depends on the relabeling.
class PermutedCorrelation {
 public:
  PermutedCorrelation(const SquareMatrix& first, const SquareMatrix& second, CorrelationMethod method)
      : k_(first.size()), y_(static_cast<Eigen::Index>(k_), static_cast<Eigen::Index>(k_)) {
    auto x = first.upper_triangle();
    auto y = second.upper_triangle();
    if (method == CorrelationMethod::spearman) {
      x = average_ranks(x);
      y = average_ranks(y);
    }
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0;
    double syy = 0.0;
    x_centered_.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x_centered_[i] = x[i] - mx;
      sxx += x_centered_[i] * x_centered_[i];
      syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) {
      throw Error(ErrorCode::data, "Mantel correlation undefined: a distance matrix has constant off-diagonal values");
    }
    denom_ = std::sqrt(sxx * syy);
    std::size_t t = 0;
    y_.setZero();
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t j = i + 1; j < k_; ++j, ++t) {
        y_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = y[t] - my;
        y_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = y[t] - my;
      }
    }
  }

  double operator()(const std::vector<std::size_t>& perm) const {
    double sxy = 0.0;
    std::size_t t = 0;
    for (std::size_t i = 0; i < k_; ++i) {
      const auto pi = static_cast<Eigen::Index>(perm[i]);
      for (std::size_t j = i + 1; j < k_; ++j, ++t) {
        sxy += x_centered_[t] * y_(pi, static_cast<Eigen::Index>(perm[j]));
      }
    }
    return sxy / denom_;
  }

 private:
  std::size_t k_;
  std::vector<double> x_centered_;
  Eigen::MatrixXd y_;  // centered second triangle, mirrored
  double denom_ = 1.0;
};

}  // namespace

MantelResult mantel_test(const SquareMatrix& first, const SquareMatrix& second, const MantelOptions& options) {
  if (first.role() != MatrixRole::distance || second.role() != MatrixRole::distance) {
    throw Error(ErrorCode::matrix_role, "Mantel test expects two distance matrices");
  }
  const std::size_t k = first.size();
  if (k < 3) throw Error(ErrorCode::too_few_groups, "Mantel test needs at least 3 objects, got " + std::to_string(k));
  const SquareMatrix aligned = second.reordered(first.labels());

  MantelMode mode = k <= options.exact_max_k ? MantelMode::exact : MantelMode::sampled;
  if (options.force_mode) mode = *options.force_mode;
  if (mode == MantelMode::exact && k > 10) {
    throw Error(ErrorCode::usage, "exact enumeration is limited to k <= 10");
  }
  if (mode == MantelMode::sampled && options.permutations == 0) {
    throw Error(ErrorCode::usage, "sampled Mantel test needs a positive permutation count");
  }

  const PermutedCorrelation corr(first, aligned, options.method);
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  MantelResult result;
  result.method = options.method;
  result.mode = mode;
  result.seed = options.seed;
  result.r = std::clamp(corr(perm), -1.0, 1.0);
  const double threshold = std::abs(result.r) - kMantelTieTolerance;

  if (mode == MantelMode::exact) {
    do {
      if (std::abs(corr(perm)) >= threshold) ++result.extreme;
    } while (std::next_permutation(perm.begin(), perm.end()));
    result.permutations_used = factorial(k);
    result.p = static_cast<double>(result.extreme) / static_cast<double>(result.permutations_used);
  } else {
    Rng rng(options.seed);
    for (std::size_t s = 0; s < options.permutations; ++s) {
      rng.shuffle(std::span<std::size_t>(perm));
      if (std::abs(corr(perm)) >= threshold) ++result.extreme;
    }
    result.permutations_used = options.permutations;
    result.p = static_cast<double>(1 + result.extreme) / static_cast<double>(1 + result.permutations_used);
  }
  return result;
}

}  // namespace partysim
