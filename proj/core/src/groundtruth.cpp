#include "partysim/groundtruth.hpp"

#include "csv.hpp"
#include "partysim/error.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

namespace partysim {

StanceMatrix::StanceMatrix(std::vector<std::string> parties, std::vector<std::string> issues,
                           std::vector<std::int8_t> stances)
    : parties_(std::move(parties)), issues_(std::move(issues)), stances_(std::move(stances)) {
  if (stances_.size() != parties_.size() * issues_.size()) {
    throw Error(ErrorCode::shape, "stance table size does not match parties x issues");
  }
  if (std::set<std::string>(parties_.begin(), parties_.end()).size() != parties_.size()) {
    throw Error(ErrorCode::uniqueness, "duplicate party in stance table");
  }
  if (std::set<std::string>(issues_.begin(), issues_.end()).size() != issues_.size()) {
    throw Error(ErrorCode::uniqueness, "duplicate issue in stance table");
  }
  for (auto s : stances_) {
    if (s < -1 || s > 1) throw Error(ErrorCode::value, "stance outside {-1, 0, 1}");
  }
}

StanceMatrix read_stances(std::istream& in) {
  detail::CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header) || header.size() < 2) {
    throw Error(ErrorCode::format, "line 1: stance header must be 'party,issue_1,...'");
  }
  if (header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
  std::vector<std::string> issues(header.begin() + 1, header.end());
  std::vector<std::string> parties;
  std::vector<std::int8_t> cells;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    const auto line = reader.line();
    if (fields.size() == 1 && detail::trim(fields[0]).empty()) continue;
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::format, "line " + std::to_string(line) + ": expected " + std::to_string(header.size()) +
                                         " columns, got " + std::to_string(fields.size()));
    }
    parties.push_back(std::string(detail::trim(fields[0])));
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const auto cell = detail::trim(fields[c]);
      int v = 2;
      if (cell == "-1") {
        v = -1;
      } else if (cell == "0") {
        v = 0;
      } else if (cell == "1" || cell == "+1") {
        v = 1;
      }
      if (v == 2) {
        throw Error(ErrorCode::value, "line " + std::to_string(line) + ", column " + header[c] + ": stance '" +
                                          std::string(cell) + "' not in {-1, 0, 1}");
      }
      cells.push_back(static_cast<std::int8_t>(v));
    }
  }
  if (parties.empty()) throw Error(ErrorCode::format, "stance file has no party rows");
  return StanceMatrix(std::move(parties), std::move(issues), std::move(cells));
}

StanceMatrix load_stances(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return read_stances(in);
}

StanceMetric parse_metric(std::string_view name) {
  if (name == "hamming") return StanceMetric::hamming;
  if (name == "l1") return StanceMetric::l1;
  throw Error(ErrorCode::usage, "unknown stance metric '" + std::string(name) + "' (expected hamming or l1)");
}

SquareMatrix stance_distance_matrix(const StanceMatrix& stances, StanceMetric metric) {
  const std::size_t k = stances.party_count();
  const std::size_t m = stances.issue_count();
  if (m == 0) throw Error(ErrorCode::shape, "stance table has no issues");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      int total = 0;
      for (std::size_t j = 0; j < m; ++j) {
        const int diff = std::abs(stances.stance(a, j) - stances.stance(b, j));
        total += metric == StanceMetric::hamming ? (diff != 0 ? 1 : 0) : diff;
      }
      const double denom = metric == StanceMetric::hamming ? static_cast<double>(m) : 2.0 * static_cast<double>(m);
      const double v = total / denom;
      d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
      d(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
    }
  }
  return SquareMatrix(stances.parties(), std::move(d), MatrixRole::distance);
}

}  // namespace partysim
