#pragma once

#include "partysim/matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace partysim {

/// Party-by-issue stance table with entries in {-1, 0, +1}.
class StanceMatrix {
 public:
  StanceMatrix(std::vector<std::string> parties, std::vector<std::string> issues, std::vector<std::int8_t> stances);

  const std::vector<std::string>& parties() const noexcept { return parties_; }
  const std::vector<std::string>& issues() const noexcept { return issues_; }
  std::size_t party_count() const noexcept { return parties_.size(); }
  std::size_t issue_count() const noexcept { return issues_.size(); }
  int stance(std::size_t party, std::size_t issue) const { return stances_[party * issues_.size() + issue]; }

 private:
  std::vector<std::string> parties_;
  std::vector<std::string> issues_;
  std::vector<std::int8_t> stances_;  // row-major
};

// CSV with header "party,<issue ids...>" and one row per party.
StanceMatrix load_stances(const std::filesystem::path& path);
StanceMatrix read_stances(std::istream& in);

enum class StanceMetric {
  hamming,  // fraction of issues with differing stances
  l1,       // sum |a - b| / (2m), so opposite stances count double
};

StanceMetric parse_metric(std::string_view name);

SquareMatrix stance_distance_matrix(const StanceMatrix& stances, StanceMetric metric = StanceMetric::hamming);

}  // namespace partysim
