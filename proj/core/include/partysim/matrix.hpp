#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace partysim {

enum class MatrixRole { similarity, distance };

std::string_view to_string(MatrixRole role) noexcept;

/// Labeled k x k matrix of finite values.
///
/// Labels are unique. Symmetry is enforced to 1e-9; a distance matrix must
/// additionally be non-negative with a zero diagonal.
class SquareMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-9;

  SquareMatrix(std::vector<std::string> labels, Eigen::MatrixXd values, MatrixRole role);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  MatrixRole role() const noexcept { return role_; }

  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  std::optional<std::size_t> index_of(const std::string& label) const;

  // Same matrix with rows and columns reordered to `order` (a permutation of
  // the labels). Throws alignment errors listing the label differences.
  SquareMatrix reordered(const std::vector<std::string>& order) const;

  // Strict upper triangle, row by row.
  std::vector<double> upper_triangle() const;

 private:
  std::vector<std::string> labels_;
  Eigen::MatrixXd values_;
  MatrixRole role_;
};

/// A matrix plus the optional annotations carried by the JSON format.
struct MatrixDocument {
  SquareMatrix matrix;
  std::optional<std::string> variant;
  // Directional scores keyed "A->B" (twin variants only).
  std::map<std::string, double> directional;
};

void write_matrix_json(const MatrixDocument& doc, std::ostream& out);
void write_matrix_csv(const SquareMatrix& matrix, std::ostream& out);
MatrixDocument read_matrix_json(std::istream& in);

enum class MatrixFormat { json, csv };

void save_matrix(const MatrixDocument& doc, const std::filesystem::path& path, MatrixFormat format);
MatrixDocument load_matrix(const std::filesystem::path& path);

// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace partysim
