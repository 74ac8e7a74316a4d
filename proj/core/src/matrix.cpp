#include "partysim/matrix.hpp"

#include "csv.hpp"
#include "partysim/error.hpp"

#include "json_include.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace partysim {

using nlohmann::json;

std::string_view to_string(MatrixRole role) noexcept {
  return role == MatrixRole::similarity ? "similarity" : "distance";
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

SquareMatrix::SquareMatrix(std::vector<std::string> labels, Eigen::MatrixXd values, MatrixRole role)
    : labels_(std::move(labels)), values_(std::move(values)), role_(role) {
  const auto k = static_cast<Eigen::Index>(labels_.size());
  if (values_.rows() != k || values_.cols() != k) {
    throw Error(ErrorCode::shape, "matrix is " + std::to_string(values_.rows()) + "x" + std::to_string(values_.cols()) +
                                      " but has " + std::to_string(k) + " labels");
  }
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw Error(ErrorCode::uniqueness, "duplicate matrix label '" + l + "'");
  }
  if (!values_.allFinite()) throw Error(ErrorCode::data, "matrix contains non-finite values");
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      if (std::abs(values_(i, j) - values_(j, i)) > kSymmetryTolerance) {
        throw Error(ErrorCode::matrix_role, "matrix is not symmetric at (" + labels_[i] + ", " + labels_[j] + ")");
      }
    }
  }
  if (role_ == MatrixRole::distance) {
    for (Eigen::Index i = 0; i < k; ++i) {
      if (values_(i, i) != 0.0) throw Error(ErrorCode::matrix_role, "distance matrix has non-zero diagonal");
      for (Eigen::Index j = 0; j < k; ++j) {
        if (values_(i, j) < 0.0) throw Error(ErrorCode::matrix_role, "distance matrix has negative entries");
      }
    }
  }
}

std::optional<std::size_t> SquareMatrix::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  return std::nullopt;
}

SquareMatrix SquareMatrix::reordered(const std::vector<std::string>& order) const {
  const std::set<std::string> mine(labels_.begin(), labels_.end());
  const std::set<std::string> theirs(order.begin(), order.end());
  if (mine != theirs || order.size() != labels_.size()) {
    std::ostringstream msg;
    msg << "label sets differ;";
    for (const auto& l : mine) {
      if (!theirs.contains(l)) msg << " only-left:" << l;
    }
    for (const auto& l : theirs) {
      if (!mine.contains(l)) msg << " only-right:" << l;
    }
    throw Error(ErrorCode::alignment, msg.str());
  }
  std::vector<Eigen::Index> src;
  src.reserve(order.size());
  for (const auto& l : order) src.push_back(static_cast<Eigen::Index>(*index_of(l)));
  const auto k = static_cast<Eigen::Index>(order.size());
  Eigen::MatrixXd v(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) v(i, j) = values_(src[i], src[j]);
  }
  return SquareMatrix(order, std::move(v), role_);
}

std::vector<double> SquareMatrix::upper_triangle() const {
  std::vector<double> out;
  const auto k = values_.rows();
  out.reserve(static_cast<std::size_t>(k * (k - 1) / 2));
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) out.push_back(values_(i, j));
  }
  return out;
}

void write_matrix_json(const MatrixDocument& doc, std::ostream& out) {
  const auto& m = doc.matrix;
  json values = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m(i, j));
    values.push_back(std::move(row));
  }
  json obj = json::object();
  obj["labels"] = m.labels();
  obj["values"] = std::move(values);
  obj["role"] = std::string(to_string(m.role()));
  if (doc.variant) obj["variant"] = *doc.variant;
  if (!doc.directional.empty()) obj["directional"] = doc.directional;
  out << obj.dump(2) << '\n';
}

void write_matrix_csv(const SquareMatrix& matrix, std::ostream& out) {
  out << "label";
  for (const auto& l : matrix.labels()) {
    out << ',';
    detail::write_csv_field(out, l);
  }
  out << '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    detail::write_csv_field(out, matrix.labels()[i]);
    for (std::size_t j = 0; j < matrix.size(); ++j) out << ',' << format_double(matrix(i, j));
    out << '\n';
  }
}

MatrixDocument read_matrix_json(std::istream& in) {
  json obj;
  try {
    obj = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::format, std::string("matrix file is not valid JSON: ") + e.what());
  }
  try {
    auto labels = obj.at("labels").get<std::vector<std::string>>();
    const auto rows = obj.at("values").get<std::vector<std::vector<double>>>();
    const auto role_name = obj.at("role").get<std::string>();
    MatrixRole role;
    if (role_name == "similarity") {
      role = MatrixRole::similarity;
    } else if (role_name == "distance") {
      role = MatrixRole::distance;
    } else {
      throw Error(ErrorCode::format, "unknown matrix role '" + role_name + "'");
    }
    const auto k = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd v(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != k) throw Error(ErrorCode::shape, "matrix rows are ragged");
      for (Eigen::Index j = 0; j < k; ++j) v(i, j) = rows[i][j];
    }
    MatrixDocument doc{SquareMatrix(std::move(labels), std::move(v), role), std::nullopt, {}};
    if (auto it = obj.find("variant"); it != obj.end() && it->is_string()) doc.variant = it->get<std::string>();
    if (auto it = obj.find("directional"); it != obj.end() && it->is_object()) {
      doc.directional = it->get<std::map<std::string, double>>();
    }
    return doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, std::string("malformed matrix JSON: ") + e.what());
  }
}

void save_matrix(const MatrixDocument& doc, const std::filesystem::path& path, MatrixFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  if (format == MatrixFormat::json) {
    write_matrix_json(doc, out);
  } else {
    write_matrix_csv(doc.matrix, out);
  }
}

MatrixDocument load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return read_matrix_json(in);
}

}  // namespace partysim
