#pragma once

#include "partysim/embeddings.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>

namespace partysim {

/// Affine map x -> (x - mean) * transform that leaves the fit set with zero
/// mean and unit covariance along every direction whose variance exceeds
/// `eps`.
///
/// `transform` columns are eigenvectors of the fit-set covariance scaled by
/// 1/sqrt(max(lambda, eps)), ordered by descending eigenvalue, each signed so
/// its largest-magnitude component is positive.
struct WhiteningModel {
  Eigen::RowVectorXd mean;
  Eigen::MatrixXd transform;
  Eigen::VectorXd eigenvalues;  // descending, unclamped
  double eps = 1e-8;

  Eigen::Index dim() const noexcept { return mean.size(); }
};

// `samples` is n x d, one observation per row. Covariance uses 1/n.
WhiteningModel fit_whitening(const Eigen::MatrixXd& samples, double eps = 1e-8);
WhiteningModel fit_whitening(const EmbeddingStore& store, double eps = 1e-8);

Eigen::MatrixXd apply_whitening(const WhiteningModel& model, const Eigen::MatrixXd& vectors);
// Same ids and order; whitened rows rounded to float.
EmbeddingStore apply_whitening(const WhiteningModel& model, const EmbeddingStore& store);

Eigen::MatrixXd to_matrix(const EmbeddingStore& store);

// WHT1: magic, u32 d, f64 eps, d f32 mean values, d*d f32 transform values
// (row-major), all little-endian.
void save_whitening(const WhiteningModel& model, const std::filesystem::path& path);
WhiteningModel load_whitening(const std::filesystem::path& path);
void write_whitening(const WhiteningModel& model, std::ostream& out);
WhiteningModel read_whitening(std::istream& in);

}  // namespace partysim
