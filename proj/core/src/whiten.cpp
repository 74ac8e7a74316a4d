#include "partysim/whiten.hpp"

#include "partysim/error.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

namespace partysim {

WhiteningModel fit_whitening(const Eigen::MatrixXd& samples, double eps) {
  const Eigen::Index n = samples.rows();
  const Eigen::Index d = samples.cols();
  if (n < 2) throw Error(ErrorCode::insufficient_data, "whitening needs at least 2 samples, got " + std::to_string(n));
  if (d < 1) throw Error(ErrorCode::shape, "whitening needs at least one dimension");
  if (!samples.allFinite()) throw Error(ErrorCode::data, "whitening input contains non-finite values");
  if (!(eps > 0.0)) throw Error(ErrorCode::value, "eigenvalue floor must be positive");

  WhiteningModel model;
  model.eps = eps;
  model.mean = samples.colwise().mean();
  const Eigen::MatrixXd centered = samples.rowwise() - model.mean;
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
  cov = 0.5 * (cov + cov.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::data, "covariance eigendecomposition failed");

  // Eigen returns ascending eigenvalues.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return solver.eigenvalues()(a) > solver.eigenvalues()(b);
  });

  model.eigenvalues.resize(d);
  model.transform.resize(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    const Eigen::Index src = order[static_cast<std::size_t>(c)];
    const double lambda = solver.eigenvalues()(src);
    Eigen::VectorXd u = solver.eigenvectors().col(src);
    Eigen::Index pivot = 0;
    u.cwiseAbs().maxCoeff(&pivot);
    if (u(pivot) < 0) u = -u;
    model.eigenvalues(c) = lambda;
    model.transform.col(c) = u / std::sqrt(std::max(lambda, eps));
  }
  if (!model.transform.allFinite()) throw Error(ErrorCode::data, "whitening transform is not finite");
  return model;
}

Eigen::MatrixXd to_matrix(const EmbeddingStore& store) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(store.size()), static_cast<Eigen::Index>(store.dim()));
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto row = store.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
    }
  }
  return m;
}

WhiteningModel fit_whitening(const EmbeddingStore& store, double eps) {
  return fit_whitening(to_matrix(store), eps);
}

Eigen::MatrixXd apply_whitening(const WhiteningModel& model, const Eigen::MatrixXd& vectors) {
  if (vectors.cols() != model.dim()) {
    throw Error(ErrorCode::shape, "vectors have dimension " + std::to_string(vectors.cols()) + ", model expects " +
                                      std::to_string(model.dim()));
  }
  return (vectors.rowwise() - model.mean) * model.transform;
}

EmbeddingStore apply_whitening(const WhiteningModel& model, const EmbeddingStore& store) {
  const Eigen::MatrixXd out = apply_whitening(model, to_matrix(store));
  EmbeddingStore result(store.dim());
  std::vector<float> row(store.dim());
  for (std::size_t i = 0; i < store.size(); ++i) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      row[k] = static_cast<float>(out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
    }
    result.add(store.ids()[i], row);
  }
  return result;
}

namespace {

constexpr std::array<char, 4> kMagic = {'W', 'H', 'T', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw Error(ErrorCode::format, "truncated WHT1 payload");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
  return v;
}

float get_f32(std::istream& in) { return std::bit_cast<float>(get_le<std::uint32_t>(in)); }

}  // namespace

void write_whitening(const WhiteningModel& model, std::ostream& out) {
  const auto d = model.dim();
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, static_cast<std::uint32_t>(d));
  put_u64(out, std::bit_cast<std::uint64_t>(model.eps));
  for (Eigen::Index k = 0; k < d; ++k) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(model.mean(k))));
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(model.transform(r, c))));
    }
  }
}

WhiteningModel read_whitening(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw Error(ErrorCode::format, "not a WHT1 file (bad magic)");
  }
  const auto d = static_cast<Eigen::Index>(get_le<std::uint32_t>(in));
  if (d == 0) throw Error(ErrorCode::format, "WHT1 header declares d=0");
  WhiteningModel model;
  model.eps = std::bit_cast<double>(get_le<std::uint64_t>(in));
  model.mean.resize(d);
  for (Eigen::Index k = 0; k < d; ++k) model.mean(k) = get_f32(in);
  model.transform.resize(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) model.transform(r, c) = get_f32(in);
  }
  if (!model.mean.allFinite() || !model.transform.allFinite()) {
    throw Error(ErrorCode::format, "WHT1 payload contains non-finite values");
  }
  return model;
}

void save_whitening(const WhiteningModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  write_whitening(model, out);
}

WhiteningModel load_whitening(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return read_whitening(in);
}

}  // namespace partysim
