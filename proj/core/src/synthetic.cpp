#include "partysim/synthetic.hpp"

#include "partysim/error.hpp"
#include "partysim/random.hpp"

#include <Eigen/Core>

#include <cstdio>
#include <limits>

namespace partysim {

namespace {

Eigen::VectorXd random_direction(Rng& rng, std::size_t dim) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  do {
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = rng.normal();
  } while (v.norm() == 0.0);
  return v.normalized();
}

std::string party_name(std::size_t p) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "party_%02zu", p + 1);
  return buf;
}

}  // namespace

PlantedCorpus make_planted_corpus(const PlantedOptions& o) {
  if (o.parties < 2 || o.sentences_per_party < 1 || o.dim < 2 || o.domains < 1 || o.latent_dim == 1) {
    throw Error(ErrorCode::usage, "planted corpus needs >= 2 parties, >= 1 sentence, dim >= 2, >= 1 domain and latent_dim != 1");
  }
  if (!(o.separation_over_sigma > 0.0)) throw Error(ErrorCode::usage, "separation_over_sigma must be positive");

  Rng rng(o.seed);
  const std::size_t latent = o.latent_dim == 0 || o.latent_dim >= o.dim ? o.dim : o.latent_dim;
  std::vector<Eigen::VectorXd> basis;
  while (basis.size() < latent) {
    Eigen::VectorXd v = random_direction(rng, o.dim);
    for (const auto& b : basis) v -= v.dot(b) * b;
    if (v.norm() > 1e-6) basis.push_back(v.normalized());
  }
  std::vector<Eigen::VectorXd> means;
  for (std::size_t p = 0; p < o.parties; ++p) {
    const Eigen::VectorXd coords = random_direction(rng, latent);
    Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(o.dim));
    for (std::size_t b = 0; b < latent; ++b) m += coords(static_cast<Eigen::Index>(b)) * basis[b];
    means.push_back(o.mean_radius * m.normalized());
  }
  std::vector<Eigen::VectorXd> topics;
  for (std::size_t d = 0; d < o.domains; ++d) topics.push_back(o.domain_scale * random_direction(rng, o.dim));
  const Eigen::VectorXd offset = o.common_offset * random_direction(rng, o.dim);
  const Eigen::VectorXd nuisance_axis = random_direction(rng, o.dim);

  const auto k = static_cast<Eigen::Index>(o.parties);
  Eigen::MatrixXd planted = Eigen::MatrixXd::Zero(k, k);
  double min_sep = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a + 1; b < k; ++b) {
      const double d = (means[static_cast<std::size_t>(a)] - means[static_cast<std::size_t>(b)]).norm();
      planted(a, b) = planted(b, a) = d;
      min_sep = std::min(min_sep, d);
    }
  }
  const double sigma = min_sep / o.separation_over_sigma;

  std::vector<std::string> labels;
  std::vector<SentenceRecord> records;
  EmbeddingStore store(o.dim);
  std::vector<float> row(o.dim);
  for (std::size_t p = 0; p < o.parties; ++p) {
    labels.push_back(party_name(p));
    for (std::size_t s = 0; s < o.sentences_per_party; ++s) {
      const std::size_t domain = rng.uniform_index(o.domains);
      SentenceRecord r;
      char id[32];
      std::snprintf(id, sizeof(id), "p%02zu_s%05zu", p + 1, s);
      r.id = id;
      r.text = "synthetic sentence " + r.id;
      r.party = labels.back();
      r.domain = "domain_" + std::to_string(domain + 1);
      r.is_claim = rng.uniform() < o.claim_fraction;
      Eigen::VectorXd v = means[p] + topics[domain] + offset;
      for (Eigen::Index c = 0; c < v.size(); ++c) v(c) += sigma * rng.normal();
      if (o.nuisance_scale > 0.0) v += o.nuisance_scale * rng.normal() * nuisance_axis;
      for (std::size_t c = 0; c < o.dim; ++c) row[c] = static_cast<float>(v(static_cast<Eigen::Index>(c)));
      store.add(r.id, row);
      records.push_back(std::move(r));
    }
  }
  return PlantedCorpus{Corpus(std::move(records)), std::move(store),
                       SquareMatrix(std::move(labels), std::move(planted), MatrixRole::distance), sigma, min_sep};
}

}  // namespace partysim
