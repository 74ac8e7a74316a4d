#include "partysim/pipeline.hpp"

#include "csv.hpp"
#include "partysim/cluster.hpp"
#include "partysim/error.hpp"
#include "partysim/log.hpp"
#include "partysim/whiten.hpp"

#include "json_include.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace partysim {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << text;
}

EmbeddingStore subset(const EmbeddingStore& store, const Corpus& corpus) {
  EmbeddingStore out(store.dim());
  for (const auto& r : corpus.records()) out.add(r.id, store.at(r.id));
  return out;
}

std::string config_name(Variant variant, bool whiten) {
  return std::string(to_string(variant)) + (whiten ? ".whiten" : "");
}

std::string matrix_extension(MatrixFormat format) { return format == MatrixFormat::json ? ".json" : ".csv"; }

}  // namespace

std::string mantel_json(const MantelResult& result) {
  nlohmann::json obj = nlohmann::json::object();
  obj["r"] = result.r;
  obj["p"] = result.p;
  obj["permutations_used"] = result.permutations_used;
  obj["extreme"] = result.extreme;
  obj["mode"] = std::string(to_string(result.mode));
  obj["method"] = std::string(to_string(result.method));
  obj["seed"] = result.seed;
  return obj.dump(2) + "\n";
}

PipelineReport run_configurations(const PipelineInputs& inputs, const PipelineOptions& options,
                                  const std::optional<fs::path>& out) {
  if (options.variants.empty()) throw Error(ErrorCode::usage, "at least one variant must be selected");
  if (options.whiten.empty()) throw Error(ErrorCode::usage, "at least one whitening setting must be selected");

  const Corpus corpus = filter_records(inputs.corpus, [&](const SentenceRecord& r) {
    return inputs.embeddings.contains(r.id);
  });
  if (corpus.size() < inputs.corpus.size()) {
    log::warn(std::to_string(inputs.corpus.size() - corpus.size()) +
              " sentence(s) without an embedding left out of the analysis");
  }

  if (out) {
    fs::create_directories(*out);
    save_matrix({inputs.ground_truth, std::nullopt, {}}, *out / ("groundtruth.distance" + matrix_extension(options.format)),
                options.format);
    write_text(*out / "groundtruth.heatmap.svg", heatmap_svg(inputs.ground_truth));
    const auto tree = agglomerate(inputs.ground_truth);
    write_text(*out / "groundtruth.dendrogram.nwk", to_newick(tree) + "\n");
    write_text(*out / "groundtruth.dendrogram.svg", dendrogram_svg(tree));
  }

  MantelOptions mantel_options;
  mantel_options.method = options.method;
  mantel_options.permutations = options.permutations;
  mantel_options.seed = options.seed;

  PipelineReport report;
  for (const Variant variant : options.variants) {
    for (const bool whiten : options.whiten) {
      PipelineRow row;
      row.embedding_source = inputs.embedding_source;
      row.whiten = whiten;
      row.variant = variant;
      try {
        const Corpus analysis = uses_claims(variant) ? filter_claims(corpus) : corpus;
        EmbeddingStore vectors = subset(inputs.embeddings, analysis);
        if (whiten) {
          const auto model = fit_whitening(vectors, options.whiten_eps);
          vectors = apply_whitening(model, vectors);
        }
        const auto sim = similarity_matrix(corpus, vectors, variant, options.symmetrization);
        const auto dist = sim_to_dist(sim.matrix);
        row.mantel = mantel_test(dist, inputs.ground_truth, mantel_options);

        if (out) {
          const auto base = config_name(variant, whiten);
          MatrixDocument doc{sim.matrix, std::string(to_string(variant)), {}};
          for (const auto& [pair, score] : sim.directional) doc.directional[pair.first + "->" + pair.second] = score;
          save_matrix(doc, *out / (base + ".similarity" + matrix_extension(options.format)), options.format);
          save_matrix({dist, std::string(to_string(variant)), {}},
                      *out / (base + ".distance" + matrix_extension(options.format)), options.format);
          write_text(*out / (base + ".mantel.json"), mantel_json(*row.mantel));
          const auto tree = agglomerate(dist);
          write_text(*out / (base + ".dendrogram.nwk"), to_newick(tree) + "\n");
          write_text(*out / (base + ".dendrogram.svg"), dendrogram_svg(tree));
        }
      } catch (const Error& e) {
        row.mantel.reset();
        row.error_code = std::string(to_string(e.code()));
        row.error_message = e.what();
        log::warn(config_name(variant, whiten) + " failed: " + row.error_message);
      }
      report.rows.push_back(std::move(row));
    }
  }

  if (out) {
    std::ofstream summary(*out / "summary.csv", std::ios::binary);
    if (!summary) throw Error(ErrorCode::io, "cannot write summary.csv");
    write_summary_csv(report, summary);
  }
  return report;
}

PipelineReport run_pipeline(const PipelineConfig& config) {
  if (config.embeddings.has_value() == config.word_vectors.has_value()) {
    throw Error(ErrorCode::usage, "exactly one of --embeddings and --word-vectors is required");
  }
  if (config.stances.has_value() == config.ground_truth.has_value()) {
    throw Error(ErrorCode::usage, "exactly one of --stances and --ground-truth is required");
  }

  Corpus corpus = load_corpus(config.corpus);
  std::optional<EmbeddingStore> store;
  std::string source;
  if (config.embeddings) {
    store = load_store(*config.embeddings);
    source = config.embeddings->stem().string();
  } else {
    auto table = load_word_vectors(*config.word_vectors);
    store = embed_corpus(corpus, table).store;
    source = "wordvec_avg:" + config.word_vectors->stem().string();
  }

  std::optional<SquareMatrix> truth;
  if (config.stances) {
    truth = stance_distance_matrix(load_stances(*config.stances), config.metric);
  } else {
    auto doc = load_matrix(*config.ground_truth);
    if (doc.matrix.role() == MatrixRole::similarity) {
      throw Error(ErrorCode::matrix_role, "--ground-truth must be a distance matrix");
    }
    truth = std::move(doc.matrix);
  }

  PipelineInputs inputs{std::move(corpus), std::move(*store), std::move(*truth), std::move(source)};
  return run_configurations(inputs, config.options, config.out);
}

void write_summary_csv(const PipelineReport& report, std::ostream& out) {
  out << "embedding_source,whiten,variant,mantel_r,mantel_p,mode,error\n";
  for (const auto& row : report.rows) {
    detail::write_csv_field(out, row.embedding_source);
    out << ',' << (row.whiten ? "true" : "false") << ',' << to_string(row.variant) << ',';
    if (row.mantel) {
      out << format_double(row.mantel->r) << ',' << format_double(row.mantel->p) << ',' << to_string(row.mantel->mode);
    } else {
      out << ",,";
    }
    out << ',' << row.error_code << '\n';
  }
}

}  // namespace partysim
