#include "partysim/cluster.hpp"
#include "partysim/corpus.hpp"
#include "partysim/embeddings.hpp"
#include "partysim/error.hpp"
#include "partysim/groundtruth.hpp"
#include "partysim/inference.hpp"
#include "partysim/matrix.hpp"
#include "partysim/pipeline.hpp"
#include "partysim/similarity.hpp"
#include "partysim/synthetic.hpp"
#include "partysim/triplets.hpp"
#include "partysim/whiten.hpp"

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace partysim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << text;
}

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

MatrixFormat parse_matrix_format(const std::string& name) {
  if (name == "json") return MatrixFormat::json;
  if (name == "csv") return MatrixFormat::csv;
  throw Error(ErrorCode::usage, "unknown --format '" + name + "' (expected json or csv)");
}

std::string matrix_text(const MatrixDocument& doc, MatrixFormat format) {
  std::ostringstream out;
  if (format == MatrixFormat::json) {
    write_matrix_json(doc, out);
  } else {
    write_matrix_csv(doc.matrix, out);
  }
  return out.str();
}

std::vector<Variant> parse_variants(const std::string& list) {
  std::vector<Variant> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "all") {
      out = {Variant::claimdom, Variant::claim, Variant::dom, Variant::none};
      continue;
    }
    out.push_back(parse_variant(item));
  }
  if (out.empty()) throw Error(ErrorCode::usage, "--variants selects no variant");
  return out;
}

Symmetrization parse_symmetrization(const std::string& name) {
  if (name == "mean") return Symmetrization::mean;
  if (name == "forward") return Symmetrization::forward;
  throw Error(ErrorCode::usage, "unknown --symmetrization '" + name + "' (expected mean or forward)");
}

std::string stats_json(const Corpus& c) {
  std::ostringstream out;
  out << "{\"records\": " << c.size() << ", \"claims\": " << c.claim_count() << ", \"parties\": [";
  for (std::size_t i = 0; i < c.parties().size(); ++i) out << (i ? ", " : "") << '"' << c.parties()[i] << '"';
  out << "], \"domains\": " << c.domains().size() << "}\n";
  return out.str();
}

struct Args {
  std::string corpus, embeddings, word_vectors, stances, ground_truth, out, format = "json";
  std::string variants = "all", variant = "none", metric = "hamming", method = "spearman";
  std::string symmetrization = "mean";
  std::size_t permutations = 9999;
  std::uint64_t seed = 0;
  bool whiten = false, no_whiten = false, claims_only = false;
  double eps = 1e-8;
  // mantel
  std::string first, second;
  // cluster
  std::string matrix, render = "newick", heatmap;
  // triplets
  std::string scheme = "party", evaluate;
  std::size_t per_anchor = 1;
  double val_ratio = 0.2, epsilon = 1.0;
  // whiten
  std::string model;
  // ingest
  std::string convert;
  // synth
  std::size_t parties = 6, sentences = 300, dim = 32;
  double separation = 3.0, nuisance = 0.0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partysim: party similarity from sentence embeddings"};
  app.require_subcommand(1);
  Args a;

  auto* ingest = app.add_subcommand("ingest", "Validate a corpus and print its statistics");
  ingest->add_option("--corpus", a.corpus, "Corpus file (.jsonl or .csv)")->required();
  ingest->add_option("--out", a.convert, "Re-serialize the corpus here (format from the extension)");

  auto* embed = app.add_subcommand("embed-baseline", "Average word vectors into sentence embeddings (EMB1)");
  embed->add_option("--corpus", a.corpus)->required();
  embed->add_option("--word-vectors", a.word_vectors, "Text vector file: 'count dim' header, one token per row")
      ->required();
  embed->add_option("--out", a.out, "Output EMB1 file")->required();

  auto* check = app.add_subcommand("encode-check", "Check that an EMB1 file loads and covers a corpus");
  check->add_option("--corpus", a.corpus)->required();
  check->add_option("--embeddings", a.embeddings)->required();

  auto* whiten = app.add_subcommand("whiten", "Fit whitening on embeddings and write the whitened store");
  whiten->add_option("--embeddings", a.embeddings)->required();
  whiten->add_option("--out", a.out, "Output EMB1 file")->required();
  whiten->add_option("--corpus", a.corpus, "Restrict the fit and output to this corpus");
  whiten->add_flag("--claims-only", a.claims_only, "With --corpus: use only claim sentences");
  whiten->add_option("--eps", a.eps, "Eigenvalue floor")->capture_default_str();
  whiten->add_option("--model", a.model, "Also save the fitted model (WHT1)");

  auto* simmat = app.add_subcommand("simmat", "Party similarity matrix for one variant");
  simmat->add_option("--corpus", a.corpus)->required();
  simmat->add_option("--embeddings", a.embeddings)->required();
  simmat->add_option("--variant", a.variant, "claimdom, claim, dom or none")->capture_default_str();
  simmat->add_flag("--whiten", a.whiten, "Whiten on the variant's analysis set first");
  simmat->add_option("--symmetrization", a.symmetrization, "mean or forward")->capture_default_str();
  simmat->add_option("--distance", a.matrix, "Also write the derived distance matrix here");
  simmat->add_option("--out", a.out, "Output file (stdout if omitted)");
  simmat->add_option("--format", a.format, "json or csv")->capture_default_str();

  auto* truth = app.add_subcommand("groundtruth", "Distance matrix from party stances");
  truth->add_option("--stances", a.stances)->required();
  truth->add_option("--metric", a.metric, "hamming or l1")->capture_default_str();
  truth->add_option("--out", a.out, "Output file (stdout if omitted)");
  truth->add_option("--format", a.format, "json or csv")->capture_default_str();

  auto* mantel = app.add_subcommand("mantel", "Mantel test between two distance matrices (JSON)");
  mantel->add_option("--first", a.first)->required();
  mantel->add_option("--second", a.second)->required();
  mantel->add_option("--method", a.method, "spearman or pearson")->capture_default_str();
  mantel->add_option("--permutations", a.permutations)->capture_default_str();
  mantel->add_option("--seed", a.seed)->capture_default_str();
  mantel->add_option("--out", a.out, "Output JSON (stdout if omitted)");

  auto* cluster = app.add_subcommand("cluster", "Average-linkage clustering of a distance matrix");
  cluster->add_option("--matrix", a.matrix, "Distance matrix JSON")->required();
  cluster->add_option("--render", a.render, "newick, dot or svg")->capture_default_str();
  cluster->add_option("--heatmap", a.heatmap, "Also write an SVG heatmap of the matrix");
  cluster->add_option("--out", a.out, "Output file (stdout if omitted)");

  auto* triplets = app.add_subcommand("triplets", "Build fine-tuning triplets, or evaluate embeddings on them");
  triplets->add_option("--corpus", a.corpus);
  triplets->add_option("--scheme", a.scheme, "domain or party")->capture_default_str();
  triplets->add_option("--per-anchor", a.per_anchor)->capture_default_str();
  triplets->add_option("--val-ratio", a.val_ratio)->capture_default_str();
  triplets->add_option("--seed", a.seed)->capture_default_str();
  triplets->add_option("--out", a.out, "Output triplets.jsonl");
  triplets->add_option("--evaluate", a.evaluate, "Evaluate this triplets.jsonl instead of building");
  triplets->add_option("--embeddings", a.embeddings, "EMB1 file for --evaluate");
  triplets->add_option("--epsilon", a.epsilon, "Triplet margin")->capture_default_str();

  auto* pipeline = app.add_subcommand("pipeline", "Run every variant x whitening configuration");
  pipeline->add_option("--corpus", a.corpus)->required();
  pipeline->add_option("--embeddings", a.embeddings, "EMB1 sentence embeddings");
  pipeline->add_option("--word-vectors", a.word_vectors, "Use the word-vector baseline instead of --embeddings");
  pipeline->add_option("--stances", a.stances);
  pipeline->add_option("--ground-truth", a.ground_truth, "Distance matrix JSON instead of --stances");
  pipeline->add_option("--variants", a.variants, "Comma-separated list or 'all'")->capture_default_str();
  pipeline->add_flag("--whiten", a.whiten, "Only whitened configurations");
  pipeline->add_flag("--no-whiten", a.no_whiten, "Only raw configurations");
  pipeline->add_option("--metric", a.metric, "hamming or l1")->capture_default_str();
  pipeline->add_option("--method", a.method, "spearman or pearson")->capture_default_str();
  pipeline->add_option("--symmetrization", a.symmetrization, "mean or forward")->capture_default_str();
  pipeline->add_option("--permutations", a.permutations)->capture_default_str();
  pipeline->add_option("--seed", a.seed)->capture_default_str();
  pipeline->add_option("--out", a.out, "Output directory")->required();
  pipeline->add_option("--format", a.format, "Matrix format: json or csv")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Write a synthetic planted-structure corpus and embeddings");
  synth->add_option("--out", a.out, "Output directory")->required();
  synth->add_option("--parties", a.parties)->capture_default_str();
  synth->add_option("--sentences", a.sentences, "Sentences per party")->capture_default_str();
  synth->add_option("--dim", a.dim)->capture_default_str();
  synth->add_option("--separation", a.separation, "Minimum mean separation over noise sigma")->capture_default_str();
  synth->add_option("--nuisance", a.nuisance, "Scale of a shared high-variance nuisance axis")->capture_default_str();
  synth->add_option("--seed", a.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest) {
      const Corpus c = load_corpus(a.corpus);
      if (!a.convert.empty()) {
        save_corpus(c, a.convert, fs::path(a.convert).extension() == ".csv" ? CorpusFormat::csv : CorpusFormat::jsonl);
      }
      std::cout << stats_json(c);
    } else if (*embed) {
      const Corpus c = load_corpus(a.corpus);
      const auto result = embed_corpus(c, load_word_vectors(a.word_vectors));
      save_store(result.store, a.out);
      std::cout << "embedded " << result.store.size() << " of " << c.size() << " sentences (dim "
                << result.store.dim() << "), skipped " << result.skipped.size() << "\n";
    } else if (*check) {
      const Corpus c = load_corpus(a.corpus);
      const auto store = load_store(a.embeddings);
      require_coverage(store, c);
      std::cout << "ok: " << store.size() << " vectors of dim " << store.dim() << " cover all " << c.size()
                << " sentences\n";
    } else if (*whiten) {
      auto store = load_store(a.embeddings);
      if (!a.corpus.empty()) {
        Corpus c = load_corpus(a.corpus);
        if (a.claims_only) c = filter_claims(c);
        require_coverage(store, c);
        EmbeddingStore subset(store.dim());
        for (const auto& r : c.records()) subset.add(r.id, store.at(r.id));
        store = std::move(subset);
      } else if (a.claims_only) {
        throw Error(ErrorCode::usage, "--claims-only needs --corpus");
      }
      const auto model = fit_whitening(store, a.eps);
      save_store(apply_whitening(model, store), a.out);
      if (!a.model.empty()) save_whitening(model, a.model);
      std::cout << "whitened " << store.size() << " vectors (dim " << store.dim() << ")\n";
    } else if (*simmat) {
      const auto format = parse_matrix_format(a.format);
      const Variant variant = parse_variant(a.variant);
      const Corpus corpus = load_corpus(a.corpus);
      EmbeddingStore store = load_store(a.embeddings);
      if (a.whiten) {
        const Corpus analysis = uses_claims(variant) ? filter_claims(corpus) : corpus;
        require_coverage(store, analysis);
        EmbeddingStore subset(store.dim());
        for (const auto& r : analysis.records()) subset.add(r.id, store.at(r.id));
        store = apply_whitening(fit_whitening(subset), subset);
      }
      const auto sim = similarity_matrix(corpus, store, variant, parse_symmetrization(a.symmetrization));
      MatrixDocument doc{sim.matrix, std::string(to_string(variant)), {}};
      for (const auto& [pair, score] : sim.directional) doc.directional[pair.first + "->" + pair.second] = score;
      emit(a.out, matrix_text(doc, format));
      if (!a.matrix.empty()) {
        write_text(a.matrix, matrix_text({sim_to_dist(sim.matrix), std::string(to_string(variant)), {}}, format));
      }
    } else if (*truth) {
      const auto format = parse_matrix_format(a.format);
      const auto d = stance_distance_matrix(load_stances(a.stances), parse_metric(a.metric));
      emit(a.out, matrix_text({d, std::nullopt, {}}, format));
    } else if (*mantel) {
      MantelOptions o;
      o.method = parse_method(a.method);
      o.permutations = a.permutations;
      o.seed = a.seed;
      const auto result = mantel_test(load_matrix(a.first).matrix, load_matrix(a.second).matrix, o);
      emit(a.out, mantel_json(result));
    } else if (*cluster) {
      const auto d = load_matrix(a.matrix).matrix;
      const auto tree = agglomerate(d);
      emit(a.out, render(tree, parse_render_format(a.render)));
      if (!a.heatmap.empty()) write_text(a.heatmap, render(d, RenderFormat::svg));
    } else if (*triplets) {
      if (!a.evaluate.empty()) {
        if (a.embeddings.empty()) throw Error(ErrorCode::usage, "--evaluate needs --embeddings");
        const auto splits = load_triplets(a.evaluate);
        const auto store = load_store(a.embeddings);
        std::ostringstream out;
        out << "{";
        bool first = true;
        for (const auto* set : {&splits.train, &splits.validation}) {
          if (set->triplets.empty()) continue;
          const auto e = evaluate_triplets(*set, store, a.epsilon);
          out << (first ? "" : ", ") << '"' << to_string(set->split) << "\": {\"accuracy\": "
              << format_double(e.accuracy) << ", \"mean_loss\": " << format_double(e.mean_loss)
              << ", \"count\": " << e.count << "}";
          first = false;
        }
        out << "}\n";
        emit(a.out, out.str());
      } else {
        if (a.corpus.empty() || a.out.empty()) throw Error(ErrorCode::usage, "building triplets needs --corpus and --out");
        const auto splits = build_triplets(load_corpus(a.corpus), parse_scheme(a.scheme),
                                           {a.per_anchor, a.val_ratio, a.seed});
        save_triplets(splits, a.out);
        std::cout << "train " << splits.train.triplets.size() << ", validation " << splits.validation.triplets.size()
                  << ", skipped anchors " << splits.skipped_anchors << "\n";
      }
    } else if (*pipeline) {
      if (a.whiten && a.no_whiten) throw Error(ErrorCode::usage, "--whiten and --no-whiten are exclusive");
      PipelineConfig cfg;
      cfg.corpus = a.corpus;
      if (!a.embeddings.empty()) cfg.embeddings = a.embeddings;
      if (!a.word_vectors.empty()) cfg.word_vectors = a.word_vectors;
      if (!a.stances.empty()) cfg.stances = a.stances;
      if (!a.ground_truth.empty()) cfg.ground_truth = a.ground_truth;
      cfg.metric = parse_metric(a.metric);
      cfg.out = a.out;
      cfg.options.variants = parse_variants(a.variants);
      if (a.whiten) cfg.options.whiten = {true};
      if (a.no_whiten) cfg.options.whiten = {false};
      cfg.options.method = parse_method(a.method);
      cfg.options.symmetrization = parse_symmetrization(a.symmetrization);
      cfg.options.permutations = a.permutations;
      cfg.options.seed = a.seed;
      cfg.options.format = parse_matrix_format(a.format);
      const auto report = run_pipeline(cfg);
      write_summary_csv(report, std::cout);
    } else if (*synth) {
      PlantedOptions o;
      o.parties = a.parties;
      o.sentences_per_party = a.sentences;
      o.dim = a.dim;
      o.separation_over_sigma = a.separation;
      o.nuisance_scale = a.nuisance;
      o.seed = a.seed;
      const auto p = make_planted_corpus(o);
      const fs::path dir = a.out;
      fs::create_directories(dir);
      save_corpus(p.corpus, dir / "corpus.jsonl", CorpusFormat::jsonl);
      save_store(p.embeddings, dir / "embeddings.emb1");
      save_matrix({p.planted, std::nullopt, {}}, dir / "planted.distance.json", MatrixFormat::json);
      std::cout << "wrote " << p.corpus.size() << " sentences for " << o.parties << " parties to " << dir.string()
                << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return e.code() == ErrorCode::usage ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
