#include "taxeval/cli.hpp"

#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "taxeval/error.hpp"
#include "taxeval/eval.hpp"
#include "taxeval/extract.hpp"
#include "taxeval/mapper.hpp"
#include "taxeval/measure.hpp"
#include "taxeval/synthbench.hpp"
#include "taxeval/taxonomy_io.hpp"

namespace taxeval {
namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string format = "json";

  std::size_t workers() const {
    return threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  }
};

struct MeasureInputs {
  std::string measure = "rouge1";
  std::string embeddings;
  std::string scores;
  std::string params;
  std::string strip_prefix;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

// "-" writes to `out`; anything else to the named file.
void emit(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (path == "-") {
    write(out);
    out.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot write '" + path + "'");
  write(file);
  if (!file) throw InputError("error while writing '" + path + "'");
}

void add_measure_options(CLI::App* cmd, MeasureInputs& m) {
  cmd->add_option("--measure", m.measure, "exact|contained|bleu2|rouge1|meteor|embed-cosine|pairwise")
      ->capture_default_str();
  cmd->add_option("--embeddings", m.embeddings, "embedding file (embed-cosine)");
  cmd->add_option("--scores", m.scores, "pairwise score file (pairwise)");
  cmd->add_option("--params", m.params, "mapper parameters, e.g. k=10,thr_topk=0.0015,thr_top2=0.001,thr_vote=4");
  cmd->add_option("--strip-prefix", m.strip_prefix, "answer prefix to strip, e.g. \"A:\"");
}

// Owns whatever tables the measure points into.
struct LoadedMeasure {
  EmbeddingTable embeddings;
  PairwiseScores pairwise;
  std::unique_ptr<SimilarityMeasure> measure;
};

std::unique_ptr<LoadedMeasure> load_measure(const TaxonomyTree& tree, const MeasureInputs& m) {
  auto kind = parse_measure_kind(m.measure);
  if (!kind) throw ConfigError("unknown measure '" + m.measure + "'");
  auto loaded = std::make_unique<LoadedMeasure>();
  MeasureOptions options;
  if (*kind == MeasureKind::embed_cosine) {
    if (m.embeddings.empty()) throw ConfigError("--measure embed-cosine requires --embeddings");
    loaded->embeddings = load_embeddings(m.embeddings);
    options.embeddings = &loaded->embeddings;
  }
  if (*kind == MeasureKind::pairwise) {
    if (m.scores.empty()) throw ConfigError("--measure pairwise requires --scores");
    loaded->pairwise = load_pairwise_scores(m.scores);
    options.pairwise = &loaded->pairwise;
  }
  loaded->measure = make_measure(tree, *kind, options);
  return loaded;
}

void check_format(const GlobalOptions& g) {
  if (g.format != "json" && g.format != "csv") throw ConfigError("--format must be json or csv");
}

int cmd_extract(const GlobalOptions& g, const std::string& edges_path, const std::string& nodes_path,
                const std::string& root, const std::string& exclude_path, const std::string& out_path,
                std::ostream& out, std::ostream& err) {
  EdgeList graph;
  auto edges_in = open_in(edges_path);
  graph.edges = read_edges(edges_in);
  graph.root_id = root;
  ExtractionConfig config;
  config.seed = g.seed;
  if (!exclude_path.empty()) {
    auto in = open_in(exclude_path);
    config.exclude = read_id_list(in);
  }
  std::vector<NodeRecord> metadata;
  if (!nodes_path.empty()) metadata = load_node_records(nodes_path);

  const auto result = extract_tree(graph, config, metadata);
  const auto& s = result.stats;
  err << "extracted " << s.nodes << " nodes (" << s.excluded << " excluded, " << s.unreachable
      << " unreachable dropped, " << s.tied << " tie-broken, " << s.unlabeled << " without labels)\n";
  if (s.unreachable > 0) err << "warning: dropped " << s.unreachable << " node(s) unreachable from the root\n";
  const auto format = out_path == "-" ? TaxonomyFormat::tsv : format_for_path(out_path);
  emit(out_path, out, [&](std::ostream& os) { write_node_records(os, result.tree.records(), format); });
  return 0;
}

int cmd_validate(const std::string& path, std::ostream& out) {
  const auto records = load_node_records(path);
  const auto diagnostics = validate_records(records);
  if (diagnostics.empty()) {
    out << "OK (" << records.size() << " nodes)\n";
    return 0;
  }
  for (const auto& d : diagnostics) out << to_string(d.kind) << ": " << d.message << '\n';
  out << diagnostics.size() << " problem(s) found\n";
  return 1;
}

int cmd_map(const GlobalOptions& g, const std::string& taxonomy, const std::string& predictions,
            const MeasureInputs& m, const std::string& out_path, std::ostream& out) {
  const auto tree = load_taxonomy(taxonomy);
  const auto records = load_predictions(predictions);
  const auto loaded = load_measure(tree, m);
  const Mapper mapper(tree, *loaded->measure, parse_mapper_params(m.params));
  std::vector<std::string> texts;
  texts.reserve(records.size());
  for (const auto& r : records) texts.push_back(strip_answer_prefix(r.prediction, m.strip_prefix));
  const auto traces = mapper.map_batch(texts, g.workers());

  emit(out_path, out, [&](std::ostream& os) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& t = traces[i];
      nlohmann::ordered_json j;
      j["sample_id"] = records[i].sample_id;
      j["prediction"] = texts[i];
      j["mapped_node"] = tree.id(t.chosen);
      j["mapped_label"] = tree.label(t.chosen);
      j["stage"] = to_string(t.stage);
      j["topk"] = nlohmann::ordered_json::array();
      for (const auto& c : t.topk) {
        j["topk"].push_back({{"node", tree.id(c.node)}, {"score", c.score}, {"softmax", c.softmax}});
      }
      os << j.dump() << '\n';
    }
  });
  return 0;
}

int cmd_eval(const GlobalOptions& g, EvalMode mode, const std::string& taxonomy, const std::string& predictions,
             const MeasureInputs& m, bool skip_bad, const std::string& out_path, const std::string& records_path,
             std::ostream& out, std::ostream& err) {
  check_format(g);
  const auto tree = load_taxonomy(taxonomy);
  const auto records = load_predictions(predictions);
  const auto loaded = load_measure(tree, m);
  EvalOptions options;
  options.mode = mode;
  options.params = parse_mapper_params(m.params);
  options.workers = g.workers();
  options.skip_bad = skip_bad;
  options.strip_prefix = m.strip_prefix;
  const auto report = evaluate(tree, *loaded->measure, records, options);
  if (!report.skipped.empty()) err << "warning: skipped " << report.skipped.size() << " record(s)\n";

  emit(out_path, out, [&](std::ostream& os) {
    if (g.format == "csv") {
      write_report_csv(os, report);
    } else {
      write_report_json(os, report);
    }
  });
  if (!records_path.empty()) {
    emit(records_path, out, [&](std::ostream& os) {
      if (records_path.ends_with(".csv")) {
        write_rows_csv(os, report);
      } else {
        write_rows_jsonl(os, report);
      }
    });
  }
  return 0;
}

int cmd_sample_pairs(const GlobalOptions& g, const std::string& taxonomy, std::size_t n, std::size_t max_dist,
                     const std::string& mode, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const auto tree = load_taxonomy(taxonomy);
  const auto samples = sample_pairs(tree, n, max_dist, parse_pair_mode(mode), g.seed);
  err << "distance histogram:";
  for (auto [d, c] : distance_histogram(samples)) err << ' ' << d << ':' << c;
  err << '\n';
  emit(out_path, out, [&](std::ostream& os) { write_pairs(os, samples); });
  return 0;
}

int cmd_bench(const GlobalOptions& g, const std::string& pairs_path, const std::string& measures,
              const std::string& scores_path, const std::string& embeddings_path, const std::string& out_path,
              std::ostream& out) {
  check_format(g);
  auto in = open_in(pairs_path);
  const auto samples = read_pairs(in);
  PairwiseScores pairwise;
  EmbeddingTable embeddings;
  PairMeasureSources sources;
  if (!scores_path.empty()) {
    pairwise = load_pairwise_scores(scores_path);
    sources.pairwise = &pairwise;
  }
  if (!embeddings_path.empty()) {
    embeddings = load_embeddings(embeddings_path);
    sources.embeddings = &embeddings;
  }
  std::vector<PairMeasure> list;
  std::stringstream names(measures);
  for (std::string name; std::getline(names, name, ',');) {
    if (!name.empty()) list.push_back(make_pair_measure(name, sources));
  }
  if (list.empty()) throw ConfigError("--measures is empty");
  const auto report = run_correlation(samples, list, g.workers());
  emit(out_path, out, [&](std::ostream& os) {
    if (g.format == "csv") {
      write_correlation_csv(os, report);
    } else {
      write_correlation_json(os, report);
    }
  });
  return 0;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Taxonomy-aware evaluation of free-text predictions", "taxeval"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (0: all cores)")->capture_default_str();
  app.add_option("--format", g.format, "report format: json|csv")->capture_default_str();

  std::string taxonomy, predictions, out_path = "-", records_path;
  MeasureInputs m;
  bool skip_bad = false;

  auto* extract = app.add_subcommand("extract", "extract a tree from a subclass-of edge list");
  std::string edges, nodes, root, exclude;
  extract->add_option("--edges", edges, "child<TAB>parent edge file")->required();
  extract->add_option("--nodes", nodes, "node metadata (taxonomy format; parent ignored)");
  extract->add_option("--root", root, "root id")->required();
  extract->add_option("--exclude", exclude, "ids to drop, one per line");
  extract->add_option("--out", out_path, "output taxonomy (.jsonl for JSON lines)");

  auto* validate = app.add_subcommand("validate", "check a taxonomy file");
  validate->add_option("--taxonomy", taxonomy)->required();

  auto* map = app.add_subcommand("map", "map predictions onto taxonomy nodes");
  map->add_option("--taxonomy", taxonomy)->required();
  map->add_option("--predictions", predictions, "JSONL predictions")->required();
  add_measure_options(map, m);
  map->add_option("--out", out_path, "JSONL output with mapping traces");

  auto add_eval = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--taxonomy", taxonomy)->required();
    cmd->add_option("--predictions", predictions, "JSONL predictions")->required();
    add_measure_options(cmd, m);
    cmd->add_flag("--skip-bad", skip_bad, "drop records with unresolvable nodes");
    cmd->add_option("--out", out_path, "report file");
    cmd->add_option("--records", records_path, "per-record table (.csv or .jsonl)");
    return cmd;
  };
  auto* eval = add_eval("eval", "map predictions and score them against gt_node");
  auto* quality = add_eval("map-quality", "score mapped nodes against annotated gold_node");

  auto* sample = app.add_subcommand("sample-pairs", "sample reference/candidate node pairs");
  std::size_t n = 0, max_dist = 7;
  std::string mode;
  sample->add_option("--taxonomy", taxonomy)->required();
  sample->add_option("--n", n, "number of pairs")->required();
  sample->add_option("--max-dist", max_dist)->capture_default_str();
  sample->add_option("--mode", mode, "hp|hr")->required();
  sample->add_option("--out", out_path);

  auto* bench = app.add_subcommand("bench-correlation", "Kendall tau-b of measures against hP/hR");
  std::string pairs, measures = "exact,contained,bleu2,rouge1,meteor";
  bench->add_option("--pairs", pairs)->required();
  bench->add_option("--measures", measures, "comma-separated measure list")->capture_default_str();
  bench->add_option("--scores", m.scores, "pairwise score file keyed by node ids");
  bench->add_option("--embeddings", m.embeddings, "embedding file keyed by node ids");
  bench->add_option("--out", out_path);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*extract) return cmd_extract(g, edges, nodes, root, exclude, out_path, out, err);
    if (*validate) return cmd_validate(taxonomy, out);
    if (*map) return cmd_map(g, taxonomy, predictions, m, out_path, out);
    if (*eval) {
      return cmd_eval(g, EvalMode::eval, taxonomy, predictions, m, skip_bad, out_path, records_path, out, err);
    }
    if (*quality) {
      return cmd_eval(g, EvalMode::map_quality, taxonomy, predictions, m, skip_bad, out_path, records_path, out,
                      err);
    }
    if (*sample) return cmd_sample_pairs(g, taxonomy, n, max_dist, mode, out_path, out, err);
    if (*bench) return cmd_bench(g, pairs, measures, m.scores, m.embeddings, out_path, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace taxeval
