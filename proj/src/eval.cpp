#include "taxeval/eval.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "format.hpp"
#include "taxeval/error.hpp"

namespace taxeval {
namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::string optional_string(const nlohmann::json& j, const char* key, std::size_t lineno) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) {
    throw ParseError("line " + std::to_string(lineno) + ": field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

nlohmann::ordered_json summary_json(const EvalSummary& s) {
  nlohmann::ordered_json j;
  j["n"] = s.score.n;
  j["hp_mean"] = s.score.hp_mean;
  j["hr_mean"] = s.score.hr_mean;
  j["hf"] = s.score.hf;
  j["node_accuracy"] = s.node_accuracy;
  j["label_accuracy"] = s.label_accuracy;
  return j;
}

void summary_csv(std::ostream& out, std::string_view scope, const EvalSummary& s) {
  using detail::format_double;
  out << detail::csv_field(scope) << ',' << s.score.n << ',' << format_double(s.score.hp_mean) << ','
      << format_double(s.score.hr_mean) << ',' << format_double(s.score.hf) << ','
      << format_double(s.node_accuracy) << ',' << format_double(s.label_accuracy) << '\n';
}

std::string_view mode_name(EvalMode mode) { return mode == EvalMode::eval ? "eval" : "map-quality"; }

}  // namespace

std::vector<PredictionRecord> read_predictions(std::istream& in) {
  std::vector<PredictionRecord> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError("line " + std::to_string(lineno) + ": expected a JSON object");
    PredictionRecord r;
    r.sample_id = optional_string(j, "sample_id", lineno);
    if (r.sample_id.empty()) throw ParseError("line " + std::to_string(lineno) + ": missing sample_id");
    if (!j.contains("prediction")) throw ParseError("line " + std::to_string(lineno) + ": missing prediction");
    r.prediction = optional_string(j, "prediction", lineno);
    r.gt_node = optional_string(j, "gt_node", lineno);
    if (auto gold = optional_string(j, "gold_node", lineno); !gold.empty()) r.gold_node = std::move(gold);
    r.dataset = optional_string(j, "dataset", lineno);
    if (!seen.insert(r.sample_id).second) {
      throw InputError("line " + std::to_string(lineno) + ": duplicate sample_id '" + r.sample_id + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<PredictionRecord> load_predictions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open predictions '" + path + "'");
  return read_predictions(in);
}

std::string strip_answer_prefix(std::string_view text, std::string_view prefix) {
  auto t = trim(text);
  if (!prefix.empty() && t.starts_with(prefix)) t = trim(t.substr(prefix.size()));
  return std::string(t);
}

EvalSummary summarize(std::span<const EvalRow> rows) {
  if (rows.empty()) throw EmptyInputError("no evaluated records");
  std::vector<PairScore> scores;
  scores.reserve(rows.size());
  std::size_t node_hits = 0;
  std::size_t label_hits = 0;
  for (const auto& r : rows) {
    scores.push_back(r.score);
    node_hits += r.node_correct ? 1 : 0;
    label_hits += r.label_correct ? 1 : 0;
  }
  EvalSummary s;
  s.score = aggregate(scores);
  s.node_accuracy = static_cast<double>(node_hits) / static_cast<double>(rows.size());
  s.label_accuracy = static_cast<double>(label_hits) / static_cast<double>(rows.size());
  return s;
}

EvalReport evaluate(const TaxonomyTree& tree, const SimilarityMeasure& measure,
                    std::span<const PredictionRecord> records, const EvalOptions& options) {
  if (records.empty()) throw EmptyInputError("predictions file has no records");

  std::vector<const PredictionRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->sample_id < b->sample_id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->sample_id == sorted[i - 1]->sample_id) {
      throw InputError("duplicate sample_id '" + sorted[i]->sample_id + "'");
    }
  }

  EvalReport report;
  report.mode = options.mode;
  report.measure = measure.name();
  report.params = options.params;

  struct Item {
    const PredictionRecord* record;
    NodeRef target;
    NodeRef accuracy_ref;
  };
  std::vector<Item> items;
  std::vector<std::string> bad;
  for (const auto* r : sorted) {
    std::optional<NodeRef> gold;
    if (r->gold_node) {
      gold = tree.find(*r->gold_node);
      if (!gold) {
        bad.push_back(r->sample_id + ": unknown gold_node '" + *r->gold_node + "'");
        continue;
      }
    }
    if (options.mode == EvalMode::map_quality) {
      if (!r->gold_node) {
        bad.push_back(r->sample_id + ": missing gold_node");
        continue;
      }
      items.push_back({r, *gold, *gold});
      continue;
    }
    auto gt = tree.find(r->gt_node);
    if (!gt) {
      bad.push_back(r->sample_id + (r->gt_node.empty() ? ": missing gt_node" : ": unknown gt_node '" + r->gt_node + "'"));
      continue;
    }
    items.push_back({r, *gt, gold.value_or(*gt)});
  }
  if (!bad.empty() && !options.skip_bad) {
    std::string msg = std::to_string(bad.size()) + " record(s) reference unresolvable nodes:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw InputError(msg + "\n(use --skip-bad to drop them)");
  }
  report.skipped = std::move(bad);
  if (items.empty()) throw EmptyInputError("no record left to evaluate");

  std::vector<std::string> predictions;
  predictions.reserve(items.size());
  for (const auto& it : items) predictions.push_back(strip_answer_prefix(it.record->prediction, options.strip_prefix));
  const Mapper mapper(tree, measure, options.params);
  const auto traces = mapper.map_batch(predictions, options.workers);

  report.rows.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    const auto& trace = traces[i];
    EvalRow row;
    row.sample_id = it.record->sample_id;
    row.dataset = it.record->dataset;
    row.prediction = std::move(predictions[i]);
    row.target_node = tree.id(it.target);
    row.mapped_node = tree.id(trace.chosen);
    row.stage = trace.stage;
    row.score = pair_score(tree, it.target, trace.chosen);
    row.node_correct = trace.chosen == it.accuracy_ref;
    row.label_correct = tree.label(trace.chosen) == tree.label(it.accuracy_ref);
    ++report.stages[std::string(to_string(trace.stage))];
    report.rows.push_back(std::move(row));
  }

  report.overall = summarize(report.rows);
  std::map<std::string, std::vector<EvalRow>> groups;
  for (const auto& row : report.rows) {
    if (!row.dataset.empty()) groups[row.dataset].push_back(row);
  }
  for (const auto& [name, rows] : groups) report.datasets[name] = summarize(rows);
  return report;
}

void write_report_json(std::ostream& out, const EvalReport& report) {
  nlohmann::ordered_json j;
  j["mode"] = mode_name(report.mode);
  j["measure"] = report.measure;
  j["params"] = format_mapper_params(report.params);
  j["overall"] = summary_json(report.overall);
  j["datasets"] = nlohmann::ordered_json::object();
  for (const auto& [name, s] : report.datasets) j["datasets"][name] = summary_json(s);
  j["stages"] = nlohmann::ordered_json::object();
  for (const auto& [stage, n] : report.stages) j["stages"][stage] = n;
  j["skipped"] = report.skipped;
  out << j.dump(2) << '\n';
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "scope,n,hp_mean,hr_mean,hf,node_accuracy,label_accuracy\n";
  summary_csv(out, "all", report.overall);
  for (const auto& [name, s] : report.datasets) summary_csv(out, "dataset:" + name, s);
}

void write_rows_jsonl(std::ostream& out, const EvalReport& report) {
  for (const auto& r : report.rows) {
    nlohmann::ordered_json j;
    j["sample_id"] = r.sample_id;
    j["dataset"] = r.dataset;
    j["prediction"] = r.prediction;
    j["target_node"] = r.target_node;
    j["mapped_node"] = r.mapped_node;
    j["stage"] = to_string(r.stage);
    j["hp"] = r.score.hp();
    j["hr"] = r.score.hr();
    j["node_correct"] = r.node_correct;
    j["label_correct"] = r.label_correct;
    out << j.dump() << '\n';
  }
}

void write_rows_csv(std::ostream& out, const EvalReport& report) {
  using detail::csv_field;
  out << "sample_id,dataset,prediction,target_node,mapped_node,stage,hp,hr,node_correct,label_correct\n";
  for (const auto& r : report.rows) {
    out << csv_field(r.sample_id) << ',' << csv_field(r.dataset) << ',' << csv_field(r.prediction) << ','
        << csv_field(r.target_node) << ',' << csv_field(r.mapped_node) << ',' << to_string(r.stage) << ','
        << detail::format_double(r.score.hp()) << ',' << detail::format_double(r.score.hr()) << ','
        << (r.node_correct ? 1 : 0) << ',' << (r.label_correct ? 1 : 0) << '\n';
  }
}

}  // namespace taxeval
