#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "taxeval/hmetrics.hpp"
#include "taxeval/mapper.hpp"
#include "taxeval/measure.hpp"
#include "taxeval/taxonomy.hpp"

namespace taxeval {

// One JSONL line: {"sample_id", "prediction", "gt_node", "gold_node"?,
// "dataset"?}. gt_node may be absent for plain mapping.
struct PredictionRecord {
  std::string sample_id;
  std::string prediction;
  std::string gt_node;
  std::optional<std::string> gold_node;
  std::string dataset;
};

// Throws ParseError (with line number) or InputError on a duplicate
// sample_id.
std::vector<PredictionRecord> read_predictions(std::istream& in);
std::vector<PredictionRecord> load_predictions(const std::string& path);

// Removes `prefix` (after leading whitespace) and surrounding whitespace,
// e.g. "A: grey seal" -> "grey seal". Text without the prefix is returned
// trimmed.
std::string strip_answer_prefix(std::string_view text, std::string_view prefix);

enum class EvalMode {
  // Scores mapped nodes against gt_node; accuracy against gold_node where
  // present, else gt_node.
  eval,
  // Scores and accuracy against gold_node, which every record must carry.
  map_quality,
};

struct EvalOptions {
  EvalMode mode = EvalMode::eval;
  MapperParams params;
  std::size_t workers = 1;
  // Drop records with unresolvable nodes instead of failing.
  bool skip_bad = false;
  std::string strip_prefix;
};

struct EvalRow {
  std::string sample_id;
  std::string dataset;
  std::string prediction;  // after prefix stripping
  std::string target_node;
  std::string mapped_node;
  MappingStage stage = MappingStage::fallback;
  PairScore score;
  bool node_correct = false;
  bool label_correct = false;
};

struct EvalSummary {
  AggregateScore score;
  double node_accuracy = 0.0;
  // Diagnostic: canonical labels equal, ids may differ.
  double label_accuracy = 0.0;
};

struct EvalReport {
  EvalMode mode = EvalMode::eval;
  std::string measure;
  MapperParams params;
  std::vector<EvalRow> rows;  // sorted by sample_id
  EvalSummary overall;
  std::map<std::string, EvalSummary> datasets;
  std::map<std::string, std::size_t> stages;
  std::vector<std::string> skipped;  // "sample_id: reason"
};

// Throws EmptyInputError when no record remains and InputError listing
// every unresolvable node unless options.skip_bad.
EvalReport evaluate(const TaxonomyTree& tree, const SimilarityMeasure& measure,
                    std::span<const PredictionRecord> records, const EvalOptions& options);

// Recomputes the summary from rows in order; evaluate() uses the same fold.
EvalSummary summarize(std::span<const EvalRow> rows);

void write_report_json(std::ostream& out, const EvalReport& report);
// "scope,n,hp_mean,hr_mean,hf,node_accuracy,label_accuracy"; scope is
// "all" or "dataset:<name>".
void write_report_csv(std::ostream& out, const EvalReport& report);

void write_rows_jsonl(std::ostream& out, const EvalReport& report);
void write_rows_csv(std::ostream& out, const EvalReport& report);

}  // namespace taxeval
