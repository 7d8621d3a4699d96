#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "taxeval/embedding.hpp"
#include "taxeval/kendall.hpp"
#include "taxeval/taxonomy.hpp"

namespace taxeval {

// hp: candidate is any node other than the reference.
// hr: candidate is a strict ancestor of the reference.
enum class PairMode { hp, hr };

std::string_view to_string(PairMode mode);
PairMode parse_pair_mode(std::string_view text);

struct PairSample {
  std::string reference_id;
  std::string reference_label;
  std::string candidate_id;
  std::string candidate_label;
  std::size_t distance = 0;
  double hp = 0.0;
  double hr = 0.0;
  PairMode mode = PairMode::hp;

  friend bool operator==(const PairSample&, const PairSample&) = default;
};

// References are uniform over leaves; a target distance is drawn uniformly
// from [1, max_dist] and redrawn until the reference has a candidate at that
// distance, which is then drawn uniformly. Throws ConfigError when the tree
// has no node below the root or max_dist is 0.
std::vector<PairSample> sample_pairs(const TaxonomyTree& tree, std::size_t n, std::size_t max_dist, PairMode mode,
                                     std::uint64_t seed);

std::map<std::size_t, std::size_t> distance_histogram(std::span<const PairSample> samples);

void write_pairs(std::ostream& out, std::span<const PairSample> samples);
std::vector<PairSample> read_pairs(std::istream& in);

// Scores one pair, treating the candidate label as the prediction and the
// reference label as the reference text.
struct PairMeasure {
  std::string name;
  std::function<double(const PairSample&)> score;
};

struct PairMeasureSources {
  // embed-cosine: keys are node ids.
  const EmbeddingTable* embeddings = nullptr;
  // pairwise: keys are (reference_id, candidate_id).
  const PairwiseScores* pairwise = nullptr;
};

// Text measure names, "embed-cosine", "pairwise", and the oracles "hp",
// "hr", "neg-distance" and "constant". Throws ConfigError for unknown names
// or a missing source.
PairMeasure make_pair_measure(std::string_view name, const PairMeasureSources& sources = {});

struct TauCell {
  std::size_t n = 0;  // samples of the matching mode
  std::optional<KendallResult> result;
  // Set when tau is undefined (e.g. all scores tied).
  std::string error;
};

struct MeasureCorrelation {
  std::string measure;
  TauCell hp;  // against hp on hp-mode samples
  TauCell hr;  // against hr on hr-mode samples
};

struct CorrelationReport {
  std::vector<MeasureCorrelation> measures;
  std::size_t hp_samples = 0;
  std::size_t hr_samples = 0;
  std::map<std::size_t, std::size_t> hp_distances;
  std::map<std::size_t, std::size_t> hr_distances;
};

// Scoring is spread over `workers` threads; the report does not depend on
// the worker count. A measure that cannot score some pair (LookupError)
// aborts the run with every missing pair listed.
CorrelationReport run_correlation(std::span<const PairSample> samples, std::span<const PairMeasure> measures,
                                  std::size_t workers = 1);

void write_correlation_json(std::ostream& out, const CorrelationReport& report);
void write_correlation_csv(std::ostream& out, const CorrelationReport& report);

}  // namespace taxeval
