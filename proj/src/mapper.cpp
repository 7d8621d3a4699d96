#include "taxeval/mapper.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "taxeval/text.hpp"

namespace taxeval {

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("mapper parameter " + std::string(key) + ": bad value '" + std::string(value) + "'");
  }
  return out;
}

bool parse_flag(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  throw ConfigError("mapper parameter " + std::string(key) + ": expected 0/1, got '" + std::string(value) + "'");
}

}  // namespace

MapperParams parse_mapper_params(std::string_view text, MapperParams p) {
  while (!text.empty()) {
    auto comma = text.find(',');
    auto item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view() : text.substr(comma + 1);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ConfigError("mapper parameter '" + std::string(item) + "' lacks '='");
    auto key = item.substr(0, eq);
    auto value = item.substr(eq + 1);
    if (key == "k") {
      p.k = parse_number<std::size_t>(key, value);
    } else if (key == "thr_topk") {
      p.thr_topk = parse_number<double>(key, value);
    } else if (key == "thr_top2") {
      p.thr_top2 = parse_number<double>(key, value);
    } else if (key == "thr_vote") {
      p.thr_vote = parse_number<std::size_t>(key, value);
    } else if (key == "vote_at_least") {
      p.vote_at_least = parse_flag(key, value);
    } else if (key == "stem") {
      p.stem = parse_flag(key, value);
    } else {
      throw ConfigError("unknown mapper parameter '" + std::string(key) + "'");
    }
  }
  if (p.k < 2) throw ConfigError("mapper parameter k must be at least 2");
  if (!(p.thr_topk >= 0.0) || !(p.thr_top2 >= 0.0)) throw ConfigError("mapper thresholds must be non-negative");
  return p;
}

std::string format_mapper_params(const MapperParams& p) {
  std::ostringstream os;
  os << "k=" << p.k << ",thr_topk=" << p.thr_topk << ",thr_top2=" << p.thr_top2 << ",thr_vote=" << p.thr_vote
     << ",vote_at_least=" << (p.vote_at_least ? 1 : 0) << ",stem=" << (p.stem ? 1 : 0);
  return os.str();
}

std::string_view to_string(MappingStage stage) {
  switch (stage) {
    case MappingStage::topk_contains: return "topk-contains";
    case MappingStage::global_contains: return "global-contains";
    case MappingStage::ngram4_topk: return "ngram-4-topk";
    case MappingStage::ngram4_global: return "ngram-4-global";
    case MappingStage::ngram3_topk: return "ngram-3-topk";
    case MappingStage::ngram3_global: return "ngram-3-global";
    case MappingStage::ngram2_topk: return "ngram-2-topk";
    case MappingStage::ngram2_global: return "ngram-2-global";
    case MappingStage::vote: return "vote";
    case MappingStage::fallback: return "fallback";
  }
  return "unknown";
}

Mapper::Mapper(const TaxonomyTree& tree, const SimilarityMeasure& measure, MapperParams params)
    : tree_(tree), measure_(measure), params_(params) {
  if (params_.k < 2) throw ConfigError("mapper parameter k must be at least 2");
  labels_.resize(tree.size());
  depth_.resize(tree.size());
  rank_.resize(tree.size());
  for (std::uint32_t i = 0; i < tree.size(); ++i) {
    NodeRef v(i);
    depth_[i] = static_cast<std::uint32_t>(tree.depth(v));
    rank_[i] = tree.id_rank(v);
    for (const auto& text : all_labels(tree, v)) {
      auto norm = normalize(text, params_.stem);
      // An empty label would be a substring of every prediction.
      if (norm.empty()) continue;
      Label label{std::move(norm.joined), {}};
      for (const auto& tok : norm.tokens) {
        auto [it, inserted] = vocab_.emplace(tok, static_cast<std::int32_t>(vocab_.size()));
        label.tokens.push_back(it->second);
      }
      labels_[i].push_back(std::move(label));
    }
  }
}

bool Mapper::more_specific(std::uint32_t a, std::uint32_t b) const {
  if (depth_[a] != depth_[b]) return depth_[a] > depth_[b];
  return rank_[a] < rank_[b];
}

bool Mapper::contains_hit(std::uint32_t node, const std::string& pred) const {
  for (const auto& label : labels_[node]) {
    if (pred.find(label.joined) != std::string::npos) return true;
  }
  return false;
}

bool Mapper::ngram_hit(std::uint32_t node, std::span<const std::int32_t> pred, std::size_t n) const {
  if (pred.size() < n) return false;
  for (const auto& label : labels_[node]) {
    const auto& lt = label.tokens;
    if (lt.size() < n) continue;
    for (std::size_t i = 0; i + n <= lt.size(); ++i) {
      for (std::size_t j = 0; j + n <= pred.size(); ++j) {
        if (std::equal(lt.begin() + i, lt.begin() + i + n, pred.begin() + j)) return true;
      }
    }
  }
  return false;
}

MappingTrace Mapper::map(std::string_view prediction) const {
  const std::size_t n = tree_.size();
  std::vector<double> scores(n);
  measure_.score_all(prediction, scores);
  for (double s : scores) {
    if (!std::isfinite(s)) throw InputError("measure " + measure_.name() + " produced a non-finite score");
  }

  const std::size_t k = std::min(params_.k, n);
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return rank_[a] < rank_[b];
                    });
  const std::span<const std::uint32_t> topk(order.data(), k);

  MappingTrace trace;
  trace.topk.reserve(k);
  const double top = scores[topk[0]];
  double z = 0.0;
  for (auto i : topk) z += std::exp(scores[i] - top);
  for (auto i : topk) trace.topk.push_back({NodeRef(i), scores[i], std::exp(scores[i] - top) / z});

  auto finish = [&](MappingStage stage, std::uint32_t node) {
    trace.stage = stage;
    trace.chosen = NodeRef(node);
    return trace;
  };

  // Most specific node satisfying `hit`, first within the top-k, then over
  // the whole taxonomy.
  auto search = [&](auto&& hit) -> std::pair<std::optional<std::uint32_t>, bool> {
    std::optional<std::uint32_t> best;
    for (auto i : topk) {
      if (hit(i) && (!best || more_specific(i, *best))) best = i;
    }
    if (best) return {best, true};
    for (std::uint32_t i = 0; i < n; ++i) {
      if (hit(i) && (!best || more_specific(i, *best))) best = i;
    }
    return {best, false};
  };

  const auto pred = normalize(prediction, params_.stem);
  if (!pred.empty()) {
    auto [node, in_topk] = search([&](std::uint32_t i) { return contains_hit(i, pred.joined); });
    if (node) return finish(in_topk ? MappingStage::topk_contains : MappingStage::global_contains, *node);

    std::vector<std::int32_t> pred_ids;
    pred_ids.reserve(pred.tokens.size());
    for (const auto& tok : pred.tokens) {
      auto it = vocab_.find(tok);
      pred_ids.push_back(it == vocab_.end() ? -1 : it->second);
    }
    constexpr std::pair<std::size_t, std::pair<MappingStage, MappingStage>> ngram_stages[] = {
        {4, {MappingStage::ngram4_topk, MappingStage::ngram4_global}},
        {3, {MappingStage::ngram3_topk, MappingStage::ngram3_global}},
        {2, {MappingStage::ngram2_topk, MappingStage::ngram2_global}},
    };
    for (const auto& [len, stages] : ngram_stages) {
      auto [hit, in_topk] = search([&](std::uint32_t i) { return ngram_hit(i, pred_ids, len); });
      if (hit) return finish(in_topk ? stages.first : stages.second, *hit);
    }
  }

  if (k >= 2) {
    const double s0 = trace.topk[0].softmax;
    if (s0 - trace.topk[1].softmax < params_.thr_top2 && s0 - trace.topk[k - 1].softmax < params_.thr_topk) {
      std::unordered_map<std::uint32_t, std::size_t> votes;
      for (auto i : topk) {
        for (NodeRef a : ancestors(tree_, NodeRef(i))) ++votes[a.index()];
      }
      std::optional<std::uint32_t> best;
      std::size_t best_count = 0;
      for (const auto& [node, count] : votes) {
        const bool qualifies = params_.vote_at_least ? count >= params_.thr_vote : count > params_.thr_vote;
        if (!qualifies) continue;
        bool better = !best || depth_[node] > depth_[*best] ||
                      (depth_[node] == depth_[*best] &&
                       (count > best_count || (count == best_count && rank_[node] < rank_[*best])));
        if (better) {
          best = node;
          best_count = count;
        }
      }
      if (best) return finish(MappingStage::vote, *best);
    }
  }

  return finish(MappingStage::fallback, topk[0]);
}

std::vector<MappingTrace> Mapper::map_batch(std::span<const std::string> predictions, std::size_t workers) const {
  std::vector<MappingTrace> out(predictions.size());
  std::vector<std::string> errors(predictions.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < predictions.size(); i = next++) {
      try {
        out[i] = map(predictions[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(predictions.size(), 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::vector<std::pair<std::size_t, std::string>> failures;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) failures.emplace_back(i, std::move(errors[i]));
  }
  if (!failures.empty()) {
    std::string msg = std::to_string(failures.size()) + " prediction(s) could not be mapped:";
    for (const auto& [i, e] : failures) msg += "\n  #" + std::to_string(i) + ": " + e;
    throw BatchMappingError(msg, std::move(failures));
  }
  return out;
}

MappingTrace map_prediction(const TaxonomyTree& tree, const SimilarityMeasure& measure,
                            std::string_view prediction, const MapperParams& params) {
  return Mapper(tree, measure, params).map(prediction);
}

std::vector<MappingTrace> batch_map(const TaxonomyTree& tree, const SimilarityMeasure& measure,
                                    std::span<const std::string> predictions, const MapperParams& params,
                                    std::size_t workers) {
  return Mapper(tree, measure, params).map_batch(predictions, workers);
}

}  // namespace taxeval
