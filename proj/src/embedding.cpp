#include "taxeval/embedding.hpp"

#include <charconv>
#include <fstream>
#include <istream>

namespace taxeval {
namespace {

std::string location(std::size_t line) { return "line " + std::to_string(line) + ": "; }

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(location(line) + "not a number: '" + std::string(s) + "'");
  }
  return v;
}

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

}  // namespace

EmbeddingTable read_embeddings(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  long dim = -1;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (line.empty()) continue;
    if (!line.starts_with("dim=")) throw ParseError(location(lineno) + "expected 'dim=<d>' header");
    dim = static_cast<long>(parse_double(std::string_view(line).substr(4), lineno));
    break;
  }
  if (dim <= 0) throw ParseError("embedding file is missing a positive 'dim=<d>' header");

  std::vector<std::string> keys;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(location(lineno) + "expected key<TAB>vector");
    keys.push_back(line.substr(0, tab));
    std::string_view rest = std::string_view(line).substr(tab + 1);
    long count = 0;
    while (!rest.empty()) {
      auto sp = rest.find(' ');
      auto field = rest.substr(0, sp);
      if (!field.empty()) {
        values.push_back(parse_double(field, lineno));
        ++count;
      }
      if (sp == std::string_view::npos) break;
      rest.remove_prefix(sp + 1);
    }
    if (count != dim) {
      throw ParseError(location(lineno) + "expected " + std::to_string(dim) + " values, got " +
                       std::to_string(count));
    }
  }
  EmbeddingTable::Matrix m =
      Eigen::Map<EmbeddingTable::Matrix>(values.data(), static_cast<Eigen::Index>(keys.size()), dim);
  return EmbeddingTable(std::move(keys), std::move(m));
}

EmbeddingTable load_embeddings(const std::string& path) {
  auto in = open(path);
  return read_embeddings(in);
}

std::string PairwiseScores::make_key(std::string_view a, std::string_view b) {
  std::string k;
  k.reserve(a.size() + b.size() + 1);
  k.append(a).push_back('\t');
  k.append(b);
  return k;
}

void PairwiseScores::insert(std::string key_a, std::string key_b, double score) {
  scores_[make_key(key_a, key_b)] = score;
}

std::optional<double> PairwiseScores::find(std::string_view key_a, std::string_view key_b) const {
  auto it = scores_.find(make_key(key_a, key_b));
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

double PairwiseScores::at(std::string_view key_a, std::string_view key_b) const {
  if (auto s = find(key_a, key_b)) return *s;
  throw LookupError("no pairwise score for ('" + std::string(key_a) + "', '" + std::string(key_b) + "')");
}

PairwiseScores read_pairwise_scores(std::istream& in) {
  PairwiseScores out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ParseError(location(lineno) + "expected key_a<TAB>key_b<TAB>score");
    out.insert(line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1),
               parse_double(std::string_view(line).substr(t2 + 1), lineno));
  }
  return out;
}

PairwiseScores load_pairwise_scores(const std::string& path) {
  auto in = open(path);
  return read_pairwise_scores(in);
}

}  // namespace taxeval
