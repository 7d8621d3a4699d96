#include "taxeval/taxonomy_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "taxeval/error.hpp"

namespace taxeval {
namespace {

constexpr std::string_view kHeader = "id\tparent_id\tlabel\talt_labels";

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  while (true) {
    auto pos = s.find(sep);
    out.emplace_back(s.substr(0, pos));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

NodeRecord parse_tsv(const std::string& line, std::size_t lineno) {
  auto fields = split(line, '\t');
  if (fields.size() < 3 || fields.size() > 4) {
    throw ParseError("line " + std::to_string(lineno) + ": expected 3 or 4 tab-separated fields, got " +
                     std::to_string(fields.size()));
  }
  NodeRecord r{std::move(fields[0]), std::move(fields[1]), std::move(fields[2]), {}};
  if (fields.size() == 4 && !fields[3].empty()) r.alt_labels = split(fields[3], '|');
  return r;
}

NodeRecord parse_jsonl(const std::string& line, std::size_t lineno) {
  const auto where = "line " + std::to_string(lineno) + ": ";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where + e.what());
  }
  if (!j.is_object()) throw ParseError(where + "expected a JSON object");
  auto str = [&](const char* key, bool required) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
      if (required) throw ParseError(where + "missing field '" + key + "'");
      return {};
    }
    if (!it->is_string()) throw ParseError(where + "field '" + key + "' must be a string");
    return it->get<std::string>();
  };
  NodeRecord r{str("id", true), str("parent_id", false), str("label", true), {}};
  if (auto it = j.find("alt_labels"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw ParseError(where + "field 'alt_labels' must be an array");
    for (const auto& a : *it) {
      if (!a.is_string()) throw ParseError(where + "alt_labels entries must be strings");
      r.alt_labels.push_back(a.get<std::string>());
    }
  }
  return r;
}

void check_tsv_field(const std::string& s, const std::string& id) {
  if (s.find_first_of("\t\n\r") != std::string::npos) {
    throw InputError("node " + id + ": field contains a tab or newline and cannot be written as TSV");
  }
}

}  // namespace

std::vector<NodeRecord> read_node_records(std::istream& in, TaxonomyFormat format) {
  std::vector<NodeRecord> out;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && format == TaxonomyFormat::tsv && line.starts_with("id\tparent_id\t")) {
      first = false;
      continue;
    }
    first = false;
    out.push_back(format == TaxonomyFormat::tsv ? parse_tsv(line, lineno) : parse_jsonl(line, lineno));
  }
  return out;
}

std::vector<NodeRecord> load_node_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open taxonomy '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  auto pos = text.find_first_not_of(" \t\r\n");
  auto format = pos != std::string::npos && text[pos] == '{' ? TaxonomyFormat::jsonl : TaxonomyFormat::tsv;
  std::istringstream is(text);
  return read_node_records(is, format);
}

TaxonomyTree load_taxonomy(const std::string& path) { return TaxonomyTree::from_records(load_node_records(path)); }

void write_node_records(std::ostream& out, std::span<const NodeRecord> records, TaxonomyFormat format) {
  if (format == TaxonomyFormat::tsv) {
    out << kHeader << '\n';
    for (const auto& r : records) {
      check_tsv_field(r.id, r.id);
      check_tsv_field(r.parent_id, r.id);
      check_tsv_field(r.label, r.id);
      out << r.id << '\t' << r.parent_id << '\t' << r.label << '\t';
      for (std::size_t i = 0; i < r.alt_labels.size(); ++i) {
        check_tsv_field(r.alt_labels[i], r.id);
        if (r.alt_labels[i].find('|') != std::string::npos) {
          throw InputError("node " + r.id + ": alternate label contains '|' and cannot be written as TSV");
        }
        if (i) out << '|';
        out << r.alt_labels[i];
      }
      out << '\n';
    }
    return;
  }
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["parent_id"] = r.parent_id;
    j["label"] = r.label;
    j["alt_labels"] = r.alt_labels;
    out << j.dump() << '\n';
  }
}

void save_taxonomy(const std::string& path, const TaxonomyTree& tree, TaxonomyFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_node_records(out, tree.records(), format);
}

TaxonomyFormat format_for_path(const std::string& path) {
  return path.ends_with(".jsonl") || path.ends_with(".json") ? TaxonomyFormat::jsonl : TaxonomyFormat::tsv;
}

}  // namespace taxeval
