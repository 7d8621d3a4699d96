#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "taxeval/taxonomy.hpp"

namespace taxeval {

enum class TaxonomyFormat { tsv, jsonl };

// TSV: "id<TAB>parent_id<TAB>label[<TAB>alt1|alt2|...]" with an optional
// "id<TAB>parent_id<TAB>label<TAB>alt_labels" header.
// JSONL: {"id": ..., "parent_id": ""|null, "label": ..., "alt_labels": [...]}.
// Blank lines are skipped. Throws ParseError with the line number.
std::vector<NodeRecord> read_node_records(std::istream& in, TaxonomyFormat format);

// Format is sniffed from the first non-blank character ('{' means JSONL).
std::vector<NodeRecord> load_node_records(const std::string& path);

TaxonomyTree load_taxonomy(const std::string& path);

// Canonical form: header line (TSV), then one record per line in input order.
void write_node_records(std::ostream& out, std::span<const NodeRecord> records, TaxonomyFormat format);
void save_taxonomy(const std::string& path, const TaxonomyTree& tree, TaxonomyFormat format);

TaxonomyFormat format_for_path(const std::string& path);

}  // namespace taxeval
