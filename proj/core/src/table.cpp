#include "tabrec/table.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "tabrec/kb.hpp"
#include "tabrec/text.hpp"

namespace tabrec {

std::vector<std::string> RawTable::heading_texts() const {
  std::vector<std::string> out;
  out.reserve(headings.size());
  for (const auto& h : headings) out.push_back(h.text);
  return out;
}

std::optional<std::size_t> detect_core_column(const RawTable& table) {
  if (table.row_count() == 0 || table.column_count() == 0) {
    throw std::invalid_argument("detect_core_column: empty table " +
                                table.table_id);
  }
  std::size_t best_col = 0;
  std::size_t best_count = 0;
  for (std::size_t col = 0; col < table.column_count(); ++col) {
    std::size_t count = 0;
    for (const auto& row : table.rows) {
      if (row[col].entity.has_value()) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best_col = col;
    }
  }
  if (best_count == 0) return std::nullopt;
  return best_col;
}

namespace {

void append_tokens(std::vector<std::string>& dst, const std::string& text) {
  for (auto& tok : tokenize(text)) dst.push_back(std::move(tok));
}

void append_entity(std::vector<std::string>& dst,
                   std::unordered_set<std::string>& seen,
                   const std::string& id) {
  if (seen.insert(id).second) dst.push_back(id);
}

}  // namespace

TableElements extract_elements(const RawTable& table, const KnowledgeBase& kb,
                               const EntityRetriever& retriever,
                               std::size_t topic_k) {
  (void)kb;  // entity annotations were resolved at parse time
  TableElements elems;

  std::string topic_text = table.caption;
  if (!table.page_title.empty()) {
    if (!topic_text.empty()) topic_text += ' ';
    topic_text += table.page_title;
  }
  append_tokens(elems.topic_words, topic_text);
  elems.topic_entities = retriever.retrieve(topic_text, topic_k);

  std::unordered_set<std::string> data_seen;
  for (const auto& h : table.headings) {
    append_tokens(elems.heading_words, h.text);
    // Entities appearing in headings belong to the data element.
    if (h.entity) append_entity(elems.data_entities, data_seen, *h.entity);
  }

  for (const auto& row : table.rows) {
    for (const auto& cell : row) {
      append_tokens(elems.data_words, cell.text);
      if (cell.entity) append_entity(elems.data_entities, data_seen, *cell.entity);
    }
  }

  elems.core_column = detect_core_column(table);
  if (elems.core_column) {
    std::unordered_set<std::string> core_seen;
    for (const auto& row : table.rows) {
      const auto& cell = row[*elems.core_column];
      if (cell.entity) append_entity(elems.entities, core_seen, *cell.entity);
    }
  }
  return elems;
}

RawTable split_table(const RawTable& table, SplitAxis axis, double fraction) {
  const bool valid = fraction == 0.25 || fraction == 0.5 || fraction == 0.75 ||
                     fraction == 1.0;
  if (!valid) {
    throw std::invalid_argument("split_table: fraction must be in {0.25, 0.5, 0.75, 1.0}");
  }
  if (fraction == 1.0) return table;

  RawTable out = table;
  if (axis == SplitAxis::Rows) {
    auto keep = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(table.row_count())));
    if (keep == 0) throw std::runtime_error("split_table: result has no rows");
    out.rows.resize(std::min(keep, table.row_count()));
  } else {
    auto keep = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(table.column_count())));
    if (keep == 0) throw std::runtime_error("split_table: result has no columns");
    keep = std::min(keep, table.column_count());
    out.headings.resize(keep);
    for (auto& row : out.rows) row.resize(keep);
  }
  return out;
}

}  // namespace tabrec
