#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tabrec {

class KnowledgeBase;

struct Cell {
  std::string text;
  std::optional<std::string> entity;

  bool empty() const { return text.empty() && !entity.has_value(); }
  bool operator==(const Cell&) const = default;
};

struct PageStats {
  std::int64_t in_links = 0;
  std::int64_t out_links = 0;
  std::int64_t page_views = 0;
  std::int64_t tables_on_page = 1;
  std::int64_t table_chars = 0;
  std::int64_t page_chars = 1;

  bool operator==(const PageStats&) const = default;
};

/// One corpus table. Rows are rectangular: every row has exactly
/// headings.size() cells (ragged input is padded at parse time).
struct RawTable {
  std::string table_id;
  std::string page_title;
  std::string caption;
  std::vector<Cell> headings;
  std::vector<std::vector<Cell>> rows;
  PageStats page_stats;
  /// Canonical entity id of the embedding page, when the page title
  /// resolves against the knowledge base.
  std::optional<std::string> page_entity;

  std::size_t column_count() const { return headings.size(); }
  std::size_t row_count() const { return rows.size(); }
  std::vector<std::string> heading_texts() const;

  bool operator==(const RawTable&) const = default;
};

/// The four extracted table elements, in word-term and entity-term form.
struct TableElements {
  std::vector<std::string> topic_words;
  std::vector<std::string> topic_entities;
  std::vector<std::string> heading_words;
  std::optional<std::size_t> core_column;
  std::vector<std::string> entities;       // core column only
  std::vector<std::string> data_words;
  std::vector<std::string> data_entities;  // all cells (plus heading links)

  bool operator==(const TableElements&) const = default;
};

/// Retrieval interface used to obtain table-topic entities.
class EntityRetriever {
 public:
  virtual ~EntityRetriever() = default;
  virtual std::vector<std::string> retrieve(const std::string& query,
                                            std::size_t k) const = 0;
};

/// Column with the highest entity rate (entity cells / rows); ties break to
/// the lowest index. nullopt when no column contains an entity.
/// Throws std::invalid_argument for a table without rows or columns.
std::optional<std::size_t> detect_core_column(const RawTable& table);

TableElements extract_elements(const RawTable& table, const KnowledgeBase& kb,
                               const EntityRetriever& retriever,
                               std::size_t topic_k = 10);

enum class SplitAxis { Rows, Columns };

/// Keeps the first ceil(fraction * n) rows or columns. Fraction must be one
/// of {0.25, 0.5, 0.75, 1.0}; 1.0 returns an identical table.
RawTable split_table(const RawTable& table, SplitAxis axis, double fraction);

}  // namespace tabrec
