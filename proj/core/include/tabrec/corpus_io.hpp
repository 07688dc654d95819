#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tabrec/table.hpp"

namespace tabrec {

class KnowledgeBase;

/// Raised for records that do not conform to the corpus schema. `field`
/// names the offending field.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string field, const std::string& message)
      : std::runtime_error(message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Parses one corpus record (a JSON object). Cell links resolve to entity
/// ids when present in the knowledge base, otherwise the anchor text is
/// kept as plain text. Ragged rows are padded with empty cells up to the
/// heading width. Pass kb == nullptr to skip entity resolution.
RawTable parse_table(const std::string& json_record, const KnowledgeBase* kb);

/// Reads newline-delimited JSON, one table per line.
std::vector<RawTable> load_corpus(const std::string& path,
                                  const KnowledgeBase* kb);

/// Normalized table store: corpus records with resolved entity annotations
/// and pre-extracted elements, one JSON object per line.
struct StoredTable {
  RawTable table;
  TableElements elements;
};

void save_table_store(const std::string& path,
                      const std::vector<StoredTable>& tables,
                      const std::string& header_comment = "");
std::vector<StoredTable> load_table_store(const std::string& path);

}  // namespace tabrec
