#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tabrec/table.hpp"

namespace tabrec {

class KnowledgeBase;

enum class Field : std::uint8_t {
  Caption = 0,
  PageTitle = 1,
  Headings = 2,
  Entities = 3,
  Data = 4,
  Catchall = 5,
};
inline constexpr std::size_t kFieldCount = 6;

Field field_from_name(std::string_view name);  // throws on unknown field
std::string_view field_name(Field f);

struct Posting {
  std::uint32_t doc = 0;  // index into doc id table
  std::uint32_t tf = 0;
  bool operator==(const Posting&) const = default;
};

struct SearchHit {
  std::string table_id;
  double score = 0.0;
};

/// Heading co-occurrence statistics and per-field document frequencies.
/// idf(t) = log(N / df) with df clamped to >= 1.
class CorpusStats {
 public:
  std::size_t corpus_size() const { return corpus_size_; }
  double idf(std::string_view term, Field field = Field::Catchall) const;
  std::uint32_t df(std::string_view term, Field field) const;
  std::uint32_t heading_count(std::string_view heading) const;
  std::uint32_t heading_cooccurrence(std::string_view h1, std::string_view h2) const;

  bool operator==(const CorpusStats&) const = default;

 private:
  friend class CorpusIndex;
  std::size_t corpus_size_ = 0;
  std::array<std::unordered_map<std::string, std::uint32_t>, kFieldCount> df_;
  std::unordered_map<std::string, std::uint32_t> heading_df_;
  std::map<std::pair<std::string, std::string>, std::uint32_t> heading_codf_;
};

/// Per-field inverted index over the table corpus with BM25 scoring
/// (k1 = 1.2, b = 0.75). Immutable after build; reads are thread-safe.
class CorpusIndex {
 public:
  static constexpr double kBm25K1 = 1.2;
  static constexpr double kBm25B = 0.75;

  CorpusIndex() = default;

  /// Builds the index and exact corpus statistics; aborts on duplicate ids.
  static CorpusIndex build(const std::vector<RawTable>& corpus,
                           const KnowledgeBase* kb);

  std::size_t size() const { return doc_ids_.size(); }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  std::optional<std::uint32_t> doc_index(std::string_view table_id) const;
  const CorpusStats& stats() const { return stats_; }

  /// Top-k BM25 over one field; ties break by table id. Terms absent from
  /// the field contribute nothing.
  std::vector<SearchHit> bm25_search(const std::vector<std::string>& query,
                                     Field field, std::size_t k) const;

  /// Sums BM25 field scores over a field set ("caption+catchall" searches).
  std::vector<SearchHit> bm25_search(const std::vector<std::string>& query,
                                     const std::vector<Field>& fields,
                                     std::size_t k) const;

  /// BM25 score of one document, for candidate re-ranking.
  double bm25_score(const std::vector<std::string>& query,
                    const std::vector<Field>& fields,
                    std::string_view table_id) const;

  /// The header text (resolved configuration) is stored in the file and
  /// survives reloading, keeping saves byte-identical.
  void save(const std::string& path, const std::string& header_text = "") const;
  static CorpusIndex load(const std::string& path);
  const std::string& header_text() const { return header_text_; }

  bool operator==(const CorpusIndex&) const = default;

 private:
  struct FieldIndex {
    std::map<std::string, std::vector<Posting>> postings;
    std::vector<std::uint32_t> doc_len;
    std::uint64_t total_len = 0;
    double avg_len() const {
      return doc_len.empty() ? 0.0
                             : static_cast<double>(total_len) / doc_len.size();
    }
    bool operator==(const FieldIndex&) const = default;
  };

  void accumulate_bm25(const std::vector<std::string>& query, Field field,
                       std::unordered_map<std::uint32_t, double>& scores) const;
  void rebuild_df();

  std::vector<std::string> doc_ids_;  // sorted
  std::unordered_map<std::string, std::uint32_t> doc_index_;
  std::array<FieldIndex, kFieldCount> fields_;
  CorpusStats stats_;
  std::string header_text_;
};

/// Union of the top-k results of the three pooling queries (caption against
/// caption+catchall, entity labels against entities, headings against
/// headings), with the input table itself removed. Sorted by table id.
std::vector<std::string> candidate_pool(const RawTable& table,
                                        const TableElements& elements,
                                        const CorpusIndex& index,
                                        const KnowledgeBase& kb,
                                        std::size_t per_query_k = 150);

}  // namespace tabrec
