#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tabrec/embedding.hpp"
#include "tabrec/kb.hpp"
#include "tabrec/table.hpp"
#include "tabrec/trec.hpp"

namespace tabrec {

/// Parameters of the bundled desk-scale test collection: topical clusters of
/// tables over a small entity catalog, with clustered synthetic embeddings.
/// Captions are deliberately uninformative templates; the relevance signal
/// lives in entity overlap.
struct SyntheticSpec {
  std::size_t tables = 300;
  std::size_t topics = 10;   // one query table per topic
  std::size_t entities_per_topic = 40;
  std::size_t rows_min = 6;
  std::size_t rows_max = 10;
  std::size_t embedding_dim = 16;
  std::uint64_t seed = 7;
};

struct SyntheticCollection {
  std::vector<RawTable> corpus;  // query tables are corpus members
  std::vector<std::string> query_ids;
  KnowledgeBase kb;
  EmbeddingStore word_vectors;
  EmbeddingStore graph_vectors;
};

SyntheticCollection make_synthetic_collection(const SyntheticSpec& spec = {});

/// Graded labels from the entity-overlap rule: grade 2 when
/// |E_q ∩ E_c| / |E_q| >= hi, grade 1 when >= lo, else 0. Overlap is taken
/// over core-column entities of the extracted elements.
Qrels overlap_qrels(
    const std::vector<std::string>& query_ids,
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        entities_by_table,
    double lo = 0.2, double hi = 0.5);

/// Tiny single-topic collection for the input-size experiment: candidates
/// hold nested prefixes of the query's entity rows, so entity coverage
/// refines monotonically as the input grows row-wise.
struct OverlapSplitCollection {
  std::vector<RawTable> corpus;  // query first, then candidates
  std::string query_id;
  std::vector<std::string> candidate_ids;
  KnowledgeBase kb;
};

OverlapSplitCollection make_overlap_split_collection();

/// Writes the collection in the external interchange formats: corpus.jsonl,
/// kb_catalog.tsv / kb_links.tsv / kb_redirects.tsv, word_vectors.txt,
/// graph_vectors.txt and queries.txt under `dir`.
void write_collection_files(const SyntheticCollection& collection,
                            const std::string& dir);

}  // namespace tabrec
