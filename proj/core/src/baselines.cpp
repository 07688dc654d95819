#include "tabrec/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include "tabrec/kb.hpp"
#include "tabrec/text.hpp"

namespace tabrec {

namespace {

std::vector<std::string> unique_sorted(std::vector<std::string> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

/// Unique heading terms (tokenized heading words).
std::vector<std::string> heading_terms(const TableView& view) {
  return unique_sorted(view.elements->heading_words);
}

/// Distinct normalized headings (whole strings), for co-occurrence stats.
std::vector<std::string> normalized_headings(const TableView& view) {
  std::vector<std::string> out;
  for (const auto& h : view.table->headings) {
    std::string norm = normalize_heading(h.text);
    if (!norm.empty()) out.push_back(std::move(norm));
  }
  return unique_sorted(std::move(out));
}

std::vector<std::vector<double>> edit_similarity_matrix(
    const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<double>> w(a.size(), std::vector<double>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      w[i][j] = edit_similarity(a[i], b[j]);
    }
  }
  return w;
}

}  // namespace

double msje_score(const TableView& input, const TableView& candidate,
                  double delta) {
  auto a = heading_terms(input);
  auto b = heading_terms(candidate);
  if (a.empty() && b.empty()) return 0.0;
  auto match = max_weight_bipartite_matching(edit_similarity_matrix(a, b), delta);
  double inter = match.total;
  double denom = static_cast<double>(a.size()) + static_cast<double>(b.size()) - inter;
  return denom <= 0.0 ? 0.0 : inter / denom;
}

double entity_coverage(const TableView& input, const TableView& candidate) {
  auto a = unique_sorted(input.elements->entities);
  if (a.empty()) return 0.0;
  auto b = unique_sorted(candidate.elements->entities);
  std::size_t inter = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++inter; ++i; ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return static_cast<double>(inter) / static_cast<double>(a.size());
}

double heading_benefit(const TableView& input, const TableView& candidate,
                       const CorpusStats& stats) {
  auto input_headings = normalized_headings(input);
  auto cand_headings = normalized_headings(candidate);
  if (input_headings.empty() || cand_headings.empty()) return 0.0;

  double total = 0.0;
  for (const auto& h : cand_headings) {
    double benefit = 0.0;
    for (const auto& hi : input_headings) {
      double df = stats.heading_count(hi);
      if (df <= 0.0) continue;  // unseen input heading contributes 0
      benefit += stats.heading_cooccurrence(hi, h) / df;
    }
    total += benefit / static_cast<double>(input_headings.size());
  }
  return total / static_cast<double>(cand_headings.size());  // aggr = average
}

double schema_complement_score(const TableView& input,
                               const TableView& candidate,
                               const CorpusStats& stats) {
  return entity_coverage(input, candidate) *
         heading_benefit(input, candidate, stats);
}

double entity_complement_score(const TableView& input,
                               const TableView& candidate,
                               const KnowledgeBase& kb) {
  const auto& a = input.elements->entities;
  const auto& b = candidate.elements->entities;
  if (a.empty() || b.empty()) return 0.0;
  double total = 0.0;
  for (const auto& e1 : a) {
    for (const auto& e2 : b) total += kb.wlm(e1, e2);
  }
  return total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double nguyen_heading_similarity(const TableView& input,
                                 const TableView& candidate, double delta) {
  auto a = heading_terms(input);
  auto b = heading_terms(candidate);
  if (a.empty() || b.empty()) return 0.0;
  auto match = max_weight_bipartite_matching(edit_similarity_matrix(a, b), delta);
  return match.total / static_cast<double>(std::max(a.size(), b.size()));
}

namespace {

std::vector<std::set<std::string>> column_term_sets(const RawTable& table) {
  std::vector<std::set<std::string>> columns(table.column_count());
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      for (auto& tok : tokenize(row[c].text)) columns[c].insert(std::move(tok));
    }
  }
  return columns;
}

double binary_cosine(const std::set<std::string>& a,
                     const std::set<std::string>& b) {
  if (a.empty() || b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& t : a) inter += b.count(t);
  return static_cast<double>(inter) /
         std::sqrt(static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

}  // namespace

double nguyen_data_similarity(const TableView& input,
                              const TableView& candidate) {
  auto cols_a = column_term_sets(*input.table);
  auto cols_b = column_term_sets(*candidate.table);
  if (cols_a.empty() || cols_b.empty()) return 0.0;

  // Best-match average in both directions; the mean form keeps the score in
  // [0, 1] so identical tables reach 1.
  double sum_a = 0.0;
  for (const auto& ca : cols_a) {
    double best = 0.0;
    for (const auto& cb : cols_b) best = std::max(best, binary_cosine(ca, cb));
    sum_a += best;
  }
  double sum_b = 0.0;
  for (const auto& cb : cols_b) {
    double best = 0.0;
    for (const auto& ca : cols_a) best = std::max(best, binary_cosine(ca, cb));
    sum_b += best;
  }
  return 0.5 * (sum_a / static_cast<double>(cols_a.size()) +
                sum_b / static_cast<double>(cols_b.size()));
}

double nguyen_score(const TableView& input, const TableView& candidate,
                    double alpha, double delta) {
  return alpha * nguyen_heading_similarity(input, candidate, delta) +
         (1.0 - alpha) * nguyen_data_similarity(input, candidate);
}

namespace {

using WeightedVec = std::map<std::string, double>;

double cosine(const WeightedVec& a, const WeightedVec& b) {
  if (a.empty() || b.empty()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [t, w] : a) {
    na += w * w;
    auto it = b.find(t);
    if (it != b.end()) dot += w * it->second;
  }
  for (const auto& [t, w] : b) nb += w * w;
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

/// IDF weights over distinct terms.
WeightedVec idf_vec(const std::vector<std::string>& terms,
                    const CorpusStats& stats) {
  WeightedVec v;
  for (const auto& t : terms) v[t] = stats.idf(t, Field::Catchall);
  return v;
}

/// TF-IDF weights.
WeightedVec tfidf_vec(const std::vector<std::string>& terms,
                      const CorpusStats& stats) {
  WeightedVec v;
  for (const auto& t : terms) v[t] += stats.idf(t, Field::Catchall);
  return v;
}

std::vector<WeightedVec> column_tfidf(const RawTable& table,
                                      const CorpusStats& stats) {
  std::vector<WeightedVec> columns(table.column_count());
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      for (const auto& tok : tokenize(row[c].text)) {
        columns[c][tok] += stats.idf(tok, Field::Catchall);
      }
    }
  }
  return columns;
}

}  // namespace

InfoGatherFeatures infogather_features(const TableView& input,
                                       const TableView& candidate,
                                       const CorpusStats& stats) {
  InfoGatherFeatures f;
  f.data = cosine(idf_vec(input.elements->data_words, stats),
                  idf_vec(candidate.elements->data_words, stats));
  f.page_title = cosine(idf_vec(tokenize(input.table->page_title), stats),
                        idf_vec(tokenize(candidate.table->page_title), stats));
  f.headings = cosine(tfidf_vec(input.elements->heading_words, stats),
                      tfidf_vec(candidate.elements->heading_words, stats));

  auto cols_a = column_tfidf(*input.table, stats);
  auto cols_b = column_tfidf(*candidate.table, stats);
  double best = 0.0;
  for (const auto& ca : cols_a) {
    for (const auto& cb : cols_b) best = std::max(best, cosine(ca, cb));
  }
  f.column = best;
  return f;
}

double infogather_score(const InfoGatherFeatures& features,
                        const std::array<double, 4>& weights) {
  auto f = features.as_array();
  double score = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) score += weights[i] * f[i];
  return score;
}

std::string_view keyword_query_name(KeywordQuery q) {
  switch (q) {
    case KeywordQuery::Entities: return "kw-entities";
    case KeywordQuery::Headings: return "kw-headings";
    case KeywordQuery::Caption: return "kw-caption";
  }
  return "?";
}

std::vector<std::string> keyword_query_terms(const TableView& input,
                                             KeywordQuery variant,
                                             const KnowledgeBase& kb) {
  switch (variant) {
    case KeywordQuery::Entities: {
      std::vector<std::string> terms;
      for (const auto& id : input.elements->entities) {
        if (auto idx = kb.index_of(id)) {
          for (auto& tok : tokenize(kb.record(*idx).label)) {
            terms.push_back(std::move(tok));
          }
        }
      }
      return terms;
    }
    case KeywordQuery::Headings:
      return input.elements->heading_words;
    case KeywordQuery::Caption:
      return tokenize(input.table->caption);
  }
  return {};
}

std::vector<Field> keyword_query_fields(KeywordQuery variant) {
  switch (variant) {
    case KeywordQuery::Entities: return {Field::Entities};
    case KeywordQuery::Headings: return {Field::Headings};
    case KeywordQuery::Caption: return {Field::Caption, Field::Catchall};
  }
  return {};
}

std::vector<SearchHit> keyword_search(const TableView& input,
                                      KeywordQuery variant,
                                      const CorpusIndex& index,
                                      const KnowledgeBase& kb, std::size_t k) {
  auto terms = keyword_query_terms(input, variant, kb);
  if (terms.empty()) return {};
  return index.bm25_search(terms, keyword_query_fields(variant), k);
}

double keyword_rerank_score(const TableView& input, KeywordQuery variant,
                            const CorpusIndex& index, const KnowledgeBase& kb,
                            std::string_view candidate_id) {
  auto terms = keyword_query_terms(input, variant, kb);
  if (terms.empty()) return 0.0;
  return index.bm25_score(terms, keyword_query_fields(variant), candidate_id);
}

}  // namespace tabrec
