#include "tabrec/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>

#include "tabrec/kb.hpp"
#include "tabrec/text.hpp"

namespace tabrec {

Field field_from_name(std::string_view name) {
  if (name == "caption") return Field::Caption;
  if (name == "pagetitle") return Field::PageTitle;
  if (name == "headings") return Field::Headings;
  if (name == "entities") return Field::Entities;
  if (name == "data") return Field::Data;
  if (name == "catchall") return Field::Catchall;
  throw std::invalid_argument("unknown field: " + std::string(name));
}

std::string_view field_name(Field f) {
  switch (f) {
    case Field::Caption: return "caption";
    case Field::PageTitle: return "pagetitle";
    case Field::Headings: return "headings";
    case Field::Entities: return "entities";
    case Field::Data: return "data";
    case Field::Catchall: return "catchall";
  }
  return "?";
}

double CorpusStats::idf(std::string_view term, Field field) const {
  if (corpus_size_ == 0) return 0.0;
  double df_clamped = std::max<std::uint32_t>(df(term, field), 1);
  return std::log(static_cast<double>(corpus_size_) / df_clamped);
}

std::uint32_t CorpusStats::df(std::string_view term, Field field) const {
  const auto& table = df_[static_cast<std::size_t>(field)];
  auto it = table.find(std::string(term));
  return it == table.end() ? 0 : it->second;
}

std::uint32_t CorpusStats::heading_count(std::string_view heading) const {
  auto it = heading_df_.find(normalize_heading(heading));
  return it == heading_df_.end() ? 0 : it->second;
}

std::uint32_t CorpusStats::heading_cooccurrence(std::string_view h1,
                                                std::string_view h2) const {
  std::string a = normalize_heading(h1);
  std::string b = normalize_heading(h2);
  if (b < a) std::swap(a, b);
  auto it = heading_codf_.find({a, b});
  return it == heading_codf_.end() ? 0 : it->second;
}

namespace {

/// Token bags for each index field of one table.
std::array<std::vector<std::string>, kFieldCount> field_tokens(
    const RawTable& t, const KnowledgeBase* kb) {
  std::array<std::vector<std::string>, kFieldCount> bags;
  bags[static_cast<std::size_t>(Field::Caption)] = tokenize(t.caption);
  bags[static_cast<std::size_t>(Field::PageTitle)] = tokenize(t.page_title);

  auto& headings = bags[static_cast<std::size_t>(Field::Headings)];
  for (const auto& h : t.headings) {
    for (auto& tok : tokenize(h.text)) headings.push_back(std::move(tok));
  }

  auto& data = bags[static_cast<std::size_t>(Field::Data)];
  std::set<std::string> entity_ids;
  for (const auto& h : t.headings) {
    if (h.entity) entity_ids.insert(*h.entity);
  }
  for (const auto& row : t.rows) {
    for (const auto& cell : row) {
      for (auto& tok : tokenize(cell.text)) data.push_back(std::move(tok));
      if (cell.entity) entity_ids.insert(*cell.entity);
    }
  }

  auto& entities = bags[static_cast<std::size_t>(Field::Entities)];
  for (const auto& id : entity_ids) {
    std::string label = id;
    if (kb) {
      if (auto idx = kb->index_of(id)) label = kb->record(*idx).label;
    }
    for (auto& tok : tokenize(label)) entities.push_back(std::move(tok));
  }

  auto& catchall = bags[static_cast<std::size_t>(Field::Catchall)];
  for (Field f : {Field::Caption, Field::PageTitle, Field::Headings, Field::Data}) {
    const auto& bag = bags[static_cast<std::size_t>(f)];
    catchall.insert(catchall.end(), bag.begin(), bag.end());
  }
  return bags;
}

double bm25_idf(std::size_t n_docs, std::size_t df) {
  return std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
}

}  // namespace

CorpusIndex CorpusIndex::build(const std::vector<RawTable>& corpus,
                               const KnowledgeBase* kb) {
  CorpusIndex index;
  index.doc_ids_.reserve(corpus.size());
  for (const auto& t : corpus) index.doc_ids_.push_back(t.table_id);
  std::sort(index.doc_ids_.begin(), index.doc_ids_.end());
  for (std::uint32_t i = 0; i < index.doc_ids_.size(); ++i) {
    if (!index.doc_index_.emplace(index.doc_ids_[i], i).second) {
      throw std::runtime_error("duplicate table id: " + index.doc_ids_[i]);
    }
  }

  for (auto& fi : index.fields_) fi.doc_len.assign(index.doc_ids_.size(), 0);

  for (const auto& t : corpus) {
    std::uint32_t doc = index.doc_index_.at(t.table_id);
    auto bags = field_tokens(t, kb);
    for (std::size_t f = 0; f < kFieldCount; ++f) {
      auto& fi = index.fields_[f];
      fi.doc_len[doc] = static_cast<std::uint32_t>(bags[f].size());
      fi.total_len += bags[f].size();
      std::map<std::string, std::uint32_t> counts;
      for (auto& tok : bags[f]) ++counts[std::move(tok)];
      for (auto& [term, tf] : counts) {
        fi.postings[term].push_back({doc, tf});
      }
    }

    std::set<std::string> headings;
    for (const auto& h : t.headings) {
      std::string norm = normalize_heading(h.text);
      if (!norm.empty()) headings.insert(std::move(norm));
    }
    for (const auto& h : headings) ++index.stats_.heading_df_[h];
    for (auto it1 = headings.begin(); it1 != headings.end(); ++it1) {
      for (auto it2 = std::next(it1); it2 != headings.end(); ++it2) {
        ++index.stats_.heading_codf_[{*it1, *it2}];
      }
    }
  }

  // Postings were appended in corpus order; keep them sorted by doc index.
  for (auto& fi : index.fields_) {
    for (auto& [term, plist] : fi.postings) {
      std::sort(plist.begin(), plist.end(),
                [](const Posting& a, const Posting& b) { return a.doc < b.doc; });
    }
  }

  index.rebuild_df();
  return index;
}

void CorpusIndex::rebuild_df() {
  stats_.corpus_size_ = doc_ids_.size();
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    stats_.df_[f].clear();
    for (const auto& [term, plist] : fields_[f].postings) {
      stats_.df_[f][term] = static_cast<std::uint32_t>(plist.size());
    }
  }
}

std::optional<std::uint32_t> CorpusIndex::doc_index(
    std::string_view table_id) const {
  auto it = doc_index_.find(std::string(table_id));
  if (it == doc_index_.end()) return std::nullopt;
  return it->second;
}

void CorpusIndex::accumulate_bm25(
    const std::vector<std::string>& query, Field field,
    std::unordered_map<std::uint32_t, double>& scores) const {
  const auto& fi = fields_[static_cast<std::size_t>(field)];
  double avg = fi.avg_len();
  if (avg <= 0.0) return;
  for (const auto& term : query) {
    auto it = fi.postings.find(term);
    if (it == fi.postings.end()) continue;  // df = 0: term contributes nothing
    double idf = bm25_idf(size(), it->second.size());
    for (const auto& p : it->second) {
      double len_norm = 1.0 - kBm25B + kBm25B * fi.doc_len[p.doc] / avg;
      double tf_part = p.tf * (kBm25K1 + 1.0) / (p.tf + kBm25K1 * len_norm);
      scores[p.doc] += idf * tf_part;
    }
  }
}

std::vector<SearchHit> CorpusIndex::bm25_search(
    const std::vector<std::string>& query, Field field, std::size_t k) const {
  return bm25_search(query, std::vector<Field>{field}, k);
}

std::vector<SearchHit> CorpusIndex::bm25_search(
    const std::vector<std::string>& query, const std::vector<Field>& fields,
    std::size_t k) const {
  std::unordered_map<std::uint32_t, double> scores;
  for (Field f : fields) accumulate_bm25(query, f, scores);

  std::vector<SearchHit> hits;
  hits.reserve(scores.size());
  for (const auto& [doc, score] : scores) {
    hits.push_back({doc_ids_[doc], score});
  }
  std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.table_id < b.table_id;
  });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

double CorpusIndex::bm25_score(const std::vector<std::string>& query,
                               const std::vector<Field>& fields,
                               std::string_view table_id) const {
  auto doc = doc_index(table_id);
  if (!doc) return 0.0;
  double total = 0.0;
  for (Field field : fields) {
    const auto& fi = fields_[static_cast<std::size_t>(field)];
    double avg = fi.avg_len();
    if (avg <= 0.0) continue;
    for (const auto& term : query) {
      auto it = fi.postings.find(term);
      if (it == fi.postings.end()) continue;
      const auto& plist = it->second;
      auto pit = std::lower_bound(
          plist.begin(), plist.end(), *doc,
          [](const Posting& p, std::uint32_t d) { return p.doc < d; });
      if (pit == plist.end() || pit->doc != *doc) continue;
      double idf = bm25_idf(size(), plist.size());
      double len_norm = 1.0 - kBm25B + kBm25B * fi.doc_len[*doc] / avg;
      total += idf * pit->tf * (kBm25K1 + 1.0) / (pit->tf + kBm25K1 * len_norm);
    }
  }
  return total;
}

namespace {

constexpr char kIndexMagic[4] = {'T', 'B', 'I', 'X'};
constexpr std::uint32_t kIndexVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_str(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
std::string read_str(std::istream& in) {
  std::string s(read_u32(in), '\0');
  in.read(s.data(), static_cast<std::streamsize>(s.size()));
  return s;
}

}  // namespace

void CorpusIndex::save(const std::string& path,
                       const std::string& header_text) const {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write index file " + tmp);
    out.write(kIndexMagic, sizeof(kIndexMagic));
    write_u32(out, kIndexVersion);
    write_str(out, header_text.empty() ? header_text_ : header_text);

    write_u64(out, doc_ids_.size());
    for (const auto& id : doc_ids_) write_str(out, id);

    for (const auto& fi : fields_) {
      write_u64(out, fi.total_len);
      for (std::uint32_t len : fi.doc_len) write_u32(out, len);
      write_u64(out, fi.postings.size());
      for (const auto& [term, plist] : fi.postings) {
        write_str(out, term);
        write_u64(out, plist.size());
        for (const auto& p : plist) {
          write_u32(out, p.doc);
          write_u32(out, p.tf);
        }
      }
    }

    write_u64(out, stats_.heading_df_.size());
    std::vector<std::string> headings;
    headings.reserve(stats_.heading_df_.size());
    for (const auto& [h, c] : stats_.heading_df_) headings.push_back(h);
    std::sort(headings.begin(), headings.end());
    for (const auto& h : headings) {
      write_str(out, h);
      write_u32(out, stats_.heading_df_.at(h));
    }

    write_u64(out, stats_.heading_codf_.size());
    for (const auto& [pair, count] : stats_.heading_codf_) {
      write_str(out, pair.first);
      write_str(out, pair.second);
      write_u32(out, count);
    }
    if (!out) throw std::runtime_error("failed writing index file " + tmp);
  }
  std::remove(path.c_str());
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move " + tmp + " into place");
  }
}

CorpusIndex CorpusIndex::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open index file " + path);
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kIndexMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("not an index file: " + path);
  }
  std::uint32_t version = read_u32(in);
  if (version != kIndexVersion) {
    throw std::runtime_error("unsupported index version " +
                             std::to_string(version) + " in " + path);
  }

  CorpusIndex index;
  index.header_text_ = read_str(in);
  std::uint64_t n = read_u64(in);
  index.doc_ids_.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) index.doc_ids_.push_back(read_str(in));
  for (std::uint32_t i = 0; i < index.doc_ids_.size(); ++i) {
    index.doc_index_.emplace(index.doc_ids_[i], i);
  }

  for (auto& fi : index.fields_) {
    fi.total_len = read_u64(in);
    fi.doc_len.resize(n);
    for (auto& len : fi.doc_len) len = read_u32(in);
    std::uint64_t terms = read_u64(in);
    for (std::uint64_t t = 0; t < terms; ++t) {
      std::string term = read_str(in);
      std::uint64_t count = read_u64(in);
      std::vector<Posting> plist(count);
      for (auto& p : plist) {
        p.doc = read_u32(in);
        p.tf = read_u32(in);
      }
      fi.postings.emplace(std::move(term), std::move(plist));
    }
  }

  std::uint64_t n_headings = read_u64(in);
  for (std::uint64_t i = 0; i < n_headings; ++i) {
    std::string h = read_str(in);
    index.stats_.heading_df_[std::move(h)] = read_u32(in);
  }
  std::uint64_t n_pairs = read_u64(in);
  for (std::uint64_t i = 0; i < n_pairs; ++i) {
    std::string a = read_str(in);
    std::string b = read_str(in);
    index.stats_.heading_codf_[{std::move(a), std::move(b)}] = read_u32(in);
  }
  if (!in) throw std::runtime_error("truncated index file: " + path);

  index.rebuild_df();
  return index;
}

std::vector<std::string> candidate_pool(const RawTable& table,
                                        const TableElements& elements,
                                        const CorpusIndex& index,
                                        const KnowledgeBase& kb,
                                        std::size_t per_query_k) {
  std::set<std::string> pool;
  auto add_hits = [&](const std::vector<SearchHit>& hits) {
    for (const auto& h : hits) pool.insert(h.table_id);
  };

  std::vector<std::string> caption_query = tokenize(table.caption);
  if (!caption_query.empty()) {
    add_hits(index.bm25_search(caption_query,
                               {Field::Caption, Field::Catchall}, per_query_k));
  }

  std::vector<std::string> entity_query;
  auto add_label = [&](const std::string& id) {
    if (auto idx = kb.index_of(id)) {
      for (auto& tok : tokenize(kb.record(*idx).label)) {
        entity_query.push_back(std::move(tok));
      }
    }
  };
  for (const auto& id : elements.entities) add_label(id);
  if (table.page_entity) add_label(*table.page_entity);
  if (!entity_query.empty()) {
    add_hits(index.bm25_search(entity_query, Field::Entities, per_query_k));
  }

  if (!elements.heading_words.empty()) {
    add_hits(index.bm25_search(elements.heading_words, Field::Headings,
                               per_query_k));
  }

  pool.erase(table.table_id);
  return {pool.begin(), pool.end()};
}

}  // namespace tabrec
