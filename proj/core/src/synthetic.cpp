#include "tabrec/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "tabrec/text.hpp"

namespace tabrec {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::size_t below(std::size_t bound) { return next() % bound; }
  double unit() { return static_cast<double>(next() >> 11) / 9007199254740992.0; }

 private:
  std::uint64_t state_;
};

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

// Registry of generated word tokens: token -> embedding cluster.
class TokenRegistry {
 public:
  explicit TokenRegistry(std::size_t topics) : topics_(topics) {}

  std::string topic_token(std::size_t topic, const std::string& token) {
    clusters_[token] = static_cast<int>(topic);
    return token;
  }
  std::string common_token(const std::string& token) {
    clusters_[token] = static_cast<int>(topics_ + fnv1a(token) % 4);
    return token;
  }
  const std::map<std::string, int>& clusters() const { return clusters_; }

 private:
  std::size_t topics_;
  std::map<std::string, int> clusters_;
};

std::vector<float> unit_vector(std::vector<double> v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = static_cast<float>(norm > 0 ? v[i] / norm : 0.0);
  }
  return out;
}

std::vector<double> raw_vector(std::uint64_t seed, std::size_t dim) {
  SplitMix rng(seed);
  std::vector<double> v(dim);
  for (auto& x : v) x = rng.unit() - 0.5;
  return v;
}

std::vector<float> clustered_vector(std::uint64_t base_seed, int cluster,
                                    std::string_view name, std::size_t dim) {
  auto base = raw_vector(mix64(base_seed ^ (0x9e37ull * (cluster + 1))), dim);
  auto noise = raw_vector(mix64(base_seed ^ fnv1a(name)), dim);
  double base_norm = 0.0, noise_norm = 0.0;
  for (double x : base) base_norm += x * x;
  for (double x : noise) noise_norm += x * x;
  base_norm = std::sqrt(base_norm);
  noise_norm = std::sqrt(noise_norm);
  std::vector<double> v(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    double b = base_norm > 0 ? base[i] / base_norm : 0.0;
    double n = noise_norm > 0 ? noise[i] / noise_norm : 0.0;
    v[i] = b + 0.3 * n;
  }
  return unit_vector(std::move(v));
}

}  // namespace

SyntheticCollection make_synthetic_collection(const SyntheticSpec& spec) {
  if (spec.topics == 0 || spec.tables < spec.topics) {
    throw std::invalid_argument("synthetic spec needs tables >= topics >= 1");
  }
  SplitMix rng(mix64(spec.seed));
  TokenRegistry tokens(spec.topics);

  // Entity catalog: per-topic clusters with ring-shaped out-links.
  std::vector<EntityRecord> records;
  std::vector<std::pair<std::string, std::string>> links;
  std::vector<std::pair<std::string, std::string>> redirects;
  auto entity_id = [](std::size_t topic, std::size_t i) {
    return "e" + std::to_string(topic) + "x" + std::to_string(i);
  };
  std::vector<std::vector<std::string>> labels(spec.topics);
  for (std::size_t t = 0; t < spec.topics; ++t) {
    std::string clan = tokens.topic_token(t, "clan" + std::to_string(t));
    labels[t].resize(spec.entities_per_topic);
    for (std::size_t i = 0; i < spec.entities_per_topic; ++i) {
      std::string member =
          tokens.topic_token(t, "m" + std::to_string(t) + "x" + std::to_string(i));
      std::string common =
          tokens.common_token("common" + std::to_string(i % 12));
      EntityRecord rec;
      rec.id = entity_id(t, i);
      rec.label = clan + " " + member;
      rec.abstract_text = clan + " " + member + " chapter " + common;
      records.push_back(rec);
      labels[t][i] = rec.label;
      for (std::size_t d = 1; d <= 3; ++d) {
        links.emplace_back(rec.id, entity_id(t, (i + d) % spec.entities_per_topic));
      }
      if (i % 9 == 0) {
        links.emplace_back(rec.id,
                           entity_id((t + 1) % spec.topics, i));
      }
    }
    redirects.emplace_back(tokens.topic_token(t, "clanpage" + std::to_string(t)),
                           entity_id(t, 0));
  }

  SyntheticCollection out;
  out.kb = KnowledgeBase::build(std::move(records), links, redirects);

  std::size_t per_topic = spec.tables / spec.topics;
  std::size_t remainder = spec.tables % spec.topics;
  static constexpr std::array<double, 8> kOverlapPattern = {
      0.9, 0.7, 0.5, 0.35, 0.25, 0.15, 0.05, 0.0};

  for (std::size_t t = 0; t < spec.topics; ++t) {
    std::size_t count = per_topic + (t < remainder ? 1 : 0);
    std::string clan = "clan" + std::to_string(t);
    for (std::size_t j = 0; j < count; ++j) {
      RawTable table;
      table.table_id = "t" + std::to_string(t) + "x" + std::to_string(j);
      bool is_query = j == 0;
      if (is_query) out.query_ids.push_back(table.table_id);

      std::size_t rows =
          is_query ? spec.rows_max
                   : spec.rows_min + rng.below(spec.rows_max - spec.rows_min + 1);

      // Entity choice: queries take the topic prefix; other tables overlap
      // the query prefix at a cycling rate, with the rest drawn from the
      // non-query range so the overlap grade is controlled.
      std::vector<std::size_t> chosen;
      if (is_query) {
        for (std::size_t i = 0; i < rows; ++i) chosen.push_back(i);
      } else {
        double target = kOverlapPattern[j % kOverlapPattern.size()];
        std::size_t k_overlap = std::min(
            rows, static_cast<std::size_t>(std::lround(target * rows)));
        for (std::size_t i = 0; i < k_overlap; ++i) chosen.push_back(i);
        std::vector<std::size_t> rest;
        for (std::size_t i = spec.rows_max; i < spec.entities_per_topic; ++i) {
          rest.push_back(i);
        }
        for (std::size_t i = rest.size(); i > 1; --i) {
          std::swap(rest[i - 1], rest[rng.below(i)]);
        }
        for (std::size_t i = 0; chosen.size() < rows && i < rest.size(); ++i) {
          chosen.push_back(rest[i]);
        }
      }

      table.caption = "list of " +
                      tokens.common_token("common" + std::to_string((t * 7 + j) % 24)) +
                      " records";
      tokens.common_token("list");
      tokens.common_token("records");
      std::size_t group = j % 6;
      if (group == 0) {
        table.page_title = "clanpage" + std::to_string(t);
      } else {
        table.page_title =
            clan + " " + tokens.common_token("group" + std::to_string(group));
      }
      table.page_entity = out.kb.resolve_to_entity(table.page_title);

      table.headings = {
          {tokens.common_token("name"), std::nullopt},
          {tokens.common_token("category"), std::nullopt},
          {tokens.common_token("metric" + std::to_string(t % 3)), std::nullopt},
          {tokens.common_token("notes"), std::nullopt},
      };
      for (std::size_t r = 0; r < rows; ++r) {
        std::size_t e = chosen[r];
        std::vector<Cell> row(4);
        row[0] = {labels[t][e], entity_id(t, e)};
        row[1] = {tokens.topic_token(t, "t" + std::to_string(t) + "w" +
                                            std::to_string(e % 8)),
                  std::nullopt};
        row[2] = {tokens.common_token("common" + std::to_string((e * 3 + j) % 24)),
                  std::nullopt};
        row[3] = {tokens.common_token("note" + std::to_string((e + j) % 12)) +
                      " " + tokens.topic_token(t, clan),
                  std::nullopt};
        table.rows.push_back(std::move(row));
      }

      table.page_stats.in_links = static_cast<std::int64_t>(rng.below(500));
      table.page_stats.out_links = static_cast<std::int64_t>(rng.below(300));
      table.page_stats.page_views = static_cast<std::int64_t>(rng.below(100000));
      table.page_stats.tables_on_page = static_cast<std::int64_t>(1 + j % 3);
      table.page_stats.table_chars = static_cast<std::int64_t>(200 + rng.below(300));
      table.page_stats.page_chars =
          table.page_stats.table_chars * static_cast<std::int64_t>(2 + j % 4);

      out.corpus.push_back(std::move(table));
    }
  }

  // Clustered embeddings: word vectors over generated tokens, graph vectors
  // over entity ids; same-cluster vectors share a base direction.
  std::vector<std::pair<std::string, std::vector<float>>> word_vecs;
  for (const auto& [token, cluster] : tokens.clusters()) {
    word_vecs.emplace_back(
        token, clustered_vector(mix64(spec.seed ^ 0xabcdull), cluster, token,
                                spec.embedding_dim));
  }
  out.word_vectors = EmbeddingStore::from_vectors(spec.embedding_dim, word_vecs);

  std::vector<std::pair<std::string, std::vector<float>>> graph_vecs;
  for (std::size_t t = 0; t < spec.topics; ++t) {
    for (std::size_t i = 0; i < spec.entities_per_topic; ++i) {
      std::string id = entity_id(t, i);
      graph_vecs.emplace_back(
          id, clustered_vector(mix64(spec.seed ^ 0xfeedull), static_cast<int>(t),
                               id, spec.embedding_dim));
    }
  }
  std::sort(graph_vecs.begin(), graph_vecs.end());
  out.graph_vectors = EmbeddingStore::from_vectors(spec.embedding_dim, graph_vecs);
  return out;
}

Qrels overlap_qrels(
    const std::vector<std::string>& query_ids,
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        entities_by_table,
    double lo, double hi) {
  std::map<std::string, std::set<std::string>> sets;
  for (const auto& [id, ents] : entities_by_table) {
    sets[id] = std::set<std::string>(ents.begin(), ents.end());
  }
  Qrels qrels;
  for (const auto& qid : query_ids) {
    auto qit = sets.find(qid);
    if (qit == sets.end() || qit->second.empty()) continue;
    const auto& qset = qit->second;
    for (const auto& [cid, cset] : sets) {
      if (cid == qid) continue;
      std::size_t inter = 0;
      for (const auto& e : qset) inter += cset.count(e);
      double coverage = static_cast<double>(inter) / static_cast<double>(qset.size());
      if (coverage >= hi) {
        qrels.set(qid, cid, 2);
      } else if (coverage >= lo) {
        qrels.set(qid, cid, 1);
      }
    }
  }
  return qrels;
}

OverlapSplitCollection make_overlap_split_collection() {
  OverlapSplitCollection out;
  constexpr std::size_t kQueryRows = 8;

  std::vector<EntityRecord> records;
  std::vector<std::pair<std::string, std::string>> links;
  auto qe = [](std::size_t i) { return "qe" + std::to_string(i); };
  auto fe = [](std::size_t i) { return "fe" + std::to_string(i); };
  for (std::size_t i = 0; i < kQueryRows; ++i) {
    records.push_back({qe(i), "alpha member" + std::to_string(i),
                       "alpha chapter member" + std::to_string(i), {}});
    links.emplace_back(qe(i), qe((i + 1) % kQueryRows));
  }
  for (std::size_t i = 0; i < 4; ++i) {
    records.push_back({fe(i), "omega member" + std::to_string(i),
                       "omega chapter member" + std::to_string(i), {}});
    links.emplace_back(fe(i), fe((i + 1) % 4));
  }
  out.kb = KnowledgeBase::build(std::move(records), links, {});

  auto make_table = [&](std::string id, const std::vector<std::string>& ents,
                        const std::string& flavor) {
    RawTable t;
    t.table_id = std::move(id);
    t.caption = flavor + " roster";
    t.page_title = flavor + " page";
    t.headings = {{"name", std::nullopt}, {"tag", std::nullopt},
                  {"score", std::nullopt}};
    for (std::size_t r = 0; r < ents.size(); ++r) {
      auto idx = out.kb.index_of(ents[r]);
      std::vector<Cell> row(3);
      row[0] = {out.kb.record(*idx).label, ents[r]};
      row[1] = {flavor, std::nullopt};
      row[2] = {"val" + std::to_string(r), std::nullopt};
      t.rows.push_back(std::move(row));
    }
    t.page_stats.table_chars = 100;
    t.page_stats.page_chars = 400;
    return t;
  };

  std::vector<std::string> query_entities;
  for (std::size_t i = 0; i < kQueryRows; ++i) query_entities.push_back(qe(i));
  out.query_id = "aaq";
  out.corpus.push_back(make_table(out.query_id, query_entities, "alpha"));

  // Nested-prefix candidates c1..c8 (ascending ids break score ties in
  // grade-ascending order) plus disjoint zero-overlap candidates.
  for (std::size_t g = 1; g <= kQueryRows; ++g) {
    std::vector<std::string> ents(query_entities.begin(),
                                  query_entities.begin() + g);
    std::string id = "c" + std::to_string(g);
    out.corpus.push_back(make_table(id, ents, "alpha"));
    out.candidate_ids.push_back(id);
  }
  for (std::size_t z = 0; z < 4; ++z) {
    std::vector<std::string> ents = {fe(z), fe((z + 1) % 4)};
    std::string id = "z" + std::to_string(z);
    out.corpus.push_back(make_table(id, ents, "omega"));
    out.candidate_ids.push_back(id);
  }
  return out;
}

void write_collection_files(const SyntheticCollection& collection,
                            const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  {
    std::ofstream catalog(dir + "/kb_catalog.tsv");
    std::ofstream kb_links(dir + "/kb_links.tsv");
    std::ofstream kb_redirects(dir + "/kb_redirects.tsv");
    if (!catalog || !kb_links || !kb_redirects) {
      throw std::runtime_error("cannot write knowledge base files under " + dir);
    }
    for (std::uint32_t i = 0; i < collection.kb.size(); ++i) {
      const auto& rec = collection.kb.record(i);
      catalog << rec.id << '\t' << rec.label << '\t' << rec.abstract_text << "\n";
      for (std::uint32_t dst : rec.out_links) {
        kb_links << rec.id << '\t' << collection.kb.record(dst).id << "\n";
      }
    }
    // Regenerate redirect pairs from page titles that resolve.
    std::set<std::string> seen;
    for (const auto& table : collection.corpus) {
      const std::string& title = table.page_title;
      if (!seen.insert(title).second) continue;
      std::string canonical = collection.kb.resolve(title);
      if (canonical != title && collection.kb.contains(canonical)) {
        kb_redirects << title << '\t' << canonical << "\n";
      }
    }
  }

  {
    std::ofstream corpus(dir + "/corpus.jsonl");
    if (!corpus) throw std::runtime_error("cannot write corpus under " + dir);
    for (const auto& t : collection.corpus) {
      nlohmann::json j;
      j["id"] = t.table_id;
      j["pgTitle"] = t.page_title;
      j["caption"] = t.caption;
      j["headers"] = nlohmann::json::array();
      for (const auto& h : t.headings) j["headers"].push_back(h.text);
      j["rows"] = nlohmann::json::array();
      for (const auto& row : t.rows) {
        nlohmann::json jr = nlohmann::json::array();
        for (const auto& cell : row) {
          nlohmann::json jc;
          jc["text"] = cell.text;
          if (cell.entity) jc["link"] = *cell.entity;
          jr.push_back(std::move(jc));
        }
        j["rows"].push_back(std::move(jr));
      }
      j["inLinks"] = t.page_stats.in_links;
      j["outLinks"] = t.page_stats.out_links;
      j["pageViews"] = t.page_stats.page_views;
      j["tablesOnPage"] = t.page_stats.tables_on_page;
      j["tableChars"] = t.page_stats.table_chars;
      j["pageChars"] = t.page_stats.page_chars;
      corpus << j.dump() << "\n";
    }
  }

  collection.word_vectors.save(dir + "/word_vectors.txt");
  collection.graph_vectors.save(dir + "/graph_vectors.txt");

  std::ofstream queries(dir + "/queries.txt");
  if (!queries) throw std::runtime_error("cannot write queries under " + dir);
  for (const auto& qid : collection.query_ids) queries << qid << "\n";
}

}  // namespace tabrec
