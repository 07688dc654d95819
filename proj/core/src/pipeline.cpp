#include "tabrec/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "tabrec/baselines.hpp"

namespace tabrec {

bool is_learned_variant(const std::string& variant) {
  const auto& known = FeatureLayout::known_variants();
  return std::find(known.begin(), known.end(), variant) != known.end();
}

const std::vector<std::string>& Engine::baseline_variants() {
  static const std::vector<std::string> kVariants = {
      "kw-entities", "kw-headings", "kw-caption", "msje",
      "schema-complement", "entity-complement", "nguyen"};
  return kVariants;
}

bool is_baseline_variant(const std::string& variant) {
  const auto& known = Engine::baseline_variants();
  return std::find(known.begin(), known.end(), variant) != known.end();
}

Engine::Engine(ExperimentConfig cfg) : cfg_(std::move(cfg)) {}

std::string Engine::store_path() const { return cfg_.workdir + "/tables.jsonl"; }
std::string Engine::index_path() const { return cfg_.workdir + "/index.bin"; }

void Engine::load_kb() {
  if (kb_loaded_) return;
  kb_ = KnowledgeBase::load(cfg_.kb_catalog, cfg_.kb_links, cfg_.kb_redirects,
                            cfg_.adjacency_mutual
                                ? AdjacencyMode::LinkBothDirections
                                : AdjacencyMode::LinkEitherDirection);
  mlm_ = std::make_unique<MlmIndex>(kb_, cfg_.mlm_w_label, cfg_.mlm_w_abstract);
  kb_loaded_ = true;
}

void Engine::load_embeddings() {
  if (embeddings_loaded_) return;
  word_vectors_ = EmbeddingStore::load(cfg_.word_embeddings);
  graph_vectors_ = EmbeddingStore::load(cfg_.graph_embeddings);
  embeddings_loaded_ = true;
}

void Engine::load_store() {
  if (store_loaded_) return;
  tables_ = load_table_store(store_path());
  index_tables();
  store_loaded_ = true;
}

void Engine::load_index() {
  if (index_loaded_) return;
  index_ = CorpusIndex::load(index_path());
  index_loaded_ = true;
}

void Engine::index_tables() {
  by_id_.clear();
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    if (!by_id_.emplace(tables_[i].table.table_id, i).second) {
      throw std::runtime_error("duplicate table id in store: " +
                               tables_[i].table.table_id);
    }
  }
}

void Engine::ingest() {
  load_kb();
  auto raw = load_corpus(cfg_.corpus, &kb_);
  tables_.clear();
  tables_.reserve(raw.size());
  for (auto& table : raw) {
    StoredTable st;
    st.elements = extract_elements(table, kb_, *mlm_, cfg_.topic_k);
    st.table = std::move(table);
    tables_.push_back(std::move(st));
  }
  index_tables();
  store_loaded_ = true;
  std::filesystem::create_directories(cfg_.workdir);
  save_table_store(store_path(), tables_, cfg_.resolved_text());
}

void Engine::build_and_save_index() {
  load_store();
  load_kb();
  std::vector<RawTable> raw;
  raw.reserve(tables_.size());
  for (const auto& st : tables_) raw.push_back(st.table);
  index_ = CorpusIndex::build(raw, &kb_);
  index_loaded_ = true;
  std::filesystem::create_directories(cfg_.workdir);
  index_.save(index_path(), cfg_.resolved_text());
}

void Engine::adopt(SyntheticCollection&& collection) {
  kb_ = std::move(collection.kb);
  mlm_ = std::make_unique<MlmIndex>(kb_, cfg_.mlm_w_label, cfg_.mlm_w_abstract);
  kb_loaded_ = true;

  word_vectors_ = std::move(collection.word_vectors);
  graph_vectors_ = std::move(collection.graph_vectors);
  embeddings_loaded_ = true;

  tables_.clear();
  tables_.reserve(collection.corpus.size());
  for (auto& table : collection.corpus) {
    StoredTable st;
    st.elements = extract_elements(table, kb_, *mlm_, cfg_.topic_k);
    st.table = std::move(table);
    tables_.push_back(std::move(st));
  }
  index_tables();
  store_loaded_ = true;

  std::vector<RawTable> raw;
  raw.reserve(tables_.size());
  for (const auto& st : tables_) raw.push_back(st.table);
  index_ = CorpusIndex::build(raw, &kb_);
  index_loaded_ = true;
}

bool Engine::has_table(const std::string& table_id) const {
  return by_id_.count(table_id) > 0;
}

TableView Engine::view(const std::string& table_id) const {
  auto it = by_id_.find(table_id);
  if (it == by_id_.end()) {
    throw std::out_of_range("unknown table id: " + table_id);
  }
  const StoredTable& st = tables_[it->second];
  return {&st.table, &st.elements};
}

std::vector<std::string> Engine::pool(const std::string& table_id) const {
  TableView v = view(table_id);
  return candidate_pool(*v.table, *v.elements, index_, kb_, cfg_.pool_k);
}

std::vector<std::string> Engine::load_queries() const {
  std::ifstream in(cfg_.queries);
  if (!in) throw std::runtime_error("cannot open queries file " + cfg_.queries);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

RepresentationInputs Engine::representation_inputs() const {
  RepresentationInputs in;
  in.word_vectors = &word_vectors_;
  in.graph_vectors = &graph_vectors_;
  in.kb = &kb_;
  in.stats = &index_.stats();
  return in;
}

MatchingParams Engine::matching_params() const {
  MatchingParams params;
  params.delta = cfg_.delta;
  params.alpha = cfg_.alpha;
  params.normalize_late_sum = cfg_.normalize_late_sum;
  return params;
}

GainScheme Engine::gain_scheme() const {
  return cfg_.gain == "linear" ? GainScheme::Linear : GainScheme::Exponential;
}

FeatureExtractor Engine::make_extractor() const {
  return FeatureExtractor(cfg_.variant, representation_inputs(),
                          matching_params());
}

const TableRepr& Engine::cached_repr(const std::string& table_id,
                                     const FeatureExtractor& extractor) const {
  auto it = repr_cache_.find(table_id);
  if (it == repr_cache_.end() ||
      it->second.has_representations() != extractor.needs_representations()) {
    it = repr_cache_
             .insert_or_assign(table_id, extractor.prepare(view(table_id)))
             .first;
  }
  return it->second;
}

Dataset Engine::build_dataset(const std::vector<std::string>& query_ids,
                              const Qrels& qrels) const {
  FeatureExtractor extractor = make_extractor();
  Dataset data(extractor.layout());
  for (const auto& qid : query_ids) {
    const TableRepr& qrep = cached_repr(qid, extractor);
    for (const auto& cid : pool(qid)) {
      const TableRepr& crep = cached_repr(cid, extractor);
      auto features = extractor.extract(qrep, crep);
      data.add_row(qid, cid, qrels.grade(qid, cid), features);
    }
  }
  return data;
}

Run Engine::baseline_run(const std::string& variant,
                         const std::vector<std::string>& query_ids) const {
  Run run(variant);
  auto score_pool = [&](auto&& scorer) {
    for (const auto& qid : query_ids) {
      TableView qview = view(qid);
      for (const auto& cid : pool(qid)) {
        run.add(qid, cid, scorer(qview, view(cid)));
      }
    }
  };

  if (variant == "kw-entities" || variant == "kw-headings" ||
      variant == "kw-caption") {
    KeywordQuery kq = variant == "kw-entities"  ? KeywordQuery::Entities
                      : variant == "kw-headings" ? KeywordQuery::Headings
                                                 : KeywordQuery::Caption;
    score_pool([&](const TableView& q, const TableView& c) {
      return keyword_rerank_score(q, kq, index_, kb_, c.table->table_id);
    });
  } else if (variant == "msje") {
    score_pool([&](const TableView& q, const TableView& c) {
      return msje_score(q, c, cfg_.delta);
    });
  } else if (variant == "schema-complement") {
    score_pool([&](const TableView& q, const TableView& c) {
      return schema_complement_score(q, c, index_.stats());
    });
  } else if (variant == "entity-complement") {
    score_pool([&](const TableView& q, const TableView& c) {
      return entity_complement_score(q, c, kb_);
    });
  } else if (variant == "nguyen") {
    score_pool([&](const TableView& q, const TableView& c) {
      return nguyen_score(q, c, cfg_.alpha, cfg_.delta);
    });
  } else {
    throw std::invalid_argument("unknown baseline variant: " + variant);
  }
  run.sort_and_validate();
  return run;
}

Run Engine::learned_run(const Dataset& data) const {
  if (cfg_.variant == "infogather") {
    return cross_validate_linear(data, cfg_.folds, cfg_.seed, cfg_.variant);
  }
  ForestParams params{cfg_.trees, cfg_.max_features, cfg_.seed};
  return cross_validate_forest(data, cfg_.folds, params, cfg_.variant);
}

CvForest Engine::learned_cv(const Dataset& data) const {
  ForestParams params{cfg_.trees, cfg_.max_features, cfg_.seed};
  return cross_validate_forest_models(data, cfg_.folds, params, cfg_.variant);
}

PairScorerFn Engine::cv_scorer(std::shared_ptr<CvForest> cv) const {
  auto extractor = std::make_shared<FeatureExtractor>(make_extractor());
  return [this, cv, extractor](const std::string& qid, const TableView& query,
                               const TableView& candidate) {
    TableRepr qrep = extractor->prepare(query);
    const TableRepr& crep =
        cached_repr(candidate.table->table_id, *extractor);
    auto features = extractor->extract(qrep, crep);
    return cv->model_for(qid).predict(features);
  };
}

}  // namespace tabrec
