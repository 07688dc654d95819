#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "tabrec/pipeline.hpp"

using namespace tabrec;

namespace {

SyntheticSpec small_spec() {
  SyntheticSpec spec;
  spec.tables = 80;
  spec.topics = 4;
  spec.entities_per_topic = 30;
  spec.rows_min = 5;
  spec.rows_max = 8;
  spec.embedding_dim = 8;
  spec.seed = 11;
  return spec;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.variant = "CRAB-2";
  cfg.trees = 40;
  cfg.folds = 4;
  cfg.pool_k = 50;
  cfg.seed = 5;
  return cfg;
}

Qrels collection_qrels(const Engine& engine,
                       const std::vector<std::string>& query_ids) {
  std::vector<std::pair<std::string, std::vector<std::string>>> ents;
  for (const auto& st : engine.tables()) {
    ents.emplace_back(st.table.table_id, st.elements.entities);
  }
  return overlap_qrels(query_ids, ents);
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("adopted collections support pooling and datasets") {
  Engine engine(small_config());
  auto collection = make_synthetic_collection(small_spec());
  auto queries = collection.query_ids;
  engine.adopt(std::move(collection));

  CHECK(engine.tables().size() == 80);
  CHECK(engine.index().size() == 80);
  REQUIRE(queries.size() == 4);

  for (const auto& qid : queries) {
    auto pool = engine.pool(qid);
    CHECK(pool.size() <= 3 * engine.config().pool_k);
    std::set<std::string> unique(pool.begin(), pool.end());
    CHECK(unique.size() == pool.size());
    for (const auto& id : pool) CHECK(id != qid);
  }

  Qrels qrels = collection_qrels(engine, queries);
  Dataset data = engine.build_dataset(queries, qrels);
  CHECK(data.feature_count() == 56);
  CHECK(data.rows() > 0);
  CHECK(data.query_ids().size() == 4);

  // Learned CV run covers every query.
  Run run = engine.learned_run(data);
  CHECK(run.query_ids().size() == 4);

  // Baselines produce runs over the same pools.
  for (const auto& variant : Engine::baseline_variants()) {
    Run baseline = engine.baseline_run(variant, queries);
    CHECK(baseline.query_ids().size() == 4);
  }
}

TEST_CASE("every learned variant builds its dataset and a CV run") {
  auto collection = make_synthetic_collection(small_spec());
  auto queries = collection.query_ids;

  static const std::vector<std::pair<std::string, std::size_t>> kVariants = {
      {"HCF-1", 10},  {"HCF-2", 30},  {"CRAB-1", 36}, {"CRAB-2", 56},
      {"CRAB-3", 92}, {"CRAB-4", 128}, {"infogather", 4}};
  for (const auto& [variant, width] : kVariants) {
    ExperimentConfig cfg = small_config();
    cfg.variant = variant;
    cfg.trees = 10;
    Engine engine(cfg);
    auto copy = make_synthetic_collection(small_spec());
    engine.adopt(std::move(copy));
    Qrels qrels = collection_qrels(engine, queries);
    Dataset data = engine.build_dataset(queries, qrels);
    CHECK(data.feature_count() == width);
    Run run = engine.learned_run(data);
    CHECK(run.query_ids().size() == queries.size());
    double value = ndcg(run, qrels, 10).mean;
    CHECK(value >= 0.0);
    CHECK(value <= 1.0);
  }
}

TEST_CASE("variant dispatch catches unknown names") {
  CHECK(is_learned_variant("CRAB-2"));
  CHECK(is_learned_variant("infogather"));
  CHECK_FALSE(is_learned_variant("msje"));
  CHECK(is_baseline_variant("msje"));
  CHECK_FALSE(is_baseline_variant("CRAB-2"));

  Engine engine(small_config());
  auto collection = make_synthetic_collection(small_spec());
  engine.adopt(std::move(collection));
  CHECK_THROWS_AS(engine.baseline_run("bogus", {"t0x0"}), std::invalid_argument);
}

TEST_CASE("ingest and index persist through the work directory") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "tabrec_pipeline_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  auto collection = make_synthetic_collection(small_spec());
  write_collection_files(collection, dir.string());

  ExperimentConfig cfg = small_config();
  cfg.corpus = (dir / "corpus.jsonl").string();
  cfg.kb_catalog = (dir / "kb_catalog.tsv").string();
  cfg.kb_links = (dir / "kb_links.tsv").string();
  cfg.kb_redirects = (dir / "kb_redirects.tsv").string();
  cfg.word_embeddings = (dir / "word_vectors.txt").string();
  cfg.graph_embeddings = (dir / "graph_vectors.txt").string();
  cfg.queries = (dir / "queries.txt").string();
  cfg.workdir = (dir / "work").string();

  {
    Engine engine(cfg);
    engine.ingest();
    engine.build_and_save_index();
    CHECK(fs::exists(dir / "work" / "tables.jsonl"));
    CHECK(fs::exists(dir / "work" / "index.bin"));
  }

  // A fresh engine reloads the persisted state and matches the in-memory one.
  Engine loaded(cfg);
  loaded.load_kb();
  loaded.load_store();
  loaded.load_index();
  loaded.load_embeddings();
  CHECK(loaded.tables().size() == collection.corpus.size());
  CHECK(loaded.index().size() == collection.corpus.size());
  CHECK(loaded.load_queries().size() == 4);

  Engine adopted(cfg);
  auto fresh = make_synthetic_collection(small_spec());
  adopted.adopt(std::move(fresh));
  for (const auto& qid : loaded.load_queries()) {
    CHECK(loaded.pool(qid) == adopted.pool(qid));
  }

  // Stored elements round-trip exactly.
  for (const auto& st : loaded.tables()) {
    TableView from_adopted = adopted.view(st.table.table_id);
    CHECK(st.table == *from_adopted.table);
    CHECK(st.elements == *from_adopted.elements);
  }

  // Re-ingesting is idempotent byte for byte.
  auto bytes = [&](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), {});
  };
  std::string store_before = bytes(dir / "work" / "tables.jsonl");
  std::string index_before = bytes(dir / "work" / "index.bin");
  {
    Engine again(cfg);
    again.ingest();
    again.build_and_save_index();
  }
  CHECK(bytes(dir / "work" / "tables.jsonl") == store_before);
  CHECK(bytes(dir / "work" / "index.bin") == index_before);

  fs::remove_all(dir);
}

TEST_CASE("split experiment at fraction 1.0 matches the learned run exactly") {
  ExperimentConfig cfg = small_config();
  cfg.trees = 30;
  Engine engine(cfg);
  auto collection = make_synthetic_collection(small_spec());
  auto queries = collection.query_ids;
  engine.adopt(std::move(collection));

  Qrels qrels = collection_qrels(engine, queries);
  Dataset data = engine.build_dataset(queries, qrels);
  auto cv = std::make_shared<CvForest>(engine.learned_cv(data));

  SplitExperimentInputs inputs;
  inputs.query_ids = queries;
  inputs.lookup = [&engine](const std::string& id) { return engine.view(id); };
  inputs.pool_of = [&engine](const std::string& qid) { return engine.pool(qid); };
  inputs.scorer = engine.cv_scorer(cv);
  inputs.qrels = &qrels;
  inputs.kb = &engine.kb();
  inputs.retriever = &engine.mlm();
  inputs.gain = engine.gain_scheme();

  double fractions[] = {1.0};
  auto outcomes = split_experiment(inputs, SplitAxis::Rows, fractions);
  REQUIRE(outcomes.size() == 1);

  // The CV run and the fraction-1.0 re-scoring agree bit for bit.
  const Run& direct = cv->run;
  const Run& rescored = outcomes[0].run;
  for (const auto& qid : queries) {
    const auto& a = direct.ranking(qid);
    const auto& b = rescored.ranking(qid);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].docid == b[i].docid);
      CHECK(a[i].score == b[i].score);
    }
  }
  CHECK(outcomes[0].ndcg10 == ndcg(direct, qrels, 10).mean);

  auto cols = split_experiment(inputs, SplitAxis::Columns, fractions);
  CHECK(cols[0].ndcg10 == outcomes[0].ndcg10);
}

}  // TEST_SUITE
