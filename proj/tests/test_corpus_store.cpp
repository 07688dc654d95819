#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "tabrec/index.hpp"
#include "tabrec/kb.hpp"
#include "tabrec/text.hpp"

using namespace tabrec;

namespace {

RawTable text_table(const std::string& id, const std::string& caption,
                    const std::vector<std::string>& headings,
                    const std::vector<std::vector<std::string>>& cell_text,
                    const std::string& page_title = "") {
  RawTable t;
  t.table_id = id;
  t.caption = caption;
  t.page_title = page_title;
  for (const auto& h : headings) t.headings.push_back({h, std::nullopt});
  for (const auto& row : cell_text) {
    std::vector<Cell> cells;
    for (const auto& text : row) cells.push_back({text, std::nullopt});
    cells.resize(headings.size());
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("corpus-store") {

TEST_CASE("heading statistics count tables, not occurrences") {
  std::vector<RawTable> corpus = {
      text_table("A", "", {"Year", "Team"}, {{"1", "x"}}),
      text_table("B", "", {"Year", "Rank"}, {{"2", "y"}}),
  };
  auto index = CorpusIndex::build(corpus, nullptr);
  const auto& stats = index.stats();
  CHECK(stats.heading_count("year") == 2);
  CHECK(stats.heading_count("team") == 1);
  CHECK(stats.heading_cooccurrence("year", "team") == 1);
  CHECK(stats.heading_cooccurrence("year", "rank") == 1);
  CHECK(stats.heading_cooccurrence("team", "rank") == 0);
  CHECK(stats.heading_cooccurrence("rank", "year") == 1);  // unordered
}

TEST_CASE("duplicate table ids abort the build naming the id") {
  std::vector<RawTable> corpus = {
      text_table("dup", "", {"a"}, {{"x"}}),
      text_table("dup", "", {"b"}, {{"y"}}),
  };
  CHECK_THROWS_WITH_AS(CorpusIndex::build(corpus, nullptr),
                       doctest::Contains("dup"), std::runtime_error);
}

TEST_CASE("empty corpus yields an empty index") {
  auto index = CorpusIndex::build({}, nullptr);
  CHECK(index.size() == 0);
  CHECK(index.stats().corpus_size() == 0);
  CHECK(index.bm25_search({"anything"}, Field::Catchall, 10).empty());
}

TEST_CASE("a document containing all query terms dominates") {
  std::vector<RawTable> corpus = {
      text_table("hit", "alpha beta gamma", {"h"}, {{"z"}}),
      text_table("miss1", "alpha", {"h"}, {{"z"}}),
      text_table("miss2", "delta", {"h"}, {{"z"}}),
  };
  auto index = CorpusIndex::build(corpus, nullptr);
  auto hits = index.bm25_search({"alpha", "beta", "gamma"}, Field::Caption, 3);
  REQUIRE(!hits.empty());
  CHECK(hits[0].table_id == "hit");
}

TEST_CASE("terms absent from the corpus contribute nothing") {
  std::vector<RawTable> corpus = {
      text_table("A", "alpha", {"h"}, {{"z"}}),
  };
  auto index = CorpusIndex::build(corpus, nullptr);
  auto with = index.bm25_search({"alpha"}, Field::Caption, 5);
  auto with_unseen = index.bm25_search({"alpha", "zzz"}, Field::Caption, 5);
  REQUIRE(with.size() == with_unseen.size());
  CHECK(with[0].score == doctest::Approx(with_unseen[0].score).epsilon(1e-12));
  CHECK(index.bm25_search({"zzz"}, Field::Caption, 5).empty());
}

TEST_CASE("bm25 matches a direct formula evaluation on a 3-document corpus") {
  // Documents (caption field): doc0: "a b a", doc1: "a c", doc2: "d d d d".
  std::vector<RawTable> corpus = {
      text_table("doc0", "aa bb aa", {"h"}, {{"x"}}),
      text_table("doc1", "aa cc", {"h"}, {{"x"}}),
      text_table("doc2", "dd dd dd dd", {"h"}, {{"x"}}),
  };
  auto index = CorpusIndex::build(corpus, nullptr);

  // Independent oracle: direct evaluation of the BM25 formula with
  // k1 = 1.2, b = 0.75, idf = ln(1 + (N - df + 0.5) / (df + 0.5)).
  auto oracle = [](double tf, double df, double doc_len, double avg_len,
                   double n_docs) {
    double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
    return idf * tf * 2.2 / (tf + 1.2 * (0.25 + 0.75 * doc_len / avg_len));
  };
  const double avg = (3.0 + 2.0 + 4.0) / 3.0;

  auto hits = index.bm25_search({"aa"}, Field::Caption, 3);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].table_id == "doc0");
  CHECK(hits[0].score == doctest::Approx(oracle(2, 2, 3, avg, 3)).epsilon(1e-9));
  CHECK(hits[1].score == doctest::Approx(oracle(1, 2, 2, avg, 3)).epsilon(1e-9));

  auto multi = index.bm25_search({"aa", "cc"}, Field::Caption, 3);
  REQUIRE(multi[0].table_id == "doc1");
  CHECK(multi[0].score ==
        doctest::Approx(oracle(1, 2, 2, avg, 3) + oracle(1, 1, 2, avg, 3))
            .epsilon(1e-9));

  // Repeated query terms weigh the term once per occurrence.
  auto repeated = index.bm25_search({"aa", "aa"}, Field::Caption, 3);
  CHECK(repeated[0].score ==
        doctest::Approx(2.0 * oracle(2, 2, 3, avg, 3)).epsilon(1e-9));

  // Single-document re-rank scores agree with search.
  CHECK(index.bm25_score({"aa"}, {Field::Caption}, "doc1") ==
        doctest::Approx(oracle(1, 2, 2, avg, 3)).epsilon(1e-9));
}

TEST_CASE("scores are non-increasing and hits contain a query term") {
  std::vector<RawTable> corpus;
  std::mt19937_64 rng(11);
  const std::vector<std::string> vocab = {"red", "green", "blue", "cyan", "teal"};
  for (int i = 0; i < 40; ++i) {
    std::string caption;
    for (int w = 0; w < 4; ++w) {
      caption += vocab[rng() % vocab.size()] + " ";
    }
    corpus.push_back(text_table("t" + std::to_string(i), caption, {"h"}, {{"x"}}));
  }
  auto index = CorpusIndex::build(corpus, nullptr);
  auto hits = index.bm25_search({"red", "teal"}, Field::Caption, 40);
  for (std::size_t i = 1; i < hits.size(); ++i) {
    CHECK(hits[i - 1].score >= hits[i].score);
  }
  for (const auto& hit : hits) {
    auto doc = index.doc_index(hit.table_id);
    REQUIRE(doc.has_value());
    bool has_term = false;
    for (const auto& t : corpus) {
      if (t.table_id != hit.table_id) continue;
      for (const auto& tok : tokenize(t.caption)) {
        if (tok == "red" || tok == "teal") has_term = true;
      }
    }
    CHECK(has_term);
  }
}

TEST_CASE("unknown field names are rejected") {
  CHECK_THROWS_AS(field_from_name("bogus"), std::invalid_argument);
  CHECK(field_from_name("catchall") == Field::Catchall);
  CHECK(field_name(Field::Entities) == "entities");
}

TEST_CASE("idf follows log(N/df) with clamping") {
  std::vector<RawTable> corpus;
  for (int i = 0; i < 100; ++i) {
    // "everywhere" appears in every caption, "once" in exactly one.
    std::string caption = "everywhere";
    if (i == 0) caption += " once";
    corpus.push_back(text_table("t" + std::to_string(i), caption, {"h"}, {{"x"}}));
  }
  auto index = CorpusIndex::build(corpus, nullptr);
  const auto& stats = index.stats();
  CHECK(stats.idf("everywhere", Field::Caption) == doctest::Approx(0.0));
  CHECK(stats.idf("once", Field::Caption) == doctest::Approx(std::log(100.0)));
  // Unseen terms clamp df to 1: log(N / 1).
  CHECK(stats.idf("neverseen", Field::Caption) == doctest::Approx(std::log(100.0)));

  // Oracle: recount df by scanning the corpus.
  std::size_t df = 0;
  for (const auto& t : corpus) {
    auto toks = tokenize(t.caption);
    if (std::find(toks.begin(), toks.end(), "once") != toks.end()) ++df;
  }
  CHECK(df == 1);
  CHECK(stats.df("once", Field::Caption) == df);
}

TEST_CASE("index round-trips through persistence") {
  std::vector<RawTable> corpus;
  std::mt19937_64 rng(23);
  const std::vector<std::string> vocab = {"ape", "bee", "cat", "dog", "elk",
                                          "fox", "gnu", "hen"};
  for (int i = 0; i < 30; ++i) {
    std::string caption, cells;
    for (int w = 0; w < 5; ++w) caption += vocab[rng() % vocab.size()] + " ";
    for (int w = 0; w < 6; ++w) cells += vocab[rng() % vocab.size()] + " ";
    corpus.push_back(text_table("t" + std::to_string(i), caption,
                                {"alpha", "beta"}, {{cells, cells}}));
  }
  auto index = CorpusIndex::build(corpus, nullptr);
  std::string path = temp_path("tabrec_index_roundtrip.bin");
  index.save(path);
  auto reloaded = CorpusIndex::load(path);
  CHECK(reloaded == index);

  // Identical rankings for 100 random queries.
  for (int q = 0; q < 100; ++q) {
    std::vector<std::string> query = {vocab[rng() % vocab.size()],
                                      vocab[rng() % vocab.size()]};
    Field field = q % 2 == 0 ? Field::Caption : Field::Catchall;
    auto a = index.bm25_search(query, field, 10);
    auto b = reloaded.bm25_search(query, field, 10);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].table_id == b[i].table_id);
      CHECK(a[i].score == b[i].score);
    }
  }

  // Saving the reloaded index reproduces the file byte for byte.
  std::string path2 = temp_path("tabrec_index_roundtrip2.bin");
  reloaded.save(path2);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  std::string bytes1((std::istreambuf_iterator<char>(f1)), {});
  std::string bytes2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(bytes1 == bytes2);
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("candidate pool excludes the input and tops out at 450") {
  // Three disjoint 200-table blocks, each reachable by exactly one of the
  // three pooling queries; per-query k = 150 gives a pool of exactly 450.
  // The input table's own fields are padded long so it never makes a
  // top-150 list itself.
  std::vector<EntityRecord> records;
  std::vector<std::pair<std::string, std::string>> links;
  records.push_back({"Ent", "entword", "an entity", {}});
  records.push_back({"Ent2", "entword", "another entity", {}});
  links.emplace_back("Ent", "Ent2");
  auto kb = KnowledgeBase::build(std::move(records), links, {});

  std::vector<RawTable> corpus;
  for (int i = 0; i < 200; ++i) {
    corpus.push_back(text_table("cap" + std::to_string(i), "capword", {"hx"}, {{"z"}}));
  }
  for (int i = 0; i < 200; ++i) {
    corpus.push_back(text_table("head" + std::to_string(i), "c",
                                {"headword", "other" + std::to_string(i)}, {{"z", "z"}}));
  }
  for (int i = 0; i < 200; ++i) {
    auto t = text_table("ent" + std::to_string(i), "c", {"hy"}, {{"x"}});
    t.rows[0][0].entity = "Ent";
    corpus.push_back(t);
  }
  // The input shares each query term but its fields are long, so length
  // normalization ranks it below every block member.
  std::vector<std::string> padded_headings = {"headword"};
  for (int i = 0; i < 9; ++i) padded_headings.push_back("pad" + std::to_string(i));
  auto input = text_table("input", "capword", padded_headings,
                          {std::vector<std::string>(10, "x")});
  input.rows[0][0].entity = "Ent";
  corpus.push_back(input);

  auto index = CorpusIndex::build(corpus, &kb);
  TableElements elems;
  elems.heading_words = {"headword"};
  elems.entities = {"Ent"};

  auto pool = candidate_pool(input, elems, index, kb, 150);
  CHECK(pool.size() == 450);
  for (const auto& id : pool) CHECK(id != "input");

  // Overlapping result lists shrink the union below the cap.
  auto small_pool = candidate_pool(input, elems, index, kb, 10);
  CHECK(small_pool.size() <= 30);
  std::set<std::string> unique(small_pool.begin(), small_pool.end());
  CHECK(unique.size() == small_pool.size());
}

}  // TEST_SUITE
