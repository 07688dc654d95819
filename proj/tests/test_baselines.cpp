#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "tabrec/baselines.hpp"
#include "tabrec/features.hpp"
#include "tabrec/kb.hpp"
#include "tabrec/text.hpp"

using namespace tabrec;

namespace {

/// Brute-force maximum over all assignments restricted to edges >= delta.
double brute_force_matching(const std::vector<std::vector<double>>& w,
                            double delta) {
  if (w.empty() || w.front().empty()) return 0.0;
  std::size_t rows = w.size(), cols = w.front().size();
  bool transpose = rows > cols;
  std::size_t small = transpose ? cols : rows;
  std::size_t large = transpose ? rows : cols;
  auto weight = [&](std::size_t i, std::size_t j) {
    return transpose ? w[j][i] : w[i][j];
  };
  std::vector<std::size_t> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < small; ++i) {
      double v = weight(i, perm[i]);
      if (v >= delta) total += v;
    }
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

struct PairFixture {
  RawTable a, b;
  TableElements ea, eb;

  TableView va() const { return {&a, &ea}; }
  TableView vb() const { return {&b, &eb}; }
};

RawTable words_table(const std::string& id,
                     const std::vector<std::string>& headings,
                     const std::vector<std::vector<std::string>>& cells) {
  RawTable t;
  t.table_id = id;
  for (const auto& h : headings) t.headings.push_back({h, std::nullopt});
  for (const auto& row : cells) {
    std::vector<Cell> r;
    for (const auto& text : row) r.push_back({text, std::nullopt});
    r.resize(headings.size());
    t.rows.push_back(std::move(r));
  }
  return t;
}

TableElements elements_of(const RawTable& t,
                          std::vector<std::string> entities = {}) {
  TableElements e;
  for (const auto& h : t.headings) {
    for (auto& tok : tokenize(h.text)) e.heading_words.push_back(tok);
  }
  for (const auto& row : t.rows) {
    for (const auto& cell : row) {
      for (auto& tok : tokenize(cell.text)) e.data_words.push_back(tok);
    }
  }
  e.entities = std::move(entities);
  e.data_entities = e.entities;
  return e;
}

CorpusStats stats_over(const std::vector<RawTable>& corpus) {
  return CorpusIndex::build(corpus, nullptr).stats();
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("identity weight matrix matches the diagonal") {
  std::vector<std::vector<double>> w(4, std::vector<double>(4, 0.0));
  for (int i = 0; i < 4; ++i) w[i][i] = 1.0;
  auto result = max_weight_bipartite_matching(w, 0.5);
  CHECK(result.total == doctest::Approx(4.0));
  CHECK(result.pairs.size() == 4);
  for (const auto& e : result.pairs) CHECK(e.left == e.right);
}

TEST_CASE("off-diagonal assignment beats a greedy diagonal") {
  std::vector<std::vector<double>> w = {{0.9, 0.85}, {0.95, 0.1}};
  auto result = max_weight_bipartite_matching(w, 0.8);
  CHECK(result.total == doctest::Approx(1.80));
  REQUIRE(result.pairs.size() == 2);
  CHECK(result.pairs[0].left == 0);
  CHECK(result.pairs[0].right == 1);
  CHECK(result.pairs[1].left == 1);
  CHECK(result.pairs[1].right == 0);
  CHECK(brute_force_matching(w, 0.8) == doctest::Approx(1.80));
}

TEST_CASE("all weights below the threshold give an empty matching") {
  std::vector<std::vector<double>> w = {{0.5, 0.3}, {0.2, 0.7}};
  auto result = max_weight_bipartite_matching(w, 0.9);
  CHECK(result.pairs.empty());
  CHECK(result.total == 0.0);
}

TEST_CASE("empty matrices are fine") {
  CHECK(max_weight_bipartite_matching({}, 0.5).total == 0.0);
  CHECK(max_weight_bipartite_matching({{}}, 0.5).total == 0.0);
}

TEST_CASE("matching equals brute force on random rectangular matrices") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t rows = 1 + rng() % 5;
    std::size_t cols = 1 + rng() % 5;
    std::vector<std::vector<double>> w(rows, std::vector<double>(cols));
    for (auto& row : w) {
      // Weights on a dyadic grid keep double sums exact.
      for (auto& v : row) v = static_cast<double>(rng() % 1025) / 1024.0;
    }
    double delta = static_cast<double>(rng() % 1025) / 1024.0;
    auto result = max_weight_bipartite_matching(w, delta);
    CHECK(result.total == brute_force_matching(w, delta));
    for (const auto& e : result.pairs) CHECK(e.weight >= delta);
    // Each node matched at most once.
    std::set<std::size_t> lefts, rights;
    for (const auto& e : result.pairs) {
      CHECK(lefts.insert(e.left).second);
      CHECK(rights.insert(e.right).second);
    }
  }
}

TEST_CASE("msje is 1 on identical headings and 0 on fuzzy-disjoint ones") {
  PairFixture fx;
  fx.a = words_table("a", {"year", "team"}, {{"1", "x"}});
  fx.b = words_table("b", {"year", "team"}, {{"2", "y"}});
  fx.ea = elements_of(fx.a);
  fx.eb = elements_of(fx.b);
  CHECK(msje_score(fx.va(), fx.vb(), 0.8) == doctest::Approx(1.0));
  CHECK(msje_score(fx.va(), fx.va(), 0.8) == doctest::Approx(1.0));

  fx.b = words_table("b", {"alpha", "omega"}, {{"2", "y"}});
  fx.eb = elements_of(fx.b);
  CHECK(msje_score(fx.va(), fx.vb(), 0.8) == 0.0);
}

TEST_CASE("msje fuzzy match follows the worked example") {
  // {year, team} vs {year, teams}: w(team, teams) = 1 - 1/5 = 0.8 >= delta,
  // matching total 1.8, score 1.8 / (2 + 2 - 1.8).
  PairFixture fx;
  fx.a = words_table("a", {"year", "team"}, {{"1", "x"}});
  fx.b = words_table("b", {"year", "teams"}, {{"2", "y"}});
  fx.ea = elements_of(fx.a);
  fx.eb = elements_of(fx.b);
  CHECK(msje_score(fx.va(), fx.vb(), 0.8) ==
        doctest::Approx(1.8 / 2.2).epsilon(1e-12));
  // Just above the threshold the fuzzy pair drops out.
  CHECK(msje_score(fx.va(), fx.vb(), 0.81) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("removing a candidate heading never increases the msje matching") {
  std::mt19937_64 rng(13);
  const std::vector<std::string> pool = {"year", "years", "team",  "teams",
                                         "rank", "score", "city",  "game",
                                         "name", "names", "title", "state"};
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::string> ha, hb;
    for (std::size_t i = 0; i < 2 + rng() % 4; ++i) ha.push_back(pool[rng() % pool.size()]);
    for (std::size_t i = 0; i < 2 + rng() % 4; ++i) hb.push_back(pool[rng() % pool.size()]);
    PairFixture fx;
    fx.a = words_table("a", ha, {});
    fx.b = words_table("b", hb, {});
    fx.ea = elements_of(fx.a);
    fx.eb = elements_of(fx.b);

    auto matching_total = [&](const std::vector<std::string>& lhs,
                              const std::vector<std::string>& rhs) {
      std::vector<std::string> ul(lhs), ur(rhs);
      std::sort(ul.begin(), ul.end());
      ul.erase(std::unique(ul.begin(), ul.end()), ul.end());
      std::sort(ur.begin(), ur.end());
      ur.erase(std::unique(ur.begin(), ur.end()), ur.end());
      std::vector<std::vector<double>> w(ul.size(), std::vector<double>(ur.size()));
      for (std::size_t i = 0; i < ul.size(); ++i) {
        for (std::size_t j = 0; j < ur.size(); ++j) {
          w[i][j] = edit_similarity(ul[i], ur[j]);
        }
      }
      return max_weight_bipartite_matching(w, 0.8).total;
    };
    double full = matching_total(ha, hb);
    std::vector<std::string> shrunk(hb.begin(), hb.end() - 1);
    CHECK(matching_total(ha, shrunk) <= full + 1e-12);
  }
}

TEST_CASE("schema complement follows the published product form") {
  // 3-table micro-corpus for heading statistics.
  std::vector<RawTable> corpus = {
      words_table("c1", {"year", "team"}, {{"1", "a"}}),
      words_table("c2", {"year", "rank"}, {{"2", "b"}}),
      words_table("c3", {"year", "team", "rank"}, {{"3", "c", "d"}}),
  };
  auto stats = stats_over(corpus);

  PairFixture fx;
  fx.a = words_table("a", {"year"}, {{"1"}});
  fx.b = words_table("b", {"team", "rank"}, {{"x", "y"}});
  fx.ea = elements_of(fx.a, {"e1", "e2"});
  fx.eb = elements_of(fx.b, {"e1", "e2", "e3"});

  // Oracle by hand: #(year)=3, #(year,team)=2, #(year,rank)=2.
  // HB(team) = (1/1) * 2/3, HB(rank) = 2/3; average = 2/3. S_EC = 1.
  CHECK(entity_coverage(fx.va(), fx.vb()) == doctest::Approx(1.0));
  CHECK(heading_benefit(fx.va(), fx.vb(), stats) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(schema_complement_score(fx.va(), fx.vb(), stats) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  // Coverage halves when only one of two input entities appears.
  fx.eb.entities = {"e1", "e9"};
  CHECK(entity_coverage(fx.va(), fx.vb()) == doctest::Approx(0.5));

  // No input entities: coverage defined as 0.
  fx.ea.entities.clear();
  CHECK(entity_coverage(fx.va(), fx.vb()) == 0.0);
  CHECK(schema_complement_score(fx.va(), fx.vb(), stats) == 0.0);

  // Unseen input heading contributes 0 to the benefit.
  PairFixture unseen;
  unseen.a = words_table("u", {"nosuchheading"}, {{"1"}});
  unseen.b = words_table("b", {"team"}, {{"x"}});
  unseen.ea = elements_of(unseen.a, {"e1"});
  unseen.eb = elements_of(unseen.b, {"e1"});
  CHECK(heading_benefit(unseen.va(), unseen.vb(), stats) == 0.0);
}

TEST_CASE("entity complement averages pairwise relatedness") {
  std::vector<EntityRecord> records = {
      {"e1", "e1", "x", {}}, {"e2", "e2", "x", {}},
      {"f1", "f1", "x", {}}, {"f2", "f2", "x", {}},
      {"t1", "t1", "x", {}}, {"t2", "t2", "x", {}}, {"t3", "t3", "x", {}},
  };
  std::vector<std::pair<std::string, std::string>> links = {
      {"e1", "t1"}, {"e1", "t2"}, {"e2", "t1"},
      {"f1", "t2"}, {"f1", "t3"}, {"f2", "t3"},
  };
  auto kb = KnowledgeBase::build(std::move(records), links, {});

  PairFixture fx;
  fx.a = words_table("a", {"h"}, {{"x"}});
  fx.b = words_table("b", {"h"}, {{"y"}});
  fx.ea = elements_of(fx.a, {"e1", "e2"});
  fx.eb = elements_of(fx.b, {"f1", "f2"});

  // Oracle: four standalone WLM evaluations.
  double expected = (kb.wlm("e1", "f1") + kb.wlm("e1", "f2") +
                     kb.wlm("e2", "f1") + kb.wlm("e2", "f2")) / 4.0;
  CHECK(entity_complement_score(fx.va(), fx.vb(), kb) ==
        doctest::Approx(expected).epsilon(1e-12));

  // Shared single entity with itself scores 1.
  fx.ea.entities = {"e1"};
  fx.eb.entities = {"e1"};
  CHECK(entity_complement_score(fx.va(), fx.vb(), kb) == doctest::Approx(1.0));

  // Empty side scores 0.
  fx.eb.entities.clear();
  CHECK(entity_complement_score(fx.va(), fx.vb(), kb) == 0.0);

  // Disjoint link neighbourhoods throughout score 0.
  fx.ea.entities = {"e2"};   // links {t1}
  fx.eb.entities = {"f2"};   // links {t3}
  CHECK(entity_complement_score(fx.va(), fx.vb(), kb) == 0.0);
}

TEST_CASE("nguyen reaches 1 on identical tables and mixes with alpha") {
  PairFixture fx;
  fx.a = words_table("a", {"year", "team"},
                     {{"alpha beta", "gamma"}, {"delta", "epsilon"}});
  fx.ea = elements_of(fx.a);
  CHECK(nguyen_heading_similarity(fx.va(), fx.va()) == doctest::Approx(1.0));
  CHECK(nguyen_data_similarity(fx.va(), fx.va()) == doctest::Approx(1.0));
  CHECK(nguyen_score(fx.va(), fx.va(), 0.5) == doctest::Approx(1.0).epsilon(1e-12));

  fx.b = words_table("b", {"year", "team"}, {{"other", "words"}});
  fx.eb = elements_of(fx.b);
  // alpha = 1 reduces to heading similarity alone.
  CHECK(nguyen_score(fx.va(), fx.vb(), 1.0) ==
        doctest::Approx(nguyen_heading_similarity(fx.va(), fx.vb())));
  CHECK(nguyen_score(fx.va(), fx.vb(), 0.0) ==
        doctest::Approx(nguyen_data_similarity(fx.va(), fx.vb())));
}

TEST_CASE("nguyen data similarity matches a hand-built cosine table") {
  // Column sets: a0 = {p, q}, a1 = {r}; b0 = {p}, b1 = {r, s}.
  PairFixture fx;
  fx.a = words_table("a", {"c0", "c1"}, {{"p", "r"}, {"q", "r"}});
  fx.b = words_table("b", {"c0", "c1"}, {{"p", "r"}, {"p", "s"}});
  fx.ea = elements_of(fx.a);
  fx.eb = elements_of(fx.b);

  double c00 = 1.0 / std::sqrt(2.0);  // {p,q} vs {p}
  double c01 = 0.0;                   // {p,q} vs {r,s}
  double c10 = 0.0;                   // {r} vs {p}
  double c11 = 1.0 / std::sqrt(2.0);  // {r} vs {r,s}
  double expected = 0.5 * ((std::max(c00, c01) + std::max(c10, c11)) / 2.0 +
                           (std::max(c00, c10) + std::max(c01, c11)) / 2.0);
  CHECK(nguyen_data_similarity(fx.va(), fx.vb()) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("infogather features are cosines with the published weighting") {
  std::vector<RawTable> corpus = {
      words_table("c1", {"year"}, {{"red blue"}}),
      words_table("c2", {"team"}, {{"blue green"}}),
      words_table("c3", {"rank"}, {{"red green"}}),
  };
  auto stats = stats_over(corpus);

  PairFixture fx;
  fx.a = words_table("a", {"year", "team"}, {{"red", "blue"}});
  fx.a.page_title = "red page";
  fx.b = words_table("b", {"year", "team"}, {{"red", "blue"}});
  fx.b.page_title = "red page";
  fx.ea = elements_of(fx.a);
  fx.eb = elements_of(fx.b);

  auto same = infogather_features(fx.va(), fx.vb(), stats);
  CHECK(same.data == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(same.column == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(same.page_title == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(same.headings == doctest::Approx(1.0).epsilon(1e-12));

  // Orthogonal vocabularies zero every cosine.
  fx.b = words_table("b", {"alpha", "beta"}, {{"green", "green"}});
  fx.b.page_title = "other title";
  fx.eb = elements_of(fx.b);
  auto disjoint = infogather_features(fx.va(), fx.vb(), stats);
  CHECK(disjoint.data == 0.0);
  CHECK(disjoint.column == 0.0);
  CHECK(disjoint.page_title == 0.0);
  CHECK(disjoint.headings == 0.0);

  CHECK(infogather_score({1, 0, 1, 0}, {0.25, 0.25, 0.25, 0.25}) ==
        doctest::Approx(0.5));
}

TEST_CASE("keyword variants route to their fields") {
  CHECK(keyword_query_fields(KeywordQuery::Entities) ==
        std::vector<Field>{Field::Entities});
  CHECK(keyword_query_fields(KeywordQuery::Headings) ==
        std::vector<Field>{Field::Headings});
  CHECK(keyword_query_fields(KeywordQuery::Caption) ==
        std::vector<Field>{Field::Caption, Field::Catchall});

  std::vector<EntityRecord> records = {{"Ent", "silver fox", "x", {}},
                                       {"T", "t", "x", {}}};
  std::vector<std::pair<std::string, std::string>> links = {{"Ent", "T"}};
  auto kb = KnowledgeBase::build(std::move(records), links, {});

  std::vector<RawTable> corpus;
  auto t1 = words_table("t1", {"animal"}, {{"silver fox"}});
  t1.rows[0][0].entity = "Ent";
  t1.caption = "wildlife survey";
  corpus.push_back(t1);
  auto t2 = words_table("t2", {"city"}, {{"paris"}});
  t2.caption = "travel notes";
  corpus.push_back(t2);
  auto index = CorpusIndex::build(corpus, &kb);

  PairFixture fx;
  fx.a = words_table("q", {"animal"}, {{"x"}});
  fx.ea = elements_of(fx.a, {"Ent"});

  // The entity variant queries the entity label words.
  CHECK(keyword_query_terms(fx.va(), KeywordQuery::Entities, kb) ==
        std::vector<std::string>{"silver", "fox"});
  auto hits = keyword_search(fx.va(), KeywordQuery::Entities, index, kb, 10);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].table_id == "t1");

  // Empty caption: the caption variant returns an empty ranking.
  CHECK(keyword_search(fx.va(), KeywordQuery::Caption, index, kb, 10).empty());
  CHECK(keyword_rerank_score(fx.va(), KeywordQuery::Caption, index, kb, "t1") == 0.0);

  // Heading variant is independent of the other two.
  auto heads = keyword_search(fx.va(), KeywordQuery::Headings, index, kb, 10);
  REQUIRE(heads.size() == 1);
  CHECK(heads[0].table_id == "t1");
  CHECK(keyword_rerank_score(fx.va(), KeywordQuery::Headings, index, kb, "t2") == 0.0);
}

TEST_CASE("hcf similarity features fill the ten published slots") {
  std::vector<EntityRecord> records = {{"e1", "e1", "x", {}}, {"t", "t", "x", {}}};
  std::vector<std::pair<std::string, std::string>> links = {{"e1", "t"}};
  auto kb = KnowledgeBase::build(std::move(records), links, {});
  // N > 1 so idf weights are positive.
  std::vector<RawTable> corpus = {words_table("c1", {"year"}, {{"red"}}),
                                  words_table("c2", {"rank"}, {{"blue"}}),
                                  words_table("c3", {"name"}, {{"green"}})};
  auto stats = stats_over(corpus);

  PairFixture fx;
  fx.a = words_table("a", {"year"}, {{"red"}});
  fx.a.page_title = "page";
  fx.ea = elements_of(fx.a, {"e1"});
  MatchingParams params;
  auto features = hcf_similarity_features(fx.va(), fx.va(), stats, kb, params);
  REQUIRE(features.size() == 10);
  CHECK(features[0] == doctest::Approx(1.0));  // page title cosine
  CHECK(features[1] == doctest::Approx(1.0));  // msje self
  CHECK(features[4] == doctest::Approx(1.0));  // nguyen headings
  CHECK(features[8] == doctest::Approx(1.0));  // entity complement self
  CHECK(features[9] == doctest::Approx(1.0));  // entity overlap self
}

}  // TEST_SUITE
