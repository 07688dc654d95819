#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "tabrec/baselines.hpp"
#include "tabrec/metrics.hpp"
#include "tabrec/mlm.hpp"
#include "tabrec/split_eval.hpp"
#include "tabrec/synthetic.hpp"

using namespace tabrec;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("eval-harness") {

TEST_CASE("ideal-order runs score 1") {
  Qrels qrels;
  qrels.set("q", "d1", 2);
  qrels.set("q", "d2", 1);
  qrels.set("q", "d3", 0);
  Run run("r");
  run.add("q", "d1", 3.0);
  run.add("q", "d2", 2.0);
  run.add("q", "d3", 1.0);
  run.sort_and_validate();
  CHECK(ndcg(run, qrels, 3).mean == doctest::Approx(1.0));
  CHECK(ndcg(run, qrels, 10).mean == doctest::Approx(1.0));
}

TEST_CASE("the worked example evaluates to 0.7967") {
  Qrels qrels;
  qrels.set("q", "d1", 2);
  qrels.set("q", "d2", 1);
  qrels.set("q", "d3", 0);
  Run run("r");
  run.add("q", "d2", 3.0);
  run.add("q", "d1", 2.0);
  run.add("q", "d3", 1.0);
  run.sort_and_validate();
  // DCG = 1/1 + 3/log2(3); IDCG = 3 + 1/log2(3).
  double expected = (1.0 + 3.0 / std::log2(3.0)) / (3.0 + 1.0 / std::log2(3.0));
  CHECK(expected == doctest::Approx(0.7967).epsilon(1e-4));
  CHECK(ndcg(run, qrels, 3).mean == doctest::Approx(0.7967).epsilon(1e-4));
  CHECK(ndcg(run, qrels, 3).mean == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("all-zero qrels and missing queries score 0 with a count") {
  Qrels qrels;
  qrels.set("q1", "d1", 0);
  Run run("r");
  run.add("q1", "d1", 1.0);
  run.add("q2", "d9", 1.0);  // no qrels for q2
  run.sort_and_validate();
  auto result = ndcg(run, qrels, 5);
  CHECK(result.per_query.at("q1") == 0.0);
  CHECK(result.per_query.at("q2") == 0.0);
  CHECK(result.mean == 0.0);
  CHECK(result.queries_without_qrels == 1);
}

TEST_CASE("ideal-order runs score 1 on 100 random qrels") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    Qrels qrels;
    Run run("r");
    std::size_t docs = 3 + rng() % 20;
    bool any_positive = false;
    std::vector<std::pair<int, std::string>> graded;
    for (std::size_t d = 0; d < docs; ++d) {
      int grade = static_cast<int>(rng() % 3);
      std::string docid = "d" + std::to_string(d);
      qrels.set("q", docid, grade);
      graded.emplace_back(grade, docid);
      any_positive |= grade > 0;
    }
    std::sort(graded.begin(), graded.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    double score = static_cast<double>(docs);
    for (const auto& [grade, docid] : graded) run.add("q", docid, score--);
    run.sort_and_validate();
    std::size_t k = 1 + rng() % 12;
    double value = ndcg(run, qrels, k).mean;
    if (any_positive) {
      CHECK(value == doctest::Approx(1.0).epsilon(1e-12));
    } else {
      CHECK(value == 0.0);
    }
  }
}

TEST_CASE("ndcg properties: range, tail permutation, k beyond length") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t docs = 4 + rng() % 10;
    Qrels qrels;
    Run run("r");
    // All judged docs appear in the run (the pooled-evaluation regime).
    for (std::size_t d = 0; d < docs; ++d) {
      std::string docid = "d" + std::to_string(d);
      int grade = static_cast<int>(rng() % 3);
      if (grade > 0) qrels.set("q", docid, grade);
      run.add("q", docid, static_cast<double>(rng() % 1000));
    }
    run.sort_and_validate();
    std::size_t k = 1 + rng() % 6;
    double at_k = ndcg(run, qrels, k).mean;
    CHECK(at_k >= 0.0);
    CHECK(at_k <= 1.0 + 1e-12);
    // k larger than the list length equals ndcg at the list length.
    CHECK(ndcg(run, qrels, docs + 50).mean ==
          doctest::Approx(ndcg(run, qrels, docs).mean).epsilon(1e-12));
  }

  // Permuting grade-0 documents below the cutoff leaves NDCG unchanged.
  Qrels qrels;
  qrels.set("q", "a", 2);
  qrels.set("q", "b", 1);
  Run run1("r"), run2("r");
  run1.add("q", "a", 9);
  run1.add("q", "b", 8);
  run1.add("q", "z1", 3);
  run1.add("q", "z2", 2);
  run1.add("q", "z3", 1);
  run2.add("q", "a", 9);
  run2.add("q", "b", 8);
  run2.add("q", "z3", 3);
  run2.add("q", "z1", 2);
  run2.add("q", "z2", 1);
  run1.sort_and_validate();
  run2.sort_and_validate();
  CHECK(ndcg(run1, qrels, 2).mean == ndcg(run2, qrels, 2).mean);
  CHECK(ndcg(run1, qrels, 5).mean == ndcg(run2, qrels, 5).mean);
}

TEST_CASE("linear gain is available behind the flag") {
  Qrels qrels;
  qrels.set("q", "d1", 2);
  qrels.set("q", "d2", 1);
  Run run("r");
  run.add("q", "d2", 2.0);
  run.add("q", "d1", 1.0);
  run.sort_and_validate();
  double exp_gain = ndcg(run, qrels, 2, GainScheme::Exponential).mean;
  double lin_gain = ndcg(run, qrels, 2, GainScheme::Linear).mean;
  double expected_lin = (1.0 + 2.0 / std::log2(3.0)) / (2.0 + 1.0 / std::log2(3.0));
  CHECK(lin_gain == doctest::Approx(expected_lin).epsilon(1e-12));
  CHECK(exp_gain < lin_gain);  // the swap costs more under exponential gain
}

TEST_CASE("paired t-test basics") {
  std::vector<double> a = {0.5, 0.6, 0.7, 0.8};
  auto same = paired_ttest(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);
  CHECK_FALSE(same.degenerate);

  // Integer-valued samples make the constant difference exact.
  std::vector<double> c = {1, 2, 3, 4};
  std::vector<double> b = {3, 4, 5, 6};
  auto degenerate = paired_ttest(b, c);
  CHECK(degenerate.degenerate);
  CHECK(degenerate.p == 0.0);
  CHECK(std::isinf(degenerate.t));

  CHECK_THROWS_AS(paired_ttest(std::vector<double>{1.0}, std::vector<double>{1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(paired_ttest(a, std::vector<double>{1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("t statistic is antisymmetric") {
  std::vector<double> a = {0.1, 0.9, 0.4, 0.7, 0.2};
  std::vector<double> b = {0.3, 0.5, 0.6, 0.6, 0.1};
  auto ab = paired_ttest(a, b);
  auto ba = paired_ttest(b, a);
  CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-12));
  CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));
}

TEST_CASE("two-tailed p matches published t-table values") {
  // Critical values from the standard t table.
  CHECK(students_t_two_tailed_p(2.2622, 9) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(students_t_two_tailed_p(3.2498, 9) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(students_t_two_tailed_p(2.0930, 19) == doctest::Approx(0.05).epsilon(1e-3));
  // High-precision fixtures (absolute accuracy ~1e-8).
  CHECK(students_t_two_tailed_p(1.0, 5) ==
        doctest::Approx(0.363217467649).epsilon(1e-8));
  CHECK(students_t_two_tailed_p(2.5, 7) ==
        doctest::Approx(0.040992218586).epsilon(1e-8));
  CHECK(students_t_two_tailed_p(0.5, 12) ==
        doctest::Approx(0.626117476225).epsilon(1e-8));
}

TEST_CASE("a textbook paired sample reproduces its published t") {
  // n = 10 differences with known statistics: d = {1,2,...,10} - 5.5 has
  // mean 0; shift by +1 to get mean 1, sd = sqrt(110/12)... instead verify
  // against the closed form t = mean / (sd / sqrt(n)).
  std::vector<double> a = {12, 14, 11, 16, 13, 15, 10, 17, 14, 12};
  std::vector<double> b = {10, 13, 12, 14, 12, 14, 11, 15, 13, 11};
  auto result = paired_ttest(a, b);
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= 10.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ss += (a[i] - b[i] - mean) * (a[i] - b[i] - mean);
  }
  double t = mean / std::sqrt(ss / 9.0 / 10.0);
  CHECK(result.t == doctest::Approx(t).epsilon(1e-12));
  CHECK(result.p < 0.05);  // clearly significant sample
}

TEST_CASE("fleiss kappa is 1 under perfect agreement") {
  std::vector<std::vector<int>> counts = {
      {3, 0, 0}, {0, 3, 0}, {0, 0, 3}, {3, 0, 0}};
  CHECK(fleiss_kappa(counts) == doctest::Approx(1.0));
}

TEST_CASE("fleiss kappa matches the classic worked matrix") {
  // 14 raters, 10 items, 5 categories; published kappa 0.210.
  std::vector<std::vector<int>> counts = {
      {0, 0, 0, 0, 14}, {0, 2, 6, 4, 2}, {0, 0, 3, 5, 6}, {0, 3, 9, 2, 0},
      {2, 2, 8, 1, 1},  {7, 7, 0, 0, 0}, {3, 2, 6, 3, 0}, {2, 5, 3, 2, 2},
      {6, 5, 2, 1, 0},  {0, 2, 2, 3, 7}};
  // Hand evaluation of the formula gives 0.2099 (published rounded 0.210).
  CHECK(fleiss_kappa(counts) == doctest::Approx(0.2099).epsilon(1e-4));
}

TEST_CASE("fleiss kappa on uniform random ratings is near 0") {
  std::mt19937_64 rng(31337);
  std::vector<std::vector<int>> counts;
  for (int item = 0; item < 4000; ++item) {
    std::vector<int> row(3, 0);
    for (int r = 0; r < 3; ++r) ++row[rng() % 3];
    counts.push_back(std::move(row));
  }
  CHECK(std::abs(fleiss_kappa(counts)) < 0.02);
}

TEST_CASE("fleiss kappa rejects unequal rater counts") {
  CHECK_THROWS_AS(fleiss_kappa({{3, 0}, {2, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(fleiss_kappa({}), std::invalid_argument);
}

TEST_CASE("per-query deltas subtract and average consistently") {
  Qrels qrels;
  qrels.set("q1", "a", 2);
  qrels.set("q1", "b", 1);
  qrels.set("q2", "c", 1);
  Run r1("x"), r2("y");
  r1.add("q1", "a", 2);
  r1.add("q1", "b", 1);
  r1.add("q2", "c", 1);
  r2.add("q1", "b", 2);
  r2.add("q1", "a", 1);
  r2.add("q2", "c", 1);
  r1.sort_and_validate();
  r2.sort_and_validate();

  auto same = per_query_delta(r1, r1, qrels, 5);
  for (const auto& [qid, delta] : same) CHECK(delta == 0.0);

  auto deltas = per_query_delta(r1, r2, qrels, 5);
  REQUIRE(deltas.size() == 2);
  double sum = 0.0;
  for (const auto& [qid, delta] : deltas) sum += delta;
  double mean_diff = ndcg(r1, qrels, 5).mean - ndcg(r2, qrels, 5).mean;
  CHECK(sum / 2.0 == doctest::Approx(mean_diff).epsilon(1e-12));
  // Sorted ascending by delta.
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    CHECK(deltas[i - 1].second <= deltas[i].second);
  }
  // Oracle: recompute the subtraction per query.
  auto na = ndcg(r1, qrels, 5).per_query;
  auto nb = ndcg(r2, qrels, 5).per_query;
  for (const auto& [qid, delta] : deltas) {
    CHECK(delta == doctest::Approx(na.at(qid) - nb.at(qid)).epsilon(1e-12));
  }

  Run r3("z");
  r3.add("q1", "a", 1);
  r3.sort_and_validate();
  CHECK_THROWS_AS(per_query_delta(r1, r3, qrels, 5), std::invalid_argument);
}

TEST_CASE("qrels and runs round-trip through their line formats") {
  Qrels qrels;
  qrels.set("q1", "doc-a", 2);
  qrels.set("q1", "doc-b", 0);
  qrels.set("q2", "doc-c", 1);
  auto qpath = temp_path("roundtrip.qrels");
  qrels.save(qpath);
  CHECK(Qrels::load(qpath) == qrels);
  // Byte-exact rewrite.
  auto qpath2 = temp_path("roundtrip2.qrels");
  Qrels::load(qpath).save(qpath2);
  std::ifstream f1(qpath), f2(qpath2);
  std::string b1((std::istreambuf_iterator<char>(f1)), {});
  std::string b2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(b1 == b2);
  std::remove(qpath.c_str());
  std::remove(qpath2.c_str());

  Run run("methodtag");
  run.add("q1", "doc-a", 1.25);
  run.add("q1", "doc-b", 0.5);
  run.add("q2", "doc-c", 0.125);
  run.sort_and_validate();
  auto rpath = temp_path("roundtrip.run");
  run.save(rpath, "variant=test");
  Run reloaded = Run::load(rpath);
  CHECK(reloaded == run);
  CHECK(reloaded.tag() == "methodtag");
  auto rpath2 = temp_path("roundtrip2.run");
  reloaded.save(rpath2, "variant=test");
  std::ifstream g1(rpath), g2(rpath2);
  std::string c1((std::istreambuf_iterator<char>(g1)), {});
  std::string c2((std::istreambuf_iterator<char>(g2)), {});
  CHECK(c1 == c2);
  std::remove(rpath.c_str());
  std::remove(rpath2.c_str());
}

TEST_CASE("runs reject duplicate docids per query") {
  Run run("r");
  run.add("q", "d", 1.0);
  run.add("q", "d", 0.5);
  CHECK_THROWS_AS(run.sort_and_validate(), std::runtime_error);
}

TEST_CASE("split experiment: identity at 1.0 and row-axis monotonicity") {
  auto collection = make_overlap_split_collection();
  MlmIndex mlm(collection.kb);

  std::vector<TableElements> elements;
  for (const auto& t : collection.corpus) {
    elements.push_back(extract_elements(t, collection.kb, mlm));
  }
  auto lookup = [&](const std::string& id) -> TableView {
    for (std::size_t i = 0; i < collection.corpus.size(); ++i) {
      if (collection.corpus[i].table_id == id) {
        return {&collection.corpus[i], &elements[i]};
      }
    }
    throw std::out_of_range(id);
  };

  // Relevance from entity overlap against the full query table.
  std::vector<std::pair<std::string, std::vector<std::string>>> ents;
  for (std::size_t i = 0; i < collection.corpus.size(); ++i) {
    ents.emplace_back(collection.corpus[i].table_id, elements[i].entities);
  }
  Qrels qrels = overlap_qrels({collection.query_id}, ents);
  CHECK(qrels.grade(collection.query_id, "c8") == 2);
  CHECK(qrels.grade(collection.query_id, "c4") == 2);
  CHECK(qrels.grade(collection.query_id, "c3") == 1);
  CHECK(qrels.grade(collection.query_id, "c2") == 1);
  CHECK(qrels.grade(collection.query_id, "c1") == 0);
  CHECK(qrels.grade(collection.query_id, "z0") == 0);

  SplitExperimentInputs inputs;
  inputs.query_ids = {collection.query_id};
  inputs.lookup = lookup;
  inputs.pool_of = [&](const std::string&) { return collection.candidate_ids; };
  inputs.scorer = [](const std::string&, const TableView& q, const TableView& c) {
    return entity_coverage(q, c);
  };
  inputs.qrels = &qrels;
  inputs.kb = &collection.kb;
  inputs.retriever = &mlm;

  auto outcomes = split_experiment(inputs, SplitAxis::Rows);
  REQUIRE(outcomes.size() == 4);
  for (std::size_t i = 1; i < outcomes.size(); ++i) {
    CHECK(outcomes[i].ndcg10 >= outcomes[i - 1].ndcg10 - 1e-12);
  }

  // Fraction 1.0 reproduces the unsplit scoring bit-exactly.
  Run unsplit("direct");
  TableView query = lookup(collection.query_id);
  for (const auto& cid : collection.candidate_ids) {
    unsplit.add(collection.query_id, cid, entity_coverage(query, lookup(cid)));
  }
  unsplit.sort_and_validate();
  const auto& at_full = outcomes.back();
  CHECK(at_full.fraction == 1.0);
  CHECK(at_full.run.ranking(collection.query_id).size() ==
        unsplit.ranking(collection.query_id).size());
  const auto& a = at_full.run.ranking(collection.query_id);
  const auto& b = unsplit.ranking(collection.query_id);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].docid == b[i].docid);
    CHECK(a[i].score == b[i].score);  // bit-exact
  }
  CHECK(at_full.ndcg10 == ndcg(unsplit, qrels, 10).mean);
  CHECK(at_full.ndcg10 == doctest::Approx(1.0));  // full input orders perfectly

  // One outcome row per fraction on the other axis as well.
  auto cols = split_experiment(inputs, SplitAxis::Columns);
  CHECK(cols.size() == 4);
}

}  // TEST_SUITE
