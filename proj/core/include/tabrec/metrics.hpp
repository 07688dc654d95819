#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "tabrec/trec.hpp"

namespace tabrec {

enum class GainScheme { Exponential, Linear };  // 2^g - 1 vs g

struct NdcgResult {
  std::map<std::string, double> per_query;
  double mean = 0.0;
  std::size_t queries_without_qrels = 0;  // counted as 0, with a warning
};

/// NDCG@k with log2(rank+1) discounting. The ideal ranking comes from all
/// qrels grades sorted descending (truncated at k). Queries whose qrels are
/// all zero (or missing) score 0.
NdcgResult ndcg(const Run& run, const Qrels& qrels, std::size_t k,
                GainScheme gain = GainScheme::Exponential);

/// Single-query NDCG@k over an already-ranked docid list.
double ndcg_at_k(const std::vector<RunEntry>& ranking,
                 const std::map<std::string, int>& grades, std::size_t k,
                 GainScheme gain = GainScheme::Exponential);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  bool degenerate = false;  // zero variance with a nonzero mean difference
};

/// Two-tailed paired t-test with n-1 degrees of freedom. All-equal inputs
/// give t = 0, p = 1; a constant nonzero difference reports the degenerate
/// branch (p = 0).
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

/// Regularized incomplete beta I_x(a, b) via the continued fraction
/// expansion; absolute accuracy ~1e-10 on [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

/// Two-tailed p for a t statistic with `df` degrees of freedom.
double students_t_two_tailed_p(double t, double df);

/// Fleiss' kappa over an item x category count matrix; every item must have
/// the same number of ratings. Perfect agreement yields 1.
double fleiss_kappa(const std::vector<std::vector<int>>& counts);

/// Per-query NDCG@k differences run_a - run_b, sorted ascending by delta
/// (then by query id).
std::vector<std::pair<std::string, double>> per_query_delta(
    const Run& run_a, const Run& run_b, const Qrels& qrels, std::size_t k,
    GainScheme gain = GainScheme::Exponential);

}  // namespace tabrec
