#include "tabrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tabrec {

namespace {

double gain_of(int grade, GainScheme gain) {
  if (gain == GainScheme::Linear) return static_cast<double>(grade);
  return std::pow(2.0, grade) - 1.0;
}

}  // namespace

double ndcg_at_k(const std::vector<RunEntry>& ranking,
                 const std::map<std::string, int>& grades, std::size_t k,
                 GainScheme gain) {
  double dcg = 0.0;
  std::size_t depth = std::min(k, ranking.size());
  for (std::size_t i = 0; i < depth; ++i) {
    auto it = grades.find(ranking[i].docid);
    int grade = it == grades.end() ? 0 : it->second;
    dcg += gain_of(grade, gain) / std::log2(static_cast<double>(i) + 2.0);
  }

  std::vector<int> ideal;
  ideal.reserve(grades.size());
  for (const auto& [docid, grade] : grades) ideal.push_back(grade);
  std::sort(ideal.begin(), ideal.end(), std::greater<int>());
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) {
    idcg += gain_of(ideal[i], gain) / std::log2(static_cast<double>(i) + 2.0);
  }
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

NdcgResult ndcg(const Run& run, const Qrels& qrels, std::size_t k,
                GainScheme gain) {
  NdcgResult result;
  static const std::map<std::string, int> kEmpty;
  double total = 0.0;
  for (const auto& qid : run.query_ids()) {
    const auto* grades = qrels.query(qid);
    if (!grades) {
      ++result.queries_without_qrels;
      grades = &kEmpty;
    }
    double value = ndcg_at_k(run.ranking(qid), *grades, k, gain);
    result.per_query[qid] = value;
    total += value;
  }
  result.mean = result.per_query.empty()
                    ? 0.0
                    : total / static_cast<double>(result.per_query.size());
  return result;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;

  // Continued fraction (modified Lentz).
  auto betacf = [](double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-14;
    constexpr double kTiny = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
      int m2 = 2 * m;
      double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
      d = 1.0 + aa * d;
      if (std::abs(d) < kTiny) d = kTiny;
      c = 1.0 + aa / c;
      if (std::abs(c) < kTiny) c = kTiny;
      d = 1.0 / d;
      h *= d * c;
      aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
      d = 1.0 + aa * d;
      if (std::abs(d) < kTiny) d = kTiny;
      c = 1.0 + aa / c;
      if (std::abs(c) < kTiny) c = kTiny;
      d = 1.0 / d;
      double del = d * c;
      h *= del;
      if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
  };

  double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                     a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double students_t_two_tailed_p(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  if (df <= 0.0) throw std::invalid_argument("degrees of freedom must be > 0");
  double x = df / (df + t * t);
  return regularized_incomplete_beta(df / 2.0, 0.5, x);
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("paired_ttest: length mismatch");
  }
  if (a.size() < 2) {
    throw std::invalid_argument("paired_ttest: need at least 2 pairs");
  }
  std::size_t n = a.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = (a[i] - b[i]) - mean;
    ss += d * d;
  }
  double var = ss / static_cast<double>(n - 1);

  TTestResult result;
  if (var <= 0.0) {
    if (mean == 0.0) {
      result.t = 0.0;
      result.p = 1.0;
    } else {
      result.degenerate = true;
      result.t = mean > 0 ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
      result.p = 0.0;
    }
    return result;
  }
  result.t = mean / std::sqrt(var / static_cast<double>(n));
  result.p = students_t_two_tailed_p(result.t, static_cast<double>(n - 1));
  return result;
}

double fleiss_kappa(const std::vector<std::vector<int>>& counts) {
  if (counts.empty() || counts.front().empty()) {
    throw std::invalid_argument("fleiss_kappa: empty matrix");
  }
  std::size_t n_items = counts.size();
  std::size_t n_cats = counts.front().size();
  long raters = 0;
  for (int c : counts.front()) raters += c;
  if (raters < 2) throw std::invalid_argument("fleiss_kappa: need >= 2 raters");

  double p_bar = 0.0;
  std::vector<double> category_mass(n_cats, 0.0);
  for (const auto& row : counts) {
    if (row.size() != n_cats) {
      throw std::invalid_argument("fleiss_kappa: ragged matrix");
    }
    long row_sum = 0;
    double agree = 0.0;
    for (std::size_t j = 0; j < n_cats; ++j) {
      if (row[j] < 0) throw std::invalid_argument("fleiss_kappa: negative count");
      row_sum += row[j];
      agree += static_cast<double>(row[j]) * row[j];
      category_mass[j] += row[j];
    }
    if (row_sum != raters) {
      throw std::invalid_argument(
          "fleiss_kappa: every item must have the same number of ratings");
    }
    p_bar += (agree - raters) / (static_cast<double>(raters) * (raters - 1));
  }
  p_bar /= static_cast<double>(n_items);

  double pe = 0.0;
  double total = static_cast<double>(n_items) * raters;
  for (double mass : category_mass) {
    double pj = mass / total;
    pe += pj * pj;
  }
  double denom = 1.0 - pe;
  if (denom <= 1e-15) return p_bar >= 1.0 - 1e-15 ? 1.0 : 0.0;
  return (p_bar - pe) / denom;
}

std::vector<std::pair<std::string, double>> per_query_delta(
    const Run& run_a, const Run& run_b, const Qrels& qrels, std::size_t k,
    GainScheme gain) {
  auto qa = run_a.query_ids();
  auto qb = run_b.query_ids();
  if (qa != qb) {
    throw std::invalid_argument("per_query_delta: runs cover different queries");
  }
  NdcgResult na = ndcg(run_a, qrels, k, gain);
  NdcgResult nb = ndcg(run_b, qrels, k, gain);
  std::vector<std::pair<std::string, double>> deltas;
  deltas.reserve(qa.size());
  for (const auto& qid : qa) {
    deltas.emplace_back(qid, na.per_query.at(qid) - nb.per_query.at(qid));
  }
  std::sort(deltas.begin(), deltas.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second < y.second;
    return x.first < y.first;
  });
  return deltas;
}

}  // namespace tabrec
