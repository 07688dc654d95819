#include "tabrec/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tabrec {

std::string_view measure_name(Measure m) {
  switch (m) {
    case Measure::Early: return "early";
    case Measure::LateMax: return "late-max";
    case Measure::LateSum: return "late-sum";
    case Measure::LateAvg: return "late-avg";
  }
  return "?";
}

double FusionScores::get(Measure m) const {
  switch (m) {
    case Measure::Early: return early;
    case Measure::LateMax: return late_max;
    case Measure::LateSum: return late_sum;
    case Measure::LateAvg: return late_avg;
  }
  return 0.0;
}

namespace {

void check_same_space(const ElementRepresentation& a,
                      const ElementRepresentation& b) {
  if (a.space != b.space) {
    throw std::invalid_argument(
        std::string("space mismatch: ") + std::string(space_name(a.space)) +
        " vs " + std::string(space_name(b.space)));
  }
}

double dense_dot(const std::vector<float>& a, const std::vector<float>& b) {
  double sum = 0.0;
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

double pair_cosine(const ElementRepresentation& a, std::size_t i,
                   const ElementRepresentation& b, std::size_t j) {
  double denom = a.norms[i] * b.norms[j];
  if (denom <= 0.0) return 0.0;
  double d = a.is_sparse() ? dot(a.sparse[i], b.sparse[j])
                           : dense_dot(a.dense[i], b.dense[j]);
  return d / denom;
}

}  // namespace

double early_fusion(const ElementRepresentation& a,
                    const ElementRepresentation& b) {
  check_same_space(a, b);
  if (a.empty() || b.empty()) return 0.0;
  if (a.centroid_norm <= 0.0 || b.centroid_norm <= 0.0) return 0.0;
  double d;
  if (a.is_sparse()) {
    d = dot(a.centroid_sparse, b.centroid_sparse);
  } else {
    double sum = 0.0;
    std::size_t n = std::min(a.centroid_dense.size(), b.centroid_dense.size());
    for (std::size_t i = 0; i < n; ++i) sum += a.centroid_dense[i] * b.centroid_dense[i];
    d = sum;
  }
  return d / (a.centroid_norm * b.centroid_norm);
}

FusionScores fuse_all(const ElementRepresentation& a,
                      const ElementRepresentation& b, bool normalize_sum) {
  check_same_space(a, b);
  FusionScores scores;
  if (a.empty() || b.empty()) return scores;

  scores.early = early_fusion(a, b);

  double best = -2.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      double c = pair_cosine(a, i, b, j);
      best = std::max(best, c);
      sum += c;
    }
  }
  std::size_t pairs = a.size() * b.size();
  scores.late_max = best;
  scores.late_avg = sum / static_cast<double>(pairs);
  scores.late_sum =
      normalize_sum ? sum / (static_cast<double>(pairs) + 1.0) : sum;
  return scores;
}

double late_fusion(const ElementRepresentation& a,
                   const ElementRepresentation& b, LateAggr aggr,
                   bool normalize_sum) {
  FusionScores scores = fuse_all(a, b, normalize_sum);
  switch (aggr) {
    case LateAggr::Max: return scores.late_max;
    case LateAggr::Sum: return scores.late_sum;
    case LateAggr::Avg: return scores.late_avg;
  }
  return 0.0;
}

}  // namespace tabrec
