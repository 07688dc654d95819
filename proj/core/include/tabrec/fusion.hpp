#pragma once

#include "tabrec/represent.hpp"

namespace tabrec {

enum class Measure : std::uint8_t {
  Early = 0,
  LateMax = 1,
  LateSum = 2,
  LateAvg = 3,
};
inline constexpr std::array<Measure, 4> kAllMeasures = {
    Measure::Early, Measure::LateMax, Measure::LateSum, Measure::LateAvg};

std::string_view measure_name(Measure m);

/// Cosine of the weighted centroids. 0 when either representation is empty
/// or either centroid is the zero vector. Throws on a space mismatch.
double early_fusion(const ElementRepresentation& a,
                    const ElementRepresentation& b);

enum class LateAggr { Max, Sum, Avg };

/// Aggregates all pairwise term-vector cosines. Empty either side scores 0.
/// The sum variant stays raw unless `normalize_sum` is set, in which case it
/// is divided by (|a|*|b| + 1).
double late_fusion(const ElementRepresentation& a,
                   const ElementRepresentation& b, LateAggr aggr,
                   bool normalize_sum = false);

struct FusionScores {
  double early = 0.0;
  double late_max = 0.0;
  double late_sum = 0.0;
  double late_avg = 0.0;

  double get(Measure m) const;
};

/// All four measures in one pass over the pairwise cosine table.
FusionScores fuse_all(const ElementRepresentation& a,
                      const ElementRepresentation& b,
                      bool normalize_sum = false);

}  // namespace tabrec
