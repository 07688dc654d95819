#pragma once

#include <cstddef>
#include <vector>

namespace tabrec {

struct MatchedEdge {
  std::size_t left = 0;
  std::size_t right = 0;
  double weight = 0.0;
};

struct BipartiteMatchResult {
  std::vector<MatchedEdge> pairs;  // each node matched at most once
  double total = 0.0;
};

/// Exact maximum weight bipartite matching restricted to edges with weight
/// >= threshold. O(n^3) assignment on the padded square matrix; an empty
/// matrix yields an empty matching.
BipartiteMatchResult max_weight_bipartite_matching(
    const std::vector<std::vector<double>>& weights, double threshold);

}  // namespace tabrec
