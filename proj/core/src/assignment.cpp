#include "tabrec/assignment.hpp"

#include <algorithm>
#include <limits>

namespace tabrec {

BipartiteMatchResult max_weight_bipartite_matching(
    const std::vector<std::vector<double>>& weights, double threshold) {
  BipartiteMatchResult result;
  std::size_t n_rows = weights.size();
  std::size_t n_cols = n_rows == 0 ? 0 : weights.front().size();
  if (n_rows == 0 || n_cols == 0) return result;

  // Pad to square; edges below the threshold cost the same as staying
  // unmatched, so a perfect assignment on the padded matrix maximizes the
  // total over admissible edges only.
  std::size_t n = std::max(n_rows, n_cols);
  auto admissible_weight = [&](std::size_t i, std::size_t j) {
    if (i >= n_rows || j >= n_cols) return 0.0;
    double w = weights[i][j];
    return w >= threshold ? w : 0.0;
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Potentials-based assignment (minimizing negated weights), 1-indexed.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      std::size_t i0 = p[j0], j1 = 0;
      double delta = kInf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = -admissible_weight(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (std::size_t j = 1; j <= n; ++j) {
    std::size_t i = p[j];
    if (i == 0) continue;
    std::size_t row = i - 1, col = j - 1;
    if (row >= n_rows || col >= n_cols) continue;
    double w = weights[row][col];
    if (w >= threshold) result.pairs.push_back({row, col, w});
  }
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const MatchedEdge& a, const MatchedEdge& b) { return a.left < b.left; });
  for (const auto& e : result.pairs) result.total += e.weight;
  return result;
}

}  // namespace tabrec
