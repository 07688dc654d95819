#include "tabrec/linear_ranker.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <stdexcept>

namespace tabrec {

double LinearModel::score(std::span<const double> features) const {
  double total = 0.0;
  std::size_t n = std::min(features.size(), weights.size());
  for (std::size_t i = 0; i < n; ++i) total += weights[i] * features[i];
  return total;
}

void LinearModel::save(const std::string& path) const {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write model file " + tmp);
    char buf[64];
    out << "tabrec-linear 1\n";
    out << "fingerprint " << layout_fingerprint << "\n";
    out << "weights";
    for (double w : weights) {
      std::snprintf(buf, sizeof(buf), "%a", w);
      out << ' ' << buf;
    }
    out << "\n";
  }
  std::remove(path.c_str());
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move " + tmp + " into place");
  }
}

LinearModel LinearModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file " + path);
  std::string word;
  int version = 0;
  in >> word >> version;
  if (word != "tabrec-linear" || version != 1) {
    throw std::runtime_error(path + ": not a tabrec linear model");
  }
  LinearModel model;
  in >> word >> model.layout_fingerprint;
  in >> word;
  for (auto& w : model.weights) {
    std::string tok;
    in >> tok;
    w = std::strtod(tok.c_str(), nullptr);
  }
  if (!in) throw std::runtime_error(path + ": truncated model file");
  return model;
}

namespace {

struct QueryRows {
  std::vector<std::size_t> rows;
};

std::map<std::string, QueryRows> group_by_query(const Dataset& data) {
  std::map<std::string, QueryRows> groups;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    groups[data.qid(r)].rows.push_back(r);
  }
  return groups;
}

}  // namespace

double linear_training_ndcg(const Dataset& data,
                            const std::array<double, 4>& weights,
                            std::size_t k) {
  auto groups = group_by_query(data);
  if (groups.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [qid, group] : groups) {
    std::vector<RunEntry> ranking;
    std::map<std::string, int> grades;
    ranking.reserve(group.rows.size());
    for (std::size_t r : group.rows) {
      double score = 0.0;
      auto f = data.features(r);
      for (std::size_t i = 0; i < weights.size() && i < f.size(); ++i) {
        score += weights[i] * f[i];
      }
      ranking.push_back({data.docid(r), score});
      grades[data.docid(r)] = static_cast<int>(data.label(r));
    }
    std::sort(ranking.begin(), ranking.end(),
              [](const RunEntry& a, const RunEntry& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.docid < b.docid;
              });
    total += ndcg_at_k(ranking, grades, k);
  }
  return total / static_cast<double>(groups.size());
}

LinearModel train_linear_coordinate_ascent(const Dataset& data,
                                           std::uint64_t seed,
                                           std::size_t max_passes,
                                           std::size_t ndcg_k) {
  (void)seed;  // the grid search is fully deterministic
  if (data.feature_count() != 4) {
    throw std::invalid_argument(
        "train_linear_coordinate_ascent expects exactly 4 features, got " +
        std::to_string(data.feature_count()));
  }

  LinearModel model;
  model.layout_fingerprint = data.layout().fingerprint();

  auto normalize = [](std::array<double, 4>& w) {
    double total = 0.0;
    for (double v : w) total += std::abs(v);
    if (total > 0.0) {
      for (double& v : w) v /= total;
    }
  };

  static constexpr std::array<double, 14> kSteps = {
      0.05,  0.1,  0.2,  0.4,  0.8,  1.6,  3.2,
      -0.05, -0.1, -0.2, -0.4, -0.8, -1.6, -3.2};

  normalize(model.weights);
  double best = linear_training_ndcg(data, model.weights, ndcg_k);
  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    bool improved = false;
    for (std::size_t coord = 0; coord < model.weights.size(); ++coord) {
      double incumbent = model.weights[coord];
      double best_value = incumbent;
      for (double step : kSteps) {
        std::array<double, 4> trial = model.weights;
        trial[coord] = incumbent + step;
        normalize(trial);
        double score = linear_training_ndcg(data, trial, ndcg_k);
        if (score > best + 1e-12) {
          best = score;
          best_value = incumbent + step;
          improved = true;
        }
      }
      if (best_value != incumbent) {
        model.weights[coord] = best_value;
        normalize(model.weights);
      }
    }
    if (!improved) break;
  }
  return model;
}

}  // namespace tabrec
