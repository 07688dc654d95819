#include "tabrec/forest.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tabrec {

namespace {

// splitmix64; decorrelates per-tree streams from the user seed.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::size_t below(std::size_t bound) {
    return static_cast<std::size_t>(next() % bound);
  }

 private:
  std::uint64_t state_;
};

struct TrainContext {
  const Dataset* data;
  std::size_t n_features;
  std::size_t max_features;
};

struct BestSplit {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double reduction = 0.0;
};

// Best variance-reduction split for one feature within a node, measured as
// SSE(parent) - SSE(left) - SSE(right).
BestSplit best_split_for_feature(const TrainContext& ctx, std::size_t feature,
                                 std::span<const std::size_t> samples,
                                 std::vector<std::pair<double, double>>& scratch) {
  BestSplit best;
  scratch.clear();
  for (std::size_t row : samples) {
    scratch.emplace_back(ctx.data->features(row)[feature], ctx.data->label(row));
  }
  std::sort(scratch.begin(), scratch.end());
  if (scratch.front().first == scratch.back().first) return best;  // constant

  double total_sum = 0.0;
  for (const auto& [x, y] : scratch) total_sum += y;
  double n = static_cast<double>(scratch.size());

  double left_sum = 0.0;
  for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
    left_sum += scratch[i].second;
    if (scratch[i].first == scratch[i + 1].first) continue;
    double nl = static_cast<double>(i + 1);
    double nr = n - nl;
    double right_sum = total_sum - left_sum;
    // SSE reduction = sum_l^2/n_l + sum_r^2/n_r - sum^2/n (constant term
    // dropped from the comparison, restored below).
    double gain = left_sum * left_sum / nl + right_sum * right_sum / nr -
                  total_sum * total_sum / n;
    if (!best.found || gain > best.reduction) {
      best.found = true;
      best.reduction = gain;
      best.feature = feature;
      best.threshold = scratch[i].first +
                       (scratch[i + 1].first - scratch[i].first) / 2.0;
    }
  }
  return best;
}

void build_tree(const TrainContext& ctx, SplitMix& rng,
                std::vector<std::size_t> bootstrap, Tree& tree,
                std::vector<double>& importance) {
  struct Task {
    std::vector<std::size_t> samples;
    std::int32_t node;
  };

  auto make_node = [&tree]() {
    tree.nodes.emplace_back();
    return static_cast<std::int32_t>(tree.nodes.size() - 1);
  };

  std::vector<Task> stack;
  stack.push_back({std::move(bootstrap), make_node()});
  std::vector<std::size_t> feature_order(ctx.n_features);
  std::vector<std::pair<double, double>> scratch;

  while (!stack.empty()) {
    Task task = std::move(stack.back());
    stack.pop_back();
    auto& samples = task.samples;

    double sum = 0.0, sumsq = 0.0;
    for (std::size_t row : samples) {
      double y = ctx.data->label(row);
      sum += y;
      sumsq += y * y;
    }
    double n = static_cast<double>(samples.size());
    double mean = sum / n;
    double sse = sumsq - sum * sum / n;

    TreeNode& node = tree.nodes[task.node];
    node.value = mean;
    if (samples.size() < 2 || sse <= 1e-12) continue;  // leaf

    // Walk a fresh shuffle of the features, evaluating until max_features
    // non-constant candidates have been inspected.
    std::iota(feature_order.begin(), feature_order.end(), 0);
    for (std::size_t i = feature_order.size(); i > 1; --i) {
      std::swap(feature_order[i - 1], feature_order[rng.below(i)]);
    }
    BestSplit best;
    std::size_t inspected = 0;
    for (std::size_t f : feature_order) {
      if (inspected >= ctx.max_features) break;
      BestSplit split = best_split_for_feature(ctx, f, samples, scratch);
      if (!split.found) continue;  // constant in this node, not counted
      ++inspected;
      if (!best.found || split.reduction > best.reduction) best = split;
    }
    if (!best.found || best.reduction <= 1e-12) continue;  // leaf

    std::vector<std::size_t> left, right;
    for (std::size_t row : samples) {
      if (ctx.data->features(row)[best.feature] <= best.threshold) {
        left.push_back(row);
      } else {
        right.push_back(row);
      }
    }
    if (left.empty() || right.empty()) continue;  // numeric edge: keep leaf

    importance[best.feature] += best.reduction;
    std::int32_t node_id = task.node;
    std::int32_t left_id = make_node();
    std::int32_t right_id = make_node();
    TreeNode& parent = tree.nodes[node_id];  // nodes may have reallocated
    parent.feature = static_cast<std::int32_t>(best.feature);
    parent.threshold = best.threshold;
    parent.left = left_id;
    parent.right = right_id;
    stack.push_back({std::move(right), right_id});
    stack.push_back({std::move(left), left_id});
  }
}

}  // namespace

double Tree::predict(std::span<const double> x) const {
  std::int32_t node = 0;
  while (!nodes[node].is_leaf()) {
    const TreeNode& nd = nodes[node];
    node = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
  }
  return nodes[node].value;
}

ForestModel train_forest(const Dataset& train, const ForestParams& params) {
  if (train.rows() == 0) {
    throw std::invalid_argument("train_forest: empty dataset");
  }
  if (params.max_features == 0 || params.max_features > train.feature_count()) {
    throw std::invalid_argument(
        "train_forest: max_features must be in [1, feature count]");
  }

  ForestModel model;
  model.n_features_ = train.feature_count();
  model.layout_fingerprint_ = train.layout().fingerprint();
  model.params_ = params;
  model.trees_.resize(params.trees);

  TrainContext ctx{&train, train.feature_count(), params.max_features};
  std::vector<std::vector<double>> tree_importance(
      params.trees, std::vector<double>(ctx.n_features, 0.0));

  auto train_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      SplitMix rng(mix64(params.seed ^ (0x100000001b3ull * (t + 1))));
      std::vector<std::size_t> bootstrap(train.rows());
      for (auto& idx : bootstrap) idx = rng.below(train.rows());
      build_tree(ctx, rng, std::move(bootstrap), model.trees_[t],
                 tree_importance[t]);
    }
  };

  std::size_t workers = std::min<std::size_t>(
      std::max(1u, std::thread::hardware_concurrency()), params.trees);
  if (workers <= 1) {
    train_range(0, params.trees);
  } else {
    std::vector<std::thread> threads;
    std::size_t chunk = (params.trees + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      std::size_t begin = w * chunk;
      std::size_t end = std::min(params.trees, begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(train_range, begin, end);
    }
    for (auto& th : threads) th.join();
  }

  // Summed in tree order so the result does not depend on scheduling.
  model.raw_importance_.assign(ctx.n_features, 0.0);
  for (const auto& imp : tree_importance) {
    for (std::size_t f = 0; f < ctx.n_features; ++f) {
      model.raw_importance_[f] += imp[f];
    }
  }
  return model;
}

double ForestModel::predict(std::span<const double> features) const {
  if (features.size() != n_features_) {
    throw std::invalid_argument("predict: expected " +
                                std::to_string(n_features_) + " features, got " +
                                std::to_string(features.size()));
  }
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree.predict(features);
  return trees_.empty() ? 0.0 : sum / static_cast<double>(trees_.size());
}

double ForestModel::predict_checked(std::span<const double> features,
                                    std::uint64_t layout_fingerprint) const {
  if (layout_fingerprint != layout_fingerprint_) {
    throw std::invalid_argument("feature layout fingerprint mismatch");
  }
  return predict(features);
}

std::vector<double> ForestModel::feature_importance() const {
  std::vector<double> importance = raw_importance_;
  double total = std::accumulate(importance.begin(), importance.end(), 0.0);
  if (total > 0.0) {
    for (auto& v : importance) v /= total;
  }
  return importance;
}

std::vector<std::size_t> ForestModel::importance_ranking() const {
  auto importance = feature_importance();
  std::vector<std::size_t> order(importance.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return importance[a] > importance[b];
  });
  return order;
}

void ForestModel::save(const std::string& path) const {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write model file " + tmp);
    char buf[64];
    auto put_double = [&](double v) {
      std::snprintf(buf, sizeof(buf), "%a", v);
      out << buf;
    };
    out << "tabrec-forest 1\n";
    out << "fingerprint " << layout_fingerprint_ << "\n";
    out << "features " << n_features_ << "\n";
    out << "trees " << trees_.size() << " max_features " << params_.max_features
        << " seed " << params_.seed << "\n";
    out << "importance";
    for (double v : raw_importance_) {
      out << ' ';
      put_double(v);
    }
    out << "\n";
    for (std::size_t t = 0; t < trees_.size(); ++t) {
      out << "tree " << t << " nodes " << trees_[t].nodes.size() << "\n";
      for (const auto& node : trees_[t].nodes) {
        out << node.feature << ' ';
        put_double(node.threshold);
        out << ' ' << node.left << ' ' << node.right << ' ';
        put_double(node.value);
        out << "\n";
      }
    }
    if (!out) throw std::runtime_error("failed writing model file " + tmp);
  }
  std::remove(path.c_str());
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move " + tmp + " into place");
  }
}

ForestModel ForestModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file " + path);
  std::string word;
  int version = 0;
  in >> word >> version;
  if (word != "tabrec-forest" || version != 1) {
    throw std::runtime_error(path + ": not a tabrec forest model");
  }
  // Values are written with %a; istream float parsing does not accept
  // hexfloats, strtod does.
  auto read_double = [&in]() {
    std::string tok;
    in >> tok;
    return std::strtod(tok.c_str(), nullptr);
  };

  ForestModel model;
  std::size_t n_trees = 0;
  in >> word >> model.layout_fingerprint_;
  in >> word >> model.n_features_;
  in >> word >> n_trees >> word >> model.params_.max_features >> word >>
      model.params_.seed;
  model.params_.trees = n_trees;
  in >> word;  // "importance"
  model.raw_importance_.resize(model.n_features_);
  for (auto& v : model.raw_importance_) v = read_double();

  model.trees_.resize(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) {
    std::size_t index = 0, n_nodes = 0;
    in >> word >> index >> word >> n_nodes;
    model.trees_[t].nodes.resize(n_nodes);
    for (auto& node : model.trees_[t].nodes) {
      in >> node.feature;
      node.threshold = read_double();
      in >> node.left >> node.right;
      node.value = read_double();
    }
  }
  if (!in) throw std::runtime_error(path + ": truncated model file");
  return model;
}

}  // namespace tabrec
