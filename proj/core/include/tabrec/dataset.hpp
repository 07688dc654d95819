#pragma once

#include <span>
#include <string>
#include <vector>

#include "tabrec/features.hpp"

namespace tabrec {

/// Learning-to-rank rows: (query id, candidate id, graded label, features),
/// all sharing one layout. Labels are integral grades in {0, 1, 2}.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(FeatureLayout layout) : layout_(std::move(layout)) {}

  void add_row(std::string qid, std::string docid, double label,
               std::span<const double> features);

  std::size_t rows() const { return qids_.size(); }
  std::size_t feature_count() const { return layout_.size(); }
  const FeatureLayout& layout() const { return layout_; }

  const std::string& qid(std::size_t row) const { return qids_[row]; }
  const std::string& docid(std::size_t row) const { return docids_[row]; }
  double label(std::size_t row) const { return labels_[row]; }
  std::span<const double> features(std::size_t row) const {
    return {values_.data() + row * layout_.size(), layout_.size()};
  }

  /// Distinct query ids in first-appearance order.
  std::vector<std::string> query_ids() const;

  /// Row subsets (for folds) and feature subsets (for importance batches).
  Dataset select_rows(std::span<const std::size_t> row_indices) const;
  Dataset select_features(std::span<const std::size_t> feature_indices) const;

  /// `qid,docid,label,f1..fm` with a header line of feature names;
  /// '#'-prefixed lines carry the resolved configuration.
  void write_csv(const std::string& path,
                 const std::string& header_comment = "") const;
  static Dataset read_csv(const std::string& path);

 private:
  FeatureLayout layout_;
  std::vector<std::string> qids_;
  std::vector<std::string> docids_;
  std::vector<double> labels_;
  std::vector<double> values_;  // row-major
};

}  // namespace tabrec
