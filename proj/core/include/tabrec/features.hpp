#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tabrec/baselines.hpp"
#include "tabrec/fusion.hpp"
#include "tabrec/represent.hpp"

namespace tabrec {

/// One position in a feature vector.
struct FeatureDesc {
  std::string name;
  std::string group;  // input-table | candidate-table | similarity

  bool operator==(const FeatureDesc&) const = default;
};

/// Ordered, named feature descriptors for one experiment variant. The
/// vector layout is: n input-table features, n candidate-table features,
/// then m similarity features. Frozen in a versioned manifest.
class FeatureLayout {
 public:
  static FeatureLayout for_variant(const std::string& variant);
  static const std::vector<std::string>& known_variants();
  static FeatureLayout from_descriptors(std::string variant,
                                        std::vector<FeatureDesc> descriptors);
  static FeatureLayout subset(const FeatureLayout& base,
                              std::span<const std::size_t> feature_indices);

  const std::string& variant() const { return variant_; }
  std::size_t size() const { return features_.size(); }
  const FeatureDesc& at(std::size_t i) const { return features_[i]; }
  const std::vector<FeatureDesc>& descriptors() const { return features_; }
  std::vector<std::string> names() const;

  /// FNV-1a over the variant and the ordered names; embedded in models and
  /// checked at prediction time.
  std::uint64_t fingerprint() const;

  void save(const std::string& path) const;
  static FeatureLayout load(const std::string& path);

  bool operator==(const FeatureLayout&) const = default;

 private:
  std::string variant_;
  std::vector<FeatureDesc> features_;
};

bool variant_has_table_features(const std::string& variant);
std::size_t variant_similarity_count(const std::string& variant);

/// The ten per-table descriptors: rows, cols, empty cells, caption IDF,
/// page-title IDF, in/out links, page views, 1/tables-on-page, and the
/// table-to-page size ratio.
std::array<double, 10> table_features(const RawTable& table,
                                      const CorpusStats& stats);

/// All admissible element representations of one table, built once and
/// shared across candidate pairings.
class TableRepr {
 public:
  TableRepr() = default;
  TableRepr(TableView view, const RepresentationInputs& inputs,
            bool build_representations);

  const TableView& view() const { return view_; }
  const ElementRepresentation& get(Element e, Space s) const;
  bool has_representations() const { return built_; }

 private:
  TableView view_;
  bool built_ = false;
  std::array<std::optional<ElementRepresentation>, 12> reps_;
};

struct MatchingParams {
  double delta = 0.8;
  double alpha = 0.5;
  bool normalize_late_sum = false;
};

/// 36 element-wise fusion scores in the frozen layout order; unavailable
/// representations yield 0.
std::vector<double> crab_element_wise(const TableRepr& input,
                                      const TableRepr& candidate,
                                      bool normalize_late_sum = false);

/// 72 cross-element scores (both directions per pair).
std::vector<double> crab_cross_element(const TableRepr& input,
                                       const TableRepr& candidate,
                                       bool normalize_late_sum = false);

/// Element-wise block followed by the cross-element block (108 values).
std::vector<double> crab_similarity_features(const TableRepr& input,
                                             const TableRepr& candidate,
                                             bool normalize_late_sum = false);

/// The ten hand-crafted similarity features.
std::vector<double> hcf_similarity_features(const TableView& input,
                                            const TableView& candidate,
                                            const CorpusStats& stats,
                                            const KnowledgeBase& kb,
                                            const MatchingParams& params);

/// Concatenates [input table features | candidate table features | sims]
/// per the layout; throws when the similarity block does not match.
std::vector<double> assemble(const FeatureLayout& layout,
                             const TableView& input, const TableView& candidate,
                             std::span<const double> sims,
                             const CorpusStats& stats);

/// Variant-dispatching extractor used by the pipeline: prepares per-table
/// representations once, then emits full feature vectors per pair.
class FeatureExtractor {
 public:
  FeatureExtractor(std::string variant, RepresentationInputs inputs,
                   MatchingParams params);

  const FeatureLayout& layout() const { return layout_; }
  bool needs_representations() const {
    return needs_element_wise_ || needs_cross_element_;
  }
  TableRepr prepare(const TableView& view) const;
  std::vector<double> extract(const TableRepr& input,
                              const TableRepr& candidate) const;

 private:
  std::string variant_;
  FeatureLayout layout_;
  RepresentationInputs inputs_;
  MatchingParams params_;
  bool needs_element_wise_ = false;
  bool needs_cross_element_ = false;
};

}  // namespace tabrec
