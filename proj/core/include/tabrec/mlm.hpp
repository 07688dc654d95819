#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tabrec/table.hpp"

namespace tabrec {

class KnowledgeBase;

/// Mixture-of-language-models entity retrieval over the label and abstract
/// fields with Dirichlet smoothing:
///   score(e|q) = sum_t log( sum_f w_f * p(t | theta_{e,f}) )
/// where p(t|theta) = (tf + mu_f * p(t|C_f)) / (len + mu_f) and mu_f is the
/// average field length.
class MlmIndex : public EntityRetriever {
 public:
  MlmIndex() = default;
  MlmIndex(const KnowledgeBase& kb, double w_label = 0.2,
           double w_abstract = 0.8);

  std::vector<std::string> retrieve(const std::string& query,
                                    std::size_t k) const override;

  /// Ranked ids with scores, for inspection and tests.
  std::vector<std::pair<std::string, double>> retrieve_scored(
      const std::string& query, std::size_t k) const;

  double w_label() const { return w_label_; }
  double w_abstract() const { return w_abstract_; }

 private:
  struct FieldStats {
    // Per entity: sorted (term id, tf) pairs and total length.
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> entity_terms;
    std::vector<std::uint32_t> entity_len;
    std::vector<std::uint64_t> collection_tf;  // indexed by term id
    std::uint64_t collection_len = 0;
    double mu = 1.0;
  };

  const KnowledgeBase* kb_ = nullptr;
  double w_label_ = 0.2;
  double w_abstract_ = 0.8;
  std::unordered_map<std::string, std::uint32_t> vocab_;
  FieldStats label_;
  FieldStats abstract_;
};

}  // namespace tabrec
