#include "tabrec/mlm.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tabrec/kb.hpp"
#include "tabrec/text.hpp"

namespace tabrec {

MlmIndex::MlmIndex(const KnowledgeBase& kb, double w_label, double w_abstract)
    : kb_(&kb), w_label_(w_label), w_abstract_(w_abstract) {
  auto index_field = [&](FieldStats& stats, auto&& text_of) {
    stats.entity_terms.resize(kb.size());
    stats.entity_len.resize(kb.size());
    for (std::uint32_t e = 0; e < kb.size(); ++e) {
      std::map<std::uint32_t, std::uint32_t> counts;
      auto tokens = tokenize(text_of(kb.record(e)));
      for (const auto& tok : tokens) {
        auto [it, inserted] =
            vocab_.emplace(tok, static_cast<std::uint32_t>(vocab_.size()));
        ++counts[it->second];
      }
      stats.entity_len[e] = static_cast<std::uint32_t>(tokens.size());
      stats.collection_len += tokens.size();
      stats.entity_terms[e].assign(counts.begin(), counts.end());
      if (stats.collection_tf.size() < vocab_.size()) {
        stats.collection_tf.resize(vocab_.size(), 0);
      }
      for (const auto& [tid, tf] : counts) stats.collection_tf[tid] += tf;
    }
    if (stats.collection_tf.size() < vocab_.size()) {
      stats.collection_tf.resize(vocab_.size(), 0);
    }
    stats.mu = kb.size() > 0 && stats.collection_len > 0
                   ? static_cast<double>(stats.collection_len) / kb.size()
                   : 1.0;
  };

  index_field(label_, [](const EntityRecord& r) { return r.label; });
  index_field(abstract_, [](const EntityRecord& r) { return r.abstract_text; });
}

std::vector<std::pair<std::string, double>> MlmIndex::retrieve_scored(
    const std::string& query, std::size_t k) const {
  std::vector<std::pair<std::string, double>> ranked;
  if (!kb_ || k == 0) return ranked;

  // Terms unseen in both collections would zero out every entity; skip them.
  std::vector<std::uint32_t> terms;
  for (const auto& tok : tokenize(query)) {
    auto it = vocab_.find(tok);
    if (it == vocab_.end()) continue;
    std::uint32_t tid = it->second;
    bool has_mass =
        (tid < label_.collection_tf.size() && label_.collection_tf[tid] > 0) ||
        (tid < abstract_.collection_tf.size() && abstract_.collection_tf[tid] > 0);
    if (has_mass) terms.push_back(tid);
  }
  if (terms.empty()) return ranked;

  auto field_prob = [](const FieldStats& f, std::uint32_t entity,
                       std::uint32_t term) {
    double tf = 0.0;
    const auto& list = f.entity_terms[entity];
    auto it = std::lower_bound(
        list.begin(), list.end(), term,
        [](const auto& p, std::uint32_t t) { return p.first < t; });
    if (it != list.end() && it->first == term) tf = it->second;
    double pc = f.collection_len > 0 && term < f.collection_tf.size()
                    ? static_cast<double>(f.collection_tf[term]) / f.collection_len
                    : 0.0;
    return (tf + f.mu * pc) / (f.entity_len[entity] + f.mu);
  };

  ranked.reserve(kb_->size());
  for (std::uint32_t e = 0; e < kb_->size(); ++e) {
    double score = 0.0;
    bool dead = false;
    for (std::uint32_t t : terms) {
      double p = w_label_ * field_prob(label_, e, t) +
                 w_abstract_ * field_prob(abstract_, e, t);
      if (p <= 0.0) {
        dead = true;
        break;
      }
      score += std::log(p);
    }
    if (!dead) ranked.emplace_back(kb_->record(e).id, score);
  }

  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

std::vector<std::string> MlmIndex::retrieve(const std::string& query,
                                            std::size_t k) const {
  std::vector<std::string> ids;
  for (auto& [id, score] : retrieve_scored(query, k)) {
    (void)score;
    ids.push_back(id);
  }
  return ids;
}

}  // namespace tabrec
