#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tabrec {

/// Dense term embeddings loaded from the textual interchange format:
/// first line `count dimension`, then `term v1 v2 ... vd` per line.
/// Lookups for absent terms report a miss (nullptr) rather than returning
/// a silent zero vector.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  static EmbeddingStore load(const std::string& path);

  /// Programmatic construction (tests, synthetic collections).
  static EmbeddingStore from_vectors(
      std::size_t dimension,
      const std::vector<std::pair<std::string, std::vector<float>>>& vectors);

  void save(const std::string& path) const;

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return offsets_.size(); }
  bool contains(std::string_view term) const;

  /// Pointer to `dimension()` floats, or nullptr when the term is unknown.
  const float* find(std::string_view term) const;

 private:
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, std::uint32_t> offsets_;
  std::vector<float> data_;
  std::vector<std::string> terms_;  // insertion order, for save()
};

}  // namespace tabrec
