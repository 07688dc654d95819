#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tabrec {

struct EntityRecord {
  std::string id;        // canonical identifier (never a redirect source)
  std::string label;
  std::string abstract_text;  // non-empty; entities without one are dropped
  std::vector<std::uint32_t> out_links;  // sorted indices into the catalog
};

enum class AdjacencyMode {
  LinkEitherDirection,  // e_i ~ e_j if either links to the other
  LinkBothDirections,   // only if both link to each other
};

struct KbLoadReport {
  std::size_t entities_loaded = 0;
  std::size_t entities_dropped_no_abstract = 0;
  std::size_t entities_dropped_alias_id = 0;
  std::size_t links_loaded = 0;
  std::size_t links_dropped_dangling = 0;
  std::size_t links_dropped_self = 0;
};

/// Immutable entity catalog with labels, abstracts, the out-link graph and a
/// resolved redirect map. All queries are thread-safe after construction.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  /// Catalog: `id<TAB>label<TAB>abstract`. Links: `src<TAB>dst`.
  /// Redirects: `alias<TAB>canonical`. Redirects resolve transitively;
  /// a redirect cycle is an error listing the cycle.
  static KnowledgeBase load(const std::string& catalog_path,
                            const std::string& links_path,
                            const std::string& redirects_path,
                            AdjacencyMode mode = AdjacencyMode::LinkEitherDirection);

  /// In-memory construction path shared with load(); `links` are (src, dst)
  /// id pairs, `redirects` alias -> target (possibly chained).
  static KnowledgeBase build(
      std::vector<EntityRecord> records,
      const std::vector<std::pair<std::string, std::string>>& links,
      const std::vector<std::pair<std::string, std::string>>& redirects,
      AdjacencyMode mode = AdjacencyMode::LinkEitherDirection);

  std::size_t size() const { return records_.size(); }
  const KbLoadReport& load_report() const { return report_; }
  AdjacencyMode adjacency_mode() const { return mode_; }

  /// Follows the redirect map; names that are not aliases pass through.
  std::string resolve(std::string_view name) const;

  bool contains(std::string_view id) const;
  std::optional<std::uint32_t> index_of(std::string_view id) const;
  const EntityRecord& record(std::uint32_t index) const { return records_[index]; }

  /// Resolves `name` through redirects and returns its canonical id when it
  /// names a catalog entity.
  std::optional<std::string> resolve_to_entity(std::string_view name) const;

  /// Link-overlap relatedness on out-links, clamped into [0, 1].
  /// Zero-overlap pairs and entities without out-links score 0.
  /// Throws std::out_of_range for ids not in the catalog.
  double wlm(std::string_view e1, std::string_view e2) const;

  /// Neighbour indices under the configured adjacency mode, sorted, without
  /// the entity itself.
  const std::vector<std::uint32_t>& neighbors(std::uint32_t index) const {
    return adjacency_[index];
  }

 private:
  std::vector<EntityRecord> records_;  // sorted by id
  std::unordered_map<std::string, std::uint32_t> by_id_;
  std::unordered_map<std::string, std::string> redirects_;  // fully resolved
  std::vector<std::vector<std::uint32_t>> adjacency_;
  AdjacencyMode mode_ = AdjacencyMode::LinkEitherDirection;
  KbLoadReport report_;
};

}  // namespace tabrec
