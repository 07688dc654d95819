#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tabrec/embedding.hpp"
#include "tabrec/index.hpp"
#include "tabrec/table.hpp"

namespace tabrec {

class KnowledgeBase;

enum class Element : std::uint8_t { Topic = 0, Headings = 1, Entities = 2, Data = 3 };
enum class Space : std::uint8_t { Word = 0, Graph = 1, Entity = 2 };

inline constexpr std::array<Element, 4> kAllElements = {
    Element::Topic, Element::Headings, Element::Entities, Element::Data};
inline constexpr std::array<Space, 3> kAllSpaces = {Space::Word, Space::Graph,
                                                    Space::Entity};

std::string_view element_name(Element e);
std::string_view space_name(Space s);

/// Which (element, space) pairs have a representation: headings live in the
/// word space only, core-column entities in graph/entity, topic and data in
/// all three.
bool admissible(Element element, Space space);

/// Sparse weighted term vector. Entity-kind vectors are binary.
struct TermVector {
  std::vector<std::pair<std::string, double>> terms;  // sorted by term
  bool entity_kind = false;

  bool empty() const { return terms.empty(); }
};

/// TF-IDF weights over the catchall field; zero-weight terms are dropped.
TermVector word_term_vector(std::span<const std::string> words,
                            const CorpusStats& stats);

/// Binary entity indicator vector.
TermVector entity_term_vector(std::span<const std::string> entities);

/// Sparse indicator vector, sorted by index.
struct SparseVec {
  std::vector<std::pair<std::uint32_t, double>> items;

  bool empty() const { return items.empty(); }
  double norm() const;
};

double dot(const SparseVec& a, const SparseVec& b);

/// Indicator over entities adjacent to `entity` under the KB's configured
/// link direction rule; the diagonal (self) component is always zero.
/// Throws std::out_of_range for an unknown entity.
SparseVec entity_adjacency_vector(const KnowledgeBase& kb,
                                  const std::string& entity);

/// A table element lifted into one semantic space: term weights paired with
/// their semantic vectors (dense for word/graph, sparse for entity space),
/// plus the weighted centroid used by early fusion.
struct ElementRepresentation {
  Element element = Element::Topic;
  Space space = Space::Word;
  std::vector<double> weights;
  std::vector<std::vector<float>> dense;
  std::vector<SparseVec> sparse;
  std::vector<double> norms;      // per-term vector norms
  std::size_t missing = 0;        // terms skipped for lack of an embedding

  std::vector<double> centroid_dense;
  SparseVec centroid_sparse;
  double centroid_norm = 0.0;

  std::size_t size() const { return weights.size(); }
  bool empty() const { return weights.empty(); }
  bool is_sparse() const { return space == Space::Entity; }

  void finalize();  // computes norms and the weighted centroid
};

struct RepresentationInputs {
  const EmbeddingStore* word_vectors = nullptr;
  const EmbeddingStore* graph_vectors = nullptr;
  const KnowledgeBase* kb = nullptr;
  const CorpusStats* stats = nullptr;
};

/// Lifts one table element into one semantic space. Terms without an
/// embedding are skipped and counted. Throws std::invalid_argument for an
/// inadmissible (element, space) pair.
ElementRepresentation represent(const TableElements& elements, Element element,
                                Space space, const RepresentationInputs& in);

}  // namespace tabrec
