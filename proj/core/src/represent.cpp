#include "tabrec/represent.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "tabrec/kb.hpp"

namespace tabrec {

std::string_view element_name(Element e) {
  switch (e) {
    case Element::Topic: return "topic";
    case Element::Headings: return "headings";
    case Element::Entities: return "entities";
    case Element::Data: return "data";
  }
  return "?";
}

std::string_view space_name(Space s) {
  switch (s) {
    case Space::Word: return "word";
    case Space::Graph: return "graph";
    case Space::Entity: return "entity";
  }
  return "?";
}

bool admissible(Element element, Space space) {
  switch (element) {
    case Element::Headings: return space == Space::Word;
    case Element::Entities: return space == Space::Graph || space == Space::Entity;
    case Element::Topic:
    case Element::Data: return true;
  }
  return false;
}

TermVector word_term_vector(std::span<const std::string> words,
                            const CorpusStats& stats) {
  std::map<std::string, std::size_t> tf;
  for (const auto& w : words) ++tf[w];
  TermVector tv;
  tv.entity_kind = false;
  for (const auto& [term, count] : tf) {
    double weight = static_cast<double>(count) * stats.idf(term, Field::Catchall);
    if (weight > 0.0) tv.terms.emplace_back(term, weight);
  }
  return tv;
}

TermVector entity_term_vector(std::span<const std::string> entities) {
  TermVector tv;
  tv.entity_kind = true;
  std::vector<std::string> unique(entities.begin(), entities.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  for (auto& e : unique) tv.terms.emplace_back(std::move(e), 1.0);
  return tv;
}

double SparseVec::norm() const {
  double sum = 0.0;
  for (const auto& [idx, v] : items) sum += v * v;
  return std::sqrt(sum);
}

double dot(const SparseVec& a, const SparseVec& b) {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.items.size() && j < b.items.size()) {
    if (a.items[i].first == b.items[j].first) {
      sum += a.items[i].second * b.items[j].second;
      ++i;
      ++j;
    } else if (a.items[i].first < b.items[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

SparseVec entity_adjacency_vector(const KnowledgeBase& kb,
                                  const std::string& entity) {
  auto idx = kb.index_of(entity);
  if (!idx) throw std::out_of_range("unknown entity: " + entity);
  SparseVec vec;
  for (std::uint32_t n : kb.neighbors(*idx)) {
    vec.items.emplace_back(n, 1.0);  // neighbors() excludes the entity itself
  }
  return vec;
}

void ElementRepresentation::finalize() {
  norms.clear();
  centroid_dense.clear();
  centroid_sparse.items.clear();
  centroid_norm = 0.0;
  double weight_sum = 0.0;
  for (double w : weights) weight_sum += w;

  if (!is_sparse()) {
    std::size_t dim = dense.empty() ? 0 : dense.front().size();
    centroid_dense.assign(dim, 0.0);
    for (std::size_t i = 0; i < dense.size(); ++i) {
      double nsq = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        double v = dense[i][d];
        nsq += v * v;
        centroid_dense[d] += weights[i] * v;
      }
      norms.push_back(std::sqrt(nsq));
    }
    if (weight_sum > 0.0) {
      for (auto& v : centroid_dense) v /= weight_sum;
    }
    double nsq = 0.0;
    for (double v : centroid_dense) nsq += v * v;
    centroid_norm = std::sqrt(nsq);
  } else {
    std::map<std::uint32_t, double> acc;
    for (std::size_t i = 0; i < sparse.size(); ++i) {
      norms.push_back(sparse[i].norm());
      for (const auto& [idx, v] : sparse[i].items) acc[idx] += weights[i] * v;
    }
    for (const auto& [idx, v] : acc) {
      if (weight_sum > 0.0) centroid_sparse.items.emplace_back(idx, v / weight_sum);
    }
    centroid_norm = centroid_sparse.norm();
  }
}

ElementRepresentation represent(const TableElements& elements, Element element,
                                Space space, const RepresentationInputs& in) {
  if (!admissible(element, space)) {
    throw std::invalid_argument(std::string("inadmissible pair: ") +
                                std::string(element_name(element)) + " in " +
                                std::string(space_name(space)) + " space");
  }

  ElementRepresentation rep;
  rep.element = element;
  rep.space = space;

  if (space == Space::Word) {
    const std::vector<std::string>* words = nullptr;
    switch (element) {
      case Element::Topic: words = &elements.topic_words; break;
      case Element::Headings: words = &elements.heading_words; break;
      case Element::Data: words = &elements.data_words; break;
      default: break;
    }
    TermVector tv = word_term_vector(*words, *in.stats);
    for (const auto& [term, weight] : tv.terms) {
      const float* v = in.word_vectors ? in.word_vectors->find(term) : nullptr;
      if (!v) {
        ++rep.missing;
        continue;
      }
      rep.weights.push_back(weight);
      rep.dense.emplace_back(v, v + in.word_vectors->dimension());
    }
  } else {
    const std::vector<std::string>* ents = nullptr;
    switch (element) {
      case Element::Topic: ents = &elements.topic_entities; break;
      case Element::Entities: ents = &elements.entities; break;
      case Element::Data: ents = &elements.data_entities; break;
      default: break;
    }
    TermVector tv = entity_term_vector(*ents);
    for (const auto& [id, weight] : tv.terms) {
      if (space == Space::Graph) {
        const float* v = in.graph_vectors ? in.graph_vectors->find(id) : nullptr;
        if (!v) {
          ++rep.missing;
          continue;
        }
        rep.weights.push_back(weight);
        rep.dense.emplace_back(v, v + in.graph_vectors->dimension());
      } else {
        if (!in.kb || !in.kb->contains(id)) {
          ++rep.missing;
          continue;
        }
        rep.weights.push_back(weight);
        rep.sparse.push_back(entity_adjacency_vector(*in.kb, id));
      }
    }
  }

  rep.finalize();
  return rep;
}

}  // namespace tabrec
