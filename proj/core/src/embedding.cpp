#include "tabrec/embedding.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tabrec {

EmbeddingStore EmbeddingStore::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file " + path);

  std::size_t count = 0;
  std::size_t dim = 0;
  if (!(in >> count >> dim) || dim == 0) {
    throw std::runtime_error(path + ": expected header `count dimension`");
  }

  EmbeddingStore store;
  store.dimension_ = dim;
  store.data_.reserve(count * dim);
  store.terms_.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::string term;
    if (!(in >> term)) {
      throw std::runtime_error(path + ": truncated at entry " + std::to_string(i));
    }
    auto [it, inserted] =
        store.offsets_.emplace(term, static_cast<std::uint32_t>(store.terms_.size()));
    if (!inserted) {
      throw std::runtime_error(path + ": duplicate term " + term);
    }
    store.terms_.push_back(term);
    for (std::size_t d = 0; d < dim; ++d) {
      float v;
      if (!(in >> v)) {
        throw std::runtime_error(path + ": bad vector for term " + term);
      }
      store.data_.push_back(v);
    }
  }
  return store;
}

EmbeddingStore EmbeddingStore::from_vectors(
    std::size_t dimension,
    const std::vector<std::pair<std::string, std::vector<float>>>& vectors) {
  EmbeddingStore store;
  store.dimension_ = dimension;
  for (const auto& [term, vec] : vectors) {
    if (vec.size() != dimension) {
      throw std::invalid_argument("vector length mismatch for term " + term);
    }
    auto [it, inserted] =
        store.offsets_.emplace(term, static_cast<std::uint32_t>(store.terms_.size()));
    if (!inserted) throw std::invalid_argument("duplicate term " + term);
    store.terms_.push_back(term);
    store.data_.insert(store.data_.end(), vec.begin(), vec.end());
  }
  return store;
}

void EmbeddingStore::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write embedding file " + path);
  out << terms_.size() << ' ' << dimension_ << '\n';
  char buf[64];
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    out << terms_[i];
    const float* v = data_.data() + i * dimension_;
    for (std::size_t d = 0; d < dimension_; ++d) {
      // 9 significant digits round-trip a float exactly.
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v[d]));
      out << ' ' << buf;
    }
    out << '\n';
  }
}

bool EmbeddingStore::contains(std::string_view term) const {
  return offsets_.count(std::string(term)) > 0;
}

const float* EmbeddingStore::find(std::string_view term) const {
  auto it = offsets_.find(std::string(term));
  if (it == offsets_.end()) return nullptr;
  return data_.data() + static_cast<std::size_t>(it->second) * dimension_;
}

}  // namespace tabrec
