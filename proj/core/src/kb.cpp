#include "tabrec/kb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tabrec {

namespace {

std::vector<std::string> split_tsv(const std::string& line, std::size_t max_fields) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (fields.size() + 1 < max_fields) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) break;
    fields.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  fields.emplace_back(line.substr(start));
  return fields;
}

// Resolves alias -> canonical transitively, erroring out on cycles.
std::unordered_map<std::string, std::string> resolve_redirects(
    const std::vector<std::pair<std::string, std::string>>& redirects) {
  std::unordered_map<std::string, std::string> raw;
  for (const auto& [alias, target] : redirects) raw[alias] = target;

  std::unordered_map<std::string, std::string> resolved;
  for (const auto& [alias, target] : raw) {
    std::vector<std::string> chain{alias};
    std::set<std::string> seen{alias};
    std::string current = target;
    while (raw.count(current)) {
      if (seen.count(current)) {
        chain.push_back(current);
        std::string msg = "redirect cycle:";
        for (const auto& node : chain) msg += " " + node;
        throw std::runtime_error(msg);
      }
      seen.insert(current);
      chain.push_back(current);
      current = raw.at(current);
    }
    resolved[alias] = current;
  }
  return resolved;
}

}  // namespace

KnowledgeBase KnowledgeBase::build(
    std::vector<EntityRecord> records,
    const std::vector<std::pair<std::string, std::string>>& links,
    const std::vector<std::pair<std::string, std::string>>& redirects,
    AdjacencyMode mode) {
  KnowledgeBase kb;
  kb.mode_ = mode;
  kb.redirects_ = resolve_redirects(redirects);

  std::sort(records.begin(), records.end(),
            [](const EntityRecord& a, const EntityRecord& b) { return a.id < b.id; });
  for (auto& rec : records) {
    if (rec.abstract_text.empty()) {
      ++kb.report_.entities_dropped_no_abstract;
      continue;
    }
    if (kb.redirects_.count(rec.id)) {
      ++kb.report_.entities_dropped_alias_id;
      continue;
    }
    if (!kb.by_id_.emplace(rec.id, static_cast<std::uint32_t>(kb.records_.size())).second) {
      throw std::runtime_error("duplicate entity id: " + rec.id);
    }
    rec.out_links.clear();
    kb.records_.push_back(std::move(rec));
  }
  kb.report_.entities_loaded = kb.records_.size();

  std::vector<std::set<std::uint32_t>> out(kb.records_.size());
  std::vector<std::set<std::uint32_t>> in(kb.records_.size());
  for (const auto& [src_raw, dst_raw] : links) {
    auto src = kb.index_of(kb.resolve(src_raw));
    auto dst = kb.index_of(kb.resolve(dst_raw));
    if (!src || !dst) {
      ++kb.report_.links_dropped_dangling;
      continue;
    }
    if (*src == *dst) {
      ++kb.report_.links_dropped_self;
      continue;
    }
    out[*src].insert(*dst);
    in[*dst].insert(*src);
    ++kb.report_.links_loaded;
  }
  for (std::size_t i = 0; i < kb.records_.size(); ++i) {
    kb.records_[i].out_links.assign(out[i].begin(), out[i].end());
  }

  kb.adjacency_.resize(kb.records_.size());
  for (std::size_t i = 0; i < kb.records_.size(); ++i) {
    std::vector<std::uint32_t> adj;
    if (mode == AdjacencyMode::LinkEitherDirection) {
      std::set_union(out[i].begin(), out[i].end(), in[i].begin(), in[i].end(),
                     std::back_inserter(adj));
    } else {
      std::set_intersection(out[i].begin(), out[i].end(), in[i].begin(),
                            in[i].end(), std::back_inserter(adj));
    }
    kb.adjacency_[i] = std::move(adj);
  }
  return kb;
}

KnowledgeBase KnowledgeBase::load(const std::string& catalog_path,
                                  const std::string& links_path,
                                  const std::string& redirects_path,
                                  AdjacencyMode mode) {
  auto read_lines = [](const std::string& path, auto&& handle) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      handle(line, lineno);
    }
  };

  std::vector<std::pair<std::string, std::string>> redirects;
  read_lines(redirects_path, [&](const std::string& line, std::size_t lineno) {
    auto fields = split_tsv(line, 2);
    if (fields.size() != 2) {
      throw std::runtime_error(redirects_path + ":" + std::to_string(lineno) +
                               ": expected alias<TAB>canonical");
    }
    redirects.emplace_back(fields[0], fields[1]);
  });

  std::vector<EntityRecord> records;
  read_lines(catalog_path, [&](const std::string& line, std::size_t lineno) {
    auto fields = split_tsv(line, 3);
    if (fields.size() != 3) {
      throw std::runtime_error(catalog_path + ":" + std::to_string(lineno) +
                               ": expected id<TAB>label<TAB>abstract");
    }
    records.push_back({fields[0], fields[1], fields[2], {}});
  });

  std::vector<std::pair<std::string, std::string>> links;
  read_lines(links_path, [&](const std::string& line, std::size_t lineno) {
    auto fields = split_tsv(line, 2);
    if (fields.size() != 2) {
      throw std::runtime_error(links_path + ":" + std::to_string(lineno) +
                               ": expected src<TAB>dst");
    }
    links.emplace_back(fields[0], fields[1]);
  });

  return build(std::move(records), links, redirects, mode);
}

std::string KnowledgeBase::resolve(std::string_view name) const {
  auto it = redirects_.find(std::string(name));
  return it == redirects_.end() ? std::string(name) : it->second;
}

bool KnowledgeBase::contains(std::string_view id) const {
  return by_id_.count(std::string(id)) > 0;
}

std::optional<std::uint32_t> KnowledgeBase::index_of(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> KnowledgeBase::resolve_to_entity(
    std::string_view name) const {
  std::string canonical = resolve(name);
  if (!contains(canonical)) return std::nullopt;
  return canonical;
}

double KnowledgeBase::wlm(std::string_view e1, std::string_view e2) const {
  auto i1 = index_of(e1);
  auto i2 = index_of(e2);
  if (!i1) throw std::out_of_range("unknown entity: " + std::string(e1));
  if (!i2) throw std::out_of_range("unknown entity: " + std::string(e2));

  const auto& l1 = records_[*i1].out_links;
  const auto& l2 = records_[*i2].out_links;
  if (l1.empty() || l2.empty()) return 0.0;

  std::size_t inter = 0;
  for (std::size_t a = 0, b = 0; a < l1.size() && b < l2.size();) {
    if (l1[a] == l2[b]) {
      ++inter; ++a; ++b;
    } else if (l1[a] < l2[b]) {
      ++a;
    } else {
      ++b;
    }
  }
  if (inter == 0) return 0.0;

  double lo = static_cast<double>(std::min(l1.size(), l2.size()));
  double hi = static_cast<double>(std::max(l1.size(), l2.size()));
  double denom = std::log(static_cast<double>(size())) - std::log(lo);
  double numer = std::log(hi) - std::log(static_cast<double>(inter));
  if (denom <= 0.0) return numer <= 0.0 ? 1.0 : 0.0;
  return std::clamp(1.0 - numer / denom, 0.0, 1.0);
}

}  // namespace tabrec
