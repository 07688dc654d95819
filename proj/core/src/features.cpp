#include "tabrec/features.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "tabrec/kb.hpp"
#include "tabrec/text.hpp"

namespace tabrec {

namespace {

constexpr std::array<const char*, 10> kTableFeatureNames = {
    "rows",        "cols",           "nulls",       "caption-idf",
    "pagetitle-idf", "in-links",     "out-links",   "page-views",
    "table-importance", "table-page-fraction"};

struct ElementSpaces {
  Element element;
  std::vector<Space> spaces;
};

// Row order of the published dimension table.
const std::vector<ElementSpaces>& element_wise_plan() {
  static const std::vector<ElementSpaces> kPlan = {
      {Element::Headings, {Space::Word}},
      {Element::Data, {Space::Word, Space::Graph, Space::Entity}},
      {Element::Entities, {Space::Graph, Space::Entity}},
      {Element::Topic, {Space::Word, Space::Graph, Space::Entity}},
  };
  return kPlan;
}

struct CrossPair {
  Element a;  // input-side element in the forward direction
  Element b;
  std::vector<Space> spaces;
};

const std::vector<CrossPair>& cross_element_plan() {
  static const std::vector<CrossPair> kPlan = {
      {Element::Headings, Element::Topic, {Space::Word}},
      {Element::Headings, Element::Data, {Space::Word}},
      {Element::Data, Element::Topic, {Space::Word, Space::Graph, Space::Entity}},
      {Element::Data, Element::Entities, {Space::Graph, Space::Entity}},
      {Element::Topic, Element::Entities, {Space::Graph, Space::Entity}},
  };
  return kPlan;
}

const std::vector<std::string>& hcf_feature_names() {
  static const std::vector<std::string> kNames = {
      "hcf:pagetitle:infogather-idf-cos",
      "hcf:headings:msje",
      "hcf:headings:schema-benefit",
      "hcf:headings:infogather-cos",
      "hcf:headings:nguyen",
      "hcf:data:infogather-column-cos",
      "hcf:data:infogather-table-cos",
      "hcf:data:nguyen",
      "hcf:entities:entity-complement",
      "hcf:entities:entity-overlap",
  };
  return kNames;
}

const std::vector<std::string>& infogather_feature_names() {
  static const std::vector<std::string> kNames = {
      "ig:data", "ig:column", "ig:pagetitle", "ig:headings"};
  return kNames;
}

std::vector<std::string> crab_element_wise_names() {
  std::vector<std::string> names;
  for (const auto& row : element_wise_plan()) {
    for (Space s : row.spaces) {
      for (Measure m : kAllMeasures) {
        names.push_back("ew:" + std::string(element_name(row.element)) + ":" +
                        std::string(space_name(s)) + ":" +
                        std::string(measure_name(m)));
      }
    }
  }
  return names;
}

std::vector<std::string> crab_cross_element_names() {
  std::vector<std::string> names;
  for (const auto& pair : cross_element_plan()) {
    for (auto [lhs, rhs] : {std::pair{pair.a, pair.b}, std::pair{pair.b, pair.a}}) {
      for (Space s : pair.spaces) {
        for (Measure m : kAllMeasures) {
          names.push_back("ce:" + std::string(element_name(lhs)) + ">" +
                          std::string(element_name(rhs)) + ":" +
                          std::string(space_name(s)) + ":" +
                          std::string(measure_name(m)));
        }
      }
    }
  }
  return names;
}

std::vector<std::string> similarity_names(const std::string& variant) {
  if (variant == "HCF-1" || variant == "HCF-2") return hcf_feature_names();
  if (variant == "infogather") return infogather_feature_names();
  std::vector<std::string> names;
  if (variant == "CRAB-1" || variant == "CRAB-2" || variant == "CRAB-4") {
    auto ew = crab_element_wise_names();
    names.insert(names.end(), ew.begin(), ew.end());
  }
  if (variant == "CRAB-3" || variant == "CRAB-4") {
    auto ce = crab_cross_element_names();
    names.insert(names.end(), ce.begin(), ce.end());
  }
  if (names.empty()) throw std::invalid_argument("unknown variant: " + variant);
  return names;
}

}  // namespace

const std::vector<std::string>& FeatureLayout::known_variants() {
  static const std::vector<std::string> kVariants = {
      "HCF-1", "HCF-2", "CRAB-1", "CRAB-2", "CRAB-3", "CRAB-4", "infogather"};
  return kVariants;
}

bool variant_has_table_features(const std::string& variant) {
  return variant == "HCF-2" || variant == "CRAB-2" || variant == "CRAB-3" ||
         variant == "CRAB-4";
}

std::size_t variant_similarity_count(const std::string& variant) {
  return similarity_names(variant).size();
}

FeatureLayout FeatureLayout::for_variant(const std::string& variant) {
  FeatureLayout layout;
  layout.variant_ = variant;
  auto sims = similarity_names(variant);  // validates the variant
  if (variant_has_table_features(variant)) {
    for (const char* name : kTableFeatureNames) {
      layout.features_.push_back({std::string("input:") + name, "input-table"});
    }
    for (const char* name : kTableFeatureNames) {
      layout.features_.push_back({std::string("candidate:") + name, "candidate-table"});
    }
  }
  for (auto& name : sims) layout.features_.push_back({std::move(name), "similarity"});
  return layout;
}

FeatureLayout FeatureLayout::from_descriptors(
    std::string variant, std::vector<FeatureDesc> descriptors) {
  FeatureLayout layout;
  layout.variant_ = std::move(variant);
  layout.features_ = std::move(descriptors);
  return layout;
}

FeatureLayout FeatureLayout::subset(
    const FeatureLayout& base, std::span<const std::size_t> feature_indices) {
  FeatureLayout layout;
  layout.variant_ = base.variant_ + ":subset";
  for (std::size_t i : feature_indices) layout.features_.push_back(base.at(i));
  return layout;
}

std::vector<std::string> FeatureLayout::names() const {
  std::vector<std::string> out;
  out.reserve(features_.size());
  for (const auto& f : features_) out.push_back(f.name);
  return out;
}

std::uint64_t FeatureLayout::fingerprint() const {
  std::uint64_t hash = 1469598103934665603ull;
  auto mix = [&](std::string_view text) {
    for (unsigned char c : text) {
      hash ^= c;
      hash *= 1099511628211ull;
    }
    hash ^= '\n';
    hash *= 1099511628211ull;
  };
  mix(variant_);
  for (const auto& f : features_) mix(f.name);
  return hash;
}

void FeatureLayout::save(const std::string& path) const {
  nlohmann::json j;
  j["version"] = 1;
  j["variant"] = variant_;
  j["features"] = nlohmann::json::array();
  for (const auto& f : features_) {
    j["features"].push_back({{"name", f.name}, {"group", f.group}});
  }
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write layout manifest " + tmp);
    out << j.dump(2) << "\n";
  }
  std::remove(path.c_str());
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move " + tmp + " into place");
  }
}

FeatureLayout FeatureLayout::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open layout manifest " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  FeatureLayout layout;
  layout.variant_ = j.at("variant").get<std::string>();
  for (const auto& f : j.at("features")) {
    layout.features_.push_back(
        {f.at("name").get<std::string>(), f.at("group").get<std::string>()});
  }
  return layout;
}

std::array<double, 10> table_features(const RawTable& table,
                                      const CorpusStats& stats) {
  std::size_t nulls = 0;
  for (const auto& row : table.rows) {
    for (const auto& cell : row) {
      if (cell.empty()) ++nulls;
    }
  }
  auto idf_sum = [&](const std::string& text) {
    std::set<std::string> distinct;
    for (auto& tok : tokenize(text)) distinct.insert(std::move(tok));
    double sum = 0.0;
    for (const auto& t : distinct) sum += stats.idf(t, Field::Catchall);
    return sum;
  };
  const auto& ps = table.page_stats;
  return {
      static_cast<double>(table.row_count()),
      static_cast<double>(table.column_count()),
      static_cast<double>(nulls),
      idf_sum(table.caption),
      idf_sum(table.page_title),
      static_cast<double>(ps.in_links),
      static_cast<double>(ps.out_links),
      static_cast<double>(ps.page_views),
      ps.tables_on_page > 0 ? 1.0 / static_cast<double>(ps.tables_on_page) : 0.0,
      ps.page_chars > 0
          ? static_cast<double>(ps.table_chars) / static_cast<double>(ps.page_chars)
          : 0.0,
  };
}

TableRepr::TableRepr(TableView view, const RepresentationInputs& inputs,
                     bool build_representations)
    : view_(view), built_(build_representations) {
  if (!built_) return;
  for (Element e : kAllElements) {
    for (Space s : kAllSpaces) {
      if (!admissible(e, s)) continue;
      reps_[static_cast<std::size_t>(e) * 3 + static_cast<std::size_t>(s)] =
          represent(*view.elements, e, s, inputs);
    }
  }
}

const ElementRepresentation& TableRepr::get(Element e, Space s) const {
  const auto& slot =
      reps_[static_cast<std::size_t>(e) * 3 + static_cast<std::size_t>(s)];
  if (!slot) {
    throw std::invalid_argument(
        std::string("no representation for ") + std::string(element_name(e)) +
        " in " + std::string(space_name(s)) + " space");
  }
  return *slot;
}

namespace {

void append_pair_scores(std::vector<double>& out,
                        const ElementRepresentation& a,
                        const ElementRepresentation& b, bool normalize_sum) {
  FusionScores scores = fuse_all(a, b, normalize_sum);
  for (Measure m : kAllMeasures) out.push_back(scores.get(m));
}

}  // namespace

std::vector<double> crab_element_wise(const TableRepr& input,
                                      const TableRepr& candidate,
                                      bool normalize_late_sum) {
  std::vector<double> out;
  out.reserve(36);
  for (const auto& row : element_wise_plan()) {
    for (Space s : row.spaces) {
      append_pair_scores(out, input.get(row.element, s),
                         candidate.get(row.element, s), normalize_late_sum);
    }
  }
  return out;
}

std::vector<double> crab_cross_element(const TableRepr& input,
                                       const TableRepr& candidate,
                                       bool normalize_late_sum) {
  std::vector<double> out;
  out.reserve(72);
  for (const auto& pair : cross_element_plan()) {
    for (auto [lhs, rhs] : {std::pair{pair.a, pair.b}, std::pair{pair.b, pair.a}}) {
      for (Space s : pair.spaces) {
        append_pair_scores(out, input.get(lhs, s), candidate.get(rhs, s),
                           normalize_late_sum);
      }
    }
  }
  return out;
}

std::vector<double> crab_similarity_features(const TableRepr& input,
                                             const TableRepr& candidate,
                                             bool normalize_late_sum) {
  auto out = crab_element_wise(input, candidate, normalize_late_sum);
  auto cross = crab_cross_element(input, candidate, normalize_late_sum);
  out.insert(out.end(), cross.begin(), cross.end());
  return out;
}

std::vector<double> hcf_similarity_features(const TableView& input,
                                            const TableView& candidate,
                                            const CorpusStats& stats,
                                            const KnowledgeBase& kb,
                                            const MatchingParams& params) {
  InfoGatherFeatures ig = infogather_features(input, candidate, stats);
  return {
      ig.page_title,
      msje_score(input, candidate, params.delta),
      heading_benefit(input, candidate, stats),
      ig.headings,
      nguyen_heading_similarity(input, candidate, params.delta),
      ig.column,
      ig.data,
      nguyen_data_similarity(input, candidate),
      entity_complement_score(input, candidate, kb),
      entity_coverage(input, candidate),
  };
}

std::vector<double> assemble(const FeatureLayout& layout,
                             const TableView& input, const TableView& candidate,
                             std::span<const double> sims,
                             const CorpusStats& stats) {
  bool with_table = variant_has_table_features(layout.variant());
  std::size_t expected = (with_table ? 20 : 0) + sims.size();
  if (expected != layout.size() ||
      sims.size() != variant_similarity_count(layout.variant())) {
    throw std::invalid_argument(
        "feature length mismatch for variant " + layout.variant() + ": got " +
        std::to_string(sims.size()) + " similarity values");
  }
  std::vector<double> out;
  out.reserve(layout.size());
  if (with_table) {
    for (double v : table_features(*input.table, stats)) out.push_back(v);
    for (double v : table_features(*candidate.table, stats)) out.push_back(v);
  }
  out.insert(out.end(), sims.begin(), sims.end());
  return out;
}

FeatureExtractor::FeatureExtractor(std::string variant,
                                   RepresentationInputs inputs,
                                   MatchingParams params)
    : variant_(std::move(variant)),
      layout_(FeatureLayout::for_variant(variant_)),
      inputs_(inputs),
      params_(params) {
  needs_element_wise_ = variant_ == "CRAB-1" || variant_ == "CRAB-2" ||
                        variant_ == "CRAB-4";
  needs_cross_element_ = variant_ == "CRAB-3" || variant_ == "CRAB-4";
}

TableRepr FeatureExtractor::prepare(const TableView& view) const {
  return TableRepr(view, inputs_, needs_representations());
}

std::vector<double> FeatureExtractor::extract(const TableRepr& input,
                                              const TableRepr& candidate) const {
  std::vector<double> sims;
  if (variant_ == "HCF-1" || variant_ == "HCF-2") {
    sims = hcf_similarity_features(input.view(), candidate.view(),
                                   *inputs_.stats, *inputs_.kb, params_);
  } else if (variant_ == "infogather") {
    auto ig = infogather_features(input.view(), candidate.view(), *inputs_.stats);
    auto arr = ig.as_array();
    sims.assign(arr.begin(), arr.end());
  } else {
    if (needs_element_wise_) {
      auto ew = crab_element_wise(input, candidate, params_.normalize_late_sum);
      sims.insert(sims.end(), ew.begin(), ew.end());
    }
    if (needs_cross_element_) {
      auto ce = crab_cross_element(input, candidate, params_.normalize_late_sum);
      sims.insert(sims.end(), ce.begin(), ce.end());
    }
  }
  return assemble(layout_, input.view(), candidate.view(), sims, *inputs_.stats);
}

}  // namespace tabrec
