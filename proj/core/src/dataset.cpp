#include "tabrec/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tabrec {

void Dataset::add_row(std::string qid, std::string docid, double label,
                      std::span<const double> features) {
  if (features.size() != layout_.size()) {
    throw std::invalid_argument("row has " + std::to_string(features.size()) +
                                " features, layout expects " +
                                std::to_string(layout_.size()));
  }
  double rounded = std::round(label);
  if (std::abs(label - rounded) > 1e-9 || rounded < 0 || rounded > 2) {
    throw std::invalid_argument("label must be a grade in {0, 1, 2}, got " +
                                std::to_string(label));
  }
  qids_.push_back(std::move(qid));
  docids_.push_back(std::move(docid));
  labels_.push_back(rounded);
  values_.insert(values_.end(), features.begin(), features.end());
}

std::vector<std::string> Dataset::query_ids() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& q : qids_) {
    if (seen.insert(q).second) out.push_back(q);
  }
  return out;
}

Dataset Dataset::select_rows(std::span<const std::size_t> row_indices) const {
  Dataset out(layout_);
  for (std::size_t r : row_indices) {
    out.add_row(qids_[r], docids_[r], labels_[r], features(r));
  }
  return out;
}

Dataset Dataset::select_features(
    std::span<const std::size_t> feature_indices) const {
  Dataset out;
  out.layout_ = FeatureLayout::subset(layout_, feature_indices);
  out.qids_ = qids_;
  out.docids_ = docids_;
  out.labels_ = labels_;
  out.values_.reserve(rows() * feature_indices.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    auto row = features(r);
    for (std::size_t f : feature_indices) out.values_.push_back(row[f]);
  }
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("cannot format double");
  return std::string(buf, ptr);
}

}  // namespace

void Dataset::write_csv(const std::string& path,
                        const std::string& header_comment) const {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    if (!header_comment.empty()) {
      std::istringstream lines(header_comment);
      std::string line;
      while (std::getline(lines, line)) out << "# " << line << "\n";
    }
    out << "qid,docid,label";
    for (const auto& name : layout_.names()) out << ',' << name;
    out << "\n";
    for (std::size_t r = 0; r < rows(); ++r) {
      out << qids_[r] << ',' << docids_[r] << ',' << labels_[r];
      for (double v : features(r)) out << ',' << format_double(v);
      out << "\n";
    }
  }
  std::remove(path.c_str());
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move " + tmp + " into place");
  }
}

Dataset Dataset::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path);
  std::string line;
  // Skip configuration comments.
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') break;
  }
  std::vector<std::string> header;
  {
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 3 || header[0] != "qid" || header[1] != "docid" ||
      header[2] != "label") {
    throw std::runtime_error(path + ": expected header qid,docid,label,...");
  }

  Dataset ds;
  std::vector<FeatureDesc> descs;
  for (std::size_t i = 3; i < header.size(); ++i) {
    descs.push_back({header[i], "unknown"});
  }
  ds.layout_ = FeatureLayout::from_descriptors("csv", descs);

  std::vector<double> row(descs.size());
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string qid, docid, cell;
    if (!std::getline(ss, qid, ',') || !std::getline(ss, docid, ',') ||
        !std::getline(ss, cell, ',')) {
      throw std::runtime_error(path + ": malformed row: " + line);
    }
    double label = std::stod(cell);
    for (std::size_t f = 0; f < row.size(); ++f) {
      if (!std::getline(ss, cell, ',')) {
        throw std::runtime_error(path + ": row has too few features: " + line);
      }
      row[f] = std::stod(cell);
    }
    ds.add_row(std::move(qid), std::move(docid), label, row);
  }
  return ds;
}

}  // namespace tabrec
