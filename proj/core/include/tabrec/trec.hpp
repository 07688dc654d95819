#pragma once

#include <map>
#include <string>
#include <vector>

namespace tabrec {

/// Graded relevance labels; unjudged pairs read as grade 0.
class Qrels {
 public:
  void set(const std::string& qid, const std::string& docid, int grade);
  int grade(const std::string& qid, const std::string& docid) const;
  bool has_query(const std::string& qid) const;
  const std::map<std::string, int>* query(const std::string& qid) const;
  std::vector<std::string> query_ids() const;
  std::size_t size() const { return grades_.size(); }

  /// Line format: `qid 0 docid grade`.
  static Qrels load(const std::string& path);
  void save(const std::string& path) const;

  bool operator==(const Qrels&) const = default;

 private:
  std::map<std::string, std::map<std::string, int>> grades_;
};

struct RunEntry {
  std::string docid;
  double score = 0.0;

  bool operator==(const RunEntry&) const = default;
};

/// Ranked output per query. Entries are kept sorted by descending score
/// with ties broken by docid; docids are unique per query.
class Run {
 public:
  Run() = default;
  explicit Run(std::string tag) : tag_(std::move(tag)) {}

  const std::string& tag() const { return tag_; }
  void set_tag(std::string tag) { tag_ = std::move(tag); }

  void add(const std::string& qid, std::string docid, double score);
  void sort_and_validate();  // enforces ordering + unique docids

  const std::vector<RunEntry>& ranking(const std::string& qid) const;
  std::vector<std::string> query_ids() const;
  bool has_query(const std::string& qid) const;
  std::size_t query_count() const { return rankings_.size(); }

  /// Line format: `qid Q0 docid rank score tag`. '#' lines carry headers.
  static Run load(const std::string& path);
  void save(const std::string& path, const std::string& header_comment = "") const;

  bool operator==(const Run&) const = default;

 private:
  std::string tag_ = "run";
  std::map<std::string, std::vector<RunEntry>> rankings_;
};

}  // namespace tabrec
