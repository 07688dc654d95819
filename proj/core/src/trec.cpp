#include "tabrec/trec.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tabrec {

void Qrels::set(const std::string& qid, const std::string& docid, int grade) {
  if (grade < 0 || grade > 2) {
    throw std::invalid_argument("grade must be 0, 1 or 2");
  }
  grades_[qid][docid] = grade;
}

int Qrels::grade(const std::string& qid, const std::string& docid) const {
  auto q = grades_.find(qid);
  if (q == grades_.end()) return 0;
  auto d = q->second.find(docid);
  return d == q->second.end() ? 0 : d->second;
}

bool Qrels::has_query(const std::string& qid) const {
  return grades_.count(qid) > 0;
}

const std::map<std::string, int>* Qrels::query(const std::string& qid) const {
  auto it = grades_.find(qid);
  return it == grades_.end() ? nullptr : &it->second;
}

std::vector<std::string> Qrels::query_ids() const {
  std::vector<std::string> out;
  for (const auto& [qid, docs] : grades_) out.push_back(qid);
  return out;
}

Qrels Qrels::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open qrels file " + path);
  Qrels qrels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string qid, iter, docid;
    int grade;
    if (!(ss >> qid >> iter >> docid >> grade)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected `qid 0 docid grade`");
    }
    qrels.set(qid, docid, grade);
  }
  return qrels;
}

void Qrels::save(const std::string& path) const {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write qrels file " + tmp);
    for (const auto& [qid, docs] : grades_) {
      for (const auto& [docid, grade] : docs) {
        out << qid << " 0 " << docid << ' ' << grade << "\n";
      }
    }
  }
  std::remove(path.c_str());
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move " + tmp + " into place");
  }
}

void Run::add(const std::string& qid, std::string docid, double score) {
  rankings_[qid].push_back({std::move(docid), score});
}

void Run::sort_and_validate() {
  for (auto& [qid, entries] : rankings_) {
    std::sort(entries.begin(), entries.end(),
              [](const RunEntry& a, const RunEntry& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.docid < b.docid;
              });
    for (std::size_t i = 1; i < entries.size(); ++i) {
      if (entries[i].docid == entries[i - 1].docid) {
        throw std::runtime_error("duplicate docid " + entries[i].docid +
                                 " for query " + qid);
      }
    }
  }
}

const std::vector<RunEntry>& Run::ranking(const std::string& qid) const {
  static const std::vector<RunEntry> kEmpty;
  auto it = rankings_.find(qid);
  return it == rankings_.end() ? kEmpty : it->second;
}

std::vector<std::string> Run::query_ids() const {
  std::vector<std::string> out;
  for (const auto& [qid, entries] : rankings_) out.push_back(qid);
  return out;
}

bool Run::has_query(const std::string& qid) const {
  return rankings_.count(qid) > 0;
}

Run Run::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open run file " + path);
  Run run;
  std::string line;
  std::size_t lineno = 0;
  bool tagged = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string qid, iter, docid, score_text, tag;
    std::size_t rank;
    if (!(ss >> qid >> iter >> docid >> rank >> score_text >> tag)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected `qid Q0 docid rank score tag`");
    }
    run.add(qid, docid, std::strtod(score_text.c_str(), nullptr));
    if (!tagged) {
      run.tag_ = tag;
      tagged = true;
    }
  }
  run.sort_and_validate();
  return run;
}

namespace {

std::string shortest_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("cannot format score");
  return std::string(buf, ptr);
}

}  // namespace

void Run::save(const std::string& path, const std::string& header_comment) const {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write run file " + tmp);
    if (!header_comment.empty()) {
      std::istringstream lines(header_comment);
      std::string line;
      while (std::getline(lines, line)) out << "# " << line << "\n";
    }
    for (const auto& [qid, entries] : rankings_) {
      std::size_t rank = 1;
      for (const auto& e : entries) {
        out << qid << " Q0 " << e.docid << ' ' << rank++ << ' '
            << shortest_double(e.score) << ' ' << tag_ << "\n";
      }
    }
  }
  std::remove(path.c_str());
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move " + tmp + " into place");
  }
}

}  // namespace tabrec
