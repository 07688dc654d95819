#include "tabrec/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tabrec {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("expected a boolean, got '" + value + "'");
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "corpus") corpus = value;
  else if (key == "kb_catalog") kb_catalog = value;
  else if (key == "kb_links") kb_links = value;
  else if (key == "kb_redirects") kb_redirects = value;
  else if (key == "word_embeddings") word_embeddings = value;
  else if (key == "graph_embeddings") graph_embeddings = value;
  else if (key == "workdir") workdir = value;
  else if (key == "queries") queries = value;
  else if (key == "qrels") qrels = value;
  else if (key == "variant") variant = value;
  else if (key == "delta") delta = std::stod(value);
  else if (key == "alpha") alpha = std::stod(value);
  else if (key == "trees") trees = std::stoul(value);
  else if (key == "max_features") max_features = std::stoul(value);
  else if (key == "folds") folds = std::stoul(value);
  else if (key == "pool_k") pool_k = std::stoul(value);
  else if (key == "topic_k") topic_k = std::stoul(value);
  else if (key == "mlm_w_label") mlm_w_label = std::stod(value);
  else if (key == "mlm_w_abstract") mlm_w_abstract = std::stod(value);
  else if (key == "seed") seed = std::stoull(value);
  else if (key == "gain") {
    if (value != "exp" && value != "linear") {
      throw std::invalid_argument("gain must be 'exp' or 'linear'");
    }
    gain = value;
  }
  else if (key == "adjacency_mutual") adjacency_mutual = parse_bool(value);
  else if (key == "normalize_late_sum") normalize_late_sum = parse_bool(value);
  else if (key == "importance_batch") importance_batch = std::stoul(value);
  else throw std::invalid_argument("unknown configuration key: " + key);
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string trimmed = trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected `key = value`");
    }
    try {
      cfg.set(trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  return cfg;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::items() const {
  auto fmt = [](double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
  };
  std::vector<std::pair<std::string, std::string>> out = {
      {"adjacency_mutual", adjacency_mutual ? "true" : "false"},
      {"alpha", fmt(alpha)},
      {"corpus", corpus},
      {"delta", fmt(delta)},
      {"folds", std::to_string(folds)},
      {"gain", gain},
      {"graph_embeddings", graph_embeddings},
      {"importance_batch", std::to_string(importance_batch)},
      {"kb_catalog", kb_catalog},
      {"kb_links", kb_links},
      {"kb_redirects", kb_redirects},
      {"max_features", std::to_string(max_features)},
      {"mlm_w_abstract", fmt(mlm_w_abstract)},
      {"mlm_w_label", fmt(mlm_w_label)},
      {"normalize_late_sum", normalize_late_sum ? "true" : "false"},
      {"pool_k", std::to_string(pool_k)},
      {"qrels", qrels},
      {"queries", queries},
      {"seed", std::to_string(seed)},
      {"topic_k", std::to_string(topic_k)},
      {"trees", std::to_string(trees)},
      {"variant", variant},
      {"word_embeddings", word_embeddings},
      {"workdir", workdir},
  };
  return out;
}

std::string ExperimentConfig::resolved_text() const {
  std::string out;
  for (const auto& [key, value] : items()) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  return out;
}

}  // namespace tabrec
