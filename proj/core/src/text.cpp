#include "tabrec/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace tabrec {

namespace {

const std::unordered_set<std::string_view>& stopword_set() {
  static const std::unordered_set<std::string_view> kStopwords = {
      "a",    "an",   "and",  "are",  "as",   "at",    "be",   "but",
      "by",   "for",  "if",   "in",   "into", "is",    "it",   "no",
      "not",  "of",   "on",   "or",   "such", "that",  "the",  "their",
      "then", "there", "these", "they", "this", "to",   "was",  "will",
      "with"};
  return kStopwords;
}

const std::unordered_set<std::string_view>& markup_set() {
  static const std::unordered_set<std::string_view> kMarkup = {
      "nbsp", "amp", "quot", "apos", "lt",   "gt",  "br",
      "href", "http", "https", "www", "span", "div"};
  return kMarkup;
}

inline bool is_word_char(unsigned char c) {
  // Bytes >= 0x80 are UTF-8 continuation/lead bytes; keep them inside tokens.
  return std::isalnum(c) || c >= 0x80;
}

}  // namespace

bool is_stopword(std::string_view token) {
  return stopword_set().count(token) > 0;
}

bool is_markup_token(std::string_view token) {
  return markup_set().count(token) > 0;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !is_stopword(current) && !is_markup_token(current)) {
      tokens.push_back(current);
    }
    current.clear();
  };
  for (unsigned char c : text) {
    if (is_word_char(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c))
                                 : static_cast<char>(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::string normalize_heading(std::string_view heading) {
  std::string out;
  out.reserve(heading.size());
  bool pending_space = false;
  for (unsigned char c : heading) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c))
                           : static_cast<char>(c));
  }
  return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  if (a.size() > b.size()) std::swap(a, b);
  std::vector<std::size_t> row(a.size() + 1);
  for (std::size_t i = 0; i <= a.size(); ++i) row[i] = i;
  for (std::size_t j = 1; j <= b.size(); ++j) {
    std::size_t diag = row[0];
    row[0] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
      std::size_t up = row[i];
      row[i] = std::min({row[i] + 1, row[i - 1] + 1,
                         diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[a.size()];
}

double edit_similarity(std::string_view a, std::string_view b) {
  std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(a, b)) /
                   static_cast<double>(longest);
}

}  // namespace tabrec
