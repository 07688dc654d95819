#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tabrec {

/// Lowercases and splits on non-alphanumeric characters, dropping stopwords
/// and markup residue (html entity names, tag names, url schemes).
std::vector<std::string> tokenize(std::string_view text);

bool is_stopword(std::string_view token);
bool is_markup_token(std::string_view token);

/// Canonical form used for heading co-occurrence statistics: lowercased,
/// trimmed, inner whitespace collapsed to single spaces.
std::string normalize_heading(std::string_view heading);

/// Levenshtein distance (unit costs).
std::size_t edit_distance(std::string_view a, std::string_view b);

/// 1 - edit_distance / max(len). Two empty strings compare as 1.
double edit_similarity(std::string_view a, std::string_view b);

}  // namespace tabrec
