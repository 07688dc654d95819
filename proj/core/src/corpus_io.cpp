#include "tabrec/corpus_io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "tabrec/kb.hpp"

namespace tabrec {

using nlohmann::json;

namespace {

std::int64_t require_count(const json& rec, const char* field,
                           std::int64_t minimum, std::int64_t fallback) {
  if (!rec.contains(field)) return fallback;
  const auto& v = rec.at(field);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw ParseError(field, std::string("field '") + field + "' must be an integer");
  }
  auto value = v.get<std::int64_t>();
  if (value < minimum) {
    throw ParseError(field, std::string("field '") + field + "' below minimum");
  }
  return value;
}

Cell parse_cell(const json& v, const char* field, const KnowledgeBase* kb) {
  Cell cell;
  if (v.is_string()) {
    cell.text = v.get<std::string>();
    return cell;
  }
  if (!v.is_object()) {
    throw ParseError(field, std::string("field '") + field +
                                "' entries must be strings or {text, link} objects");
  }
  if (v.contains("text")) {
    if (!v.at("text").is_string()) {
      throw ParseError(field, std::string("field '") + field + "' cell text must be a string");
    }
    cell.text = v.at("text").get<std::string>();
  }
  if (v.contains("entity") && v.at("entity").is_string()) {
    // Already-normalized records carry resolved ids.
    std::string id = v.at("entity").get<std::string>();
    if (!kb || kb->contains(id)) cell.entity = std::move(id);
    return cell;
  }
  if (v.contains("link")) {
    if (!v.at("link").is_string()) {
      throw ParseError(field, std::string("field '") + field + "' cell link must be a string");
    }
    std::string link = v.at("link").get<std::string>();
    if (cell.text.empty()) cell.text = link;
    if (kb) {
      if (auto id = kb->resolve_to_entity(link)) {
        cell.entity = *id;
      }
      // Unknown target: the anchor text stays, the link is dropped.
    }
  }
  return cell;
}

}  // namespace

RawTable parse_table(const std::string& json_record, const KnowledgeBase* kb) {
  json rec;
  try {
    rec = json::parse(json_record);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON record: ") + e.what());
  }
  if (!rec.is_object()) throw ParseError("", "record must be a JSON object");

  RawTable table;
  if (!rec.contains("id") || !rec.at("id").is_string() ||
      rec.at("id").get<std::string>().empty()) {
    throw ParseError("id", "record rejected: missing table id");
  }
  table.table_id = rec.at("id").get<std::string>();

  auto get_string = [&](const char* field) -> std::string {
    if (!rec.contains(field)) return "";
    if (!rec.at(field).is_string()) {
      throw ParseError(field, std::string("field '") + field + "' must be a string");
    }
    return rec.at(field).get<std::string>();
  };
  table.page_title = get_string("pgTitle");
  table.caption = get_string("caption");

  if (rec.contains("headers")) {
    if (!rec.at("headers").is_array()) {
      throw ParseError("headers", "field 'headers' must be an array");
    }
    for (const auto& h : rec.at("headers")) {
      table.headings.push_back(parse_cell(h, "headers", kb));
    }
  }

  if (rec.contains("rows")) {
    if (!rec.at("rows").is_array()) {
      throw ParseError("rows", "field 'rows' must be an array");
    }
    for (const auto& row_json : rec.at("rows")) {
      if (!row_json.is_array()) {
        throw ParseError("rows", "field 'rows' entries must be arrays of cells");
      }
      std::vector<Cell> row;
      for (const auto& c : row_json) row.push_back(parse_cell(c, "rows", kb));
      if (row.size() > table.column_count()) {
        throw ParseError("rows", "row wider than headers in table " + table.table_id);
      }
      row.resize(table.column_count());  // pad ragged rows with empty cells
      table.rows.push_back(std::move(row));
    }
  }

  auto& stats = table.page_stats;
  stats.in_links = require_count(rec, "inLinks", 0, 0);
  stats.out_links = require_count(rec, "outLinks", 0, 0);
  stats.page_views = require_count(rec, "pageViews", 0, 0);
  stats.tables_on_page = require_count(rec, "tablesOnPage", 1, 1);
  stats.table_chars = require_count(rec, "tableChars", 0, 0);
  stats.page_chars = require_count(rec, "pageChars", 1, 1);
  if (stats.table_chars > stats.page_chars) {
    throw ParseError("tableChars", "tableChars exceeds pageChars in table " +
                                       table.table_id);
  }

  if (rec.contains("pgEntity") && rec.at("pgEntity").is_string()) {
    table.page_entity = rec.at("pgEntity").get<std::string>();
  } else if (kb && !table.page_title.empty()) {
    table.page_entity = kb->resolve_to_entity(table.page_title);
  }
  return table;
}

std::vector<RawTable> load_corpus(const std::string& path,
                                  const KnowledgeBase* kb) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file " + path);
  std::vector<RawTable> tables;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    try {
      tables.push_back(parse_table(line, kb));
    } catch (const ParseError& e) {
      throw ParseError(e.field(), path + ":" + std::to_string(lineno) + ": " +
                                      e.what());
    }
  }
  return tables;
}

namespace {

json cell_to_json(const Cell& cell) {
  json j;
  j["text"] = cell.text;
  if (cell.entity) j["entity"] = *cell.entity;
  return j;
}

Cell cell_from_json(const json& j) {
  Cell cell;
  cell.text = j.value("text", "");
  if (j.contains("entity")) cell.entity = j.at("entity").get<std::string>();
  return cell;
}

json table_to_json(const StoredTable& st) {
  const RawTable& t = st.table;
  json j;
  j["id"] = t.table_id;
  j["pgTitle"] = t.page_title;
  j["caption"] = t.caption;
  if (t.page_entity) j["pgEntity"] = *t.page_entity;
  j["headers"] = json::array();
  for (const auto& h : t.headings) j["headers"].push_back(cell_to_json(h));
  j["rows"] = json::array();
  for (const auto& row : t.rows) {
    json jr = json::array();
    for (const auto& c : row) jr.push_back(cell_to_json(c));
    j["rows"].push_back(std::move(jr));
  }
  j["inLinks"] = t.page_stats.in_links;
  j["outLinks"] = t.page_stats.out_links;
  j["pageViews"] = t.page_stats.page_views;
  j["tablesOnPage"] = t.page_stats.tables_on_page;
  j["tableChars"] = t.page_stats.table_chars;
  j["pageChars"] = t.page_stats.page_chars;

  const TableElements& e = st.elements;
  json je;
  je["topicWords"] = e.topic_words;
  je["topicEntities"] = e.topic_entities;
  je["headingWords"] = e.heading_words;
  if (e.core_column) je["coreColumn"] = *e.core_column;
  je["entities"] = e.entities;
  je["dataWords"] = e.data_words;
  je["dataEntities"] = e.data_entities;
  j["elements"] = std::move(je);
  return j;
}

StoredTable table_from_json(const json& j) {
  StoredTable st;
  RawTable& t = st.table;
  t.table_id = j.at("id").get<std::string>();
  t.page_title = j.value("pgTitle", "");
  t.caption = j.value("caption", "");
  if (j.contains("pgEntity")) t.page_entity = j.at("pgEntity").get<std::string>();
  for (const auto& h : j.at("headers")) t.headings.push_back(cell_from_json(h));
  for (const auto& row : j.at("rows")) {
    std::vector<Cell> r;
    for (const auto& c : row) r.push_back(cell_from_json(c));
    t.rows.push_back(std::move(r));
  }
  t.page_stats.in_links = j.value("inLinks", 0);
  t.page_stats.out_links = j.value("outLinks", 0);
  t.page_stats.page_views = j.value("pageViews", 0);
  t.page_stats.tables_on_page = j.value("tablesOnPage", 1);
  t.page_stats.table_chars = j.value("tableChars", 0);
  t.page_stats.page_chars = j.value("pageChars", 1);

  const json& je = j.at("elements");
  TableElements& e = st.elements;
  e.topic_words = je.at("topicWords").get<std::vector<std::string>>();
  e.topic_entities = je.at("topicEntities").get<std::vector<std::string>>();
  e.heading_words = je.at("headingWords").get<std::vector<std::string>>();
  if (je.contains("coreColumn")) e.core_column = je.at("coreColumn").get<std::size_t>();
  e.entities = je.at("entities").get<std::vector<std::string>>();
  e.data_words = je.at("dataWords").get<std::vector<std::string>>();
  e.data_entities = je.at("dataEntities").get<std::vector<std::string>>();
  return st;
}

}  // namespace

void save_table_store(const std::string& path,
                      const std::vector<StoredTable>& tables,
                      const std::string& header_comment) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    if (!header_comment.empty()) {
      std::size_t start = 0;
      while (start <= header_comment.size()) {
        std::size_t end = header_comment.find('\n', start);
        std::string_view line(header_comment.data() + start,
                              (end == std::string::npos ? header_comment.size() : end) - start);
        out << "# " << line << "\n";
        if (end == std::string::npos) break;
        start = end + 1;
      }
    }
    for (const auto& st : tables) out << table_to_json(st).dump() << "\n";
  }
  std::remove(path.c_str());
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move " + tmp + " into place");
  }
}

std::vector<StoredTable> load_table_store(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open table store " + path);
  std::vector<StoredTable> tables;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    tables.push_back(table_from_json(json::parse(line)));
  }
  return tables;
}

}  // namespace tabrec
