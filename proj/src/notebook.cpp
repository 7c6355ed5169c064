#include "noteg/notebook.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace noteg {

using json = nlohmann::json;

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& msg) {
  throw SchemaError(path.empty() ? "/" : path, msg);
}

void require_keys(const json& obj, const std::string& path, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional = {}) {
  if (!obj.is_object()) schema_fail(path, "expected an object");
  for (const char* k : required) {
    if (!obj.contains(k)) schema_fail(path + "/" + k, std::string("missing field '") + k + "'");
  }
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* r : required) known = known || k == r;
    for (const char* o : optional) known = known || k == o;
    if (!known) schema_fail(path + "/" + k, "unknown field '" + k + "'");
  }
}

const std::string& get_string(const json& obj, const std::string& path, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_string()) schema_fail(path + "/" + key, "expected a string");
  return v.get_ref<const std::string&>();
}

std::int64_t get_int(const json& obj, const std::string& path, const char* key, std::int64_t min) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) schema_fail(path + "/" + key, "expected an integer");
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    schema_fail(path + "/" + key, "integer out of range");
  }
  const auto n = v.get<std::int64_t>();
  if (n < min) schema_fail(path + "/" + key, "must be at least " + std::to_string(min));
  return n;
}

SheetInfo parse_asset(const json& j, const std::string& path) {
  require_keys(j, path, {"name", "path", "width", "height", "tile_w", "tile_h"});
  SheetInfo s;
  s.name = get_string(j, path, "name");
  s.path = get_string(j, path, "path");
  if (s.name.empty()) schema_fail(path + "/name", "asset name must not be empty");
  if (s.path.empty()) schema_fail(path + "/path", "asset path must not be empty");
  if (s.path.front() == '/' || s.path.find('\\') != std::string::npos ||
      (s.path.size() > 1 && s.path[1] == ':')) {
    schema_fail(path + "/path", "asset paths must be relative");
  }
  s.width = static_cast<int>(get_int(j, path, "width", 1));
  s.height = static_cast<int>(get_int(j, path, "height", 1));
  s.tile_w = static_cast<int>(get_int(j, path, "tile_w", 1));
  s.tile_h = static_cast<int>(get_int(j, path, "tile_h", 1));
  if (s.tile_w > s.width || s.tile_h > s.height) schema_fail(path, "tile size exceeds image");
  return s;
}

Cell parse_cell(const json& j, const std::string& path) {
  require_keys(j, path, {"id", "kind", "source"}, {"hidden"});
  Cell c;
  c.id = get_string(j, path, "id");
  if (c.id.empty()) schema_fail(path + "/id", "cell id must not be empty");
  const std::string& kind = get_string(j, path, "kind");
  if (kind == "code") {
    c.kind = CellKind::Code;
  } else if (kind == "doc") {
    c.kind = CellKind::Doc;
  } else {
    schema_fail(path + "/kind", "unknown cell kind '" + kind + "'");
  }
  c.source = get_string(j, path, "source");
  if (j.contains("hidden")) {
    if (!j["hidden"].is_boolean()) schema_fail(path + "/hidden", "expected a boolean");
    c.hidden = j["hidden"].get<bool>();
  }
  return c;
}

}  // namespace

SchemaError::SchemaError(std::string path, const std::string& message)
    : Error(ErrorCode::Schema, path + ": " + message), path_(std::move(path)) {}

Cell* Notebook::find(std::string_view id) {
  for (auto& c : cells) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const Cell* Notebook::find(std::string_view id) const {
  for (const auto& c : cells) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

std::string save_notebook(const Notebook& nb) {
  json assets = json::array();
  for (const auto& s : nb.assets.entries) {
    assets.push_back({{"name", s.name}, {"path", s.path}, {"width", s.width}, {"height", s.height},
                      {"tile_w", s.tile_w}, {"tile_h", s.tile_h}});
  }
  json cells = json::array();
  for (const auto& c : nb.cells) {
    cells.push_back({{"id", c.id}, {"kind", c.kind == CellKind::Code ? "code" : "doc"},
                     {"hidden", c.hidden}, {"source", c.source}});
  }
  // nlohmann::json objects are std::map backed, so keys come out sorted.
  json doc = {{"version", nb.version}, {"seed", nb.seed}, {"assets", assets}, {"cells", cells}};
  return doc.dump(2, ' ', false, json::error_handler_t::strict) + "\n";
}

Notebook load_notebook(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    schema_fail("", std::string("invalid JSON: ") + e.what());
  }
  require_keys(doc, "", {"version", "seed", "cells"}, {"assets"});

  Notebook nb;
  const json& version = doc["version"];
  if (!version.is_number_integer()) schema_fail("/version", "expected an integer");
  if (version.get<std::int64_t>() != kNotebookVersion) {
    schema_fail("/version", "unsupported version " + version.dump());
  }
  nb.version = kNotebookVersion;

  const json& seed = doc["seed"];
  if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
    schema_fail("/seed", "expected a non-negative integer");
  }
  nb.seed = seed.get<std::uint64_t>();

  if (doc.contains("assets")) {
    const json& assets = doc["assets"];
    if (!assets.is_array()) schema_fail("/assets", "expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < assets.size(); ++i) {
      const std::string path = "/assets/" + std::to_string(i);
      SheetInfo s = parse_asset(assets[i], path);
      if (!names.insert(s.name).second) schema_fail(path + "/name", "duplicate asset " + s.name);
      nb.assets.entries.push_back(std::move(s));
    }
  }

  const json& cells = doc["cells"];
  if (!cells.is_array()) schema_fail("/cells", "expected an array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string path = "/cells/" + std::to_string(i);
    Cell c = parse_cell(cells[i], path);
    if (!ids.insert(c.id).second) schema_fail(path + "/id", "duplicate id " + c.id);
    nb.cells.push_back(std::move(c));
  }
  return nb;
}

Notebook read_notebook_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingAsset, "cannot open notebook " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_notebook(buf.str());
}

void write_notebook_file(const std::filesystem::path& path, const Notebook& nb) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::MissingAsset, "cannot write notebook " + path.string());
  out << save_notebook(nb);
}

}  // namespace noteg
