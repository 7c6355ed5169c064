#include "noteg/protocol.hpp"

#include <string>

namespace noteg {

namespace {

[[noreturn]] void malformed(const std::string& msg) { throw Error(ErrorCode::MalformedMessage, msg); }

const std::string& string_field(const json& msg, const char* key) {
  auto it = msg.find(key);
  if (it == msg.end() || !it->is_string()) malformed(std::string("field '") + key + "' must be a string");
  return it->get_ref<const std::string&>();
}

double quantize(double v) { return std::stod(format_fixed6(v)); }

}  // namespace

ClientMessage parse_client_message(const json& msg) {
  if (!msg.is_object()) malformed("message must be a JSON object");
  const std::string& type = string_field(msg, "type");

  if (type == "execute") {
    ExecuteMsg m;
    m.cell_id = string_field(msg, "cell_id");
    if (m.cell_id.empty()) malformed("cell_id must not be empty");
    if (auto it = msg.find("source"); it != msg.end() && !it->is_null()) {
      if (!it->is_string()) malformed("field 'source' must be a string");
      m.source = it->get<std::string>();
    }
    return m;
  }
  if (type == "input") {
    InputMsg m;
    const std::string& key = string_field(msg, "key");
    auto k = parse_key(key);
    if (!k) malformed("unknown key '" + key + "'");
    m.key = *k;
    const std::string& state = string_field(msg, "state");
    if (state == "down") {
      m.down = true;
    } else if (state == "up") {
      m.down = false;
    } else {
      malformed("input state must be 'down' or 'up'");
    }
    return m;
  }
  if (type == "control") {
    ControlMsg m;
    const std::string& action = string_field(msg, "action");
    if (action == "start") {
      m.action = ControlMsg::Action::Start;
    } else if (action == "pause") {
      m.action = ControlMsg::Action::Pause;
    } else if (action == "step") {
      m.action = ControlMsg::Action::Step;
    } else if (action == "refresh") {
      m.action = ControlMsg::Action::Refresh;
    } else if (action == "set_seed") {
      m.action = ControlMsg::Action::SetSeed;
      auto it = msg.find("seed");
      const bool ok = it != msg.end() && it->is_number_integer() &&
                      (it->is_number_unsigned() || it->get<std::int64_t>() >= 0);
      if (!ok) malformed("set_seed needs a non-negative integer 'seed'");
      m.seed = it->get<std::uint64_t>();
    } else {
      malformed("unknown control action '" + action + "'");
    }
    return m;
  }
  malformed("unknown message type '" + type + "'");
}

ClientMessage parse_client_frame(std::string_view frame) {
  json msg = json::parse(frame.begin(), frame.end(), nullptr, /*allow_exceptions=*/false);
  if (msg.is_discarded()) malformed("frame is not valid JSON");
  return parse_client_message(msg);
}

json to_json(const ClientMessage& msg) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ExecuteMsg>) {
          json j = {{"type", "execute"}, {"cell_id", m.cell_id}};
          if (m.source) j["source"] = *m.source;
          return j;
        } else if constexpr (std::is_same_v<T, InputMsg>) {
          return {{"type", "input"}, {"key", std::string(key_name(m.key))}, {"state", m.down ? "down" : "up"}};
        } else {
          static constexpr const char* names[] = {"start", "pause", "step", "refresh", "set_seed"};
          json j = {{"type", "control"}, {"action", names[static_cast<int>(m.action)]}};
          if (m.action == ControlMsg::Action::SetSeed) j["seed"] = m.seed;
          return j;
        }
      },
      msg);
}

json to_json(const SpriteRef& s) {
  return {{"sheet", s.sheet}, {"x", s.rect.x}, {"y", s.rect.y}, {"w", s.rect.w}, {"h", s.rect.h}, {"name", s.name}};
}

json to_json(const TraceFrame& f) {
  return {{"fn", f.fn}, {"cell_id", f.cell_id}, {"line", f.line}, {"col", f.col}};
}

namespace {

json trace_json(const std::vector<TraceFrame>& trace) {
  json out = json::array();
  for (const auto& f : trace) out.push_back(to_json(f));
  return out;
}

}  // namespace

json result_message(const std::string& cell_id, const CellResult& result) {
  json j = {{"type", "result"}, {"cell_id", cell_id}, {"ok", result.ok}};
  if (result.ok) {
    j["value_repr"] = repr(result.value);
  } else if (result.error) {
    j["error"] = {{"message", result.error->message()}, {"trace", trace_json(result.error->trace())}};
  }
  return j;
}

json snapshot_message(const Scene& scene) {
  json entities = json::array();
  for (const auto& [id, e] : scene.entities) {
    entities.push_back({{"id", id},
                        {"kind", std::string(kind_name(e.kind))},
                        {"x", quantize(e.pos.x)},
                        {"y", quantize(e.pos.y)},
                        {"w", quantize(e.size.x)},
                        {"h", quantize(e.size.y)},
                        {"sprite", to_json(e.sprite)},
                        {"health", quantize(e.health)}});
  }
  return {{"type", "snapshot"}, {"tick", scene.tick_count}, {"entities", entities}};
}

json manifest_to_json(const AssetManifest& manifest) {
  json out = json::array();
  for (const auto& s : manifest.entries) {
    out.push_back({{"name", s.name}, {"path", s.path}, {"width", s.width}, {"height", s.height},
                   {"tile_w", s.tile_w}, {"tile_h", s.tile_h}});
  }
  return out;
}

json map_message(const Scene& scene, const AssetManifest& manifest) {
  json j = {{"type", "map"},
            {"width", scene.width},
            {"height", scene.height},
            {"background", scene.background},
            {"manifest", manifest_to_json(manifest)}};
  if (!scene.tilemap) {
    j["cols"] = 0;
    j["rows"] = 0;
    j["tile_size"] = kDefaultTileSize;
    j["grid"] = json::array();
    j["tileset"] = json::object();
    return j;
  }
  const Tilemap& m = *scene.tilemap;
  json grid = json::array();
  for (int r = 0; r < m.rows; ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols; ++c) row.push_back(m.at(c, r));
    grid.push_back(std::move(row));
  }
  json tileset = json::object();
  for (const auto& [id, def] : m.tileset) {
    tileset[std::to_string(id)] = {{"sprite", to_json(def.sprite)}, {"walkable", def.walkable}};
  }
  j["cols"] = m.cols;
  j["rows"] = m.rows;
  j["tile_size"] = m.tile_size;
  j["grid"] = std::move(grid);
  j["tileset"] = std::move(tileset);
  return j;
}

json quarantine_message(const QuarantineRecord& r) {
  return {{"type", "quarantine"},
          {"entity_id", r.entity_id ? json(*r.entity_id) : json(nullptr)},
          {"tick", r.tick},
          {"error", r.error},
          {"trace", trace_json(r.trace)}};
}

json print_message(const std::string& text) { return {{"type", "print"}, {"text", text}}; }

json error_message(const std::string& text) { return {{"type", "error"}, {"message", text}}; }

}  // namespace noteg
