#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "noteg/interpreter.hpp"
#include "noteg/notebook.hpp"
#include "noteg/scene.hpp"

namespace noteg {

using json = nlohmann::json;

// Client -> server.
struct ExecuteMsg {
  std::string cell_id;
  std::optional<std::string> source;
};
struct InputMsg {
  Key key = Key::Up;
  bool down = true;
};
struct ControlMsg {
  enum class Action { Start, Pause, Step, Refresh, SetSeed };
  Action action = Action::Step;
  std::uint64_t seed = 0;
};
using ClientMessage = std::variant<ExecuteMsg, InputMsg, ControlMsg>;

/// Throws MalformedMessage.
ClientMessage parse_client_message(const json& msg);
ClientMessage parse_client_frame(std::string_view frame);
json to_json(const ClientMessage& msg);

// Server -> client.
json to_json(const SpriteRef& sprite);
json to_json(const TraceFrame& frame);
json result_message(const std::string& cell_id, const CellResult& result);
json snapshot_message(const Scene& scene);
json map_message(const Scene& scene, const AssetManifest& manifest);
json quarantine_message(const QuarantineRecord& record);
json print_message(const std::string& text);
json error_message(const std::string& text);

json manifest_to_json(const AssetManifest& manifest);

}  // namespace noteg
