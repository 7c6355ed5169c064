#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "noteg/builtins.hpp"
#include "noteg/notebook.hpp"
#include "noteg/protocol.hpp"

namespace noteg {

using ClientId = int;

struct Outgoing {
  std::optional<ClientId> to;  // nullopt: broadcast
  json message;
};

struct SessionOptions {
  std::filesystem::path asset_root;
  // Headless sessions (replay, hash) never emit snapshots.
  bool headless = true;
  std::optional<std::uint64_t> seed;
  // Live sessions send a snapshot every N ticks (60 Hz / 2 = 30 per second).
  int snapshot_every = 2;
};

/// Notebook plus a live runtime. Every method runs on the control loop at a
/// tick boundary; concurrent producers must queue frames and hand them over
/// from that loop.
class Session {
 public:
  explicit Session(Notebook nb, SessionOptions opts = {});

  /// The first client attached becomes the driver; later ones observe.
  ClientId connect();
  void disconnect(ClientId id);
  bool is_driver(ClientId id) const { return driver_ && *driver_ == id; }

  /// Decodes and applies one frame. Malformed frames get an error reply to
  /// the sender and leave the session intact.
  std::vector<Outgoing> handle_frame(ClientId from, std::string_view frame);
  /// Applies a message as the driver and returns the messages it produced.
  std::vector<json> handle_message(const json& msg);
  std::vector<json> apply(const ClientMessage& msg);

  /// Advances the clock one tick if running.
  std::vector<json> advance();
  /// Unconditional single tick.
  std::vector<json> tick_once();

  bool running() const { return running_; }
  Runtime& runtime() { return *runtime_; }
  const Runtime& runtime() const { return *runtime_; }

  /// The notebook with hide() requests and the live manifest folded in.
  Notebook notebook() const;

 private:
  std::vector<json> execute(const ExecuteMsg& msg);
  // Translates `events` followed by anything still in the scene outbox.
  std::vector<json> drain_events(std::vector<EngineEvent> events = {});

  Notebook nb_;
  SessionOptions opts_;
  std::unique_ptr<Runtime> runtime_;
  bool running_ = true;
  ClientId next_client_ = 1;
  std::optional<ClientId> driver_;
  std::vector<ClientId> clients_;
};

struct ReplayAction {
  std::int64_t tick = 0;
  ClientMessage action;
};

struct ReplaySchedule {
  std::vector<ReplayAction> actions;
};

/// JSON form: {"actions": [{"tick": 0, "type": "execute", "cell_id": "c1"}, ...]}
/// where each action is a client message plus its tick. Throws
/// ScheduleError.
ReplaySchedule parse_schedule(std::string_view text);
ReplaySchedule schedule_from_json(const json& doc);
json schedule_to_json(const ReplaySchedule& sched);

/// Schedule that executes every code cell in order at tick 0.
ReplaySchedule run_all_cells(const Notebook& nb);

struct ReplayOptions {
  std::filesystem::path asset_root;
  // Called after every tick with the scene state at that boundary.
  std::function<void(const Scene&)> on_tick;
};

struct ReplayOutcome {
  std::string hash;
  std::vector<json> messages;
  std::size_t quarantined = 0;
};

/// Fresh runtime from nb.seed; the actions for tick t are applied when the
/// scene clock reads t, then the clock advances. Actions at t == ticks are
/// applied before the final hash. Clock controls (start, pause, step) are
/// ignored: the schedule is the clock. Throws ScheduleError.
ReplayOutcome run_replay_detailed(const Notebook& nb, const ReplaySchedule& sched,
                                  std::int64_t ticks, const ReplayOptions& opts = {});
std::string run_replay(const Notebook& nb, const ReplaySchedule& sched, std::int64_t ticks,
                       const ReplayOptions& opts = {});

}  // namespace noteg
