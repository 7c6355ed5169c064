#include "noteg/session.hpp"

#include <algorithm>

namespace noteg {

Session::Session(Notebook nb, SessionOptions opts)
    : nb_(std::move(nb)),
      opts_(std::move(opts)),
      runtime_(std::make_unique<Runtime>(opts_.seed.value_or(nb_.seed), opts_.asset_root, nb_.assets)) {}

ClientId Session::connect() {
  const ClientId id = next_client_++;
  clients_.push_back(id);
  if (!driver_) driver_ = id;
  return id;
}

void Session::disconnect(ClientId id) {
  clients_.erase(std::remove(clients_.begin(), clients_.end(), id), clients_.end());
  if (driver_ && *driver_ == id) {
    driver_.reset();
    if (!clients_.empty()) driver_ = clients_.front();
  }
}

std::vector<Outgoing> Session::handle_frame(ClientId from, std::string_view frame) {
  std::vector<Outgoing> out;
  ClientMessage msg;
  try {
    msg = parse_client_frame(frame);
  } catch (const Error& e) {
    out.push_back({from, error_message(e.what())});
    return out;
  }
  if (!is_driver(from)) {
    out.push_back({from, error_message("read-only: only the driver may send commands")});
    return out;
  }
  for (auto& m : apply(msg)) out.push_back({std::nullopt, std::move(m)});
  return out;
}

std::vector<json> Session::handle_message(const json& msg) {
  try {
    return apply(parse_client_message(msg));
  } catch (const Error& e) {
    return {error_message(e.what())};
  }
}

std::vector<json> Session::apply(const ClientMessage& msg) {
  if (const auto* ex = std::get_if<ExecuteMsg>(&msg)) return execute(*ex);
  if (const auto* in = std::get_if<InputMsg>(&msg)) {
    runtime_->scene().input.set(in->key, in->down);
    return {};
  }
  const auto& ctl = std::get<ControlMsg>(msg);
  switch (ctl.action) {
    case ControlMsg::Action::Start:
      running_ = true;
      return {};
    case ControlMsg::Action::Pause:
      running_ = false;
      return {};
    case ControlMsg::Action::Step:
      return tick_once();
    case ControlMsg::Action::Refresh:
      if (!runtime_->scene().started) return {error_message("NoScene: call start_game first")};
      refresh_scene(runtime_->scene());
      return drain_events();
    case ControlMsg::Action::SetSeed:
      runtime_->reseed(ctl.seed);
      return {};
  }
  return {};
}

std::vector<json> Session::execute(const ExecuteMsg& msg) {
  Cell* cell = nb_.find(msg.cell_id);
  if (cell == nullptr) {
    if (!msg.source) return {error_message("UnknownCell: no cell '" + msg.cell_id + "'")};
    nb_.cells.push_back(Cell{msg.cell_id, CellKind::Code, false, *msg.source});
    cell = &nb_.cells.back();
  } else if (msg.source) {
    cell->source = *msg.source;
  }
  if (cell->kind == CellKind::Doc) {
    return {error_message("doc cell '" + cell->id + "' cannot be executed")};
  }
  const CellResult result = runtime_->execute(cell->id, cell->source);
  std::vector<json> out = drain_events();
  out.push_back(result_message(cell->id, result));
  return out;
}

std::vector<json> Session::drain_events(std::vector<EngineEvent> events) {
  for (auto& ev : runtime_->scene().take_events()) events.push_back(std::move(ev));
  std::vector<json> out;
  for (const auto& ev : events) {
    if (const auto* p = std::get_if<PrintEvent>(&ev)) {
      out.push_back(print_message(p->text));
    } else if (const auto* q = std::get_if<QuarantineEvent>(&ev)) {
      out.push_back(quarantine_message(q->record));
    }
  }
  if (runtime_->take_map_dirty()) out.push_back(map_message(runtime_->scene(), runtime_->manifest()));
  return out;
}

std::vector<json> Session::advance() {
  if (!running_) return {};
  return tick_once();
}

std::vector<json> Session::tick_once() {
  std::vector<json> out = drain_events(runtime_->tick());
  const Scene& scene = runtime_->scene();
  if (!opts_.headless && opts_.snapshot_every > 0 && scene.tick_count % opts_.snapshot_every == 0) {
    out.push_back(snapshot_message(scene));
  }
  return out;
}

Notebook Session::notebook() const {
  Notebook nb = nb_;
  for (const auto& id : runtime_->hidden_requests()) {
    if (Cell* c = nb.find(id)) c->hidden = true;
  }
  nb.assets = runtime_->manifest();
  return nb;
}

namespace {

[[noreturn]] void schedule_fail(const std::string& msg) { throw Error(ErrorCode::Schedule, msg); }

}  // namespace

ReplaySchedule schedule_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("actions") || !doc["actions"].is_array()) {
    schedule_fail("schedule must be an object with an 'actions' array");
  }
  ReplaySchedule sched;
  std::int64_t last = 0;
  const json& actions = doc["actions"];
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const std::string where = "action " + std::to_string(i);
    const json& a = actions[i];
    if (!a.is_object() || !a.contains("tick") || !a["tick"].is_number_integer()) {
      schedule_fail(where + ": missing integer 'tick'");
    }
    const auto tick = a["tick"].get<std::int64_t>();
    if (tick < 0) schedule_fail(where + ": tick must be non-negative");
    if (tick < last) schedule_fail(where + ": ticks must be non-decreasing");
    last = tick;
    json msg = a;
    msg.erase("tick");
    try {
      sched.actions.push_back({tick, parse_client_message(msg)});
    } catch (const Error& e) {
      schedule_fail(where + ": " + e.message());
    }
  }
  return sched;
}

ReplaySchedule parse_schedule(std::string_view text) {
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) schedule_fail("schedule is not valid JSON");
  return schedule_from_json(doc);
}

json schedule_to_json(const ReplaySchedule& sched) {
  json actions = json::array();
  for (const auto& a : sched.actions) {
    json j = to_json(a.action);
    j["tick"] = a.tick;
    actions.push_back(std::move(j));
  }
  return {{"actions", std::move(actions)}};
}

ReplaySchedule run_all_cells(const Notebook& nb) {
  ReplaySchedule sched;
  for (const auto& c : nb.cells) {
    if (c.kind == CellKind::Code) sched.actions.push_back({0, ExecuteMsg{c.id, std::nullopt}});
  }
  return sched;
}

ReplayOutcome run_replay_detailed(const Notebook& nb, const ReplaySchedule& sched,
                                  std::int64_t ticks, const ReplayOptions& opts) {
  if (ticks < 0) schedule_fail("tick count must be non-negative");
  std::int64_t last = 0;
  for (std::size_t i = 0; i < sched.actions.size(); ++i) {
    const auto& a = sched.actions[i];
    if (a.tick < last) schedule_fail("action " + std::to_string(i) + ": ticks must be non-decreasing");
    last = a.tick;
    if (const auto* ex = std::get_if<ExecuteMsg>(&a.action); ex && !ex->source && !nb.find(ex->cell_id)) {
      schedule_fail("action " + std::to_string(i) + ": unknown cell '" + ex->cell_id + "'");
    }
  }

  SessionOptions so;
  so.asset_root = opts.asset_root;
  so.headless = true;
  Session session(nb, so);
  ReplayOutcome outcome;
  auto keep = [&](std::vector<json> msgs) {
    for (auto& m : msgs) outcome.messages.push_back(std::move(m));
  };

  std::size_t next = 0;
  for (std::int64_t t = 0; t <= ticks; ++t) {
    for (; next < sched.actions.size() && sched.actions[next].tick == t; ++next) {
      const auto& action = sched.actions[next].action;
      if (const auto* ctl = std::get_if<ControlMsg>(&action)) {
        const auto act = ctl->action;
        if (act == ControlMsg::Action::Start || act == ControlMsg::Action::Pause ||
            act == ControlMsg::Action::Step) {
          continue;
        }
      }
      keep(session.apply(action));
    }
    if (t == ticks) break;
    keep(session.tick_once());
    if (opts.on_tick) opts.on_tick(session.runtime().scene());
  }
  const Scene& scene = session.runtime().scene();
  outcome.hash = state_hash(scene);
  outcome.quarantined = scene.quarantine_log.size();
  return outcome;
}

std::string run_replay(const Notebook& nb, const ReplaySchedule& sched, std::int64_t ticks,
                       const ReplayOptions& opts) {
  return run_replay_detailed(nb, sched, ticks, opts).hash;
}

}  // namespace noteg
