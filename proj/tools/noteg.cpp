// noteg command line: serve a notebook, replay it headless, or check it.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "noteg/parser.hpp"
#include "noteg/server.hpp"
#include "noteg/session.hpp"

namespace {

noteg::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw noteg::Error(noteg::ErrorCode::MissingAsset, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path asset_root_of(const std::string& notebook) {
  return std::filesystem::absolute(notebook).parent_path();
}

int cmd_check(const std::string& path) {
  const noteg::Notebook nb = noteg::read_notebook_file(path);
  int code_cells = 0;
  for (const auto& cell : nb.cells) {
    if (cell.kind != noteg::CellKind::Code) continue;
    try {
      noteg::parse(cell.source, cell.id);
    } catch (const noteg::ParseError& e) {
      std::cerr << path << ": " << e.what() << "\n";
      return 1;
    }
    ++code_cells;
  }
  std::cout << "ok: " << code_cells << " code cells parsed\n";
  return 0;
}

int cmd_replay(const std::string& path, const std::string& schedule_path, std::int64_t ticks,
               bool hash_only) {
  const noteg::Notebook nb = noteg::read_notebook_file(path);
  const noteg::ReplaySchedule sched = noteg::parse_schedule(read_file(schedule_path));
  noteg::ReplayOptions opts;
  opts.asset_root = asset_root_of(path);
  const auto outcome = noteg::run_replay_detailed(nb, sched, ticks, opts);
  if (!hash_only) {
    for (const auto& m : outcome.messages) {
      std::cout << m.dump(-1, ' ', false, noteg::json::error_handler_t::replace) << "\n";
    }
  }
  std::cout << outcome.hash << "\n";
  return 0;
}

int cmd_hash(const std::string& path, std::int64_t ticks) {
  const noteg::Notebook nb = noteg::read_notebook_file(path);
  noteg::ReplayOptions opts;
  opts.asset_root = asset_root_of(path);
  std::cout << noteg::run_replay(nb, noteg::run_all_cells(nb), ticks, opts) << "\n";
  return 0;
}

int cmd_serve(const std::string& path, const std::string& address, unsigned short port,
              std::optional<std::uint64_t> seed) {
  noteg::Notebook nb = noteg::read_notebook_file(path);
  noteg::ServerOptions opts;
  opts.address = address;
  opts.port = port;
  opts.asset_root = asset_root_of(path);
  opts.seed = seed;
  noteg::Server server(std::move(nb), opts);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "serving " << path << " on ws://" << address << ":" << server.port() << "/ws" << std::endl;
  server.run();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noteg: live game-prototyping notebook engine"};
  app.require_subcommand(1);

  std::string notebook;
  std::string schedule;
  std::string address = "127.0.0.1";
  unsigned short port = 8765;
  std::int64_t ticks = 0;
  std::uint64_t seed = 0;
  bool hash_only = false;

  auto* serve = app.add_subcommand("serve", "Run the WebSocket session server");
  serve->add_option("--notebook", notebook, "Notebook file (.noteg.json)")->required()->check(CLI::ExistingFile);
  serve->add_option("--port", port, "TCP port");
  serve->add_option("--address", address, "Bind address");
  auto* seed_opt = serve->add_option("--seed", seed, "Override the notebook seed");

  auto* replay = app.add_subcommand("replay", "Replay a schedule headless and print the final state hash");
  replay->add_option("--notebook", notebook, "Notebook file")->required()->check(CLI::ExistingFile);
  replay->add_option("--schedule", schedule, "Schedule file (JSON)")->required()->check(CLI::ExistingFile);
  replay->add_option("--ticks", ticks, "Ticks to simulate")->required()->check(CLI::NonNegativeNumber);
  replay->add_flag("--hash", hash_only, "Print only the final hash");

  auto* check = app.add_subcommand("check", "Parse every code cell");
  check->add_option("--notebook", notebook, "Notebook file")->required()->check(CLI::ExistingFile);

  auto* hash = app.add_subcommand("hash", "Run all code cells at tick 0, then N ticks, and print the hash");
  hash->add_option("--notebook", notebook, "Notebook file")->required()->check(CLI::ExistingFile);
  hash->add_option("--ticks", ticks, "Ticks to simulate")->required()->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return cmd_check(notebook);
    if (*replay) return cmd_replay(notebook, schedule, ticks, hash_only);
    if (*hash) return cmd_hash(notebook, ticks);
    if (*serve) {
      return cmd_serve(notebook, address, port, *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt);
    }
  } catch (const noteg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
