#include "noteg/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <variant>

#include "noteg/session.hpp"

namespace noteg {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

class Connection;

struct Connected {
  std::shared_ptr<Connection> conn;
};
struct Frame {
  std::shared_ptr<Connection> conn;
  std::string text;
};
struct Disconnected {
  std::shared_ptr<Connection> conn;
};
using Command = std::variant<Connected, Frame, Disconnected>;

class CommandQueue {
 public:
  void push(Command c) {
    std::lock_guard lock(mu_);
    q_.push_back(std::move(c));
  }
  std::deque<Command> take() {
    std::lock_guard lock(mu_);
    std::deque<Command> out;
    out.swap(q_);
    return out;
  }

 private:
  std::mutex mu_;
  std::deque<Command> q_;
};

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, CommandQueue& queue) : ws_(std::move(socket)), queue_(queue) {}

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->queue_.push(Connected{self});
      self->read();
    });
  }

  // Callable from any thread.
  void send(std::string text) {
    net::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)]() mutable {
      self->outbox_.push_back(std::move(text));
      if (self->outbox_.size() == 1) self->write();
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->queue_.push(Disconnected{self});
        return;
      }
      self->queue_.push(Frame{self, beast::buffers_to_string(self->buffer_.data())});
      self->buffer_.consume(self->buffer_.size());
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      self->outbox_.pop_front();
      if (!self->outbox_.empty()) self->write();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  CommandQueue& queue_;
};

// Static content needs the session state, so HTTP requests are answered by
// a handler that snapshots what it needs under the control loop's lock.
using HttpHandler = std::function<http::response<http::string_body>(const http::request<http::string_body>&)>;

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket socket, CommandQueue& queue, HttpHandler handler)
      : stream_(std::move(socket)), queue_(queue), handler_(std::move(handler)) {}

  void start() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      self->dispatch();
    });
  }

 private:
  void dispatch() {
    if (websocket::is_upgrade(req_) && req_.target() == "/ws") {
      stream_.expires_never();
      std::make_shared<Connection>(stream_.release_socket(), queue_)->start(std::move(req_));
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>(handler_(req_));
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  CommandQueue& queue_;
  HttpHandler handler_;
};

}  // namespace

struct Server::Impl {
  Impl(Notebook nb, ServerOptions o)
      : opts(std::move(o)),
        session(std::move(nb), SessionOptions{opts.asset_root, /*headless=*/false, opts.seed, 2}),
        acceptor(ioc, tcp::endpoint(net::ip::make_address(opts.address), opts.port)) {}

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (!ec) {
        std::make_shared<HttpConnection>(std::move(socket), queue,
                                         [this](const auto& req) { return serve_http(req); })
            ->start();
      }
      if (acceptor.is_open()) accept();
    });
  }

  http::response<http::string_body> serve_http(const http::request<http::string_body>& req) {
    http::response<http::string_body> res{http::status::ok, req.version()};
    res.set(http::field::server, "noteg");
    std::string target(req.target());
    if (req.method() != http::verb::get) {
      res.result(http::status::method_not_allowed);
      return res;
    }
    if (target == "/notebook") {
      std::lock_guard lock(state_mu);
      res.set(http::field::content_type, "application/json");
      res.body() = notebook_bytes;
      return res;
    }
    const std::string prefix = "/assets/";
    if (target.rfind(prefix, 0) == 0) {
      const std::string rel = target.substr(prefix.size());
      bool listed = false;
      {
        std::lock_guard lock(state_mu);
        for (const auto& path : asset_paths) listed = listed || path == rel;
      }
      std::ifstream in(opts.asset_root / rel, std::ios::binary);
      if (listed && in) {
        std::ostringstream buf;
        buf << in.rdbuf();
        res.set(http::field::content_type, rel.ends_with(".png") ? "image/png" : "application/octet-stream");
        res.body() = buf.str();
        return res;
      }
    }
    res.result(http::status::not_found);
    res.body() = "not found\n";
    return res;
  }

  void publish_state() {
    Notebook nb = session.notebook();
    std::lock_guard lock(state_mu);
    notebook_bytes = save_notebook(nb);
    asset_paths.clear();
    for (const auto& s : nb.assets.entries) asset_paths.push_back(s.path);
  }

  void deliver(const std::vector<Outgoing>& out) {
    for (const auto& o : out) {
      const std::string text = dump(o.message);
      if (o.to) {
        if (auto it = by_id.find(*o.to); it != by_id.end()) it->second->send(text);
      } else {
        for (auto& [id, conn] : by_id) conn->send(text);
      }
    }
  }

  void broadcast(std::vector<json> msgs) {
    std::vector<Outgoing> out;
    for (auto& m : msgs) out.push_back({std::nullopt, std::move(m)});
    deliver(out);
  }

  void handle(const Command& cmd) {
    if (const auto* c = std::get_if<Connected>(&cmd)) {
      const ClientId id = session.connect();
      ids[c->conn.get()] = id;
      by_id[id] = c->conn;
      std::vector<Outgoing> hello;
      hello.push_back({id, json{{"type", "hello"}, {"client_id", id},
                                {"role", session.is_driver(id) ? "driver" : "observer"}}});
      const Scene& scene = session.runtime().scene();
      hello.push_back({id, map_message(scene, session.runtime().manifest())});
      hello.push_back({id, snapshot_message(scene)});
      deliver(hello);
    } else if (const auto* f = std::get_if<Frame>(&cmd)) {
      auto it = ids.find(f->conn.get());
      if (it == ids.end()) return;
      deliver(session.handle_frame(it->second, f->text));
    } else {
      const auto& d = std::get<Disconnected>(cmd);
      auto it = ids.find(d.conn.get());
      if (it == ids.end()) return;
      session.disconnect(it->second);
      by_id.erase(it->second);
      ids.erase(it);
    }
  }

  ServerOptions opts;
  Session session;
  net::io_context ioc;
  tcp::acceptor acceptor;
  CommandQueue queue;
  std::thread io_thread;
  std::atomic<bool> stopping{false};
  std::map<Connection*, ClientId> ids;
  std::map<ClientId, std::shared_ptr<Connection>> by_id;
  std::mutex state_mu;
  std::string notebook_bytes;
  std::vector<std::string> asset_paths;
};

Server::Server(Notebook nb, ServerOptions opts) : impl_(std::make_unique<Impl>(std::move(nb), std::move(opts))) {
  impl_->publish_state();
  impl_->accept();
  impl_->io_thread = std::thread([this] { impl_->ioc.run(); });
}

Server::~Server() {
  stop();
  if (impl_->io_thread.joinable()) impl_->io_thread.join();
}

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::stop() {
  if (impl_->stopping.exchange(true)) return;
  net::post(impl_->ioc, [this] {
    beast::error_code ignored;
    impl_->acceptor.close(ignored);
    impl_->ioc.stop();
  });
}

void Server::run() {
  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(kTickSeconds));
  auto next = clock::now();
  while (!impl_->stopping) {
    for (auto& cmd : impl_->queue.take()) impl_->handle(cmd);
    impl_->broadcast(impl_->session.advance());
    impl_->publish_state();
    next += period;
    std::this_thread::sleep_until(next);
    if (clock::now() - next > std::chrono::seconds(1)) next = clock::now();
  }
}

}  // namespace noteg
