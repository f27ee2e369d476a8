#include "camnet/server.hpp"

#include "binary_io.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <csignal>
#include <deque>
#include <set>

namespace camnet {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace ws = beast::websocket;
using tcp = net::ip::tcp;

Json export_json(const SessionExport& exported, const std::string& config_hash) {
  Json cams = Json::array();
  for (const auto& c : exported.cameras) cams.push_back(to_json(c));
  return {{"revision", exported.revision}, {"coverage", exported.coverage}, {"cameras", cams},
          {"config_hash", config_hash}};
}

namespace {

struct Outgoing {
  bool binary = false;
  std::shared_ptr<const std::string> data;
};

std::shared_ptr<const std::string> bytes_message(const std::vector<std::uint8_t>& bytes) {
  return std::make_shared<const std::string>(bytes.begin(), bytes.end());
}

Json status_json(const SessionRunner::Result& result, const SessionSnapshot& snap) {
  Json j = {{"type", "status"},
            {"ok", result.ok},
            {"revision", snap.revision},
            {"camera_id", result.summary.camera_id},
            {"coverage", snap.coverage},
            {"covered", snap.covered},
            {"cameras", snap.cameras.size()}};
  if (result.ok) {
    j["changed_points"] = result.summary.changed_points;
    j["recompute_ms"] = result.summary.recompute_ms;
  } else {
    j["error"] = result.error;
  }
  return j;
}

}  // namespace

struct SessionServer::Impl : std::enable_shared_from_this<SessionServer::Impl> {
  class Connection;

  Session& session;
  ServerOptions options;
  net::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  net::signal_set signals{ioc};
  std::set<std::shared_ptr<Connection>> connections;
  std::unique_ptr<SessionRunner> runner;
  bool stopped = false;
  std::atomic<bool> running{false};

  Impl(Session& s, ServerOptions o) : session(s), options(std::move(o)) {}

  class Connection : public std::enable_shared_from_this<Connection> {
  public:
    Connection(Impl& server, tcp::socket socket) : server_(server), ws_(std::move(socket)) {}

    void start() {
      ws_.set_option(ws::stream_base::timeout::suggested(beast::role_type::server));
      ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
        if (ec) return self->drop();
        self->read();
      });
    }

    void send(Outgoing message) {
      queue_.push_back(std::move(message));
      if (queue_.size() == 1) write();
    }

    void send_json(const Json& j) { send({false, std::make_shared<const std::string>(j.dump())}); }

    void close() {
      if (closing_) return;
      closing_ = true;
      ws_.async_close(ws::close_code::going_away, [self = shared_from_this()](beast::error_code) {});
    }

    bool ready() const { return ready_; }
    TransferMode mode() const { return mode_; }

  private:
    void read() {
      ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) return self->drop();
        const std::string text = beast::buffers_to_string(self->buffer_.data());
        self->buffer_.consume(self->buffer_.size());
        if (self->ws_.got_text()) {
          self->handle(text);
        } else {
          self->send_json({{"type", "error"}, {"message", "binary client messages are not supported"}});
        }
        self->read();
      });
    }

    void write() {
      const Outgoing& front = queue_.front();
      ws_.binary(front.binary);
      ws_.async_write(net::buffer(*front.data), [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) return self->drop();
        self->queue_.pop_front();
        if (!self->queue_.empty()) self->write();
      });
    }

    void drop() { server_.connections.erase(shared_from_this()); }

    void handle(const std::string& text) {
      Json msg;
      try {
        msg = Json::parse(text);
        if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string())
          throw InvalidArgument("message must be an object with a string \"type\"");
        const std::string type = msg["type"];
        if (type == "hello") {
          hello(msg);
        } else if (!ready_) {
          throw InvalidArgument("send hello first");
        } else if (type == "move_camera") {
          SessionRunner::Command cmd;
          cmd.type = SessionRunner::Command::Type::Move;
          cmd.id = msg.at("id").get<int>();
          Json pose = {{"position", msg.at("position")}, {"quaternion", msg.at("quaternion")}};
          cmd.pose = pose_from_json(pose, "move_camera");
          server_.runner->submit(std::move(cmd));
        } else if (type == "add_camera") {
          SessionRunner::Command cmd;
          cmd.type = SessionRunner::Command::Type::Add;
          cmd.spec = camera_spec_from_json(msg.value("spec", Json::object()), "add_camera.spec");
          cmd.pose = pose_from_json(msg.at("pose"), "add_camera.pose");
          server_.runner->submit(std::move(cmd));
        } else if (type == "remove_camera") {
          SessionRunner::Command cmd;
          cmd.type = SessionRunner::Command::Type::Remove;
          cmd.id = msg.at("id").get<int>();
          server_.runner->submit(std::move(cmd));
        } else if (type == "set_mode") {
          mode_ = transfer_mode_from_string(msg.at("mode").get<std::string>());
          send_json({{"type", "mode"}, {"mode", to_string(mode_)}});
          send({true, bytes_message(server_.session.get_volume(mode_).encode())});
        } else if (type == "export") {
          Json j = export_json(server_.session.export_solution(), server_.options.config_hash);
          j["type"] = "export";
          send_json(j);
        } else {
          throw InvalidArgument("unknown message type '" + type + "'");
        }
      } catch (const std::exception& e) {
        send_json({{"type", "error"}, {"message", e.what()}});
      }
    }

    void hello(const Json& msg) {
      const std::string name = msg.value("session", server_.options.session_name);
      if (name != server_.options.session_name) throw InvalidArgument("unknown session '" + name + "'");
      const auto snap = server_.session.snapshot();
      const auto& points = server_.session.points();
      Json cams = Json::array();
      for (const auto& c : snap->cameras) cams.push_back(to_json(c));
      send_json({{"type", "welcome"},
                 {"session", name},
                 {"revision", snap->revision},
                 {"n_points", points.size()},
                 {"coverage", snap->coverage},
                 {"cameras", cams},
                 {"mode", to_string(mode_)},
                 {"config_hash", server_.options.config_hash}});
      send_json({{"type", "points"}, {"count", points.size()}, {"format", "float32_xyz_le"}});
      std::vector<std::uint8_t> xyz;
      xyz.reserve(points.size() * 12);
      for (std::size_t e = 0; e < points.size(); ++e)
        for (int k = 0; k < 3; ++k)
          detail::append_le(xyz, static_cast<float>(points.positions(k, static_cast<Eigen::Index>(e))));
      send({true, bytes_message(xyz)});
      send({true, bytes_message(make_volume_frame(*snap, mode_).encode())});
      ready_ = true;
    }

    Impl& server_;
    ws::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    std::deque<Outgoing> queue_;
    TransferMode mode_ = TransferMode::Quality;
    bool ready_ = false;
    bool closing_ = false;
  };

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [self = shared_from_this()](beast::error_code ec, tcp::socket s) {
      if (ec) return;  // acceptor closed
      auto conn = std::make_shared<Connection>(*self, std::move(s));
      self->connections.insert(conn);
      conn->start();
      self->accept();
    });
  }

  void broadcast(const SessionRunner::Result& result, const std::shared_ptr<const SessionSnapshot>& snap) {
    if (stopped) return;
    const auto status = std::make_shared<const std::string>(status_json(result, *snap).dump());
    std::shared_ptr<const std::string> frames[3];
    for (const auto& conn : connections) {
      if (!conn->ready()) continue;
      conn->send({false, status});
      if (!result.ok) continue;
      auto& frame = frames[static_cast<int>(conn->mode())];
      if (!frame) frame = bytes_message(make_volume_frame(*snap, conn->mode()).encode());
      conn->send({true, frame});
    }
  }

  void shutdown() {
    if (stopped) return;
    stopped = true;
    beast::error_code ec;
    acceptor.close(ec);
    signals.cancel(ec);
    for (const auto& c : std::set(connections)) c->close();
    if (runner) runner->stop();
    // Let close handshakes finish, then stop.
    net::post(ioc, [self = shared_from_this()] { self->connections.clear(); });
  }
};

SessionServer::SessionServer(Session& session, ServerOptions options)
    : impl_(std::make_shared<Impl>(session, std::move(options))) {
  Impl& s = *impl_;
  if (s.options.port < 0 || s.options.port > 65535)
    throw InvalidArgument("invalid port " + std::to_string(s.options.port));
  beast::error_code ec;
  const auto address = net::ip::make_address(s.options.address, ec);
  if (ec) throw InvalidArgument("invalid address '" + s.options.address + "'");
  const tcp::endpoint endpoint(address, static_cast<unsigned short>(s.options.port));
  s.acceptor.open(endpoint.protocol(), ec);
  if (!ec) s.acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) s.acceptor.bind(endpoint, ec);
  if (!ec) s.acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) throw IoError("cannot listen on " + s.options.address + ":" + std::to_string(s.options.port) + ": " + ec.message());

  std::weak_ptr<Impl> weak = impl_;
  s.runner = std::make_unique<SessionRunner>(
      session, [weak](const SessionRunner::Result& result, std::shared_ptr<const SessionSnapshot> snap) {
        if (auto self = weak.lock())
          net::post(self->ioc, [self, result, snap] { self->broadcast(result, snap); });
      });
  if (s.options.handle_signals) {
    s.signals.add(SIGINT);
    s.signals.add(SIGTERM);
    s.signals.async_wait([weak](beast::error_code ec, int) {
      if (auto self = weak.lock(); self && !ec) self->shutdown();
    });
  }
  s.accept();
}

SessionServer::~SessionServer() {
  stop();
  impl_->runner.reset();
}

unsigned short SessionServer::port() const {
  beast::error_code ec;
  const auto ep = impl_->acceptor.local_endpoint(ec);
  return ec ? static_cast<unsigned short>(impl_->options.port) : ep.port();
}

void SessionServer::run() {
  impl_->running = true;
  impl_->ioc.run();
  impl_->running = false;
}

void SessionServer::stop() {
  auto self = impl_;
  net::post(self->ioc, [self] { self->shutdown(); });
  if (!self->running) {
    // Nobody is serving: finish the shutdown here.
    self->ioc.restart();
    self->ioc.run();
  }
}

}  // namespace camnet
