// Copyright 2026 The auvtwin Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "auvtwin/net_transport.hpp"

#include <array>
#include <charconv>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace auvtwin {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

Endpoint parse_endpoint(std::string_view text) {
  Endpoint ep;
  std::string_view port_text = text;
  if (const auto colon = text.rfind(':'); colon != std::string_view::npos) {
    if (colon > 0) ep.host = std::string(text.substr(0, colon));
    port_text = text.substr(colon + 1);
  }
  unsigned int port = 0;
  const auto res = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (port_text.empty() || res.ec != std::errc{} ||
      res.ptr != port_text.data() + port_text.size() || port > 65535) {
    throw std::invalid_argument("bad endpoint '" + std::string(text) + "'");
  }
  ep.port = static_cast<unsigned short>(port);
  return ep;
}

namespace {

struct Outgoing {
  std::string data;
  bool droppable = false;
};

}  // namespace

class Connection;

struct NetTransport::Impl {
  Impl(Endpoint tcp_ep, std::optional<Endpoint> ws_ep, std::size_t cap)
      : tcp_endpoint(std::move(tcp_ep)), ws_endpoint(std::move(ws_ep)), frame_cap(cap) {}

  void push_event(TransportEvent e) {
    {
      std::lock_guard lock(mu);
      inbound.push_back(std::move(e));
    }
    cv.notify_all();
  }

  void listen(tcp::acceptor& acceptor, const Endpoint& ep);
  void accept_tcp();
  void accept_ws();
  void drain();
  void add(std::shared_ptr<Connection> c);
  void remove(ConnectionId id);

  Endpoint tcp_endpoint;
  std::optional<Endpoint> ws_endpoint;
  std::size_t frame_cap;

  asio::io_context io;
  std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
  tcp::acceptor tcp_acceptor{io};
  tcp::acceptor ws_acceptor{io};
  std::thread thread;
  bool running = false;

  std::mutex mu;
  std::condition_variable cv;
  std::deque<TransportEvent> inbound;
  std::deque<TransportAction> outbound;
  std::atomic<std::uint64_t> dropped{0};

  // I/O thread only.
  std::map<ConnectionId, std::shared_ptr<Connection>> connections;
  std::atomic<std::size_t> open_count{0};
  ConnectionId next_id = 1;
};

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(NetTransport::Impl& owner, ConnectionId id) : owner_(owner), id_(id) {}
  virtual ~Connection() = default;

  virtual void start() = 0;

  ConnectionId id() const { return id_; }

  void send(std::string data, bool droppable) {
    if (closing_ || closed_) return;
    if (droppable) {
      std::size_t frames = 0;
      for (const auto& w : writes_) frames += w.droppable ? 1 : 0;
      if (frames >= owner_.frame_cap) {
        // Index 0 may be mid-write; shed the oldest queued frame after it.
        for (auto it = writes_.begin() + (writes_.empty() ? 0 : 1); it != writes_.end(); ++it) {
          if (it->droppable) {
            writes_.erase(it);
            ++owner_.dropped;
            break;
          }
        }
      }
    }
    writes_.push_back({std::move(data), droppable});
    if (writes_.size() == 1) write_front();
  }

  void close(std::string reason) {
    if (closed_ || closing_) return;
    closing_ = true;
    close_reason_ = std::move(reason);
    if (writes_.empty()) shutdown();
  }

 protected:
  virtual void write_front() = 0;
  virtual void shutdown() = 0;

  void on_written(const boost::system::error_code& ec) {
    if (ec) return finish();
    writes_.pop_front();
    if (!writes_.empty()) {
      write_front();
    } else if (closing_) {
      shutdown();
    }
  }

  // Peer went away or an I/O error happened.
  void finish() {
    if (closed_) return;
    closed_ = true;
    if (opened_) owner_.push_event({TransportEvent::Kind::Closed, id_, {}});
    release();
  }

  void opened() {
    opened_ = true;
    owner_.push_event({TransportEvent::Kind::Opened, id_, {}});
  }

  void release() { owner_.remove(id_); }

  NetTransport::Impl& owner_;
  ConnectionId id_;
  std::deque<Outgoing> writes_;
  bool opened_ = false;
  bool closing_ = false;
  bool closed_ = false;
  std::string close_reason_;
};

namespace {

class TcpConnection : public Connection {
 public:
  TcpConnection(NetTransport::Impl& owner, ConnectionId id, tcp::socket socket)
      : Connection(owner, id), socket_(std::move(socket)) {}

  void start() override {
    opened();
    read();
  }

 private:
  void read() {
    socket_.async_read_some(asio::buffer(buf_), [self = shared_from_this(), this](
                                                    const boost::system::error_code& ec,
                                                    std::size_t n) {
      if (ec) return finish();
      if (!closing_) owner_.push_event({TransportEvent::Kind::Data, id_, std::string(buf_.data(), n)});
      read();
    });
  }

  void write_front() override {
    asio::async_write(socket_, asio::buffer(writes_.front().data),
                      [self = shared_from_this(), this](const boost::system::error_code& ec,
                                                        std::size_t) { on_written(ec); });
  }

  void shutdown() override {
    if (closed_) return;
    closed_ = true;
    boost::system::error_code ignored;
    socket_.shutdown(tcp::socket::shutdown_both, ignored);
    socket_.close(ignored);
    release();
  }

  tcp::socket socket_;
  std::array<char, 1024> buf_{};
};

class WsConnection : public Connection {
 public:
  WsConnection(NetTransport::Impl& owner, ConnectionId id, tcp::socket socket)
      : Connection(owner, id), ws_(std::move(socket)) {}

  void start() override {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this(), this](const boost::system::error_code& ec) {
      if (ec) return finish();
      opened();
      read();
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this(), this](const boost::system::error_code& ec,
                                                              std::size_t) {
      if (ec) return finish();
      std::string message = beast::buffers_to_string(buffer_.data());
      buffer_.consume(buffer_.size());
      if (message.empty() || message.back() != '\n') message.push_back('\n');
      if (!closing_) owner_.push_event({TransportEvent::Kind::Data, id_, std::move(message)});
      read();
    });
  }

  void write_front() override {
    ws_.text(true);
    ws_.async_write(asio::buffer(writes_.front().data),
                    [self = shared_from_this(), this](const boost::system::error_code& ec,
                                                      std::size_t) { on_written(ec); });
  }

  void shutdown() override {
    if (closed_) return;
    closed_ = true;
    if (!opened_) {
      boost::system::error_code ignored;
      beast::get_lowest_layer(ws_).close();
      return release();
    }
    ws_.async_close(websocket::close_reason(websocket::close_code::normal, close_reason_),
                    [self = shared_from_this(), this](const boost::system::error_code&) {
                      release();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
};

}  // namespace

void NetTransport::Impl::listen(tcp::acceptor& acceptor, const Endpoint& ep) {
  tcp::resolver resolver(io);
  const auto results = resolver.resolve(ep.host, std::to_string(ep.port));
  if (results.empty()) throw std::invalid_argument("cannot resolve " + ep.host);
  const tcp::endpoint endpoint = *results.begin();
  acceptor.open(endpoint.protocol());
  acceptor.set_option(tcp::acceptor::reuse_address(true));
  acceptor.bind(endpoint);
  acceptor.listen();
}

void NetTransport::Impl::add(std::shared_ptr<Connection> c) {
  connections[c->id()] = c;
  ++open_count;
  c->start();
}

void NetTransport::Impl::remove(ConnectionId id) {
  if (connections.erase(id) > 0) --open_count;
}

void NetTransport::Impl::accept_tcp() {
  tcp_acceptor.async_accept([this](const boost::system::error_code& ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    add(std::make_shared<TcpConnection>(*this, next_id++, std::move(socket)));
    accept_tcp();
  });
}

void NetTransport::Impl::accept_ws() {
  ws_acceptor.async_accept([this](const boost::system::error_code& ec, tcp::socket socket) {
    if (ec) return;
    add(std::make_shared<WsConnection>(*this, next_id++, std::move(socket)));
    accept_ws();
  });
}

void NetTransport::Impl::drain() {
  std::deque<TransportAction> batch;
  {
    std::lock_guard lock(mu);
    batch.swap(outbound);
  }
  for (auto& a : batch) {
    const auto it = connections.find(a.conn);
    if (it == connections.end()) continue;
    // Keep the connection alive even if the call removes it from the map.
    const auto c = it->second;
    if (a.kind == TransportAction::Kind::Send) {
      c->send(std::move(a.payload) + "\n", a.droppable);
    } else {
      c->close(std::move(a.payload));
    }
  }
}

NetTransport::NetTransport(Endpoint tcp_ep, std::optional<Endpoint> ws_ep, std::size_t frame_queue)
    : impl_(std::make_unique<Impl>(std::move(tcp_ep), std::move(ws_ep), frame_queue)) {}

NetTransport::~NetTransport() { stop(std::chrono::milliseconds(0)); }

void NetTransport::start() {
  try {
    impl_->listen(impl_->tcp_acceptor, impl_->tcp_endpoint);
    if (impl_->ws_endpoint) impl_->listen(impl_->ws_acceptor, *impl_->ws_endpoint);
  } catch (const boost::system::system_error& e) {
    throw std::system_error(e.code(), "bind failed");
  }
  impl_->accept_tcp();
  if (impl_->ws_endpoint) impl_->accept_ws();
  impl_->work.emplace(asio::make_work_guard(impl_->io));
  impl_->running = true;
  impl_->thread = std::thread([this] { impl_->io.run(); });
}

void NetTransport::stop(std::chrono::milliseconds grace) {
  if (!impl_->running) return;
  impl_->running = false;
  asio::post(impl_->io, [impl = impl_.get()] {
    impl->drain();
    boost::system::error_code ignored;
    impl->tcp_acceptor.close(ignored);
    impl->ws_acceptor.close(ignored);
    const auto open = impl->connections;
    for (const auto& [id, c] : open) c->close("Shutdown");
  });
  const auto deadline = std::chrono::steady_clock::now() + grace;
  while (impl_->open_count > 0 && std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  impl_->work.reset();
  impl_->io.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
  impl_->connections.clear();
}

void NetTransport::apply(std::vector<TransportAction> actions) {
  if (actions.empty()) return;
  {
    std::lock_guard lock(impl_->mu);
    for (auto& a : actions) impl_->outbound.push_back(std::move(a));
  }
  asio::post(impl_->io, [impl = impl_.get()] { impl->drain(); });
}

std::vector<TransportEvent> NetTransport::poll() {
  std::lock_guard lock(impl_->mu);
  std::vector<TransportEvent> out(std::make_move_iterator(impl_->inbound.begin()),
                                  std::make_move_iterator(impl_->inbound.end()));
  impl_->inbound.clear();
  return out;
}

void NetTransport::wait(std::chrono::milliseconds timeout) {
  std::unique_lock lock(impl_->mu);
  impl_->cv.wait_for(lock, timeout, [&] { return !impl_->inbound.empty(); });
}

unsigned short NetTransport::tcp_port() const {
  boost::system::error_code ec;
  const auto ep = impl_->tcp_acceptor.local_endpoint(ec);
  return ec ? 0 : ep.port();
}

std::optional<unsigned short> NetTransport::ws_port() const {
  if (!impl_->ws_endpoint) return std::nullopt;
  boost::system::error_code ec;
  const auto ep = impl_->ws_acceptor.local_endpoint(ec);
  return ec ? std::nullopt : std::optional<unsigned short>(ep.port());
}

std::uint64_t NetTransport::frames_dropped() const { return impl_->dropped; }

}  // namespace auvtwin
