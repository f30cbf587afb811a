#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "upfair/agents.hpp"
#include "upfair/transport.hpp"

namespace upfair {

using MessageLog = std::function<void(std::string_view direction, std::string_view line)>;

// Owns one file descriptor.
class SocketHandle {
 public:
  SocketHandle() = default;
  explicit SocketHandle(int fd) noexcept : fd_(fd) {}
  SocketHandle(SocketHandle&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  SocketHandle& operator=(SocketHandle&& other) noexcept;
  SocketHandle(const SocketHandle&) = delete;
  SocketHandle& operator=(const SocketHandle&) = delete;
  ~SocketHandle();

  int get() const noexcept { return fd_; }
  bool valid() const noexcept { return fd_ >= 0; }

 private:
  int fd_ = -1;
};

// Newline-framed connection with deadline-bounded reads.
class LineConnection {
 public:
  explicit LineConnection(SocketHandle socket) : socket_(std::move(socket)) {}

  int fd() const noexcept { return socket_.get(); }
  void send_line(std::string_view line);
  // Next complete line already buffered, without blocking.
  bool pop_buffered(std::string& line);
  // Reads what is available; false once the peer has closed.
  bool fill();
  // Blocks until a full line arrives; throws TimeoutError past the deadline.
  std::string read_line(std::chrono::steady_clock::time_point deadline);

 private:
  SocketHandle socket_;
  std::string buffer_;
};

struct SocketServerOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
  std::chrono::milliseconds round_timeout{5000};
  std::chrono::milliseconds registration_timeout{30000};
  MessageLog log;
};

// BS over TCP: one listening socket, one connection per UE. Each UE registers
// with {"t":"hello","id":k}; rounds begin once all M distinct ids are present.
class SocketBsTransport final : public BsTransport {
 public:
  SocketBsTransport(std::size_t user_count, SocketServerOptions options);

  std::uint16_t port() const noexcept { return port_; }

  // Accepts connections until every user id in [0, M) has said hello.
  void wait_for_users();

  std::size_t user_count() const override { return user_count_; }
  std::vector<double> gather_bids(std::int64_t n) override;
  void publish(const Message& message) override;

 private:
  std::size_t user_count_;
  SocketServerOptions options_;
  SocketHandle listener_;
  std::uint16_t port_ = 0;
  std::vector<LineConnection> connections_;  // indexed by user id once registered
};

struct SocketUeOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  std::chrono::milliseconds timeout{30000};
  MessageLog log;
};

// Runs one UE until the BS sends Stop. Returns the allocated power w_i / p.
double run_socket_ue(UeAgent& agent, const SocketUeOptions& options);

}  // namespace upfair
