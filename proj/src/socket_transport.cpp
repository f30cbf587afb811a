#include "upfair/socket_transport.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <cstring>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <optional>
#include <string>

#include "upfair/errors.hpp"

namespace upfair {

namespace {

using Clock = std::chrono::steady_clock;

std::string errno_text(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  return left.count() > 0 ? static_cast<int>(left.count()) : 0;
}

sockaddr_in resolve(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) return addr;

  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (getaddrinfo(host.c_str(), nullptr, &hints, &found) != 0 || found == nullptr) {
    throw TransportError("cannot resolve host " + host);
  }
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(found->ai_addr)->sin_addr;
  freeaddrinfo(found);
  return addr;
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

void log_line(const MessageLog& log, std::string_view direction, std::string_view line) {
  if (!log) return;
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  log(direction, line);
}

}  // namespace

SocketHandle& SocketHandle::operator=(SocketHandle&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(other.fd_, -1);
  }
  return *this;
}

SocketHandle::~SocketHandle() {
  if (fd_ >= 0) ::close(fd_);
}

void LineConnection::send_line(std::string_view line) {
  while (!line.empty()) {
    const ssize_t sent = ::send(fd(), line.data(), line.size(), MSG_NOSIGNAL);
    if (sent < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errno_text("send"));
    }
    line.remove_prefix(static_cast<std::size_t>(sent));
  }
}

bool LineConnection::pop_buffered(std::string& line) {
  const auto end = buffer_.find('\n');
  if (end == std::string::npos) return false;
  line = buffer_.substr(0, end + 1);
  buffer_.erase(0, end + 1);
  return true;
}

bool LineConnection::fill() {
  char chunk[4096];
  for (;;) {
    const ssize_t got = ::recv(fd(), chunk, sizeof(chunk), 0);
    if (got > 0) {
      buffer_.append(chunk, static_cast<std::size_t>(got));
      return true;
    }
    if (got == 0) return false;
    if (errno == EINTR) continue;
    throw TransportError(errno_text("recv"));
  }
}

std::string LineConnection::read_line(Clock::time_point deadline) {
  std::string line;
  while (!pop_buffered(line)) {
    pollfd pfd{fd(), POLLIN, 0};
    const int ready = ::poll(&pfd, 1, remaining_ms(deadline));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errno_text("poll"));
    }
    if (ready == 0) throw TimeoutError("timed out waiting for a message");
    if (!fill()) throw TransportError("peer closed the connection");
  }
  return line;
}

SocketBsTransport::SocketBsTransport(std::size_t user_count, SocketServerOptions options)
    : user_count_(user_count), options_(std::move(options)) {
  if (user_count_ == 0) throw TransportError("server needs at least one user");
  listener_ = SocketHandle(::socket(AF_INET, SOCK_STREAM, 0));
  if (!listener_.valid()) throw TransportError(errno_text("socket"));
  int one = 1;
  ::setsockopt(listener_.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = resolve(options_.host, options_.port);
  if (::bind(listener_.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    throw TransportError(errno_text("bind"));
  }
  if (::listen(listener_.get(), static_cast<int>(user_count_) + 4) != 0) {
    throw TransportError(errno_text("listen"));
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listener_.get(), reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

void SocketBsTransport::wait_for_users() {
  const auto deadline = Clock::now() + options_.registration_timeout;
  std::vector<std::optional<LineConnection>> registered(user_count_);
  std::size_t count = 0;
  while (count < user_count_) {
    pollfd pfd{listener_.get(), POLLIN, 0};
    const int ready = ::poll(&pfd, 1, remaining_ms(deadline));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errno_text("poll"));
    }
    if (ready == 0) {
      throw TimeoutError("only " + std::to_string(count) + " of " + std::to_string(user_count_) +
                         " UEs registered before the deadline");
    }
    SocketHandle client(::accept(listener_.get(), nullptr, nullptr));
    if (!client.valid()) throw TransportError(errno_text("accept"));
    set_nodelay(client.get());
    LineConnection connection(std::move(client));
    const std::string line = connection.read_line(deadline);
    log_line(options_.log, "recv", line);
    const Message message = decode(line);
    const auto* hello = std::get_if<HelloMessage>(&message);
    if (hello == nullptr) throw TransportError("expected hello as the first message");
    if (hello->user_id < 0 || static_cast<std::size_t>(hello->user_id) >= user_count_) {
      throw TransportError("hello from out-of-range user id " + std::to_string(hello->user_id));
    }
    auto& slot = registered[static_cast<std::size_t>(hello->user_id)];
    if (slot) throw TransportError("user id " + std::to_string(hello->user_id) + " registered twice");
    slot.emplace(std::move(connection));
    ++count;
  }
  connections_.clear();
  for (auto& slot : registered) connections_.push_back(std::move(*slot));
}

std::vector<double> SocketBsTransport::gather_bids(std::int64_t n) {
  if (connections_.size() != user_count_) throw TransportError("UEs are not registered");
  RoundCollector round(user_count_, n);
  const auto deadline = Clock::now() + options_.round_timeout;

  auto drain = [&](std::size_t user) {
    std::string line;
    while (connections_[user].pop_buffered(line)) {
      log_line(options_.log, "recv", line);
      const Message message = decode(line);
      const auto* bid = std::get_if<BidMessage>(&message);
      if (bid == nullptr) throw TransportError("expected a bid message");
      if (bid->user_id != static_cast<std::int64_t>(user)) {
        throw TransportError("bid id does not match the registered connection");
      }
      round.accept(*bid);
      record({TransportEvent::Kind::bid_consumed, bid->n, bid->user_id});
    }
  };

  for (std::size_t user = 0; user < user_count_; ++user) drain(user);
  std::vector<pollfd> fds(user_count_);
  while (!round.complete()) {
    for (std::size_t user = 0; user < user_count_; ++user) {
      fds[user] = pollfd{connections_[user].fd(), POLLIN, 0};
    }
    const int ready = ::poll(fds.data(), fds.size(), remaining_ms(deadline));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errno_text("poll"));
    }
    if (ready == 0) {
      throw TimeoutError("round " + std::to_string(n) + " bids did not arrive before the deadline");
    }
    for (std::size_t user = 0; user < user_count_; ++user) {
      if ((fds[user].revents & (POLLIN | POLLHUP | POLLERR)) == 0) continue;
      if (!connections_[user].fill()) {
        throw TransportError("UE " + std::to_string(user) + " closed the connection");
      }
      drain(user);
    }
  }
  return round.take();
}

void SocketBsTransport::publish(const Message& message) {
  record_published(message);
  const std::string line = encode(message);
  for (auto& connection : connections_) {
    log_line(options_.log, "send", line);
    connection.send_line(line);
  }
}

double run_socket_ue(UeAgent& agent, const SocketUeOptions& options) {
  SocketHandle socket(::socket(AF_INET, SOCK_STREAM, 0));
  if (!socket.valid()) throw TransportError(errno_text("socket"));
  sockaddr_in addr = resolve(options.host, options.port);
  if (::connect(socket.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    throw TransportError(errno_text("connect"));
  }
  set_nodelay(socket.get());
  LineConnection connection(std::move(socket));

  auto send = [&](const Message& message) {
    const std::string line = encode(message);
    log_line(options.log, "send", line);
    connection.send_line(line);
  };
  send(HelloMessage{agent.user_id()});
  send(agent.initial_bid());

  for (;;) {
    const std::string line = connection.read_line(Clock::now() + options.timeout);
    log_line(options.log, "recv", line);
    const Message message = decode(line);
    if (const auto* price = std::get_if<PriceMessage>(&message)) {
      send(agent.on_price(*price));
    } else if (const auto* stop = std::get_if<StopMessage>(&message)) {
      return agent.on_stop(*stop);
    } else {
      throw TransportError("UE received an unexpected message");
    }
  }
}

}  // namespace upfair
