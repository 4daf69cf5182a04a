#include "fedeval/federation/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

namespace fedeval {

namespace {

class Mailbox {
 public:
  void push(RoundMessage message) {
    {
      std::lock_guard lock(mutex_);
      queue_.push_back(std::move(message));
    }
    ready_.notify_one();
  }

  RoundMessage pop(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    if (!ready_.wait_for(lock, timeout, [&] { return !queue_.empty() || closed_; })) {
      throw TimeoutError("no message within " + std::to_string(timeout.count()) + " ms");
    }
    if (queue_.empty()) throw ProtocolError("channel closed by peer");
    RoundMessage msg = std::move(queue_.front());
    queue_.pop_front();
    return msg;
  }

  void close() {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    ready_.notify_all();
  }

 private:
  std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<RoundMessage> queue_;
  bool closed_ = false;
};

class InProcessChannel : public MessageChannel {
 public:
  InProcessChannel(std::shared_ptr<Mailbox> inbox, std::shared_ptr<Mailbox> outbox)
      : inbox_(std::move(inbox)), outbox_(std::move(outbox)) {}

  ~InProcessChannel() override { outbox_->close(); }

  void send(const RoundMessage& message) override { outbox_->push(message); }

  RoundMessage receive(std::chrono::milliseconds timeout) override {
    return inbox_->pop(timeout);
  }

 private:
  std::shared_ptr<Mailbox> inbox_;
  std::shared_ptr<Mailbox> outbox_;
};

using Clock = std::chrono::steady_clock;

std::chrono::milliseconds remaining(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  return left.count() > 0 ? left : std::chrono::milliseconds(0);
}

void wait_readable(int fd, Clock::time_point deadline) {
  pollfd pfd{fd, POLLIN, 0};
  const int rc = ::poll(&pfd, 1, static_cast<int>(remaining(deadline).count()));
  if (rc == 0) throw TimeoutError("socket read timed out");
  if (rc < 0) throw IoError(std::string("poll: ") + std::strerror(errno));
}

class SocketChannel : public MessageChannel {
 public:
  explicit SocketChannel(int fd) : fd_(fd) {
    const int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }

  ~SocketChannel() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void send(const RoundMessage& message) override {
    const std::string frame = encode_message(message);
    std::size_t sent = 0;
    while (sent < frame.size()) {
      const ssize_t n = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(std::string("send: ") + std::strerror(errno));
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  RoundMessage receive(std::chrono::milliseconds timeout) override {
    const auto deadline = Clock::now() + timeout;
    unsigned char prefix[4];
    read_exact(prefix, 4, deadline, /*at_frame_start=*/true);
    const std::uint32_t len = (std::uint32_t(prefix[0]) << 24) | (std::uint32_t(prefix[1]) << 16) |
                              (std::uint32_t(prefix[2]) << 8) | std::uint32_t(prefix[3]);
    if (len > kMaxFrameBytes) {
      throw ProtocolError("frame length " + std::to_string(len) + " exceeds cap");
    }
    std::string body(len, '\0');
    if (len > 0) read_exact(body.data(), len, deadline, /*at_frame_start=*/false);
    return decode_body(body);
  }

 private:
  void read_exact(void* dst, std::size_t want, Clock::time_point deadline, bool at_frame_start) {
    auto* out = static_cast<unsigned char*>(dst);
    std::size_t got = 0;
    while (got < want) {
      wait_readable(fd_, deadline);
      const ssize_t n = ::recv(fd_, out + got, want - got, 0);
      if (n == 0) {
        if (at_frame_start && got == 0) throw ProtocolError("connection closed by peer");
        throw ProtocolError("truncated frame: connection closed mid-message");
      }
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(std::string("recv: ") + std::strerror(errno));
      }
      got += static_cast<std::size_t>(n);
    }
  }

  int fd_;
};

sockaddr_in make_sockaddr(const TcpAddress& address) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(address.port));
  if (::inet_pton(AF_INET, address.host.c_str(), &addr.sin_addr) != 1) {
    throw ValidationError("invalid IPv4 address: " + address.host);
  }
  return addr;
}

}  // namespace

std::pair<std::shared_ptr<MessageChannel>, std::shared_ptr<MessageChannel>> make_channel_pair() {
  auto a_to_b = std::make_shared<Mailbox>();
  auto b_to_a = std::make_shared<Mailbox>();
  return {std::make_shared<InProcessChannel>(b_to_a, a_to_b),
          std::make_shared<InProcessChannel>(a_to_b, b_to_a)};
}

TcpAddress parse_address(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon == text.size() - 1) {
    throw ValidationError("expected host:port, got '" + text + "'");
  }
  TcpAddress address;
  address.host = text.substr(0, colon);
  try {
    address.port = std::stoi(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw ValidationError("invalid port in '" + text + "'");
  }
  if (address.port < 0 || address.port > 65535) {
    throw ValidationError("port out of range in '" + text + "'");
  }
  return address;
}

TcpListener::TcpListener(const TcpAddress& address) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw IoError(std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr = make_sockaddr(address);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string what = std::strerror(errno);
    ::close(fd_);
    fd_ = -1;
    throw IoError("bind " + address.to_string() + ": " + what);
  }
  if (::listen(fd_, 64) != 0) {
    const std::string what = std::strerror(errno);
    ::close(fd_);
    fd_ = -1;
    throw IoError("listen: " + what);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() { close(); }

void TcpListener::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

std::shared_ptr<MessageChannel> TcpListener::accept(std::chrono::milliseconds timeout) {
  if (fd_ < 0) throw IoError("listener is closed");
  wait_readable(fd_, Clock::now() + timeout);
  const int conn = ::accept(fd_, nullptr, nullptr);
  if (conn < 0) throw IoError(std::string("accept: ") + std::strerror(errno));
  return std::make_shared<SocketChannel>(conn);
}

std::shared_ptr<MessageChannel> connect_tcp(const TcpAddress& address,
                                            std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  sockaddr_in addr = make_sockaddr(address);
  int last_error = 0;
  // Retry until the deadline so participants may start before the coordinator.
  for (;;) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw IoError(std::string("socket: ") + std::strerror(errno));
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) {
      return std::make_shared<SocketChannel>(fd);
    }
    last_error = errno;
    ::close(fd);
    if (Clock::now() + std::chrono::milliseconds(50) >= deadline) break;
    ::usleep(50 * 1000);
  }
  throw TimeoutError("connect " + address.to_string() + ": " + std::strerror(last_error));
}

}  // namespace fedeval
