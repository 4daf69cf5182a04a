#ifndef FEDEVAL_FEDERATION_TRANSPORT_HPP
#define FEDEVAL_FEDERATION_TRANSPORT_HPP

#include <chrono>
#include <memory>
#include <string>
#include <utility>

#include "fedeval/federation/message.hpp"

namespace fedeval {

/// Blocking bidirectional message pipe between one participant and the
/// coordinator. Implementations must be usable from two threads, one per
/// direction.
class MessageChannel {
 public:
  virtual ~MessageChannel() = default;
  virtual void send(const RoundMessage& message) = 0;
  /// Throws TimeoutError when nothing arrives in time, ProtocolError when the
  /// peer vanished or sent garbage.
  virtual RoundMessage receive(std::chrono::milliseconds timeout) = 0;
};

/// Connected pair of in-memory endpoints. Messages pass as values without
/// touching the codec.
std::pair<std::shared_ptr<MessageChannel>, std::shared_ptr<MessageChannel>> make_channel_pair();

struct TcpAddress {
  std::string host = "127.0.0.1";
  int port = 0;

  std::string to_string() const { return host + ":" + std::to_string(port); }
};

/// Parses "host:port"; throws ValidationError on malformed input.
TcpAddress parse_address(const std::string& text);

/// Listening socket; accept() yields one framed-message channel per peer.
class TcpListener {
 public:
  explicit TcpListener(const TcpAddress& address);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::shared_ptr<MessageChannel> accept(std::chrono::milliseconds timeout);
  int port() const { return port_; }
  /// Unblocks a pending accept; subsequent accepts fail.
  void close();

 private:
  int fd_ = -1;
  int port_ = 0;
};

std::shared_ptr<MessageChannel> connect_tcp(const TcpAddress& address,
                                            std::chrono::milliseconds timeout);

}  // namespace fedeval

#endif  // FEDEVAL_FEDERATION_TRANSPORT_HPP
