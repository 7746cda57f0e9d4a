#pragma once

#include <netinet/in.h>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace slip {

struct Address {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  // "host:port"; throws AddressUnreachable when malformed.
  static Address parse(std::string_view text);
  std::string str() const;

  friend bool operator==(const Address&, const Address&) = default;
};

// IPv4 socket address resolved from an Address.
struct SocketAddress {
  sockaddr_in raw{};

  static SocketAddress resolve(const Address& address);
};

enum class SendStatus { Sent, WouldBlock };

// Non-blocking UDP socket.
class UdpSocket {
 public:
  explicit UdpSocket(const Address& bind);
  ~UdpSocket();
  UdpSocket(UdpSocket&& other) noexcept;
  UdpSocket& operator=(UdpSocket&& other) noexcept;
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;

  Address local_address() const;
  SendStatus send_to(const SocketAddress& to, std::span<const std::byte> bytes);
  std::optional<std::size_t> receive(std::span<std::byte> buffer);
  // Waits up to `timeout_ms` for a readable datagram.
  bool wait_readable(int timeout_ms);
  int fd() const noexcept { return fd_; }

 private:
  int fd_ = -1;
};

}  // namespace slip
