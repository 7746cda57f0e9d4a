#include "slip/socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <utility>

#include "slip/errors.hpp"

namespace slip {

Address Address::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
    throw AddressUnreachable("malformed address '" + std::string(text) + "', expected host:port");
  }
  unsigned port = 0;
  const auto port_text = text.substr(colon + 1);
  const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port > 65535) {
    throw AddressUnreachable("malformed port in '" + std::string(text) + "'");
  }
  return Address{std::string(text.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

std::string Address::str() const { return host + ":" + std::to_string(port); }

SocketAddress SocketAddress::resolve(const Address& address) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* found = nullptr;
  const int rc = getaddrinfo(address.host.c_str(), nullptr, &hints, &found);
  if (rc != 0 || found == nullptr) {
    throw AddressUnreachable("cannot resolve '" + address.host + "': " + gai_strerror(rc));
  }
  SocketAddress out;
  std::memcpy(&out.raw, found->ai_addr, sizeof(sockaddr_in));
  out.raw.sin_port = htons(address.port);
  freeaddrinfo(found);
  return out;
}

UdpSocket::UdpSocket(const Address& bind) {
  const SocketAddress local = SocketAddress::resolve(bind);
  fd_ = ::socket(AF_INET, SOCK_DGRAM | SOCK_NONBLOCK | SOCK_CLOEXEC, 0);
  if (fd_ < 0) throw TransportError(std::string("socket: ") + std::strerror(errno));
  int buffer_bytes = 4 << 20;
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVBUF, &buffer_bytes, sizeof(buffer_bytes));
  ::setsockopt(fd_, SOL_SOCKET, SO_SNDBUF, &buffer_bytes, sizeof(buffer_bytes));
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&local.raw), sizeof(local.raw)) != 0) {
    const int err = errno;
    ::close(fd_);
    fd_ = -1;
    throw AddressUnreachable("cannot bind " + bind.str() + ": " + std::strerror(err));
  }
}

UdpSocket::~UdpSocket() {
  if (fd_ >= 0) ::close(fd_);
}

UdpSocket::UdpSocket(UdpSocket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}

UdpSocket& UdpSocket::operator=(UdpSocket&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(other.fd_, -1);
  }
  return *this;
}

Address UdpSocket::local_address() const {
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  char host[INET_ADDRSTRLEN] = {};
  ::inet_ntop(AF_INET, &addr.sin_addr, host, sizeof(host));
  return Address{host, ntohs(addr.sin_port)};
}

SendStatus UdpSocket::send_to(const SocketAddress& to, std::span<const std::byte> bytes) {
  for (;;) {
    const ssize_t n = ::sendto(fd_, bytes.data(), bytes.size(), 0,
                               reinterpret_cast<const sockaddr*>(&to.raw), sizeof(to.raw));
    if (n >= 0) return SendStatus::Sent;
    if (errno == EINTR) continue;
    if (errno == EAGAIN || errno == EWOULDBLOCK || errno == ENOBUFS) return SendStatus::WouldBlock;
    // A previous datagram bounced off a closed port; the loss is already silent.
    if (errno == ECONNREFUSED) return SendStatus::Sent;
    throw TransportError(std::string("sendto: ") + std::strerror(errno));
  }
}

std::optional<std::size_t> UdpSocket::receive(std::span<std::byte> buffer) {
  for (;;) {
    const ssize_t n = ::recv(fd_, buffer.data(), buffer.size(), 0);
    if (n >= 0) return static_cast<std::size_t>(n);
    if (errno == EINTR) continue;
    if (errno == EAGAIN || errno == EWOULDBLOCK) return std::nullopt;
    if (errno == ECONNREFUSED) continue;
    throw TransportError(std::string("recv: ") + std::strerror(errno));
  }
}

bool UdpSocket::wait_readable(int timeout_ms) {
  pollfd p{fd_, POLLIN, 0};
  const int rc = ::poll(&p, 1, timeout_ms);
  return rc > 0 && (p.revents & POLLIN);
}

}  // namespace slip
