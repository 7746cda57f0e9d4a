#pragma once

#include <cstddef>
#include <cstring>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "slip/errors.hpp"

namespace slip {

// Byte encoding of channel payloads for transports that leave the address
// space. Trivially copyable types are copied verbatim in host byte order.
template <typename T, typename = void>
struct PayloadCodec;

template <typename T>
struct PayloadCodec<T, std::enable_if_t<std::is_trivially_copyable_v<T>>> {
  static constexpr std::size_t kFixedSize = sizeof(T);

  static void encode(const T& value, std::vector<std::byte>& out) {
    const auto* p = reinterpret_cast<const std::byte*>(&value);
    out.insert(out.end(), p, p + sizeof(T));
  }

  static T decode(std::span<const std::byte> bytes) {
    if (bytes.size() != sizeof(T)) throw TransportError("payload size mismatch");
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
  }
};

template <>
struct PayloadCodec<std::vector<std::byte>> {
  static void encode(const std::vector<std::byte>& value, std::vector<std::byte>& out) {
    out.insert(out.end(), value.begin(), value.end());
  }
  static std::vector<std::byte> decode(std::span<const std::byte> bytes) {
    return {bytes.begin(), bytes.end()};
  }
};

template <>
struct PayloadCodec<std::string> {
  static void encode(const std::string& value, std::vector<std::byte>& out) {
    const auto* p = reinterpret_cast<const std::byte*>(value.data());
    out.insert(out.end(), p, p + value.size());
  }
  static std::string decode(std::span<const std::byte> bytes) {
    return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
  }
};

template <typename T>
concept FixedSizePayload = requires { PayloadCodec<T>::kFixedSize; };

template <typename T>
std::vector<std::byte> encode_payload(const T& value) {
  std::vector<std::byte> out;
  PayloadCodec<T>::encode(value, out);
  return out;
}

}  // namespace slip
