#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slip/codec.hpp"
#include "slip/message.hpp"

namespace slip::wire {

// Plain datagram, all integers little-endian:
//   magic "SLPD" (4) | version (1) | channel_id (8) | sequence_number (8)
//   | bundled_touch_count (8) | payload_length (4) | crc32 (4) | payload
// The crc32 covers the 33 header bytes before it followed by the payload.
//
// Consolidated frame: same layout with magic "SLPF" and one frame-kind byte
// after the version (38-byte header). The touch field is zero; per-member
// touch counts travel in the body.
//   pooled body:     member_count x (touch (8) | fixed-size payload)
//   aggregated body: repeated (member_index (2) | length (2) | touch (8) | payload)

inline constexpr std::array<std::byte, 4> kDatagramMagic{std::byte{'S'}, std::byte{'L'},
                                                         std::byte{'P'}, std::byte{'D'}};
inline constexpr std::array<std::byte, 4> kFrameMagic{std::byte{'S'}, std::byte{'L'},
                                                      std::byte{'P'}, std::byte{'F'}};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kDatagramHeaderSize = 37;
inline constexpr std::size_t kFrameHeaderSize = 38;
inline constexpr std::size_t kMaxPayload = 1400;
inline constexpr std::size_t kPooledSlotOverhead = 8;
inline constexpr std::size_t kAggregatedEntryOverhead = 12;

enum class PacketKind : std::uint8_t { Message = 0xff, Pooled = 0, Aggregated = 1 };

struct PacketView {
  PacketKind kind = PacketKind::Message;
  std::uint64_t channel_id = 0;
  std::uint64_t sequence_number = 0;
  std::uint64_t bundled_touch_count = 0;
  std::span<const std::byte> body;
};

struct AggregatedEntry {
  std::uint16_t member_index = 0;
  std::uint64_t bundled_touch_count = 0;
  std::span<const std::byte> payload;
};

std::vector<std::byte> encode_datagram(std::uint64_t channel_id, std::uint64_t sequence_number,
                                       std::uint64_t bundled_touch_count,
                                       std::span<const std::byte> payload,
                                       std::size_t max_payload = kMaxPayload);

std::vector<std::byte> encode_frame(PacketKind kind, std::uint64_t channel_id,
                                    std::uint64_t sequence_number, std::span<const std::byte> body,
                                    std::size_t max_payload = kMaxPayload);

// Validates magic, version, declared length and checksum. Any mismatch yields
// nullopt; the caller treats that datagram as lost in transit.
std::optional<PacketView> decode_packet(std::span<const std::byte> bytes);

// Returns nullopt if the body is truncated or malformed.
std::optional<std::vector<AggregatedEntry>> parse_aggregated_body(std::span<const std::byte> body);

void append_u16(std::vector<std::byte>& out, std::uint16_t v);
void append_u32(std::vector<std::byte>& out, std::uint32_t v);
void append_u64(std::vector<std::byte>& out, std::uint64_t v);
std::uint16_t read_u16(std::span<const std::byte> in);
std::uint32_t read_u32(std::span<const std::byte> in);
std::uint64_t read_u64(std::span<const std::byte> in);

template <typename T>
std::vector<std::byte> encode_message(const Message<T>& msg, std::uint64_t channel_id,
                                      std::size_t max_payload = kMaxPayload) {
  const std::vector<std::byte> payload = encode_payload(msg.payload);
  return encode_datagram(channel_id, msg.sequence_number, msg.bundled_touch_count, payload,
                         max_payload);
}

template <typename T>
std::optional<Message<T>> decode_message(const PacketView& packet) {
  if (packet.kind != PacketKind::Message) return std::nullopt;
  try {
    return Message<T>{PayloadCodec<T>::decode(packet.body), packet.bundled_touch_count,
                      packet.sequence_number};
  } catch (const TransportError&) {
    return std::nullopt;
  }
}

}  // namespace slip::wire
