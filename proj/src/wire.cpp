#include "slip/wire.hpp"

#include <algorithm>
#include <string>

#include <zlib.h>

#include "slip/errors.hpp"

namespace slip::wire {

void append_u16(std::vector<std::byte>& out, std::uint16_t v) {
  for (int i = 0; i < 2; ++i) out.push_back(static_cast<std::byte>(v >> (8 * i)));
}
void append_u32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>(v >> (8 * i)));
}
void append_u64(std::vector<std::byte>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>(v >> (8 * i)));
}

std::uint16_t read_u16(std::span<const std::byte> in) {
  return static_cast<std::uint16_t>(std::to_integer<unsigned>(in[0]) |
                                    (std::to_integer<unsigned>(in[1]) << 8));
}
std::uint32_t read_u32(std::span<const std::byte> in) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | std::to_integer<std::uint32_t>(in[i]);
  return v;
}
std::uint64_t read_u64(std::span<const std::byte> in) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | std::to_integer<std::uint64_t>(in[i]);
  return v;
}

namespace {

std::uint32_t checksum(std::span<const std::byte> header, std::span<const std::byte> body) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(header.data()), static_cast<uInt>(header.size()));
  // A null buffer would reset zlib's running value.
  if (!body.empty()) {
    crc = crc32(crc, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::byte> encode(const std::array<std::byte, 4>& magic, std::optional<PacketKind> kind,
                              std::uint64_t channel_id, std::uint64_t seq, std::uint64_t touch,
                              std::span<const std::byte> body, std::size_t max_payload) {
  if (body.size() > max_payload) {
    throw PayloadTooLarge("payload of " + std::to_string(body.size()) +
                          " bytes exceeds datagram cap of " + std::to_string(max_payload));
  }
  std::vector<std::byte> out;
  out.reserve(kFrameHeaderSize + body.size());
  out.insert(out.end(), magic.begin(), magic.end());
  out.push_back(std::byte{kVersion});
  if (kind) out.push_back(static_cast<std::byte>(*kind));
  append_u64(out, channel_id);
  append_u64(out, seq);
  append_u64(out, touch);
  append_u32(out, static_cast<std::uint32_t>(body.size()));
  append_u32(out, checksum(out, body));
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

}  // namespace

std::vector<std::byte> encode_datagram(std::uint64_t channel_id, std::uint64_t sequence_number,
                                       std::uint64_t bundled_touch_count,
                                       std::span<const std::byte> payload,
                                       std::size_t max_payload) {
  return encode(kDatagramMagic, std::nullopt, channel_id, sequence_number, bundled_touch_count,
                payload, max_payload);
}

std::vector<std::byte> encode_frame(PacketKind kind, std::uint64_t channel_id,
                                    std::uint64_t sequence_number, std::span<const std::byte> body,
                                    std::size_t max_payload) {
  return encode(kFrameMagic, kind, channel_id, sequence_number, 0, body, max_payload);
}

std::optional<PacketView> decode_packet(std::span<const std::byte> bytes) {
  if (bytes.size() < kDatagramHeaderSize) return std::nullopt;
  PacketView view;
  std::size_t at = 0;
  const auto magic = bytes.first(4);
  if (std::equal(magic.begin(), magic.end(), kDatagramMagic.begin())) {
    view.kind = PacketKind::Message;
    at = 5;
  } else if (std::equal(magic.begin(), magic.end(), kFrameMagic.begin())) {
    if (bytes.size() < kFrameHeaderSize) return std::nullopt;
    const auto kind = std::to_integer<std::uint8_t>(bytes[5]);
    if (kind != 0 && kind != 1) return std::nullopt;
    view.kind = static_cast<PacketKind>(kind);
    at = 6;
  } else {
    return std::nullopt;
  }
  if (std::to_integer<std::uint8_t>(bytes[4]) != kVersion) return std::nullopt;

  view.channel_id = read_u64(bytes.subspan(at));
  view.sequence_number = read_u64(bytes.subspan(at + 8));
  view.bundled_touch_count = read_u64(bytes.subspan(at + 16));
  const std::uint32_t length = read_u32(bytes.subspan(at + 24));
  const std::uint32_t crc = read_u32(bytes.subspan(at + 28));
  const std::size_t header_size = at + 32;
  if (bytes.size() != header_size + length) return std::nullopt;
  view.body = bytes.subspan(header_size);
  if (checksum(bytes.first(header_size - 4), view.body) != crc) return std::nullopt;
  return view;
}

std::optional<std::vector<AggregatedEntry>> parse_aggregated_body(std::span<const std::byte> body) {
  std::vector<AggregatedEntry> entries;
  while (!body.empty()) {
    if (body.size() < kAggregatedEntryOverhead) return std::nullopt;
    AggregatedEntry e;
    e.member_index = read_u16(body);
    const std::uint16_t length = read_u16(body.subspan(2));
    e.bundled_touch_count = read_u64(body.subspan(4));
    body = body.subspan(kAggregatedEntryOverhead);
    if (body.size() < length) return std::nullopt;
    e.payload = body.first(length);
    body = body.subspan(length);
    entries.push_back(e);
  }
  return entries;
}

}  // namespace slip::wire
