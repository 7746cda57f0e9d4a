#include <doctest.h>
#include <zlib.h>

#include <random>
#include <string>

#include "slip/errors.hpp"
#include "slip/reorder_window.hpp"
#include "slip/wire.hpp"

using namespace slip;

namespace {

std::vector<std::byte> bytes_of(const std::string& s) {
  std::vector<std::byte> out;
  for (char c : s) out.push_back(static_cast<std::byte>(c));
  return out;
}

// Independent little-endian writer for the expected layout.
void put_le(std::vector<std::byte>& out, std::uint64_t v, int width) {
  for (int i = 0; i < width; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

}  // namespace

TEST_CASE("empty payload encodes to a 37-byte datagram") {
  const auto d = wire::encode_datagram(1, 2, 3, {});
  CHECK(d.size() == 37);
}

TEST_CASE("datagram layout is bit-exact") {
  const auto payload = bytes_of("hello");
  const auto d = wire::encode_datagram(0x1122334455667788ull, 9, 7, payload);

  std::vector<std::byte> expect = bytes_of("SLPD");
  put_le(expect, 1, 1);
  put_le(expect, 0x1122334455667788ull, 8);
  put_le(expect, 9, 8);
  put_le(expect, 7, 8);
  put_le(expect, payload.size(), 4);
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(expect.data()), static_cast<uInt>(expect.size()));
  crc = crc32(crc, reinterpret_cast<const Bytef*>(payload.data()), static_cast<uInt>(payload.size()));
  put_le(expect, crc, 4);
  expect.insert(expect.end(), payload.begin(), payload.end());
  CHECK(d == expect);
}

TEST_CASE("random payloads round-trip") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::byte> payload(rng() % (wire::kMaxPayload + 1));
    for (auto& b : payload) b = static_cast<std::byte>(rng());
    const std::uint64_t id = rng(), seq = rng(), touch = rng();
    const auto d = wire::encode_datagram(id, seq, touch, payload);
    const auto v = wire::decode_packet(d);
    REQUIRE(v);
    CHECK(v->kind == wire::PacketKind::Message);
    CHECK(v->channel_id == id);
    CHECK(v->sequence_number == seq);
    CHECK(v->bundled_touch_count == touch);
    CHECK(std::equal(v->body.begin(), v->body.end(), payload.begin(), payload.end()));
  }
}

TEST_CASE("typed messages round-trip") {
  const Message<std::uint32_t> m{0xdeadbeef, 12, 34};
  const auto d = wire::encode_message(m, 5);
  const auto v = wire::decode_packet(d);
  REQUIRE(v);
  const auto back = wire::decode_message<std::uint32_t>(*v);
  REQUIRE(back);
  CHECK(*back == m);

  const Message<std::string> s{"text payload", 1, 2};
  const auto ds = wire::encode_message(s, 6);
  CHECK(*wire::decode_message<std::string>(*wire::decode_packet(ds)) == s);
}

TEST_CASE("oversized payloads are rejected") {
  std::vector<std::byte> big(wire::kMaxPayload + 1);
  CHECK_THROWS_AS(wire::encode_datagram(1, 1, 1, big), PayloadTooLarge);
  std::vector<std::byte> fits(wire::kMaxPayload);
  CHECK_NOTHROW(wire::encode_datagram(1, 1, 1, fits));
}

TEST_CASE("any single flipped bit is detected") {
  const auto d = wire::encode_datagram(77, 5, 6, bytes_of("integrity matters"));
  for (std::size_t bit = 0; bit < d.size() * 8; ++bit) {
    auto corrupt = d;
    corrupt[bit / 8] ^= static_cast<std::byte>(1u << (bit % 8));
    CHECK_FALSE(wire::decode_packet(corrupt));
  }
}

TEST_CASE("truncated and padded datagrams are rejected") {
  const auto d = wire::encode_datagram(1, 2, 3, bytes_of("abc"));
  for (std::size_t n = 0; n < d.size(); ++n) {
    CHECK_FALSE(wire::decode_packet(std::span(d).first(n)));
  }
  auto padded = d;
  padded.push_back(std::byte{0});
  CHECK_FALSE(wire::decode_packet(padded));
}

TEST_CASE("frames carry their kind") {
  const auto body = bytes_of("0123456789");
  const auto f = wire::encode_frame(wire::PacketKind::Pooled, 9, 1, body);
  CHECK(f.size() == wire::kFrameHeaderSize + body.size());
  const auto v = wire::decode_packet(f);
  REQUIRE(v);
  CHECK(v->kind == wire::PacketKind::Pooled);
  CHECK(v->channel_id == 9);
  CHECK(v->body.size() == body.size());
  CHECK(wire::decode_packet(wire::encode_frame(wire::PacketKind::Aggregated, 9, 1, body))->kind ==
        wire::PacketKind::Aggregated);
}

TEST_CASE("aggregated bodies parse entry by entry") {
  std::vector<std::byte> body;
  wire::append_u16(body, 2);
  wire::append_u16(body, 3);
  wire::append_u64(body, 40);
  for (auto b : bytes_of("xyz")) body.push_back(b);
  wire::append_u16(body, 0);
  wire::append_u16(body, 0);
  wire::append_u64(body, 41);
  const auto entries = wire::parse_aggregated_body(body);
  REQUIRE(entries);
  REQUIRE(entries->size() == 2);
  CHECK((*entries)[0].member_index == 2);
  CHECK((*entries)[0].bundled_touch_count == 40);
  CHECK((*entries)[0].payload.size() == 3);
  CHECK((*entries)[1].member_index == 0);
  CHECK((*entries)[1].payload.empty());

  body.pop_back();
  CHECK_FALSE(wire::parse_aggregated_body(body));
}

TEST_CASE("reorder window releases in sequence order") {
  ReorderWindow<int> w(64);
  CHECK(w.ingest(3, 30) == ReorderWindow<int>::Admit::Accepted);
  CHECK(w.ingest(2, 20) == ReorderWindow<int>::Admit::Accepted);
  std::vector<std::uint64_t> seqs;
  w.release(100, [&](std::uint64_t s, int&&) { seqs.push_back(s); });
  CHECK(seqs == std::vector<std::uint64_t>{2, 3});
  CHECK(w.ingest(1, 10) == ReorderWindow<int>::Admit::Late);
  CHECK(w.ingest(3, 30) == ReorderWindow<int>::Admit::Late);
}

TEST_CASE("reorder window drops duplicates and bounds memory") {
  ReorderWindow<int> w(4);
  CHECK(w.ingest(5, 0) == ReorderWindow<int>::Admit::Accepted);
  CHECK(w.ingest(5, 0) == ReorderWindow<int>::Admit::Duplicate);
  for (std::uint64_t s = 6; s < 12; ++s) w.ingest(s, 0);
  CHECK(w.pending() == 4);
  CHECK(w.stats().overflowed == 3);
  std::vector<std::uint64_t> seqs;
  w.release(100, [&](std::uint64_t s, int&&) { seqs.push_back(s); });
  CHECK(seqs == std::vector<std::uint64_t>{8, 9, 10, 11});
}

TEST_CASE("reorder window never emits a sequence number twice") {
  std::mt19937 rng(5);
  ReorderWindow<int> w(64);
  std::vector<std::uint64_t> emitted;
  for (int round = 0; round < 2000; ++round) {
    const std::uint64_t base = static_cast<std::uint64_t>(round) / 2;
    w.ingest(base + rng() % 8, 0);
    if (rng() % 3 == 0) w.release(rng() % 5, [&](std::uint64_t s, int&&) { emitted.push_back(s); });
  }
  for (std::size_t i = 1; i < emitted.size(); ++i) CHECK(emitted[i] > emitted[i - 1]);
}
