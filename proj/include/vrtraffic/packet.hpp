#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vrtraffic/errors.hpp"

namespace vrtraffic {

// Direction is relative to the streaming server: Downlink = server -> headset.
enum class Direction : std::uint8_t { Downlink, Uplink };

inline char direction_char(Direction d) {
  return d == Direction::Downlink ? 'D' : 'U';
}

struct PacketRecord {
  std::int64_t ts_us = 0;  // microseconds since trace start, >= 0
  Direction dir = Direction::Downlink;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  std::uint32_t len = 0;  // on-wire Ethernet frame length, >= 1

  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

// Unordered port pair: {a,b} == {b,a}.
struct PortPair {
  std::uint16_t lo = 0;
  std::uint16_t hi = 0;

  PortPair() = default;
  PortPair(std::uint16_t a, std::uint16_t b)
      : lo(std::min(a, b)), hi(std::max(a, b)) {}

  friend auto operator<=>(const PortPair&, const PortPair&) = default;
};

inline PortPair port_pair(const PacketRecord& p) {
  return PortPair(p.src_port, p.dst_port);
}

struct PacketTrace {
  std::vector<PacketRecord> packets;  // non-decreasing by ts_us
  std::string epoch;                  // wall-clock origin, informational
  std::map<std::string, std::string> metadata;

  // Equality is over packet contents; epoch/metadata are carry-along labels.
  friend bool operator==(const PacketTrace& a, const PacketTrace& b) {
    return a.packets == b.packets;
  }
};

inline bool is_sorted_by_ts(const std::vector<PacketRecord>& packets) {
  return std::is_sorted(packets.begin(), packets.end(),
                        [](const PacketRecord& a, const PacketRecord& b) {
                          return a.ts_us < b.ts_us;
                        });
}

// Stable: packets with equal ts keep their current relative order.
inline void sort_by_ts(PacketTrace& trace) {
  std::stable_sort(trace.packets.begin(), trace.packets.end(),
                   [](const PacketRecord& a, const PacketRecord& b) {
                     return a.ts_us < b.ts_us;
                   });
}

}  // namespace vrtraffic
