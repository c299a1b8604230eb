#pragma once

// Shared builders for test traces.

#include <cstdint>
#include <random>
#include <vector>

#include "vrtraffic/packet.hpp"
#include "vrtraffic/traffic_gen.hpp"

namespace test_helpers {

using vrtraffic::Direction;
using vrtraffic::PacketRecord;
using vrtraffic::PacketTrace;

inline PacketRecord pkt(std::int64_t ts_us, Direction dir, std::uint16_t src,
                        std::uint16_t dst, std::uint32_t len) {
  return PacketRecord{ts_us, dir, src, dst, len};
}

inline PacketRecord video_down(std::int64_t ts_us, std::uint32_t len = 1514) {
  return pkt(ts_us, Direction::Downlink, 9000, 54321, len);
}

inline PacketRecord video_ack(std::int64_t ts_us, std::uint32_t len = 60) {
  return pkt(ts_us, Direction::Uplink, 54321, 9000, len);
}

// A fixed-interval stream: frames of `frame_bytes` every `iat_us`, each as a
// same-timestamp MTU burst, with one 60 B ACK `ack_delay_us` after each frame.
inline PacketTrace periodic_stream(std::size_t frames, std::int64_t iat_us,
                                   std::uint64_t frame_bytes,
                                   std::int64_t ack_delay_us = 2000,
                                   bool with_acks = true) {
  PacketTrace trace;
  for (std::size_t i = 0; i < frames; ++i) {
    const std::int64_t t = static_cast<std::int64_t>(i) * iat_us;
    std::uint64_t remaining = frame_bytes;
    while (remaining > 0) {
      const std::uint32_t len =
          remaining >= 1514 ? 1514 : static_cast<std::uint32_t>(remaining);
      trace.packets.push_back(video_down(t, len));
      remaining -= len;
    }
    if (with_acks) trace.packets.push_back(video_ack(t + ack_delay_us));
  }
  vrtraffic::sort_by_ts(trace);
  return trace;
}

}  // namespace test_helpers
