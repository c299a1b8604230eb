#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "vrtraffic/distributions.hpp"
#include "vrtraffic/errors.hpp"
#include "vrtraffic/frame_ident.hpp"
#include "vrtraffic/packet.hpp"

namespace vrtraffic {

enum class BurstMode : std::uint8_t { SingleBurst, TwoBurst };

inline constexpr std::uint16_t kSyntheticSrcPort = 9000;
inline constexpr std::uint16_t kSyntheticDstPort = 54321;
inline constexpr std::uint64_t kMinFrameBytes = 1514;  // one MTU packet

struct TrafficModel {
  LogLogisticParams size_model;  // frame size, bytes
  BurrParams iat_model;          // inter-arrival time, milliseconds
  double duration_s = 30.0;
  std::uint64_t seed = 1;
  BurstMode burst_mode = BurstMode::SingleBurst;
  std::int64_t intra_burst_gap_us = 1500;  // keep below the downstream Δt threshold

  void validate() const {
    detail::check_params(size_model);
    detail::check_params(iat_model);
    if (!(duration_s > 0.0)) throw DomainError("duration must be positive");
    if (intra_burst_gap_us <= 0)
      throw DomainError("intra-burst gap must be positive");
  }
};

// Draws frame sizes from the size model and arrival gaps from the IAT model
// (ms -> µs, rounded, clamped to >= 1 µs) until cumulative time reaches the
// duration. Sizes are integer bytes, clamped to one MTU minimum. Deterministic
// per seed.
inline FrameSequence generate_frames(const TrafficModel& model) {
  model.validate();
  std::mt19937_64 rng(model.seed);
  const auto duration_us = static_cast<std::int64_t>(model.duration_s * 1e6);

  FrameSequence fs;
  std::int64_t t = 0;
  while (t < duration_us) {
    const double size_draw =
        loglogistic_quantile(detail::uniform01(rng), model.size_model);
    const double gap_ms = burr_quantile(detail::uniform01(rng), model.iat_model);

    FrameRecord frame;
    frame.index = fs.frames.size();
    frame.size_bytes = std::max<std::uint64_t>(
        kMinFrameBytes, static_cast<std::uint64_t>(std::llround(size_draw)));
    frame.first_tx_us = t;
    frame.last_tx_us = t;
    fs.frames.push_back(std::move(frame));

    t += std::max<std::int64_t>(1, std::llround(gap_ms * 1000.0));
  }
  return fs;
}

// Splits each frame into MTU-size packets plus a remainder packet. SingleBurst
// puts all packets at the frame's first_tx; TwoBurst splits them into two
// halves (±1 packet) with the second half offset by the intra-burst gap.
inline PacketTrace packetize(const FrameSequence& fs, std::uint32_t mtu = 1514,
                             BurstMode mode = BurstMode::SingleBurst,
                             std::int64_t intra_burst_gap_us = 1500) {
  if (mtu == 0) throw DomainError("mtu must be positive");
  if (intra_burst_gap_us <= 0)
    throw DomainError("intra-burst gap must be positive");

  PacketTrace trace;
  for (const FrameRecord& frame : fs.frames) {
    if (frame.size_bytes == 0) throw DomainError("frame size must be >= 1");
    std::vector<std::uint32_t> lens(frame.size_bytes / mtu, mtu);
    if (const std::uint64_t rem = frame.size_bytes % mtu; rem > 0)
      lens.push_back(static_cast<std::uint32_t>(rem));

    const std::size_t first_half =
        mode == BurstMode::TwoBurst ? (lens.size() + 1) / 2 : lens.size();
    for (std::size_t i = 0; i < lens.size(); ++i) {
      PacketRecord p;
      p.ts_us = frame.first_tx_us + (i < first_half ? 0 : intra_burst_gap_us);
      p.dir = Direction::Downlink;
      p.src_port = kSyntheticSrcPort;
      p.dst_port = kSyntheticDstPort;
      p.len = lens[i];
      trace.packets.push_back(p);
    }
  }
  sort_by_ts(trace);
  return trace;
}

inline PacketTrace generate_trace(const TrafficModel& model) {
  return packetize(generate_frames(model), 1514, model.burst_mode,
                   model.intra_burst_gap_us);
}

}  // namespace vrtraffic
