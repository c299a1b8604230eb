#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vrtraffic/errors.hpp"
#include "vrtraffic/packet.hpp"

namespace vrtraffic {

// Constant packet-size signatures of the three streaming flows.
// Modal length means the most frequent exact on-wire length.
struct ClassifyConfig {
  std::uint32_t video_mtu_len = 1514;
  std::uint32_t control_uplink_len = 358;
  std::uint32_t control_downlink_len = 54;
  std::uint32_t audio_downlink_len = 1222;
  std::uint32_t audio_uplink_len = 390;
};

enum class FlowLabel : std::uint8_t { Video, Audio, Control, Unknown };

inline std::string_view to_string(FlowLabel label) {
  switch (label) {
    case FlowLabel::Video: return "Video";
    case FlowLabel::Audio: return "Audio";
    case FlowLabel::Control: return "Control";
    case FlowLabel::Unknown: return "Unknown";
  }
  return "Unknown";
}

struct FlowEvidence {
  std::uint64_t downlink_bytes = 0;
  std::uint64_t uplink_bytes = 0;
  std::uint64_t downlink_packets = 0;
  std::uint64_t uplink_packets = 0;
  std::uint32_t modal_downlink_len = 0;  // 0 when the direction is empty
  std::uint32_t modal_uplink_len = 0;
};

struct FlowInfo {
  PortPair ports;
  FlowLabel label = FlowLabel::Unknown;
  FlowEvidence evidence;
};

struct FlowMap {
  std::vector<FlowInfo> flows;  // sorted by port pair

  const FlowInfo* find(PortPair ports) const {
    for (const FlowInfo& f : flows)
      if (f.ports == ports) return &f;
    return nullptr;
  }

  std::optional<PortPair> video_ports() const {
    for (const FlowInfo& f : flows)
      if (f.label == FlowLabel::Video) return f.ports;
    return std::nullopt;
  }
};

namespace detail {

// Most frequent exact length; ties go to the smaller length.
inline std::uint32_t modal_length(
    const std::map<std::uint32_t, std::uint64_t>& counts) {
  std::uint32_t best_len = 0;
  std::uint64_t best_count = 0;
  for (const auto& [len, count] : counts) {
    if (count > best_count) {
      best_len = len;
      best_count = count;
    }
  }
  return best_len;
}

}  // namespace detail

// Labels every port pair; the video flow may be absent (all Unknown).
inline FlowMap build_flow_map(const PacketTrace& trace,
                              const ClassifyConfig& cfg = {}) {
  if (trace.packets.empty()) throw DomainError("empty trace");

  struct Stats {
    FlowEvidence evidence;
    std::map<std::uint32_t, std::uint64_t> downlink_lens;
    std::map<std::uint32_t, std::uint64_t> uplink_lens;
  };
  std::map<PortPair, Stats> stats;
  for (const PacketRecord& p : trace.packets) {
    Stats& s = stats[port_pair(p)];
    if (p.dir == Direction::Downlink) {
      s.evidence.downlink_bytes += p.len;
      s.evidence.downlink_packets += 1;
      s.downlink_lens[p.len] += 1;
    } else {
      s.evidence.uplink_bytes += p.len;
      s.evidence.uplink_packets += 1;
      s.uplink_lens[p.len] += 1;
    }
  }

  FlowMap map;
  map.flows.reserve(stats.size());
  for (auto& [ports, s] : stats) {
    s.evidence.modal_downlink_len = detail::modal_length(s.downlink_lens);
    s.evidence.modal_uplink_len = detail::modal_length(s.uplink_lens);
    map.flows.push_back(FlowInfo{ports, FlowLabel::Unknown, s.evidence});
  }

  // Video: largest total downlink volume among MTU-modal flows.
  // std::map iteration order makes the lowest port pair win byte ties.
  FlowInfo* video = nullptr;
  for (FlowInfo& f : map.flows) {
    if (f.evidence.modal_downlink_len != cfg.video_mtu_len) continue;
    if (!video || f.evidence.downlink_bytes > video->evidence.downlink_bytes)
      video = &f;
  }
  if (video) video->label = FlowLabel::Video;

  for (FlowInfo& f : map.flows) {
    if (f.label != FlowLabel::Unknown) continue;
    if (f.evidence.modal_uplink_len == cfg.control_uplink_len &&
        f.evidence.modal_downlink_len == cfg.control_downlink_len) {
      f.label = FlowLabel::Control;
    } else if (f.evidence.modal_downlink_len == cfg.audio_downlink_len &&
               f.evidence.modal_uplink_len == cfg.audio_uplink_len) {
      f.label = FlowLabel::Audio;
    }
  }
  return map;
}

// Same as build_flow_map but a missing video flow is an error: no further
// analysis is possible without it.
inline FlowMap classify_flows(const PacketTrace& trace,
                              const ClassifyConfig& cfg = {}) {
  FlowMap map = build_flow_map(trace, cfg);
  if (!map.video_ports()) throw DomainError("no video flow found");
  return map;
}

inline std::string flow_map_to_json(const FlowMap& map) {
  nlohmann::ordered_json flows = nlohmann::ordered_json::array();
  for (const FlowInfo& f : map.flows) {
    nlohmann::ordered_json j;
    j["ports"] = {f.ports.lo, f.ports.hi};
    j["label"] = std::string(to_string(f.label));
    j["downlink_bytes"] = f.evidence.downlink_bytes;
    j["uplink_bytes"] = f.evidence.uplink_bytes;
    j["downlink_packets"] = f.evidence.downlink_packets;
    j["uplink_packets"] = f.evidence.uplink_packets;
    j["modal_downlink_len"] = f.evidence.modal_downlink_len;
    j["modal_uplink_len"] = f.evidence.modal_uplink_len;
    flows.push_back(std::move(j));
  }
  nlohmann::ordered_json root;
  root["flows"] = std::move(flows);
  return root.dump();
}

}  // namespace vrtraffic
