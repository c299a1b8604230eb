#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vrtraffic/errors.hpp"
#include "vrtraffic/packet.hpp"

namespace vrtraffic {

struct AnalyzerConfig {
  std::int64_t delta_t_thr_us = 3000;  // interval threshold between frames
  std::uint32_t mtu_len = 1514;
  std::uint32_t ack_max_len = 60;  // uplink packets up to this length are ACKs
  std::int64_t ack_grace_us = 0;   // window slack for high-latency ACKs

  void validate() const {
    if (delta_t_thr_us <= 0) throw DomainError("delta_t_thr must be positive");
    if (mtu_len <= ack_max_len)
      throw DomainError("mtu_len must exceed ack_max_len");
  }
};

struct FrameRecord {
  std::size_t index = 0;
  std::size_t packet_begin = 0;  // [begin, end) into the downlink packet list
  std::size_t packet_end = 0;
  std::uint64_t size_bytes = 0;  // sum of member on-wire lengths
  std::int64_t first_tx_us = 0;
  std::int64_t last_tx_us = 0;
  std::vector<std::int64_t> ack_times_us;
  std::optional<std::int64_t> latency_us;

  bool acked() const { return !ack_times_us.empty(); }
};

struct FrameSequence {
  std::vector<FrameRecord> frames;  // ordered by first_tx_us
  AnalyzerConfig config;
};

// Clusters consecutive packets whose gap is < delta_t_thr into one frame;
// a gap >= delta_t_thr starts a new frame. Exhaustive and non-overlapping.
inline FrameSequence identify_frames(std::span<const PacketRecord> video_downlink,
                                     const AnalyzerConfig& cfg = {}) {
  cfg.validate();
  if (video_downlink.empty()) throw DomainError("no video packets");
  for (std::size_t i = 1; i < video_downlink.size(); ++i)
    if (video_downlink[i].ts_us < video_downlink[i - 1].ts_us)
      throw DomainError("packets not sorted by timestamp");

  FrameSequence fs;
  fs.config = cfg;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= video_downlink.size(); ++i) {
    const bool cut =
        i == video_downlink.size() ||
        video_downlink[i].ts_us - video_downlink[i - 1].ts_us >= cfg.delta_t_thr_us;
    if (!cut) continue;
    FrameRecord frame;
    frame.index = fs.frames.size();
    frame.packet_begin = begin;
    frame.packet_end = i;
    frame.first_tx_us = video_downlink[begin].ts_us;
    frame.last_tx_us = video_downlink[i - 1].ts_us;
    for (std::size_t k = begin; k < i; ++k) frame.size_bytes += video_downlink[k].len;
    fs.frames.push_back(std::move(frame));
    begin = i;
  }
  return fs;
}

inline std::vector<std::uint64_t> frame_sizes(const FrameSequence& fs) {
  std::vector<std::uint64_t> sizes;
  sizes.reserve(fs.frames.size());
  for (const FrameRecord& f : fs.frames) sizes.push_back(f.size_bytes);
  return sizes;
}

// Difference between first-packet transmission times of successive frames.
inline std::vector<std::int64_t> inter_arrival_times(const FrameSequence& fs) {
  if (fs.frames.size() < 2) throw DomainError("insufficient frames");
  std::vector<std::int64_t> iats;
  iats.reserve(fs.frames.size() - 1);
  for (std::size_t i = 1; i < fs.frames.size(); ++i)
    iats.push_back(fs.frames[i].first_tx_us - fs.frames[i - 1].first_tx_us);
  return iats;
}

inline std::string frames_to_jsonl(const FrameSequence& fs) {
  std::string out;
  for (const FrameRecord& f : fs.frames) {
    nlohmann::ordered_json j;
    j["i"] = f.index;
    j["size"] = f.size_bytes;
    j["first_tx_us"] = f.first_tx_us;
    if (f.latency_us) {
      j["latency_us"] = *f.latency_us;
    } else {
      j["latency_us"] = nullptr;
    }
    j["acked"] = f.acked();
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

// Reads back the JSONL form. Packet ranges are not representable there; an
// acked frame is given a single reconstructed ACK at first_tx + latency.
inline FrameSequence frames_from_jsonl(std::string_view input) {
  FrameSequence fs;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < input.size()) {
    std::size_t nl = input.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos)
                                ? input.substr(pos)
                                : input.substr(pos, nl - pos);
    pos = (nl == std::string_view::npos) ? input.size() : nl + 1;
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("invalid json: ") + e.what(), lineno, "json");
    }
    FrameRecord f;
    if (!j.contains("i") || !j["i"].is_number_integer())
      throw ParseError("invalid frame index", lineno, "i");
    f.index = j["i"].get<std::size_t>();
    if (!j.contains("size") || !j["size"].is_number_integer())
      throw ParseError("invalid frame size", lineno, "size");
    f.size_bytes = j["size"].get<std::uint64_t>();
    if (!j.contains("first_tx_us") || !j["first_tx_us"].is_number_integer())
      throw ParseError("invalid first_tx_us", lineno, "first_tx_us");
    f.first_tx_us = j["first_tx_us"].get<std::int64_t>();
    f.last_tx_us = f.first_tx_us;
    if (j.contains("latency_us") && j["latency_us"].is_number_integer()) {
      f.latency_us = j["latency_us"].get<std::int64_t>();
      f.ack_times_us.push_back(f.first_tx_us + *f.latency_us);
    }
    fs.frames.push_back(std::move(f));
  }
  if (fs.frames.empty()) throw ParseError("empty frame sequence");
  return fs;
}

}  // namespace vrtraffic
