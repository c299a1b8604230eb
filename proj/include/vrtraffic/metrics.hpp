#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vrtraffic/errors.hpp"
#include "vrtraffic/flow_classify.hpp"
#include "vrtraffic/frame_ident.hpp"
#include "vrtraffic/packet.hpp"

namespace vrtraffic {

// Assigns each uplink ACK (len <= ack_max_len) to the earliest frame whose
// window [first_tx(f), first_tx(f+1) + ack_grace) contains its timestamp; the
// last frame's window is open-ended. ACKs before the first frame are dropped.
// Fills per-frame ack_times and latency (last ACK - first TX).
inline FrameSequence match_acks(FrameSequence fs,
                                std::span<const PacketRecord> video_uplink,
                                const AnalyzerConfig& cfg = {}) {
  cfg.validate();
  for (std::size_t i = 1; i < video_uplink.size(); ++i)
    if (video_uplink[i].ts_us < video_uplink[i - 1].ts_us)
      throw DomainError("uplink packets not sorted by timestamp");

  auto window_end = [&](std::size_t i) {
    return i + 1 < fs.frames.size()
               ? fs.frames[i + 1].first_tx_us + cfg.ack_grace_us
               : std::numeric_limits<std::int64_t>::max();
  };

  std::size_t fi = 0;
  for (const PacketRecord& p : video_uplink) {
    if (p.len > cfg.ack_max_len) continue;
    if (fs.frames.empty()) break;
    while (fi < fs.frames.size() - 1 && window_end(fi) <= p.ts_us) ++fi;
    if (p.ts_us < fs.frames[fi].first_tx_us) continue;  // precedes every frame
    fs.frames[fi].ack_times_us.push_back(p.ts_us);
  }
  for (FrameRecord& f : fs.frames)
    if (!f.ack_times_us.empty())
      f.latency_us = f.ack_times_us.back() - f.first_tx_us;
  return fs;
}

// Fraction of frames with no matched ACK.
inline double frame_loss_rate(const FrameSequence& fs) {
  if (fs.frames.empty()) throw DomainError("no frames");
  std::size_t unacked = 0;
  for (const FrameRecord& f : fs.frames)
    if (!f.acked()) ++unacked;
  return static_cast<double>(unacked) / static_cast<double>(fs.frames.size());
}

// Per acked frame: last ACK RX time minus first data TX time.
inline std::vector<std::int64_t> frame_latencies_us(const FrameSequence& fs) {
  std::vector<std::int64_t> out;
  for (const FrameRecord& f : fs.frames)
    if (f.latency_us) out.push_back(*f.latency_us);
  if (out.empty()) throw DomainError("no latency samples");
  return out;
}

struct MetricsReport {
  double avg_frame_size = 0.0;     // bytes
  double data_rate = 0.0;          // Mbps (10^6 bits/s)
  double avg_inter_arrival = 0.0;  // ms
  double frame_loss_rate = 0.0;    // fraction in [0,1]
  std::optional<double> avg_frame_latency;  // ms; empty when nothing was acked
  std::uint64_t frame_count = 0;
  double duration = 0.0;  // s, video downlink first-to-last packet
  std::map<std::string, std::string> labels;
};

struct AnalysisResult {
  FlowMap flows;
  FrameSequence frames;
  MetricsReport report;
};

// Full pipeline on one trace: classify flows, identify frames on the video
// downlink, match ACKs from the video uplink, compute the report.
inline AnalysisResult analyze_trace(const PacketTrace& trace,
                                    const AnalyzerConfig& cfg = {},
                                    const ClassifyConfig& classify_cfg = {}) {
  cfg.validate();
  AnalysisResult result;
  result.flows = classify_flows(trace, classify_cfg);
  const PortPair video = *result.flows.video_ports();

  std::vector<PacketRecord> downlink, uplink;
  for (const PacketRecord& p : trace.packets) {
    if (port_pair(p) != video) continue;
    (p.dir == Direction::Downlink ? downlink : uplink).push_back(p);
  }

  result.frames = identify_frames(downlink, cfg);
  result.frames = match_acks(std::move(result.frames), uplink, cfg);

  const std::int64_t duration_us =
      downlink.back().ts_us - downlink.front().ts_us;
  if (duration_us <= 0) throw DomainError("zero-duration video flow");

  std::uint64_t total_bytes = 0;
  for (const PacketRecord& p : downlink) total_bytes += p.len;

  MetricsReport& r = result.report;
  r.frame_count = result.frames.frames.size();
  r.avg_frame_size = static_cast<double>(total_bytes) /
                     static_cast<double>(r.frame_count);
  // bytes * 8 / duration_us is bits per microsecond, i.e. Mbps.
  r.data_rate = static_cast<double>(total_bytes) * 8.0 /
                static_cast<double>(duration_us);
  r.duration = static_cast<double>(duration_us) / 1e6;

  const std::vector<std::int64_t> iats = inter_arrival_times(result.frames);
  double iat_sum = 0.0;
  for (std::int64_t v : iats) iat_sum += static_cast<double>(v);
  r.avg_inter_arrival = iat_sum / static_cast<double>(iats.size()) / 1000.0;

  r.frame_loss_rate = frame_loss_rate(result.frames);

  double latency_sum = 0.0;
  std::size_t latency_count = 0;
  for (const FrameRecord& f : result.frames.frames) {
    if (!f.latency_us) continue;
    latency_sum += static_cast<double>(*f.latency_us);
    ++latency_count;
  }
  if (latency_count > 0)
    r.avg_frame_latency = latency_sum / static_cast<double>(latency_count) / 1000.0;

  r.labels = trace.metadata;
  return result;
}

inline MetricsReport summarize(const PacketTrace& trace,
                               const AnalyzerConfig& cfg = {},
                               const ClassifyConfig& classify_cfg = {}) {
  return analyze_trace(trace, cfg, classify_cfg).report;
}

inline std::string report_to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["avg_frame_size"] = r.avg_frame_size;
  j["data_rate"] = r.data_rate;
  j["avg_inter_arrival"] = r.avg_inter_arrival;
  j["frame_loss_rate"] = r.frame_loss_rate;
  if (r.avg_frame_latency) {
    j["avg_frame_latency"] = *r.avg_frame_latency;
  } else {
    j["avg_frame_latency"] = nullptr;
  }
  j["frame_count"] = r.frame_count;
  j["duration"] = r.duration;
  j["labels"] = r.labels;
  return j.dump();
}

inline MetricsReport report_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid report json: ") + e.what());
  }
  auto need = [&](const char* key) -> double {
    if (!j.contains(key) || !j[key].is_number())
      throw ParseError("report json missing numeric field", 0, key);
    return j[key].get<double>();
  };
  MetricsReport r;
  r.avg_frame_size = need("avg_frame_size");
  r.data_rate = need("data_rate");
  r.avg_inter_arrival = need("avg_inter_arrival");
  r.frame_loss_rate = need("frame_loss_rate");
  if (j.contains("avg_frame_latency") && j["avg_frame_latency"].is_number())
    r.avg_frame_latency = j["avg_frame_latency"].get<double>();
  r.frame_count = static_cast<std::uint64_t>(need("frame_count"));
  r.duration = need("duration");
  if (j.contains("labels") && j["labels"].is_object())
    for (const auto& [key, value] : j["labels"].items())
      r.labels[key] = value.get<std::string>();
  return r;
}

// Flat CSV, one row per report. Label keys become leading columns (the
// sorted union across reports).
inline std::string reports_to_csv(std::span<const MetricsReport> reports) {
  std::set<std::string> label_keys;
  for (const MetricsReport& r : reports)
    for (const auto& [key, value] : r.labels) label_keys.insert(key);

  std::string out;
  for (const std::string& key : label_keys) {
    out += key;
    out.push_back(',');
  }
  out +=
      "avg_frame_size,data_rate,avg_inter_arrival,frame_loss_rate,"
      "avg_frame_latency,frame_count,duration\n";

  char buf[64];
  auto fmt = [&](double v, const char* format) {
    std::snprintf(buf, sizeof buf, format, v);
    out += buf;
  };
  for (const MetricsReport& r : reports) {
    for (const std::string& key : label_keys) {
      auto it = r.labels.find(key);
      if (it != r.labels.end()) out += it->second;
      out.push_back(',');
    }
    fmt(r.avg_frame_size, "%.1f");
    out.push_back(',');
    fmt(r.data_rate, "%.4f");
    out.push_back(',');
    fmt(r.avg_inter_arrival, "%.4f");
    out.push_back(',');
    fmt(r.frame_loss_rate, "%.6f");
    out.push_back(',');
    if (r.avg_frame_latency) fmt(*r.avg_frame_latency, "%.4f");
    out.push_back(',');
    out += std::to_string(r.frame_count);
    out.push_back(',');
    fmt(r.duration, "%.6f");
    out.push_back('\n');
  }
  return out;
}

}  // namespace vrtraffic
