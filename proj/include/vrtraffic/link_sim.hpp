#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vrtraffic/errors.hpp"
#include "vrtraffic/metrics.hpp"
#include "vrtraffic/packet.hpp"

namespace vrtraffic {

inline constexpr std::uint32_t kAckLen = 60;
inline constexpr double kDefaultSweepMbps[] = {54.0, 40.5, 27.0};

struct LinkConfig {
  double capacity_mbps = 54.0;
  std::uint64_t queue_limit_bytes = 256 * 1024;  // tail-drop threshold
  std::int64_t base_owd_us = 100;                // one-way propagation, each way
  std::int64_t ack_turnaround_us = 0;            // receiver processing per ACK

  void validate() const {
    if (!(capacity_mbps > 0.0)) throw DomainError("capacity must be positive");
    if (queue_limit_bytes <= 1514)
      throw DomainError("queue limit must exceed one MTU");
    if (base_owd_us < 0 || ack_turnaround_us < 0)
      throw DomainError("delays must be non-negative");
  }
};

struct SimResult {
  // Input downlink at original TX times plus ACKs at server RX times: what a
  // capture point at the server sees, ready for analyze/summarize.
  PacketTrace server_view;
  // Delivered downlink packets stamped with their headset arrival times.
  PacketTrace delivered;
  std::uint64_t dropped_packets = 0;
  std::vector<std::int64_t> delays_us;  // per delivered packet
  // Ground-truth first-TX-to-ACK-RX time per fully delivered burst. Unlike a
  // windowed ACK matcher, the simulator knows which burst each ACK answers,
  // so this stays meaningful when queueing delay exceeds the inter-arrival.
  std::vector<std::int64_t> ack_latencies_us;
};

// Rate-limited FIFO with byte-count tail drop. Serialization takes
// len*8/capacity µs; a packet arriving when queued bytes + len would exceed
// the limit is dropped. One 60 B ACK per same-timestamp packet group, emitted
// only when the whole group is delivered, at the last arrival + turnaround +
// one-way delay (the uplink itself is ideal).
inline SimResult simulate_link(const PacketTrace& input, const LinkConfig& cfg) {
  cfg.validate();
  if (input.packets.empty()) throw DomainError("empty trace");
  if (!is_sorted_by_ts(input.packets))
    throw DomainError("input packets not sorted by timestamp");
  for (const PacketRecord& p : input.packets)
    if (p.dir != Direction::Downlink)
      throw DomainError("link input must be downlink-only");

  const std::size_t n = input.packets.size();
  SimResult result;
  result.delivered.packets.reserve(n);
  result.delays_us.reserve(n);

  std::vector<double> arrival(n, -1.0);  // headset arrival, -1 = dropped
  std::deque<std::pair<double, std::uint32_t>> in_flight;  // (departure, len)
  std::uint64_t queued_bytes = 0;
  double busy_until = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const PacketRecord& p = input.packets[i];
    const auto now = static_cast<double>(p.ts_us);
    while (!in_flight.empty() && in_flight.front().first <= now) {
      queued_bytes -= in_flight.front().second;
      in_flight.pop_front();
    }
    if (queued_bytes + p.len > cfg.queue_limit_bytes) {
      result.dropped_packets += 1;
      continue;
    }
    const double serialization = static_cast<double>(p.len) * 8.0 / cfg.capacity_mbps;
    const double departure = std::max(now, busy_until) + serialization;
    busy_until = departure;
    in_flight.emplace_back(departure, p.len);
    queued_bytes += p.len;

    arrival[i] = departure + static_cast<double>(cfg.base_owd_us);
    PacketRecord delivered = p;
    delivered.ts_us = std::llround(arrival[i]);
    result.delivered.packets.push_back(delivered);
    result.delays_us.push_back(delivered.ts_us - p.ts_us);
  }

  // ACKs per fully-delivered same-timestamp group.
  std::vector<PacketRecord> acks;
  std::size_t begin = 0;
  while (begin < n) {
    std::size_t end = begin + 1;
    while (end < n && input.packets[end].ts_us == input.packets[begin].ts_us)
      ++end;
    bool all_delivered = true;
    double last_arrival = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      if (arrival[i] < 0.0) {
        all_delivered = false;
        break;
      }
      last_arrival = std::max(last_arrival, arrival[i]);
    }
    if (all_delivered) {
      PacketRecord ack;
      ack.ts_us = std::llround(last_arrival +
                               static_cast<double>(cfg.ack_turnaround_us) +
                               static_cast<double>(cfg.base_owd_us));
      ack.dir = Direction::Uplink;
      ack.src_port = input.packets[begin].dst_port;
      ack.dst_port = input.packets[begin].src_port;
      ack.len = kAckLen;
      acks.push_back(ack);
      result.ack_latencies_us.push_back(ack.ts_us - input.packets[begin].ts_us);
    }
    begin = end;
  }

  result.server_view.packets = input.packets;
  result.server_view.packets.insert(result.server_view.packets.end(),
                                    acks.begin(), acks.end());
  result.server_view.metadata = input.metadata;
  sort_by_ts(result.server_view);
  return result;
}

struct SweepRow {
  double capacity_mbps = 0.0;
  double loss_rate = 0.0;  // analyzer-measured frame loss on the server view
  std::optional<double> avg_latency_ms;  // mean ground-truth burst-to-ACK time
};

// Runs the simulator at each capacity. Loss comes from the frame analyzer on
// the server view; latency comes from the simulator's own burst-to-ACK times,
// which stay attributable under heavy queueing.
inline std::vector<SweepRow> capacity_sweep(const PacketTrace& input,
                                            std::span<const double> capacities,
                                            LinkConfig base_cfg = {},
                                            const AnalyzerConfig& analyzer = {}) {
  std::vector<SweepRow> rows;
  rows.reserve(capacities.size());
  for (double capacity : capacities) {
    LinkConfig cfg = base_cfg;
    cfg.capacity_mbps = capacity;
    const SimResult sim = simulate_link(input, cfg);
    const MetricsReport report = summarize(sim.server_view, analyzer);
    SweepRow row;
    row.capacity_mbps = capacity;
    row.loss_rate = report.frame_loss_rate;
    if (!sim.ack_latencies_us.empty()) {
      double sum = 0.0;
      for (std::int64_t v : sim.ack_latencies_us) sum += static_cast<double>(v);
      row.avg_latency_ms =
          sum / static_cast<double>(sim.ack_latencies_us.size()) / 1000.0;
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::string sweep_to_csv(std::span<const SweepRow> rows) {
  std::string out = "capacity_mbps,loss_rate,avg_latency_ms\n";
  char buf[64];
  for (const SweepRow& row : rows) {
    std::snprintf(buf, sizeof buf, "%g,%.6f,", row.capacity_mbps, row.loss_rate);
    out += buf;
    if (row.avg_latency_ms) {
      std::snprintf(buf, sizeof buf, "%.3f", *row.avg_latency_ms);
      out += buf;
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace vrtraffic
