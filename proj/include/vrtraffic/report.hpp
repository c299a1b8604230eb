#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vrtraffic/metrics.hpp"

namespace vrtraffic {

namespace detail {

struct MetricColumn {
  const char* title;
  const char* fmt;
  double (*get)(const MetricsReport&);
};

inline const MetricColumn kMetricColumns[] = {
    {"Avg. frame size (byte)", "%.0f",
     [](const MetricsReport& r) { return r.avg_frame_size; }},
    {"Data rate (Mbps)", "%.2f",
     [](const MetricsReport& r) { return r.data_rate; }},
    {"Avg. frame inter-arrival time (ms)", "%.1f",
     [](const MetricsReport& r) { return r.avg_inter_arrival; }},
    {"Frame loss rate (%)", "%.2f",
     [](const MetricsReport& r) { return r.frame_loss_rate * 100.0; }},
    {"Avg. frame latency (ms)", "%.1f",
     [](const MetricsReport& r) {
       return r.avg_frame_latency ? *r.avg_frame_latency : -1.0;
     }},
};

inline std::string format_metric(const MetricsReport& r, const MetricColumn& m) {
  if (m.get == kMetricColumns[4].get && !r.avg_frame_latency) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, m.fmt, m.get(r));
  return buf;
}

inline std::string column_key(const MetricsReport& r) {
  auto game = r.labels.find("game");
  std::string key = game != r.labels.end() ? game->second : "?";
  if (auto c = r.labels.find("case"); c != r.labels.end())
    key += " / " + c->second;
  if (auto m = r.labels.find("mode"); m != r.labels.end())
    key += " (" + m->second + ")";
  return key;
}

}  // namespace detail

// Markdown comparison table. When every report carries "game" and "limit"
// labels the table pivots into metric blocks: one row per limit, one column
// per game (and case/mode, when labeled). Otherwise one flat row per report.
inline std::string render_reports_markdown(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw DomainError("no reports to render");

  const bool pivot = std::all_of(
      reports.begin(), reports.end(), [](const MetricsReport& r) {
        return r.labels.count("game") && r.labels.count("limit");
      });

  std::string out;
  if (!pivot) {
    out += "| Source | Frames | Avg. frame size (byte) | Data rate (Mbps) | "
           "Avg. inter-arrival (ms) | Frame loss rate (%) | Avg. latency (ms) |\n";
    out += "|---|---|---|---|---|---|---|\n";
    std::size_t idx = 0;
    for (const MetricsReport& r : reports) {
      std::string source;
      for (const auto& [key, value] : r.labels) {
        if (!source.empty()) source += " ";
        source += key + "=" + value;
      }
      if (source.empty()) source = "report " + std::to_string(idx);
      out += "| " + source + " | " + std::to_string(r.frame_count);
      for (const auto& metric : detail::kMetricColumns)
        out += " | " + detail::format_metric(r, metric);
      out += " |\n";
      ++idx;
    }
    return out;
  }

  // first-seen orders keep the caller's arrangement
  std::vector<std::string> columns, limits;
  std::map<std::pair<std::string, std::string>, const MetricsReport*> cells;
  for (const MetricsReport& r : reports) {
    const std::string col = detail::column_key(r);
    const std::string limit = r.labels.at("limit");
    if (std::find(columns.begin(), columns.end(), col) == columns.end())
      columns.push_back(col);
    if (std::find(limits.begin(), limits.end(), limit) == limits.end())
      limits.push_back(limit);
    cells[{col, limit}] = &r;
  }

  out += "| Metric | Data rate limit |";
  for (const std::string& col : columns) out += " " + col + " |";
  out += "\n|---|---|";
  for (std::size_t i = 0; i < columns.size(); ++i) out += "---|";
  out += "\n";

  for (const auto& metric : detail::kMetricColumns) {
    bool first = true;
    for (const std::string& limit : limits) {
      out += first ? "| " + std::string(metric.title) + " | " : "|  | ";
      out += limit + " |";
      for (const std::string& col : columns) {
        auto it = cells.find({col, limit});
        out += " ";
        out += it != cells.end() ? detail::format_metric(*it->second, metric) : "-";
        out += " |";
      }
      out += "\n";
      first = false;
    }
  }
  return out;
}

}  // namespace vrtraffic
