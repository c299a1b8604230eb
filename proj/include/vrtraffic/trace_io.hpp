#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "vrtraffic/errors.hpp"
#include "vrtraffic/packet.hpp"

namespace vrtraffic {

enum class TraceFormat { Csv, Jsonl };

inline constexpr std::string_view kCsvHeader = "ts_us,dir,src_port,dst_port,len";

namespace detail {

// Strict non-negative decimal integer: digits only, no sign, no whitespace.
inline bool parse_uint(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

inline PacketRecord parse_csv_row(std::string_view line, std::size_t lineno) {
  std::string_view fields[5];
  std::size_t n_fields = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      if (n_fields == 5) throw ParseError("too many fields", lineno, "row");
      fields[n_fields++] = line.substr(start, i - start);
      start = i + 1;
    }
  }
  if (n_fields != 5) throw ParseError("expected 5 fields", lineno, "row");

  PacketRecord p;
  std::uint64_t v = 0;
  if (!parse_uint(fields[0], v) || v > static_cast<std::uint64_t>(INT64_MAX))
    throw ParseError("invalid timestamp", lineno, "ts");
  p.ts_us = static_cast<std::int64_t>(v);

  if (fields[1] == "D") {
    p.dir = Direction::Downlink;
  } else if (fields[1] == "U") {
    p.dir = Direction::Uplink;
  } else {
    throw ParseError("direction must be D or U", lineno, "dir");
  }

  if (!parse_uint(fields[2], v) || v > 65535)
    throw ParseError("invalid port", lineno, "src_port");
  p.src_port = static_cast<std::uint16_t>(v);
  if (!parse_uint(fields[3], v) || v > 65535)
    throw ParseError("invalid port", lineno, "dst_port");
  p.dst_port = static_cast<std::uint16_t>(v);

  if (!parse_uint(fields[4], v) || v == 0 || v > UINT32_MAX)
    throw ParseError("invalid length", lineno, "len");
  p.len = static_cast<std::uint32_t>(v);
  return p;
}

inline PacketRecord parse_jsonl_row(std::string_view line, std::size_t lineno) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid json: ") + e.what(), lineno, "json");
  }
  if (!j.is_object()) throw ParseError("expected a json object", lineno, "json");
  for (const auto& [key, ignored] : j.items()) {
    if (key != "ts_us" && key != "dir" && key != "src_port" &&
        key != "dst_port" && key != "len")
      throw ParseError("unexpected key", lineno, key);
  }

  PacketRecord p;
  if (!j.contains("ts_us") || !j["ts_us"].is_number_integer() ||
      j["ts_us"].get<std::int64_t>() < 0)
    throw ParseError("invalid timestamp", lineno, "ts_us");
  p.ts_us = j["ts_us"].get<std::int64_t>();

  if (!j.contains("dir") || !j["dir"].is_string())
    throw ParseError("direction must be D or U", lineno, "dir");
  const std::string dir = j["dir"].get<std::string>();
  if (dir == "D") {
    p.dir = Direction::Downlink;
  } else if (dir == "U") {
    p.dir = Direction::Uplink;
  } else {
    throw ParseError("direction must be D or U", lineno, "dir");
  }

  auto get_port = [&](const char* key) -> std::uint16_t {
    if (!j.contains(key) || !j[key].is_number_integer())
      throw ParseError("invalid port", lineno, key);
    const std::int64_t v = j[key].get<std::int64_t>();
    if (v < 0 || v > 65535) throw ParseError("invalid port", lineno, key);
    return static_cast<std::uint16_t>(v);
  };
  p.src_port = get_port("src_port");
  p.dst_port = get_port("dst_port");

  if (!j.contains("len") || !j["len"].is_number_integer())
    throw ParseError("invalid length", lineno, "len");
  const std::int64_t len = j["len"].get<std::int64_t>();
  if (len < 1 || len > static_cast<std::int64_t>(UINT32_MAX))
    throw ParseError("invalid length", lineno, "len");
  p.len = static_cast<std::uint32_t>(len);
  return p;
}

}  // namespace detail

// Accepts the canonical header on line 1 (skipped) or headerless rows.
// Rows are kept in file order, then stably sorted by timestamp.
inline PacketTrace parse_trace(std::string_view input, TraceFormat format) {
  PacketTrace trace;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  bool saw_line = false;
  while (pos <= input.size()) {
    if (pos == input.size()) {
      break;  // no trailing line after final newline
    }
    std::size_t nl = input.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos)
                                ? input.substr(pos)
                                : input.substr(pos, nl - pos);
    pos = (nl == std::string_view::npos) ? input.size() : nl + 1;
    ++lineno;
    saw_line = true;
    if (format == TraceFormat::Csv && lineno == 1 && line == kCsvHeader)
      continue;
    if (line.empty()) throw ParseError("empty line", lineno, "row");
    trace.packets.push_back(format == TraceFormat::Csv
                                ? detail::parse_csv_row(line, lineno)
                                : detail::parse_jsonl_row(line, lineno));
  }
  if (!saw_line) throw ParseError("empty trace");
  sort_by_ts(trace);
  return trace;
}

inline std::string write_trace(const PacketTrace& trace, TraceFormat format) {
  std::string out;
  out.reserve(trace.packets.size() * 32 + 32);
  if (format == TraceFormat::Csv) {
    out.append(kCsvHeader);
    out.push_back('\n');
    for (const PacketRecord& p : trace.packets) {
      out += std::to_string(p.ts_us);
      out.push_back(',');
      out.push_back(direction_char(p.dir));
      out.push_back(',');
      out += std::to_string(p.src_port);
      out.push_back(',');
      out += std::to_string(p.dst_port);
      out.push_back(',');
      out += std::to_string(p.len);
      out.push_back('\n');
    }
  } else {
    for (const PacketRecord& p : trace.packets) {
      nlohmann::ordered_json j;
      j["ts_us"] = p.ts_us;
      j["dir"] = std::string(1, direction_char(p.dir));
      j["src_port"] = p.src_port;
      j["dst_port"] = p.dst_port;
      j["len"] = p.len;
      out += j.dump();
      out.push_back('\n');
    }
  }
  return out;
}

inline TraceFormat trace_format_from_path(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") return TraceFormat::Csv;
  if (ext == ".jsonl" || ext == ".ndjson") return TraceFormat::Jsonl;
  throw ParseError("cannot infer trace format from extension '" + ext +
                   "' (expected .csv or .jsonl): " + path.string());
}

inline PacketTrace load_trace_file(const std::filesystem::path& path,
                                   TraceFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str(), format);
}

inline PacketTrace load_trace_file(const std::filesystem::path& path) {
  return load_trace_file(path, trace_format_from_path(path));
}

inline void save_trace_file(const PacketTrace& trace,
                            const std::filesystem::path& path,
                            TraceFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open file for writing: " + path.string());
  out << write_trace(trace, format);
}

inline void save_trace_file(const PacketTrace& trace,
                            const std::filesystem::path& path) {
  save_trace_file(trace, path, trace_format_from_path(path));
}

}  // namespace vrtraffic
