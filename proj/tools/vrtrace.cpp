// vrtrace: analyze VR streaming packet traces, fit traffic models, generate
// synthetic traces, and replay them through a bottleneck-link simulator.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vrtraffic/vrtraffic.hpp"

namespace fs = std::filesystem;
using namespace vrtraffic;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitParse = 2;
constexpr int kExitDomain = 3;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Write via a temp file + rename so partial output never lands at `path`.
void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DomainError("cannot open file for writing: " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

void emit(const std::optional<std::string>& out_path, const std::string& content) {
  if (out_path) {
    write_file_atomic(*out_path, content);
  } else {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
  }
}

TraceFormat resolve_format(const std::string& flag, const fs::path& path) {
  if (flag == "csv") return TraceFormat::Csv;
  if (flag == "jsonl") return TraceFormat::Jsonl;
  return trace_format_from_path(path);
}

std::map<std::string, std::string> parse_labels(
    const std::vector<std::string>& kvs) {
  std::map<std::string, std::string> labels;
  for (const std::string& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw DomainError("--label expects key=value, got '" + kv + "'");
    labels[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return labels;
}

struct AnalyzeArgs {
  std::vector<std::string> inputs;
  std::string input_format = "auto";
  std::string output_format = "json";
  std::optional<std::string> out;
  std::optional<std::string> out_dir;
  std::optional<std::string> frames_out;
  std::optional<std::string> flows_out;
  double delta_t_thr_ms = 3.0;
  std::uint32_t mtu = 1514;
  std::uint32_t ack_max_len = 60;
  std::int64_t ack_grace_us = 0;
  std::vector<std::string> labels;
};

AnalyzerConfig analyzer_config(const AnalyzeArgs& args) {
  AnalyzerConfig cfg;
  cfg.delta_t_thr_us = std::llround(args.delta_t_thr_ms * 1000.0);
  cfg.mtu_len = args.mtu;
  cfg.ack_max_len = args.ack_max_len;
  cfg.ack_grace_us = args.ack_grace_us;
  cfg.validate();
  return cfg;
}

std::string analyze_one(const AnalyzeArgs& args, const fs::path& input,
                        const AnalyzerConfig& cfg,
                        const std::map<std::string, std::string>& labels,
                        const std::optional<std::string>& frames_out,
                        const std::optional<std::string>& flows_out) {
  PacketTrace trace =
      parse_trace(read_file(input), resolve_format(args.input_format, input));
  for (const auto& [key, value] : labels) trace.metadata[key] = value;

  ClassifyConfig classify_cfg;
  classify_cfg.video_mtu_len = args.mtu;
  const AnalysisResult result = analyze_trace(trace, cfg, classify_cfg);

  if (frames_out) write_file_atomic(*frames_out, frames_to_jsonl(result.frames));
  if (flows_out) write_file_atomic(*flows_out, flow_map_to_json(result.flows) + "\n");

  if (args.output_format == "csv") {
    const MetricsReport reports[] = {result.report};
    return reports_to_csv(reports);
  }
  return report_to_json(result.report) + "\n";
}

int run_analyze(const AnalyzeArgs& args) {
  const AnalyzerConfig cfg = analyzer_config(args);
  const auto labels = parse_labels(args.labels);

  if (args.inputs.size() == 1) {
    const std::string out =
        analyze_one(args, args.inputs[0], cfg, labels, args.frames_out, args.flows_out);
    emit(args.out, out);
    return kExitOk;
  }

  // several traces: one report file per input, processed in parallel
  if (!args.out_dir)
    throw DomainError("analyzing multiple traces requires --out-dir");
  fs::create_directories(*args.out_dir);
  std::vector<std::future<void>> jobs;
  jobs.reserve(args.inputs.size());
  for (const std::string& input : args.inputs) {
    jobs.push_back(std::async(std::launch::async, [&, input] {
      const fs::path in_path = input;
      const fs::path out_path =
          fs::path(*args.out_dir) / (in_path.stem().string() + ".report.json");
      const std::string report =
          analyze_one(args, in_path, cfg, labels, std::nullopt, std::nullopt);
      write_file_atomic(out_path, report);
    }));
  }
  for (auto& job : jobs) job.get();
  return kExitOk;
}

struct FitArgs {
  std::string input;
  std::string dist;
  std::string field;
  int bins = 100;
  std::optional<std::string> out;
};

int run_fit(const FitArgs& args) {
  const FrameSequence frames = frames_from_jsonl(read_file(args.input));

  std::vector<double> samples;
  if (args.field == "size") {
    samples.reserve(frames.frames.size());
    for (const FrameRecord& f : frames.frames)
      samples.push_back(static_cast<double>(f.size_bytes));
  } else {  // iat, in milliseconds
    const auto iats = inter_arrival_times(frames);
    samples.reserve(iats.size());
    for (std::int64_t v : iats) samples.push_back(static_cast<double>(v) / 1000.0);
  }

  FitOptions opt;
  opt.bins = args.bins;
  const FitResult fit = args.dist == "loglogistic" ? fit_loglogistic(samples, opt)
                                                   : fit_burr(samples, opt);
  std::cerr << "fitted " << args.dist << " on " << samples.size() << " " << args.field
            << " samples, r2=" << fit.r_squared << "\n";
  emit(args.out, model_to_json(fit) + "\n");
  return kExitOk;
}

struct GenerateArgs {
  std::string size_model_path;
  std::string iat_model_path;
  double duration_s = 30.0;
  std::uint64_t seed = 1;
  std::string burst_mode = "single";
  std::int64_t intra_burst_gap_us = 1500;
  std::string output_format = "csv";
  std::optional<std::string> out;
};

int run_generate(const GenerateArgs& args) {
  const ModelFile size_model = model_from_json(read_file(args.size_model_path));
  const ModelFile iat_model = model_from_json(read_file(args.iat_model_path));
  if (!size_model.model.is_loglogistic())
    throw DomainError("--size-model must be a loglogistic model");
  if (iat_model.model.is_loglogistic())
    throw DomainError("--iat-model must be a burr model");

  TrafficModel model;
  model.size_model = std::get<LogLogisticParams>(size_model.model.params);
  model.iat_model = std::get<BurrParams>(iat_model.model.params);
  model.duration_s = args.duration_s;
  model.seed = args.seed;
  model.burst_mode =
      args.burst_mode == "two" ? BurstMode::TwoBurst : BurstMode::SingleBurst;
  model.intra_burst_gap_us = args.intra_burst_gap_us;

  const PacketTrace trace = generate_trace(model);
  std::cerr << "generated " << trace.packets.size() << " packets over "
            << args.duration_s << " s (seed " << args.seed << ")\n";
  emit(args.out, write_trace(trace, args.output_format == "jsonl"
                                        ? TraceFormat::Jsonl
                                        : TraceFormat::Csv));
  return kExitOk;
}

struct SimulateArgs {
  std::vector<std::string> inputs;
  std::string input_format = "auto";
  double capacity_mbps = 54.0;
  double queue_kib = 256.0;
  std::int64_t owd_us = 100;
  std::int64_t ack_turnaround_us = 0;
  bool sweep = false;
  std::vector<double> sweep_capacities;
  std::optional<std::string> out;
  std::optional<std::string> out_dir;
  std::optional<std::string> delivered_out;
  double delta_t_thr_ms = 3.0;
};

PacketTrace load_downlink(const SimulateArgs& args, const fs::path& input) {
  const PacketTrace full =
      parse_trace(read_file(input), resolve_format(args.input_format, input));
  PacketTrace downlink;
  downlink.metadata = full.metadata;
  for (const PacketRecord& p : full.packets)
    if (p.dir == Direction::Downlink) downlink.packets.push_back(p);
  return downlink;
}

LinkConfig link_config(const SimulateArgs& args) {
  LinkConfig cfg;
  cfg.capacity_mbps = args.capacity_mbps;
  cfg.queue_limit_bytes = static_cast<std::uint64_t>(args.queue_kib * 1024.0);
  cfg.base_owd_us = args.owd_us;
  cfg.ack_turnaround_us = args.ack_turnaround_us;
  return cfg;
}

std::string simulate_one(const SimulateArgs& args, const fs::path& input,
                         const std::optional<std::string>& delivered_out) {
  const PacketTrace downlink = load_downlink(args, input);
  if (args.sweep) {
    std::vector<double> caps = args.sweep_capacities;
    if (caps.empty())
      caps.assign(std::begin(kDefaultSweepMbps), std::end(kDefaultSweepMbps));
    AnalyzerConfig analyzer;
    analyzer.delta_t_thr_us = std::llround(args.delta_t_thr_ms * 1000.0);
    return sweep_to_csv(capacity_sweep(downlink, caps, link_config(args), analyzer));
  }
  const SimResult sim = simulate_link(downlink, link_config(args));
  std::cerr << "capacity " << args.capacity_mbps << " Mbps: delivered "
            << sim.delivered.packets.size() << ", dropped " << sim.dropped_packets
            << "\n";
  if (delivered_out)
    write_file_atomic(*delivered_out, write_trace(sim.delivered, TraceFormat::Csv));
  return write_trace(sim.server_view, TraceFormat::Csv);
}

int run_simulate(const SimulateArgs& args) {
  if (args.inputs.size() == 1) {
    emit(args.out, simulate_one(args, args.inputs[0], args.delivered_out));
    return kExitOk;
  }
  if (!args.out_dir)
    throw DomainError("simulating multiple traces requires --out-dir");
  fs::create_directories(*args.out_dir);
  std::vector<std::future<void>> jobs;
  for (const std::string& input : args.inputs) {
    jobs.push_back(std::async(std::launch::async, [&, input] {
      const fs::path in_path = input;
      const char* ext = args.sweep ? ".sweep.csv" : ".delivered.csv";
      const fs::path out_path =
          fs::path(*args.out_dir) / (in_path.stem().string() + ext);
      write_file_atomic(out_path, simulate_one(args, in_path, std::nullopt));
    }));
  }
  for (auto& job : jobs) job.get();
  return kExitOk;
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string format = "markdown";
  std::optional<std::string> out;
};

int run_report(const ReportArgs& args) {
  std::vector<MetricsReport> reports;
  reports.reserve(args.inputs.size());
  for (const std::string& input : args.inputs)
    reports.push_back(report_from_json(read_file(input)));
  emit(args.out, args.format == "csv" ? reports_to_csv(reports)
                                      : render_reports_markdown(reports));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VR streaming traffic toolkit: frame identification, traffic "
               "models, synthesis, and bottleneck-link simulation"};
  app.require_subcommand(1);
  const char* config_env = std::getenv("VRTRACE_CONFIG");
  app.set_config("--config", config_env ? config_env : "",
                 "Config file with default flag values");

  AnalyzeArgs analyze_args;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "Recover frame metrics from a packet trace");
  analyze->add_option("trace", analyze_args.inputs, "Trace file(s) (csv/jsonl)")
      ->required();
  analyze->add_option("--input-format", analyze_args.input_format,
                      "auto|csv|jsonl")
      ->check(CLI::IsMember({"auto", "csv", "jsonl"}));
  analyze->add_option("--format", analyze_args.output_format, "json|csv report")
      ->check(CLI::IsMember({"json", "csv"}));
  analyze->add_option("--out", analyze_args.out, "Report path (default stdout)");
  analyze->add_option("--out-dir", analyze_args.out_dir,
                      "Output directory (required for multiple traces)");
  analyze->add_option("--frames-out", analyze_args.frames_out,
                      "Also write identified frames as JSONL");
  analyze->add_option("--flows-out", analyze_args.flows_out,
                      "Also write the flow classification as JSON");
  analyze->add_option("--delta-t-thr-ms", analyze_args.delta_t_thr_ms,
                      "Frame interval threshold in ms (default 3)");
  analyze->add_option("--mtu", analyze_args.mtu, "MTU-size packet length");
  analyze->add_option("--ack-max-len", analyze_args.ack_max_len,
                      "Max uplink ACK length");
  analyze->add_option("--ack-grace-us", analyze_args.ack_grace_us,
                      "ACK window slack past the next frame start");
  analyze->add_option("--label", analyze_args.labels,
                      "key=value label echoed into the report (repeatable)");

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand(
      "fit", "Fit a traffic model to identified frames (JSONL)");
  fit->add_option("frames", fit_args.input, "Frames JSONL from analyze")
      ->required();
  fit->add_option("--dist", fit_args.dist, "loglogistic|burr")
      ->required()
      ->check(CLI::IsMember({"loglogistic", "burr"}));
  fit->add_option("--field", fit_args.field, "size|iat")
      ->required()
      ->check(CLI::IsMember({"size", "iat"}));
  fit->add_option("--bins", fit_args.bins, "Histogram bins for R^2");
  fit->add_option("--out", fit_args.out, "Model path (default stdout)");

  GenerateArgs gen_args;
  CLI::App* generate = app.add_subcommand(
      "generate", "Synthesize a packet trace from fitted models");
  generate->add_option("--size-model", gen_args.size_model_path,
                       "Loglogistic frame-size model JSON")
      ->required();
  generate->add_option("--iat-model", gen_args.iat_model_path,
                       "Burr inter-arrival model JSON (ms)")
      ->required();
  generate->add_option("--duration", gen_args.duration_s, "Seconds of traffic");
  generate->add_option("--seed", gen_args.seed, "RNG seed");
  generate->add_option("--burst-mode", gen_args.burst_mode, "single|two")
      ->check(CLI::IsMember({"single", "two"}));
  generate->add_option("--intra-burst-gap-us", gen_args.intra_burst_gap_us,
                       "Gap between the two bursts of a frame");
  generate->add_option("--format", gen_args.output_format, "csv|jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  generate->add_option("--out", gen_args.out, "Trace path (default stdout)");

  SimulateArgs sim_args;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Replay a trace through a rate-limited FIFO link");
  simulate->add_option("trace", sim_args.inputs, "Input trace file(s)")
      ->required();
  simulate->add_option("--input-format", sim_args.input_format, "auto|csv|jsonl")
      ->check(CLI::IsMember({"auto", "csv", "jsonl"}));
  simulate->add_option("--capacity-mbps", sim_args.capacity_mbps,
                       "Link capacity (default 54)");
  simulate->add_option("--queue-kib", sim_args.queue_kib,
                       "Tail-drop queue limit in KiB (default 256)");
  simulate->add_option("--owd-us", sim_args.owd_us,
                       "One-way propagation delay (default 100)");
  simulate->add_option("--ack-turnaround-us", sim_args.ack_turnaround_us,
                       "Receiver delay before each ACK");
  simulate->add_flag("--sweep", sim_args.sweep,
                     "Emit a loss/latency CSV over a capacity sweep");
  simulate->add_option("--sweep-capacities", sim_args.sweep_capacities,
                       "Sweep capacities in Mbps (default 54 40.5 27)");
  simulate->add_option("--delta-t-thr-ms", sim_args.delta_t_thr_ms,
                       "Analyzer threshold used for sweep metrics");
  simulate->add_option("--out", sim_args.out, "Output path (default stdout)");
  simulate->add_option("--out-dir", sim_args.out_dir,
                       "Output directory (required for multiple traces)");
  simulate->add_option("--delivered-out", sim_args.delivered_out,
                       "Also write the arrival-stamped delivered trace");

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand(
      "report", "Render a comparison table from report JSON files");
  report->add_option("reports", report_args.inputs, "Report JSON files")
      ->required();
  report->add_option("--format", report_args.format, "markdown|csv")
      ->check(CLI::IsMember({"markdown", "csv"}));
  report->add_option("--out", report_args.out, "Table path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitParse;
  }

  try {
    if (*analyze) return run_analyze(analyze_args);
    if (*fit) return run_fit(fit_args);
    if (*generate) return run_generate(gen_args);
    if (*simulate) return run_simulate(sim_args);
    if (*report) return run_report(report_args);
    return kExitInternal;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
