// End-to-end walkthrough: fit models to an analyzed stream, regenerate
// traffic from them, throttle it, and compare the reports.

#include <iostream>
#include <vector>

#include "vrtraffic/vrtraffic.hpp"

using namespace vrtraffic;

int main() {
  // 1. Synthesize a reference stream (stands in for a captured trace).
  TrafficModel model;
  model.size_model = {10.94, 0.13};       // frame sizes, bytes
  model.iat_model = {10.56, 19.21, 0.61};  // inter-arrival, ms
  model.duration_s = 10.0;
  model.seed = 42;
  model.burst_mode = BurstMode::TwoBurst;
  const PacketTrace captured = generate_trace(model);
  std::cout << "generated " << captured.packets.size() << " packets\n";

  // 2. Identify frames and fit fresh models to what the analyzer sees.
  const AnalysisResult analysis = analyze_trace(captured);
  std::vector<double> sizes, iats_ms;
  for (const FrameRecord& f : analysis.frames.frames)
    sizes.push_back(static_cast<double>(f.size_bytes));
  for (std::int64_t v : inter_arrival_times(analysis.frames))
    iats_ms.push_back(static_cast<double>(v) / 1000.0);
  const FitResult size_fit = fit_loglogistic(sizes);
  const FitResult iat_fit = fit_burr(iats_ms);
  std::cout << "size model: " << model_to_json(size_fit) << "\n";
  std::cout << "iat model:  " << model_to_json(iat_fit) << "\n";

  // 3. Replay the stream through progressively tighter links.
  LinkConfig link;
  link.base_owd_us = 500;
  std::vector<MetricsReport> reports;
  for (double capacity : {1000.0, 54.0, 40.5, 27.0}) {
    link.capacity_mbps = capacity;
    const SimResult sim = simulate_link(captured, link);
    PacketTrace view = sim.server_view;
    view.metadata["game"] = "demo";
    view.metadata["limit"] =
        capacity >= 1000.0 ? "Normal" : std::to_string(capacity).substr(0, 4);
    reports.push_back(summarize(view));
  }

  // 4. Render the comparison table (the analyzer's view of each run).
  std::cout << "\n" << render_reports_markdown(reports);

  // 5. The sweep view: frame loss plus the link's true burst-to-ACK latency.
  const std::vector<double> capacities{54.0, 40.5, 27.0};
  std::cout << "\n" << sweep_to_csv(capacity_sweep(captured, capacities, link));
  return 0;
}
