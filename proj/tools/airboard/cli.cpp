#include "airboard/cli.hpp"

#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "airboard/config.hpp"
#include "airboard/engine.hpp"
#include "airboard/ppm.hpp"
#include "airboard/server.hpp"
#include "airboard/trace.hpp"

namespace airboard::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Flags that override config-file values.
struct Overrides {
  std::optional<double> alpha;
  std::optional<int> warmup;
  std::optional<int> threshold;
  std::optional<int> min_area;
  std::optional<int> dwell;
  std::optional<int> diameter;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App& app) {
    app.add_option("--alpha", alpha, "Background running-average weight (0, 1]");
    app.add_option("--warmup", warmup, "Background warmup frames");
    app.add_option("--threshold", threshold, "Residual threshold 0-255");
    app.add_option("--min-area", min_area, "Smallest contour counted as a hand, in pixels");
    app.add_option("--dwell", dwell, "Frames of hover that activate a VUI button");
    app.add_option("--diameter", diameter, "Pointer diameter in pixels");
    app.add_option("--seed", seed, "Seed for synthetic sources");
  }

  void apply(SessionConfig& c) const {
    if (alpha) c.alpha = *alpha;
    if (warmup) c.warmup_frames = *warmup;
    if (threshold) c.threshold = *threshold;
    if (min_area) c.min_area = *min_area;
    if (dwell) c.dwell_frames = *dwell;
    if (diameter) c.pointer_diameter = *diameter;
    if (seed) c.seed = *seed;
    c.validate();
  }
};

SessionConfig resolve_config(const std::string& path, const Overrides& o) {
  SessionConfig c = path.empty() ? SessionConfig{} : load_config(path);
  o.apply(c);
  return c;
}

int replay(const std::string& trace, const std::string& config_path, const std::string& out_dir,
           const Overrides& o, std::ostream& out) {
  SessionConfig cfg = resolve_config(config_path, o);
  auto source = open_trace(trace);
  fs::create_directories(out_dir);
  if (!cfg.save_dir) cfg.save_dir = fs::path(out_dir);
  Session session(cfg);
  const RunResult result = run(session, *source);

  write_ppm(fs::path(out_dir) / "canvas.ppm", result.board.canvas());
  write_file(fs::path(out_dir) / "stats.json", stats_json(result.stats) + "\n");
  write_file(fs::path(out_dir) / "events.json", events_json(result.events) + "\n");
  out << "replayed " << result.stats.frames << " frames, " << result.events.size()
      << " events, mean latency " << result.stats.mean_latency_ms << " ms\n";
  return kExitOk;
}

int gen_trace(const std::string& spec_path, const std::string& out_dir, std::ostream& out) {
  const SyntheticSpec spec = load_synthetic_spec(spec_path);
  write_trace(spec, out_dir);
  out << "wrote " << spec.frames << " frames to " << out_dir << "\n";
  return kExitOk;
}

int bench(const std::string& trace, const std::string& config_path, int repeats,
          double budget_ms, const Overrides& o, std::ostream& out) {
  if (repeats < 1) throw ConfigError("bench: --repeats must be >= 1");
  const SessionConfig cfg = resolve_config(config_path, o);
  double mean_sum = 0.0, p95_sum = 0.0;
  std::size_t frames = 0;
  for (int i = 0; i < repeats; ++i) {
    auto source = open_trace(trace);
    SessionOptions so;
    so.use_config_ocr = true;
    Session session(cfg, std::move(so));
    const RunResult r = run(session, *source);
    json record = json::parse(stats_json(r.stats, -1));
    record["run"] = i;
    out << record.dump() << "\n";
    mean_sum += r.stats.mean_latency_ms;
    p95_sum += r.stats.p95_latency_ms;
    frames = r.stats.frames;
  }
  const double mean = mean_sum / repeats;
  json aggregate{{"aggregate", true},
                 {"runs", repeats},
                 {"frames", frames},
                 {"mean_latency_ms", mean},
                 {"mean_p95_latency_ms", p95_sum / repeats},
                 {"budget_ms", budget_ms},
                 {"pass", mean <= budget_ms}};
  out << aggregate.dump() << "\n";
  return kExitOk;
}

int serve(const std::string& config_path, std::uint16_t port, const std::string& address,
          int threads, const Overrides& o, std::ostream& out) {
  ServerOptions opts;
  opts.config = resolve_config(config_path, o);
  opts.port = port;
  opts.address = address;
  opts.threads = threads;

  // Route SIGINT/SIGTERM to a waiter thread so shutdown is orderly.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Server server(std::move(opts));
  const auto bound = server.start();
  out << "serving on http://" << address << ":" << bound << " (ws endpoint /ws)" << std::endl;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.run();
  // Wake the waiter if run() ended on its own.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"airboard: air drawing by background subtraction and contour tracking"};
  app.require_subcommand(1);

  std::string trace, config, out_dir, spec, address = "127.0.0.1";
  int repeats = 3, threads = 2;
  double budget_ms = 100.0;
  std::uint16_t port = 8080;
  Overrides overrides;

  auto* replay_cmd = app.add_subcommand("replay", "Replay a trace directory through a session");
  replay_cmd->add_option("--trace", trace, "Trace directory with manifest.json")->required();
  replay_cmd->add_option("--config", config, "Session config JSON");
  replay_cmd->add_option("--out", out_dir, "Output directory")->required();
  overrides.add_to(*replay_cmd);

  auto* gen_cmd = app.add_subcommand("gen-trace", "Render a synthetic trace");
  gen_cmd->add_option("--spec", spec, "Synthetic trace spec JSON")->required();
  gen_cmd->add_option("--out", out_dir, "Output directory")->required();

  auto* bench_cmd = app.add_subcommand("bench", "Measure per-frame latency over a trace");
  bench_cmd->add_option("--trace", trace, "Trace directory with manifest.json")->required();
  bench_cmd->add_option("--config", config, "Session config JSON");
  bench_cmd->add_option("--repeats", repeats, "Number of runs")->capture_default_str();
  bench_cmd->add_option("--budget-ms", budget_ms, "Mean latency budget")->capture_default_str();
  overrides.add_to(*bench_cmd);

  auto* serve_cmd = app.add_subcommand("serve", "Run the live session service");
  serve_cmd->add_option("--config", config, "Session config JSON");
  serve_cmd->add_option("--port", port, "TCP port")->capture_default_str();
  serve_cmd->add_option("--address", address, "Bind address")->capture_default_str();
  serve_cmd->add_option("--threads", threads, "I/O threads")->capture_default_str();
  overrides.add_to(*serve_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "airboard: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (replay_cmd->parsed()) return replay(trace, config, out_dir, overrides, out);
    if (gen_cmd->parsed()) return gen_trace(spec, out_dir, out);
    if (bench_cmd->parsed()) return bench(trace, config, repeats, budget_ms, overrides, out);
    if (serve_cmd->parsed()) return serve(config, port, address, threads, overrides, out);
  } catch (const Error& e) {
    err << "airboard: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "airboard: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "airboard: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace airboard::cli
