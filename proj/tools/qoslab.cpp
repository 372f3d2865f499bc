// Experiment runner: resolves a scenario (preset name or JSON file) plus
// flag overrides, executes one run or a preset matrix, and writes per-run
// trace/CSV/summary artifacts.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qoslab/metrics.hpp"
#include "qoslab/scenario.hpp"
#include "qoslab/simcore.hpp"

namespace fs = std::filesystem;
using namespace qoslab;

namespace {

struct RunFlags {
  std::string scenario = "default";
  std::optional<std::string> topology;
  std::optional<std::string> shaping;
  std::optional<std::string> shaped_path;
  std::optional<std::string> estimator;
  std::optional<double> report_period_ms;
  std::optional<double> duration_s;
  std::optional<uint64_t> seed;
  std::string out_dir;
};

[[noreturn]] void config_fail(const std::string& msg) {
  std::cerr << "config error: " << msg << "\n";
  std::exit(2);
}

ScenarioConfig base_config(const std::string& scenario) {
  if (scenario == "default") return ScenarioConfig{};
  if (auto preset = preset_scenario(scenario)) return *preset;
  // Matrix presets share the bandwidth program as their base.
  if (scenario == "paper-table4" || scenario == "paper-table6") {
    ScenarioConfig cfg = *preset_scenario("paper-bandwidth");
    cfg.name = scenario;
    return cfg;
  }
  if (!fs::exists(scenario)) {
    config_fail("scenario '" + scenario + "' is neither a preset nor a file");
  }
  try {
    return parse_config_file(scenario);
  } catch (const std::exception& e) {
    config_fail(e.what());
  }
}

void apply_flags(ScenarioConfig& cfg, const RunFlags& flags) {
  if (flags.topology) {
    const auto t = topology_from_string(*flags.topology);
    if (!t) config_fail("unknown topology '" + *flags.topology + "'");
    cfg.topology = *t;
  }
  if (flags.shaping) {
    const auto s = shaping_from_string(*flags.shaping);
    if (!s) config_fail("unknown shaping kind '" + *flags.shaping + "'");
    cfg.shaping = *s;
  }
  if (flags.shaped_path) {
    const auto p = shaped_path_from_string(*flags.shaped_path);
    if (!p) config_fail("unknown shaped path '" + *flags.shaped_path + "'");
    cfg.shaped_path = *p;
  }
  if (flags.estimator) {
    const auto e = estimator_from_string(*flags.estimator);
    if (!e) config_fail("unknown estimator '" + *flags.estimator + "'");
    cfg.estimator.strategy = *e;
  }
  if (flags.report_period_ms) cfg.report_period_ms = *flags.report_period_ms;
  if (flags.duration_s) cfg.duration_s = *flags.duration_s;
  if (flags.seed) cfg.seed = *flags.seed;
}

// Expands matrix presets into the concrete run list.
std::vector<ScenarioConfig> expand_runs(const std::string& scenario, ScenarioConfig base) {
  std::vector<ScenarioConfig> runs;
  if (scenario == "paper-table4") {
    for (double period : {500.0, 1000.0}) {
      ScenarioConfig cfg = base;
      cfg.report_period_ms = period;
      cfg.name = "paper-table4-" + std::to_string(static_cast<int>(period)) + "ms";
      runs.push_back(cfg);
    }
  } else if (scenario == "paper-table6") {
    const std::pair<Topology, const char*> rows[] = {
        {Topology::Direct, "direct"},
        {Topology::TranscodingRelay, "transcoding"},
        {Topology::ReportingRelay, "reporting"},
    };
    for (const auto& [topology, tag] : rows) {
      ScenarioConfig cfg = base;
      cfg.topology = topology;
      cfg.name = std::string("paper-table6-") + tag;
      runs.push_back(cfg);
    }
  } else {
    runs.push_back(std::move(base));
  }
  return runs;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

int run_command(const RunFlags& flags) {
  ScenarioConfig base = base_config(flags.scenario);
  apply_flags(base, flags);
  std::vector<ScenarioConfig> runs = expand_runs(flags.scenario, base);

  std::string out_root = flags.out_dir;
  if (out_root.empty()) {
    const char* env = std::getenv("QOSLAB_OUT");
    out_root = env ? env : "out";
  }

  for (ScenarioConfig& cfg : runs) {
    try {
      cfg.validate();
    } catch (const std::exception& e) {
      config_fail(e.what());
    }
  }

  bool any_failed = false;
  std::vector<std::pair<std::string, Summary>> table;
  for (const ScenarioConfig& cfg : runs) {
    try {
      const fs::path dir = fs::path(out_root) / cfg.name;
      fs::create_directories(dir);
      write_text(dir / "config.json", config_to_json(cfg));
      const EventTrace trace = run(cfg);
      write_text(dir / "trace.txt", trace.to_string());
      const auto records = detect_reactions(trace);
      write_csv(records, (dir / "reactions.csv").string());
      const Summary summary = summarize(records);
      const std::string one = format_summary_table({{cfg.name, summary}});
      write_text(dir / "summary.txt", one);
      table.emplace_back(cfg.name, summary);
      std::cout << "run " << cfg.name << ": ok (" << dir.string() << ")\n";
    } catch (const std::exception& e) {
      any_failed = true;
      std::cerr << "run " << cfg.name << ": FAILED: " << e.what() << "\n";
    }
  }
  if (!table.empty()) {
    std::cout << "\n" << format_summary_table(table);
  }
  return any_failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qoslab: deterministic relayed-video QoS adaptation lab"};
  app.require_subcommand(1);

  RunFlags flags;
  CLI::App* run_cmd = app.add_subcommand("run", "execute a scenario or preset matrix");
  run_cmd->add_option("--scenario", flags.scenario,
                      "preset name (default, paper-bandwidth, paper-latency, "
                      "paper-table4, paper-table6) or JSON config file");
  run_cmd->add_option("--topology", flags.topology, "direct|transcoding|reporting");
  run_cmd->add_option("--shaping", flags.shaping, "bandwidth|latency");
  run_cmd->add_option("--shaped-path", flags.shaped_path, "uplink|downlink|both");
  run_cmd->add_option("--estimator", flags.estimator, "oracle|delay-gradient");
  run_cmd->add_option("--report-period-ms", flags.report_period_ms, "RTCP report period");
  run_cmd->add_option("--duration-s", flags.duration_s, "virtual run length in seconds");
  run_cmd->add_option("--seed", flags.seed, "RNG seed");
  run_cmd->add_option("--out", flags.out_dir, "output directory (default $QOSLAB_OUT or ./out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (run_cmd->parsed()) return run_command(flags);
  return 2;
}
