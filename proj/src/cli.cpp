// Copyright 2026 The cvqos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cvqos/cli.hpp"

#include <signal.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>
#include <thread>

#include "cvqos/analyze.hpp"
#include "cvqos/csv.hpp"
#include "cvqos/error.hpp"
#include "cvqos/ingest.hpp"
#include "cvqos/ml/dataset.hpp"
#include "cvqos/ml/information.hpp"
#include "cvqos/ml/metrics.hpp"
#include "cvqos/ml/pipeline.hpp"
#include "cvqos/ml/sampling.hpp"
#include "cvqos/probe.hpp"
#include "cvqos/recorder.hpp"
#include "cvqos/relay.hpp"
#include "cvqos/simulate.hpp"

namespace cvqos::cli {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

std::int64_t ms_to_ns(double ms) { return std::llround(ms * 1e6); }

// Only the options of the invoked subcommand chain, with defaults, so the
// file can be fed back through --config to reproduce the run.
std::string effective_config(const CLI::App& root) {
  std::ostringstream out;
  const CLI::App* app = &root;
  std::string prefix;
  while (app != nullptr) {
    for (const CLI::Option* opt : app->get_options()) {
      if (!opt->get_configurable()) continue;
      const std::string name = opt->get_single_name();
      if (name.empty() || name == "help" || name == "config") continue;
      std::string value = CLI::detail::ini_join(opt->reduced_results(), ',', '[', ']', '"', '\'');
      if (value.empty()) {
        const auto& fallback = opt->get_default_str();
        if (fallback == "{}" || fallback == "[]") continue;  // empty list
        if (!fallback.empty()) {
          value = CLI::detail::convert_arg_for_ini(fallback, '"', '\'', false);
        } else if (opt->get_expected_min() == 0) {
          value = "false";
        } else {
          continue;
        }
      }
      out << prefix << name << '=' << value << '\n';
    }
    const auto subs = app->get_subcommands();
    app = subs.empty() ? nullptr : subs.front();
    if (app != nullptr) prefix += app->get_name() + ".";
  }
  return out.str();
}

class Outputs {
 public:
  Outputs(const Globals& g, const CLI::App& root) : dir_(g.out_dir), root_(root) {}

  fs::path path(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, std::string_view content) {
    ensure_dir();
    io::write_atomic(dir_ / name, content);
  }

  void ensure_dir() {
    if (ready_) return;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(Errc::Io, "cannot create output directory " + dir_.string() + ": " + ec.message());
    io::write_atomic(dir_ / kEffectiveConfigName, effective_config(root_));
    ready_ = true;
  }

 private:
  fs::path dir_;
  const CLI::App& root_;
  bool ready_ = false;
};

// ---------------------------------------------------------------- probe

struct ProbeArgs {
  probe::ProbeConfig config;
};

void add_probe(CLI::App& app, ProbeArgs& a) {
  auto* s = app.add_subcommand("probe", "Send timestamped UDP probes through a relay and record delays");
  s->add_option("--target", a.config.target, "Relay address host:port")->required();
  s->add_option("--bind", a.config.bind, "Local address host:port");
  s->add_option("--interval-ms", a.config.interval_ms, "Send interval")->check(CLI::PositiveNumber);
  s->add_option("--payload", a.config.payload_size, "Datagram size in bytes (>= 25)");
  s->add_option("--count", a.config.count, "Number of probes")->required();
  s->add_option("--timeout-ms", a.config.timeout_ms, "Echo deadline after the last send");
  s->add_option("--session-id", a.config.session_id, "Session identifier");
}

int run_probe(const ProbeArgs& a, Outputs& outputs, std::ostream& out) {
  const auto run = probe::run_probe(a.config);
  outputs.write("delay.csv", probe::to_csv(run.records));
  std::vector<double> delays;
  for (const auto& r : run.records) {
    if (!r.lost) delays.push_back(r.e2e_delay_ms);
  }
  out << "sent " << run.sent << ", lost " << run.lost << ", stray echoes " << run.stray_echoes << '\n';
  if (!delays.empty()) {
    out << analyze::summarize(analyze::compliance(delays), run.lost, run.sent);
  }
  out << "wrote " << outputs.path("delay.csv").string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- relay

struct RelayArgs {
  relay::RelayConfig config;
  std::string mode = "echo";
  double duration_s = 0.0;
};

void add_relay(CLI::App& app, RelayArgs& a) {
  auto* s = app.add_subcommand("relay", "UDP echo/forward relay with delay and loss injection");
  s->add_option("--listen", a.config.listen, "Listen address host:port");
  s->add_option("--mode", a.mode, "echo or forward")->check(CLI::IsMember({"echo", "forward"}));
  s->add_option("--peer", a.config.peer, "Forward destination host:port");
  s->add_option("--inject-delay-ms", a.config.injected_delay_ms, "Added one-way delay");
  s->add_option("--inject-loss", a.config.injected_loss_rate, "Drop probability in [0, 1]");
  s->add_option("--duration-s", a.duration_s, "Stop after this many seconds (0: until SIGINT/SIGTERM)");
}

int run_relay(RelayArgs a, const Globals& g, std::ostream& out) {
  a.config.mode = a.mode == "forward" ? relay::Mode::Forward : relay::Mode::Echo;
  a.config.loss_seed = g.seed;
  relay::validate(a.config);

  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  sigaddset(&set, SIGUSR1);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &set, &previous);  // before threads start, so they inherit it

  int status = kExitOk;
  try {
    auto server = relay::serve(a.config);
    out << "relay listening on " << server->local().to_string() << " (send SIGUSR1 for stats)" << std::endl;
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(a.duration_s);
    while (true) {
      if (a.duration_s > 0.0 && std::chrono::steady_clock::now() >= deadline) break;
      timespec wait{0, 200'000'000};
      const int sig = sigtimedwait(&set, nullptr, &wait);
      if (sig == SIGUSR1) {
        out << relay::format_stats(server->stats()) << std::flush;
      } else if (sig == SIGINT || sig == SIGTERM) {
        break;
      }
    }
    server->stop();
    out << relay::format_stats(server->stats());
  } catch (...) {
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    throw;
  }
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  return status;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string preset = "two-regime";
  std::vector<std::string> enbs;
  std::optional<double> duration_s;
  std::optional<double> interval_ms;
  std::vector<std::string> gaps;
  std::uint32_t session_id = 1;
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  auto* s = app.add_subcommand("simulate", "Generate seeded synthetic delay and KPI traces");
  s->add_option("--preset", a.preset, "Scenario preset")->check(CLI::IsMember(simulate::preset_names()));
  s->add_option("--enb", a.enbs,
                "eNB spec 'eci=..;pci=..;band=..;earfcn=..;base_delay_ms=..;dwell_s=..' (repeatable, replaces the "
                "preset cells)");
  s->add_option("--duration-s", a.duration_s, "Scenario length; eNB dwells and preset gaps are rescaled to fit");
  s->add_option("--interval-ms", a.interval_ms, "Packet interval");
  s->add_option("--gap", a.gaps, "Coverage gap START_S:END_S (repeatable)");
  s->add_option("--session-id", a.session_id, "Session identifier");
}

int run_simulate(const SimulateArgs& a, const Globals& g, Outputs& outputs, std::ostream& out) {
  auto config = simulate::preset(a.preset);
  config.seed = g.seed;
  config.session_id = a.session_id;
  if (!a.enbs.empty()) {
    config.enbs.clear();
    double dwell = 0.0;
    for (const auto& spec : a.enbs) {
      config.enbs.push_back(simulate::parse_enb(spec));
      dwell += config.enbs.back().dwell_s;
    }
    config.duration_s = dwell;
    config.coverage_gaps.clear();
  }
  if (a.duration_s && config.duration_s > 0.0 && *a.duration_s > 0.0) {
    // Stretch the route (and its preset gaps) to the requested length.
    const double scale = *a.duration_s / config.duration_s;
    for (auto& e : config.enbs) e.dwell_s *= scale;
    for (auto& gap : config.coverage_gaps) {
      gap.start_s *= scale;
      gap.end_s *= scale;
    }
    config.duration_s = *a.duration_s;
  } else if (a.duration_s) {
    config.duration_s = *a.duration_s;
  }
  if (a.interval_ms) config.packet_interval_ms = *a.interval_ms;
  if (!a.gaps.empty()) {
    config.coverage_gaps.clear();
    for (const auto& gap : a.gaps) {
      const auto colon = gap.find(':');
      if (colon == std::string::npos) throw Error(Errc::Usage, "--gap expects START_S:END_S, got '" + gap + "'");
      config.coverage_gaps.push_back({csv::to_double(gap.substr(0, colon), "gap start"),
                                      csv::to_double(gap.substr(colon + 1), "gap end")});
    }
  }
  simulate::validate(config);
  const auto bundle = simulate::generate(config);
  outputs.ensure_dir();
  simulate::write_bundle(bundle, outputs.path(""));
  std::uint64_t lost = 0;
  for (const auto& d : bundle.delays) lost += d.lost ? 1 : 0;
  out << "generated " << bundle.delays.size() << " packets (" << lost << " lost), " << bundle.modem.size()
      << " modem, " << bundle.oai.size() << " OAI, " << bundle.gnss.size() << " GNSS samples\n";
  out << "wrote traces to " << outputs.path("").string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- ingest / fuse

struct TraceArgs {
  std::string trace_dir;
  std::string delay, modem, oai, gnss, channels;

  std::string resolve(const std::string& given, const char* name) const {
    if (!given.empty()) return given;
    if (!trace_dir.empty()) return (fs::path(trace_dir) / name).string();
    return {};
  }
};

struct FuseArgs {
  TraceArgs traces;
  double modem_staleness_ms = 4000.0;
  double oai_staleness_ms = 100.0;
  double gnss_staleness_ms = 200.0;
  double modem_offset_ms = 0.0;
  double oai_offset_ms = 0.0;
  double gnss_offset_ms = 0.0;
  bool no_filter = false;
};

void add_trace_options(CLI::App* s, TraceArgs& t, bool with_delay_gnss) {
  s->add_option("--trace-dir", t.trace_dir, "Directory holding the standard trace file names");
  s->add_option("--modem", t.modem, "Modem KPI CSV");
  s->add_option("--oai", t.oai, "OAI KPI CSV");
  if (with_delay_gnss) {
    s->add_option("--delay", t.delay, "Delay CSV");
    s->add_option("--gnss", t.gnss, "GNSS CSV");
    s->add_option("--channels", t.channels, "Channel bandwidth CSV (optional)");
  }
}

std::string required_path(const TraceArgs& t, const std::string& given, const char* name, const char* flag) {
  auto p = t.resolve(given, name);
  if (p.empty()) throw Error(Errc::Usage, std::string("missing ") + flag + " (or --trace-dir)");
  return p;
}

void add_ingest(CLI::App& app, TraceArgs& a) {
  auto* s = app.add_subcommand("ingest", "Resolve PCI/ECI identity and filter false-positive OAI samples");
  add_trace_options(s, a, false);
}

int run_ingest(const TraceArgs& a, Outputs& outputs, std::ostream& out) {
  const auto modem = ingest::read_modem_csv(required_path(a, a.modem, "modem_kpi.csv", "--modem"));
  const auto oai = ingest::read_oai_csv(required_path(a, a.oai, "oai_kpi.csv", "--oai"));
  const auto mapping = ingest::build_cell_mapping(modem, oai);
  const auto filtered = ingest::remove_false_positives(oai, mapping, modem);
  outputs.write("cell_mapping.csv", ingest::mapping_to_csv(mapping));
  outputs.write("oai_filtered.csv", ingest::oai_to_csv(filtered.kept));
  out << "mapped " << mapping.eci_to_pci.size() << " cells (" << mapping.unmapped.size() << " unmapped); removed "
      << filtered.removed << " of " << oai.size() << " OAI samples\n";
  return kExitOk;
}

void add_fuse(CLI::App& app, FuseArgs& a) {
  auto* s = app.add_subcommand("fuse", "Merge delay, KPI and GNSS traces into per-packet records");
  add_trace_options(s, a.traces, true);
  s->add_option("--modem-staleness-ms", a.modem_staleness_ms, "Modem staleness window");
  s->add_option("--oai-staleness-ms", a.oai_staleness_ms, "OAI staleness window");
  s->add_option("--gnss-staleness-ms", a.gnss_staleness_ms, "GNSS staleness window");
  s->add_option("--modem-offset-ms", a.modem_offset_ms, "Added to modem timestamps");
  s->add_option("--oai-offset-ms", a.oai_offset_ms, "Added to OAI timestamps");
  s->add_option("--gnss-offset-ms", a.gnss_offset_ms, "Added to GNSS timestamps");
  s->add_flag("--no-filter", a.no_filter, "Keep OAI samples that contradict the cell mapping");
}

int run_fuse(const FuseArgs& a, Outputs& outputs, std::ostream& out) {
  const auto& t = a.traces;
  const auto delays = probe::read_delay_csv(required_path(t, t.delay, "delay.csv", "--delay"));
  const auto modem = ingest::read_modem_csv(required_path(t, t.modem, "modem_kpi.csv", "--modem"));
  const auto oai = ingest::read_oai_csv(required_path(t, t.oai, "oai_kpi.csv", "--oai"));
  const auto gnss = ingest::read_gnss_csv(required_path(t, t.gnss, "gnss.csv", "--gnss"));
  ingest::ChannelBandwidths bandwidths;
  auto channels_path = t.resolve(t.channels, "channels.csv");
  if (!t.channels.empty() || (!channels_path.empty() && fs::exists(channels_path))) {
    bandwidths = ingest::read_channels_csv(channels_path);
  }

  const auto mapping = ingest::build_cell_mapping(modem, oai);
  std::vector<ingest::KpiSample> kept;
  std::size_t removed = 0;
  if (a.no_filter) {
    kept = oai;
  } else {
    auto f = ingest::remove_false_positives(oai, mapping, modem);
    kept = std::move(f.kept);
    removed = f.removed;
  }

  ingest::FuseOptions options;
  options.modem_staleness_ns = ms_to_ns(a.modem_staleness_ms);
  options.oai_staleness_ns = ms_to_ns(a.oai_staleness_ms);
  options.gnss_staleness_ns = ms_to_ns(a.gnss_staleness_ms);
  options.modem_offset_ns = ms_to_ns(a.modem_offset_ms);
  options.oai_offset_ns = ms_to_ns(a.oai_offset_ms);
  options.gnss_offset_ns = ms_to_ns(a.gnss_offset_ms);
  options.mapping = &mapping;
  options.bandwidths = &bandwidths;
  const auto fused = ingest::fuse(delays, modem, kept, gnss, options);

  outputs.write("fused.csv", ingest::fused_to_csv(fused));
  outputs.write("cell_mapping.csv", ingest::mapping_to_csv(mapping));
  std::size_t with_eci = 0, with_oai = 0;
  for (const auto& r : fused) {
    with_eci += r.eci ? 1 : 0;
    with_oai += r.oai ? 1 : 0;
  }
  out << "fused " << fused.size() << " records: " << with_eci << " with eci, " << with_oai
      << " with OAI KPIs; removed " << removed << " false-positive OAI samples\n";
  out << "wrote " << outputs.path("fused.csv").string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string in;
  std::vector<double> thresholds = analyze::kDefaultThresholdsMs;
  double rsrp_threshold = -90.0;
  double window_ms = 250.0;
  std::vector<std::string> runs;
  std::optional<double> reference_ms;
};

CLI::App* add_analyze(CLI::App& app, AnalyzeArgs& a) {
  auto* s = app.add_subcommand("analyze", "QoS analytics over fused records");
  s->require_subcommand(1);
  auto in_option = [&](CLI::App* r) { r->add_option("--in", a.in, "Fused records CSV")->required(); };
  auto* c = s->add_subcommand("compliance", "Share of delays within each threshold");
  in_option(c);
  c->add_option("--thresholds", a.thresholds, "Thresholds in ms")->delimiter(',');
  auto* e = s->add_subcommand("enb", "Per-eNB delay statistics");
  in_option(e);
  e->add_option("--thresholds", a.thresholds, "Thresholds in ms")->delimiter(',');
  auto* cov = s->add_subcommand("coverage", "RSRP coverage statistics");
  in_option(cov);
  cov->add_option("--rsrp-threshold", a.rsrp_threshold, "Poor-coverage threshold in dBm");
  auto* iv = s->add_subcommand("interval", "Effect of the packet interval on delay");
  iv->add_option("--run", a.runs, "INTERVAL_MS=delay.csv (repeatable)")->required();
  iv->add_option("--reference-ms", a.reference_ms, "Reference interval (default: longest)");
  auto* se = s->add_subcommand("series", "Windowed mean delay over time");
  in_option(se);
  se->add_option("--window-ms", a.window_ms, "Window length")->check(CLI::PositiveNumber);
  auto* ch = s->add_subcommand("channels", "Channel occupancy");
  in_option(ch);
  return s;
}

int run_analyze(const std::string& report, const AnalyzeArgs& a, Outputs& outputs, std::ostream& out) {
  if (report == "interval") {
    std::map<double, std::vector<double>> runs;
    for (const auto& spec : a.runs) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos) throw Error(Errc::Usage, "--run expects INTERVAL_MS=path, got '" + spec + "'");
      const double interval = csv::to_double(spec.substr(0, eq), "interval");
      auto& group = runs[interval];
      for (const auto& r : probe::read_delay_csv(spec.substr(eq + 1))) {
        if (!r.lost) group.push_back(r.e2e_delay_ms);
      }
    }
    const auto effect = analyze::interval_effect(runs, a.reference_ms);
    outputs.write("interval_effect.csv", analyze::interval_effect_to_csv(effect));
    for (const auto& m : effect.means) {
      out << "interval " << csv::format(m.interval_ms) << " ms: mean " << csv::format(m.mean_delay_ms) << " ms over "
          << m.count << " packets\n";
    }
    return kExitOk;
  }

  const auto records = ingest::read_fused_csv(a.in);
  if (report == "compliance") {
    const auto delays = analyze::delivered_delays(records);
    const auto c = analyze::compliance(delays, a.thresholds);
    const auto text = analyze::summarize(c, records.size() - delays.size(), records.size());
    outputs.write("compliance.csv", analyze::compliance_to_csv(c));
    outputs.write("delay_cdf.csv", analyze::delay_cdf_to_csv(delays));
    outputs.write("summary.txt", text);
    out << text;
  } else if (report == "enb") {
    const auto stats = analyze::enb_stats(records, a.thresholds);
    outputs.write("enb_stats.csv", analyze::enb_stats_to_csv(stats));
    for (const auto& s : stats) {
      out << (s.eci ? std::to_string(*s.eci) : std::string("unknown")) << ": " << s.packets << " packets, mean "
          << csv::format(s.mean_delay_ms) << " ms\n";
    }
  } else if (report == "coverage") {
    std::vector<double> rsrp;
    for (const auto& r : records) {
      if (r.oai) {
        rsrp.push_back(r.oai->rsrp_dbm);
      } else if (r.modem) {
        rsrp.push_back(r.modem->rsrp_dbm);
      }
    }
    const auto cov = analyze::coverage_stats(rsrp, a.rsrp_threshold);
    outputs.write("coverage.csv", analyze::coverage_to_csv(cov));
    out << "RSRP <= " << csv::format(cov.threshold_dbm) << " dBm: " << csv::format(100.0 * cov.fraction) << "% of "
        << cov.total << " records\n";
  } else if (report == "series") {
    std::vector<analyze::TimedDelay> timed;
    for (const auto& r : records) {
      if (!r.delay.lost) timed.push_back({static_cast<std::int64_t>(r.delay.tx_time_ns), r.delay.e2e_delay_ms});
    }
    const auto series = analyze::windowed_series(timed, a.window_ms);
    outputs.write("series.csv", analyze::series_to_csv(series));
    out << series.size() << " windows of " << csv::format(a.window_ms) << " ms\n";
  } else if (report == "channels") {
    const auto shares = analyze::channel_inventory(records);
    outputs.write("channel_inventory.csv", analyze::channels_to_csv(shares));
    for (const auto& s : shares) {
      out << "band " << s.channel.band << " earfcn " << s.channel.earfcn << " (" << csv::format(s.channel.fc_dl_mhz)
          << " MHz): " << csv::format(s.percent) << "%\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- ml

struct MlArgs {
  std::string in;
  std::string scheme = "binary50";
  std::vector<std::string> features;
  std::string expected_delay = "batch";
  std::size_t warmup = 10;
  // select
  int bins = ml::kDefaultBins;
  std::size_t max_features = 5;
  double epsilon = 1e-9;
  // train / baseline
  bool balance = false;
  std::string selection;
  int folds = 5;
  ml::Hyperparameters hyper;
  bool tune = false;
  std::string model;
};

void add_dataset_options(CLI::App* s, MlArgs& a, bool with_scheme) {
  s->add_option("--in", a.in, "Fused records CSV")->required();
  if (with_scheme) {
    s->add_option("--scheme", a.scheme, "binary50 or multiclass")->check(CLI::IsMember({"binary50", "multiclass"}));
    s->add_option("--features", a.features, "Comma-separated feature names")->delimiter(',');
  }
  s->add_option("--expected-delay", a.expected_delay, "batch or online")->check(CLI::IsMember({"batch", "online"}));
  s->add_option("--warmup", a.warmup, "Online mode: earlier packets needed per eNB");
}

CLI::App* add_ml(CLI::App& app, MlArgs& a) {
  auto* s = app.add_subcommand("ml", "Feature selection, training and evaluation");
  s->require_subcommand(1);
  auto* sel = s->add_subcommand("select", "Rank features by maximal dependency");
  add_dataset_options(sel, a, true);
  sel->add_option("--bins", a.bins, "Equal-frequency bins per feature")->check(CLI::PositiveNumber);
  sel->add_option("--max-features", a.max_features, "Upper bound on selected features");
  sel->add_option("--epsilon", a.epsilon, "Stop when the MI gain is at most this");

  auto* tr = s->add_subcommand("train", "Cross-validate and fit the MLP");
  add_dataset_options(tr, a, true);
  tr->add_flag("--balance", a.balance, "Undersample to the class balance policy");
  tr->add_option("--selection", a.selection, "selection.csv from 'ml select' (overrides --features)");
  tr->add_option("--folds", a.folds, "Cross-validation folds")->check(CLI::Range(2, 100));
  tr->add_option("--hidden", a.hyper.hidden, "Hidden units")->check(CLI::PositiveNumber);
  tr->add_option("--lr", a.hyper.learning_rate, "Learning rate")->check(CLI::PositiveNumber);
  tr->add_option("--momentum", a.hyper.momentum, "Momentum")->check(CLI::Range(0.0, 1.0));
  tr->add_option("--batch", a.hyper.batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
  tr->add_option("--epochs", a.hyper.epochs, "Training epochs")->check(CLI::NonNegativeNumber);
  tr->add_flag("--tune", a.tune, "Grid-search learning rate and hidden width first");
  tr->add_option("--model", a.model, "Model output path (default OUT_DIR/model.qnn)");

  auto* ev = s->add_subcommand("eval", "Evaluate a saved model");
  ev->add_option("--model", a.model, "Model file")->required();
  add_dataset_options(ev, a, false);

  auto* base = s->add_subcommand("baseline", "Majority-class baseline under cross-validation");
  add_dataset_options(base, a, true);
  base->add_flag("--balance", a.balance, "Undersample to the class balance policy");
  base->add_option("--folds", a.folds, "Cross-validation folds")->check(CLI::Range(2, 100));
  return s;
}

ml::FeatureOptions feature_options(const MlArgs& a, std::vector<std::string> features) {
  ml::FeatureOptions f;
  if (!features.empty()) f.features = std::move(features);
  f.expected_delay = a.expected_delay == "online" ? ml::ExpectedDelayMode::Online : ml::ExpectedDelayMode::Batch;
  f.online_warmup = a.warmup;
  for (const auto& name : f.features) {
    const auto& known = ml::known_features();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw Error(Errc::Usage, "unknown feature '" + name + "'");
    }
  }
  return f;
}

std::vector<std::string> read_selection(const std::string& path) {
  const auto table = csv::read(path, {"rank", "feature", "joint_mi_bits", "gain_bits"});
  std::vector<std::string> names;
  for (const auto& row : table.rows) names.push_back(row[1]);
  if (names.empty()) throw Error(Errc::Usage, "selection file " + path + " selects no features");
  return names;
}

std::string describe(const ml::Dataset& d) {
  std::ostringstream s;
  s << d.rows() << " rows, " << d.cols() << " features";
  if (d.dropped_rows > 0) s << ", " << d.dropped_rows << " rows dropped for absent features";
  if (!d.dropped_features.empty()) {
    s << ", constant features dropped:";
    for (const auto& n : d.dropped_features) s << ' ' << n;
  }
  s << "; class counts";
  for (auto c : d.class_counts()) s << ' ' << c;
  s << '\n';
  return s.str();
}

int run_ml(const std::string& cmd, MlArgs a, const Globals& g, Outputs& outputs, std::ostream& out) {
  const auto records = ingest::read_fused_csv(a.in);

  if (cmd == "eval") {
    const auto model = ml::load_model(a.model);
    const auto data = ml::build_dataset(records, model.scheme, feature_options(a, model.feature_names));
    if (data.names != model.feature_names) {
      throw Error(Errc::Shape, "evaluation data lost a model feature (constant or absent column)");
    }
    const auto predicted = ml::predict_labels(model, data.features);
    const auto report = ml::report_from_confusion(
        ml::confusion_matrix(data.labels, predicted, ml::class_count(model.scheme)), model.scheme);
    outputs.write("eval_report.csv", ml::report_to_csv(report));
    outputs.write("eval_report.txt", describe(data) + ml::format_report(report));
    out << describe(data) << ml::format_report(report);
    return kExitOk;
  }

  const auto scheme = ml::parse_scheme(a.scheme);
  if (cmd == "select") {
    const auto data = ml::build_dataset(records, scheme, feature_options(a, a.features.empty() ? ml::known_features()
                                                                                                 : a.features));
    ml::SelectionOptions options;
    options.bins = a.bins;
    options.max_features = a.max_features;
    options.epsilon = a.epsilon;
    const auto result = ml::md_select(data, options);
    outputs.write("selection.csv", ml::selection_to_csv(result));
    out << describe(data);
    int rank = 1;
    for (const auto& s : result.steps) {
      out << rank++ << ". " << s.name << "  I=" << csv::format(s.joint_mi) << " bits (+" << csv::format(s.gain)
          << ")\n";
    }
    if (result.cell_limit_reached) out << "stopped early: the joint histogram would exceed the cell limit\n";
    return kExitOk;
  }

  auto features = a.features;
  if (!a.selection.empty()) features = read_selection(a.selection);
  auto data = ml::build_dataset(records, scheme, feature_options(a, features));
  out << describe(data);
  if (a.balance) {
    data = ml::balance(data, g.seed);
    out << "balanced: " << describe(data);
  }
  ml::CvOptions cv;
  cv.folds = a.folds;
  cv.seed = g.seed;
  cv.hyper = a.hyper;
  cv.hyper.seed = g.seed;

  if (cmd == "baseline") {
    const int k = ml::class_count(scheme);
    const auto folds = ml::stratified_kfold(data.labels, a.folds, g.seed);
    ml::Confusion pooled = ml::Confusion::Zero(k, k);
    for (const auto& f : folds) {
      std::vector<int> train_labels, test_labels;
      for (auto i : f.train) train_labels.push_back(data.labels[i]);
      for (auto i : f.test) test_labels.push_back(data.labels[i]);
      const std::vector<int> predicted(test_labels.size(), ml::majority_label(train_labels, k));
      pooled += ml::confusion_matrix(test_labels, predicted, k);
    }
    const auto report = ml::report_from_confusion(pooled, scheme);
    outputs.write("baseline_report.csv", ml::report_to_csv(report));
    out << ml::format_report(report);
    return kExitOk;
  }

  // train
  if (a.tune) {
    const std::vector<double> rates = {1e-3, 3e-3, 1e-2};
    const std::vector<int> widths = {32, 64, 128};
    const auto t = ml::tune(data, rates, widths, cv);
    csv::Writer w({"learning_rate", "hidden", "accuracy"});
    for (const auto& c : t.grid) w.field(c.learning_rate).field(c.hidden).field(c.accuracy).end_row();
    outputs.write("tuning.csv", w.str());
    cv.hyper = t.best;
    out << "tuned: lr " << csv::format(t.best.learning_rate) << ", hidden " << t.best.hidden << '\n';
  }
  const auto result = ml::cross_validate(data, cv);
  const auto model = ml::train(data, cv.hyper);
  const fs::path model_path = a.model.empty() ? outputs.path("model.qnn") : fs::path(a.model);
  outputs.ensure_dir();
  ml::save_model(model, model_path);
  outputs.write("cv_report.csv", ml::report_to_csv(result.model));
  outputs.write("baseline_report.csv", ml::report_to_csv(result.baseline));
  const std::string text = describe(data) + std::to_string(a.folds) + "-fold cross-validation (pooled):\n" +
                           ml::format_report(result.model) + "majority baseline:\n" +
                           ml::format_report(result.baseline);
  outputs.write("report.txt", text);
  out << ml::format_report(result.model) << "majority baseline accuracy " << csv::format(result.baseline.accuracy)
      << '\n'
      << "wrote " << model_path.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- record

struct RecordArgs {
  std::size_t block_bytes = 1'228'800;  // 10 ms of 20 MHz LTE, 16-bit I/Q
  std::size_t serializers = 2;
  double duration_s = 10.0;
  std::string out;
  double throttle_us = 0.0;
};

void add_record(CLI::App& app, RecordArgs& a) {
  auto* s = app.add_subcommand("record", "Double-buffered capture of a synthetic block source");
  s->add_option("--block-bytes", a.block_bytes, "Bytes per 10 ms block")->check(CLI::PositiveNumber);
  s->add_option("--serializers", a.serializers, "Serializer workers")->check(CLI::PositiveNumber);
  s->add_option("--duration-s", a.duration_s, "Capture length")->check(CLI::NonNegativeNumber);
  s->add_option("--out", a.out, "Capture file (default OUT_DIR/capture.cvqb)");
  s->add_option("--throttle-us", a.throttle_us, "Artificial storage delay per block");
}

int run_record(const RecordArgs& a, const Globals& g, Outputs& outputs, std::ostream& out) {
  recorder::SyntheticSource source(a.block_bytes, g.seed);
  recorder::CaptureOptions options;
  options.serializers = a.serializers;
  options.sink_delay_per_block = std::chrono::microseconds(std::llround(a.throttle_us));
  outputs.ensure_dir();
  const fs::path path = a.out.empty() ? outputs.path("capture.cvqb") : fs::path(a.out);
  const auto report = recorder::run_capture(
      source, path, std::chrono::milliseconds(std::llround(a.duration_s * 1000.0)), options);
  std::ostringstream text;
  text << "blocks produced " << report.blocks_produced << "\nblocks captured " << report.blocks_captured
       << "\nblocks lost " << report.blocks_lost << "\nbuffer swaps " << report.buffer_swaps << "\nmax swap wait us "
       << std::chrono::duration_cast<std::chrono::microseconds>(report.max_swap_wait).count() << '\n';
  if (report.aborted) text << "aborted: " << report.abort_reason << '\n';
  outputs.write("capture_report.txt", text.str());
  out << text.str();
  return report.aborted ? kExitFailure : kExitOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cellular V2X QoS measurement and prediction toolkit", "cvqos"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "INI-style config file; every flag has a key", false);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every stochastic step");
  app.add_option("--out-dir", g.out_dir, "Artifact directory");

  ProbeArgs probe_args;
  RelayArgs relay_args;
  SimulateArgs simulate_args;
  TraceArgs ingest_args;
  FuseArgs fuse_args;
  AnalyzeArgs analyze_args;
  MlArgs ml_args;
  RecordArgs record_args;
  add_probe(app, probe_args);
  add_relay(app, relay_args);
  add_simulate(app, simulate_args);
  add_ingest(app, ingest_args);
  add_fuse(app, fuse_args);
  auto* analyze_cmd = add_analyze(app, analyze_args);
  auto* ml_cmd = add_ml(app, ml_args);
  add_record(app, record_args);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Outputs outputs(g, app);
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "probe") return run_probe(probe_args, outputs, out);
    if (name == "relay") return run_relay(relay_args, g, out);
    if (name == "simulate") return run_simulate(simulate_args, g, outputs, out);
    if (name == "ingest") return run_ingest(ingest_args, outputs, out);
    if (name == "fuse") return run_fuse(fuse_args, outputs, out);
    if (name == "analyze") {
      return run_analyze(analyze_cmd->get_subcommands().front()->get_name(), analyze_args, outputs, out);
    }
    if (name == "ml") return run_ml(ml_cmd->get_subcommands().front()->get_name(), ml_args, g, outputs, out);
    if (name == "record") return run_record(record_args, g, outputs, out);
    err << "unknown subcommand '" << name << "'\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "cvqos: " << e.what() << '\n';
    return e.code() == Errc::Usage || e.code() == Errc::Config ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    err << "cvqos: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace cvqos::cli
