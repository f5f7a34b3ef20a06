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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Each criterion also has a wall-clock budget.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cvqos/analyze.hpp"
#include "cvqos/error.hpp"
#include "cvqos/ingest.hpp"
#include "cvqos/ml/dataset.hpp"
#include "cvqos/ml/information.hpp"
#include "cvqos/ml/metrics.hpp"
#include "cvqos/ml/mlp.hpp"
#include "cvqos/ml/pipeline.hpp"
#include "cvqos/ml/sampling.hpp"
#include "cvqos/probe.hpp"
#include "cvqos/recorder.hpp"
#include "cvqos/relay.hpp"
#include "cvqos/rng.hpp"
#include "cvqos/simulate.hpp"

namespace {

using namespace cvqos;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a failed check; the first few reasons are kept in the detail.
  void check(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail << "failed: ";
    else detail << "; ";
    pass = false;
    detail << what;
  }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << std::fixed << v;
  return s.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("cvqos_acceptance_" + std::to_string(::getpid())) / name;
  fs::create_directories(p.parent_path());
  return p;
}

// ------------------------------------------------------------------ 1

void channel_table(Outcome& o) {
  struct Row {
    int band;
    std::uint32_t earfcn;
    double fc;
  };
  const Row rows[] = {{8, 3749, 954.9}, {3, 1300, 1815.0}, {3, 1444, 1829.4}, {20, 6300, 806.0},
                      {3, 1801, 1865.1}, {1, 101, 2120.1},  {7, 2850, 2630.0}, {3, 1600, 1845.0},
                      {1, 252, 2135.2},  {7, 3350, 2680.0}};
  int exact = 0;
  for (const auto& r : rows) {
    const double got = ingest::earfcn_to_fc(r.band, r.earfcn);
    o.check(got == r.fc, "band " + std::to_string(r.band) + " earfcn " + std::to_string(r.earfcn) + " gave " +
                             fmt(got, 6));
    exact += got == r.fc ? 1 : 0;
  }
  o.detail << (o.pass ? "" : " | ") << exact << "/10 rows exact";
}

// ------------------------------------------------------------------ 2

void metric_identities(Outcome& o) {
  const double f1 = ml::f1_score(0.8510, 0.9203);
  const std::vector<double> support = {0.7773, 0.2227}, recall = {0.9203, 0.4372};
  const double acc = ml::accuracy_from(support, recall);
  const std::vector<double> even = {0.5, 0.5}, recall_b = {0.6954, 0.7817};
  const double bal = ml::accuracy_from(even, recall_b);
  o.check(std::abs(f1 - 0.8843) <= 1e-4, "f1 " + fmt(f1));
  o.check(std::abs(acc - 0.8127) <= 1e-4, "accuracy " + fmt(acc));
  o.check(std::abs(bal - 0.7385) <= 5e-4, "balanced accuracy " + fmt(bal));
  o.detail << (o.pass ? "" : " | ") << "f1=" << fmt(f1) << " acc=" << fmt(acc) << " balanced=" << fmt(bal);
}

// ------------------------------------------------------------------ 3

// Smallest [lo, hi] with P(X < lo) <= 0.005 and P(X > hi) <= 0.005 for X ~ Bin(n, p).
std::pair<std::uint64_t, std::uint64_t> binomial_interval(std::uint64_t n, double p) {
  std::vector<double> pmf(n + 1);
  for (std::uint64_t k = 0; k <= n; ++k) {
    const double lk = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(static_cast<double>(n - k) + 1.0) +
                      static_cast<double>(k) * std::log(p) + static_cast<double>(n - k) * std::log1p(-p);
    pmf[k] = std::exp(lk);
  }
  std::uint64_t lo = 0;
  double tail = 0.0;
  while (lo < n && tail + pmf[lo] <= 0.005) tail += pmf[lo++];
  std::uint64_t hi = n;
  tail = 0.0;
  while (hi > 0 && tail + pmf[hi] <= 0.005) tail += pmf[hi--];
  return {lo, hi};
}

probe::ProbeRun probe_through(double delay_ms, double loss, std::uint64_t seed) {
  relay::RelayConfig rc;
  rc.listen = "127.0.0.1:0";
  rc.injected_delay_ms = delay_ms;
  rc.injected_loss_rate = loss;
  rc.loss_seed = seed;
  auto server = relay::serve(rc);
  probe::ProbeConfig pc;
  pc.target = server->local().to_string();
  pc.bind = "127.0.0.1:0";
  pc.interval_ms = 40.0;
  pc.count = 500;
  return probe::run_probe(pc);
}

void probe_oracle(Outcome& o) {
  for (double d : {10.0, 25.0, 60.0}) {
    const auto run = probe_through(d, 0.0, 1);
    double sum = 0.0;
    std::uint64_t n = 0;
    for (const auto& r : run.records) {
      if (r.lost) continue;
      sum += r.e2e_delay_ms;
      ++n;
    }
    const double mean = n ? sum / static_cast<double>(n) : 0.0;
    o.check(run.lost == 0, "d=" + fmt(d, 0) + " lost " + std::to_string(run.lost));
    o.check(std::abs(mean - d) <= 5.0, "d=" + fmt(d, 0) + " mean " + fmt(mean, 3));
    o.detail << (o.pass ? "" : " | ") << "d=" << fmt(d, 0) << ": mean " << fmt(mean, 2) << " ms lost " << run.lost
             << "; ";
  }
  const auto run = probe_through(0.0, 0.2, 7);
  const auto [lo, hi] = binomial_interval(500, 0.2);
  o.check(run.lost >= lo && run.lost <= hi, "loss 0.2 gave " + std::to_string(run.lost) + " lost");
  o.detail << "p=0.2: " << run.lost << "/500 lost, 99% interval [" << lo << ", " << hi << "]";
}

// ------------------------------------------------------------------ 4

void recorder_losslessness(Outcome& o) {
  const std::size_t block_bytes = 64 * 1024;
  const std::uint64_t seed = 3;
  const auto path = scratch("capture.cvqb");
  recorder::SyntheticSource source(block_bytes, seed);
  recorder::CaptureOptions options;
  options.serializers = 2;
  const auto report = recorder::run_capture(source, path, std::chrono::seconds(60), options);
  o.check(!report.aborted, "capture aborted: " + report.abort_reason);
  o.check(report.blocks_produced == 6000, "produced " + std::to_string(report.blocks_produced));
  o.check(report.blocks_lost == 0, "lost " + std::to_string(report.blocks_lost));

  const auto frames = recorder::read_capture(path);
  bool gapless = frames.size() == report.blocks_produced;
  bool checksums = true, payloads = true;
  std::vector<std::uint8_t> expected(block_bytes);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    gapless = gapless && frames[i].sequence_index == i;
    checksums = checksums && frames[i].checksum_ok;
    recorder::SyntheticSource::payload_for(seed, frames[i].sequence_index, expected);
    payloads = payloads && frames[i].payload == expected;
  }
  fs::remove(path);
  o.check(gapless, "on-disk sequence has gaps (" + std::to_string(frames.size()) + " frames)");
  o.check(checksums, "checksum mismatch");
  o.check(payloads, "payload differs from the produced block");

  recorder::SyntheticSource slow_source(block_bytes, seed);
  recorder::CaptureOptions slow;
  slow.serializers = 2;
  slow.sink_delay_per_block = std::chrono::microseconds(30'000);
  const auto slow_path = scratch("throttled.cvqb");
  const auto throttled = recorder::run_capture(slow_source, slow_path, std::chrono::seconds(3), slow);
  const auto slow_frames = recorder::read_capture(slow_path);
  fs::remove(slow_path);
  o.check(throttled.blocks_lost > 0, "throttled run lost nothing");
  o.check(throttled.blocks_captured + throttled.blocks_lost == throttled.blocks_produced,
          "throttled accounting does not add up");
  o.check(slow_frames.size() == throttled.blocks_captured, "throttled file frame count differs from report");
  o.detail << (o.pass ? "" : " | ") << "60 s: " << frames.size() << " blocks, " << report.blocks_lost
           << " lost; throttled: " << throttled.blocks_captured << " captured + " << throttled.blocks_lost
           << " lost = " << throttled.blocks_produced << " produced";
}

// ------------------------------------------------------------------ 5

ingest::KpiSample modem_sample(std::int64_t t, std::uint32_t eci) {
  ingest::KpiSample s;
  s.time_ns = t;
  s.source = ingest::Source::Modem;
  s.eci = eci;
  s.lte_band = 3;
  s.earfcn = 1300;
  s.rsrp_dbm = -90;
  s.rssi_dbm = -60;
  s.rsrq_db = -10;
  return s;
}

ingest::KpiSample oai_sample(std::int64_t t, int pci, double rsrp) {
  ingest::KpiSample s;
  s.time_ns = t;
  s.source = ingest::Source::Oai;
  s.pci = pci;
  s.rsrp_dbm = rsrp;
  s.rssi_dbm = rsrp + 30;
  s.rsrq_db = -10;
  return s;
}

void fusion_oracle(Outcome& o) {
  // Coincident ticks: every source samples exactly at each packet's tx time.
  std::vector<probe::DelayRecord> delays;
  std::vector<ingest::KpiSample> modem, oai;
  std::vector<ingest::GnssFix> gnss;
  for (std::int64_t i = 0; i < 10'000; ++i) {
    const auto t = i * 40'000'000;
    probe::DelayRecord d;
    d.sequence = static_cast<std::uint64_t>(i);
    d.tx_time_ns = static_cast<std::uint64_t>(t);
    d.rx_time_ns = d.tx_time_ns + 30'000'000;
    d.e2e_delay_ms = 30.0;
    delays.push_back(d);
    modem.push_back(modem_sample(t, 100));
    oai.push_back(oai_sample(t, 7, -80.0 - static_cast<double>(i % 20)));
    gnss.push_back({t, 48.0, 11.0, static_cast<double>(i % 50)});
  }
  const auto fused = ingest::fuse(delays, modem, oai, gnss);
  std::size_t zero = 0;
  for (const auto& r : fused) {
    zero += r.modem_staleness_ns == 0 && r.oai_staleness_ns == 0 && r.gnss_staleness_ns == 0 ? 1 : 0;
  }
  o.check(fused.size() == delays.size() && zero == fused.size(),
          std::to_string(fused.size() - zero) + " records with non-zero staleness");

  // 5% of OAI samples carry a wrong PCI; exactly those must be removed.
  const std::vector<std::pair<std::uint32_t, int>> cells = {{100, 7}, {200, 42}, {300, 311}};
  Rng rng(5);
  std::vector<ingest::KpiSample> m2, o2, clean;
  std::set<std::size_t> corrupted;
  const std::int64_t dwell = 60'000'000'000;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto start = static_cast<std::int64_t>(c) * dwell;
    for (std::int64_t t = start; t < start + dwell; t += 2'000'000'000) m2.push_back(modem_sample(t, cells[c].first));
    for (std::int64_t t = start; t < start + dwell; t += 10'000'000) {
      auto s = oai_sample(t, cells[c].second, -85.0);
      if (rng.uniform() < 0.05) {
        corrupted.insert(o2.size());
        s.pci = static_cast<int>((cells[c].second + 1 + rng.below(500)) % 504);
      } else {
        clean.push_back(s);
      }
      o2.push_back(s);
    }
  }
  const auto mapping = ingest::build_cell_mapping(m2, o2);
  const auto filtered = ingest::remove_false_positives(o2, mapping, m2);
  o.check(filtered.removed == corrupted.size(), "removed " + std::to_string(filtered.removed) + " of " +
                                                    std::to_string(corrupted.size()) + " corrupted");
  o.check(filtered.kept == clean, "kept samples differ from the uncorrupted set");
  o.detail << (o.pass ? "" : " | ") << zero << "/" << fused.size() << " zero-staleness records; removed "
           << filtered.removed << " = corrupted " << corrupted.size() << " of " << o2.size();
}

// ------------------------------------------------------------------ 6

double brute_mi(const std::vector<std::vector<int>>& xs, const std::vector<int>& y) {
  std::map<std::vector<int>, double> px, pxy;
  std::map<int, double> py;
  const double n = static_cast<double>(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    std::vector<int> key;
    for (const auto& col : xs) key.push_back(col[i]);
    px[key] += 1;
    py[y[i]] += 1;
    key.push_back(y[i]);
    pxy[key] += 1;
  }
  auto h = [&](const auto& m) {
    double acc = 0;
    for (const auto& [k, c] : m) acc -= c / n * std::log(c / n);
    return acc / std::log(2.0);
  };
  return h(px) + h(py) - h(pxy);
}

void mi_oracle(Outcome& o) {
  Rng rng(21);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = 20 + rng.below(2000);
    const auto dims = 1 + rng.below(3);
    const auto levels = 2 + rng.below(8);
    std::vector<std::vector<int>> xs(dims, std::vector<int>(n));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.below(3));
      for (auto& col : xs) col[i] = rng.uniform() < 0.3 ? y[i] : static_cast<int>(rng.below(levels));
    }
    std::vector<std::span<const int>> spans(xs.begin(), xs.end());
    worst = std::max(worst, std::abs(ml::mutual_information(spans, y) - brute_mi(xs, y)));
  }
  o.check(worst <= 1e-12, "max deviation " + std::to_string(worst));

  std::vector<int> y, indep;
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 4; ++b) {
      y.push_back(a);
      indep.push_back(b);
    }
  const double ident = ml::mutual_information(y, y);
  const double zero = ml::mutual_information(indep, y);
  o.check(ident == 3.0, "I(Y;Y) = " + fmt(ident, 17));
  o.check(zero == 0.0, "I(X;Y) for independent X = " + fmt(zero, 17));
  o.detail << (o.pass ? "" : " | ") << "50 datasets, max |diff| " << worst << "; I(Y;Y)=" << ident
           << " bits, independent=" << zero;
}

// ------------------------------------------------------------------ shared simulator pipeline

std::vector<ingest::FusedRecord> simulate_and_fuse(const simulate::ScenarioConfig& config) {
  const auto bundle = simulate::generate(config);
  const auto mapping = ingest::build_cell_mapping(bundle.modem, bundle.oai);
  const auto filtered = ingest::remove_false_positives(bundle.oai, mapping, bundle.modem);
  ingest::FuseOptions options;
  options.mapping = &mapping;
  options.bandwidths = &bundle.channels;
  return ingest::fuse(bundle.delays, bundle.modem, filtered.kept, bundle.gnss, options);
}

// ------------------------------------------------------------------ 7

simulate::ScenarioConfig selection_scenario(std::uint64_t seed) {
  simulate::ScenarioConfig c;
  c.duration_s = 300.0;
  c.seed = seed;
  const double bases[] = {42.0, 58.0};
  for (int i = 0; i < 2; ++i) {
    simulate::EnbConfig e;
    e.eci = 5000 + static_cast<std::uint32_t>(i);
    e.pci = 20 + i;
    e.base_delay_ms = bases[i];
    e.delay_jitter_ms = 8.0;
    e.rsrp_center_dbm = -88.0;
    e.dwell_s = 150.0;
    c.enbs.push_back(e);
  }
  return c;
}

void md_selection(Outcome& o) {
  const std::set<std::string> planted = {std::string(ml::kExpectedDelay), "rsrp_dbm"};
  int planted_first = 0, duplicate_picked = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto fused = simulate_and_fuse(selection_scenario(seed));
    ml::FeatureOptions f;
    f.features = {std::string(ml::kExpectedDelay), "rsrp_dbm", "speed_kmph", "noise_power_dbm"};
    const auto base = ml::build_dataset(fused, ml::ClassScheme::Binary50, f);

    // Append pure-noise columns and an exact copy of rsrp.
    const Eigen::Index n = static_cast<Eigen::Index>(base.rows());
    Eigen::MatrixXd x(n, base.features.cols() + 4);
    x.leftCols(base.features.cols()) = base.features;
    auto names = base.names;
    Rng rng(1000 + seed);
    for (int j = 0; j < 3; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) x(i, base.features.cols() + j) = rng.normal();
      names.push_back("gauss_" + std::to_string(j));
    }
    x.col(x.cols() - 1) = base.features.col(static_cast<Eigen::Index>(*base.column("rsrp_dbm")));
    names.push_back("rsrp_dup");
    const auto data = ml::make_dataset(x, base.labels, names, base.scheme);

    ml::SelectionOptions so;
    so.max_features = static_cast<std::size_t>(data.cols());
    const auto result = ml::md_select(data, so);
    bool first_two = result.steps.size() >= 2;
    for (std::size_t i = 0; i < 2 && i < result.steps.size(); ++i) first_two = first_two && planted.count(result.steps[i].name);
    planted_first += first_two ? 1 : 0;
    for (const auto& s : result.steps) duplicate_picked += s.name == "rsrp_dup" ? 1 : 0;
  }
  o.check(planted_first >= 19, "planted features first in only " + std::to_string(planted_first) + "/20 runs");
  o.check(duplicate_picked == 0, "duplicate selected in " + std::to_string(duplicate_picked) + " runs");
  o.detail << (o.pass ? "" : " | ") << "planted first in " << planted_first << "/20 runs; duplicate selected "
           << duplicate_picked << " times";
}

// ------------------------------------------------------------------ 8

void balancing(Outcome& o) {
  auto counts = [](const std::vector<int>& y, const std::vector<std::size_t>& idx, int k) {
    std::vector<std::size_t> c(static_cast<std::size_t>(k));
    for (auto i : idx) ++c[static_cast<std::size_t>(y[i])];
    return c;
  };
  std::vector<int> yb(80, 0);
  yb.insert(yb.end(), 20, 1);
  const auto b = counts(yb, ml::balance_indices(yb, ml::ClassScheme::Binary50, 1), 2);
  std::vector<int> ym(700, 0);
  ym.insert(ym.end(), 200, 1);
  ym.insert(ym.end(), 30, 2);
  const auto m = counts(ym, ml::balance_indices(ym, ml::ClassScheme::Multiclass, 1), 3);
  const double share = static_cast<double>(m[2]) / static_cast<double>(m[0] + m[1] + m[2]);
  o.check(b == std::vector<std::size_t>{20, 20}, "binary gave " + std::to_string(b[0]) + "/" + std::to_string(b[1]));
  o.check(m == std::vector<std::size_t>{210, 60, 30}, "multiclass gave " + std::to_string(m[0]) + "/" +
                                                          std::to_string(m[1]) + "/" + std::to_string(m[2]));
  o.check(share == 0.1, "minority share " + fmt(share, 17));
  o.detail << (o.pass ? "" : " | ") << "(80,20)->(" << b[0] << "," << b[1] << "); (700,200,30)->(" << m[0] << ","
           << m[1] << "," << m[2] << "), >100ms share " << share;
}

// ------------------------------------------------------------------ 9

ml::Dataset named(Eigen::MatrixXd x, std::vector<int> y) {
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < x.cols(); ++j) names.push_back("x" + std::to_string(j));
  return ml::make_dataset(std::move(x), std::move(y), std::move(names), ml::ClassScheme::Binary50);
}

void nn_correctness(Outcome& o) {
  Rng rng(17);
  ml::Mlp<double> net(5, 12, 3);
  net.init(rng);
  for (Eigen::Index i = 0; i < net.b1.size(); ++i) net.b1(i) = rng.normal(0.0, 0.1);
  Eigen::MatrixXd x(32, 5);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  std::vector<int> y(32);
  for (auto& v : y) v = static_cast<int>(rng.below(3));
  ml::Mlp<double>::Gradients g;
  net.loss(x, y, &g);
  ml::Mlp<double> grad_view = net;
  grad_view.w1 = g.w1;
  grad_view.b1 = g.b1;
  grad_view.w2 = g.w2;
  grad_view.b2 = g.b2;
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const auto i = rng.below(net.parameter_count());
    const double saved = net.parameter(i), h = 1e-5;
    net.parameter(i) = saved + h;
    const double up = net.loss(x, y);
    net.parameter(i) = saved - h;
    const double down = net.loss(x, y);
    net.parameter(i) = saved;
    const double numeric = (up - down) / (2 * h), analytic = grad_view.parameter(i);
    worst = std::max(worst, std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8}));
  }
  o.check(worst <= 1e-4, "gradient relative error " + std::to_string(worst));

  const int n = 2000;
  Eigen::MatrixXd xs(n, 2);
  std::vector<int> ys(n);
  for (int i = 0; i < n; ++i) {
    ys[static_cast<std::size_t>(i)] = i % 2;
    xs(i, 0) = (i % 2 ? 2.0 : -2.0) + rng.normal(0.0, 0.5);
    xs(i, 1) = rng.normal();
  }
  const auto sep = named(xs, ys);
  const auto model = ml::train(sep);
  const auto pred = ml::predict_labels(model, sep.features);
  const auto train_acc = ml::report_from_confusion(ml::confusion_matrix(sep.labels, pred, 2), sep.scheme).accuracy;
  o.check(train_acc >= 0.99, "separable training accuracy " + fmt(train_acc));

  Eigen::MatrixXd xr(n, 4);
  std::vector<int> yr(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 4; ++j) xr(i, j) = rng.normal();
    yr[static_cast<std::size_t>(i)] = rng.uniform() < 0.7 ? 0 : 1;
  }
  rng.shuffle(yr);
  ml::CvOptions cv;
  cv.hyper.epochs = 20;
  const auto r = ml::cross_validate(named(xr, yr), cv);
  const double prior = std::max(r.model.classes[0].support, r.model.classes[1].support);
  o.check(std::abs(r.model.accuracy - prior) <= 0.05, "shuffled-label CV accuracy " + fmt(r.model.accuracy) +
                                                          " vs prior " + fmt(prior));
  o.detail << (o.pass ? "" : " | ") << "gradient rel err " << worst << "; separable acc " << fmt(train_acc)
           << "; shuffled CV " << fmt(r.model.accuracy) << " vs prior " << fmt(prior);
}

// ------------------------------------------------------------------ 10

void end_to_end(Outcome& o) {
  auto config = simulate::preset("two-regime");
  config.seed = 11;
  const auto fused = simulate_and_fuse(config);
  const auto all = ml::build_dataset(fused, ml::ClassScheme::Binary50);  // default feature list
  const auto selection = ml::md_select(all);
  o.check(!selection.steps.empty() && selection.steps[0].name == ml::kExpectedDelay,
          "first selected feature is " + (selection.steps.empty() ? std::string("none") : selection.steps[0].name));

  ml::FeatureOptions f;
  f.features.clear();
  for (const auto& s : selection.steps) f.features.push_back(s.name);
  const auto balanced = ml::balance(ml::build_dataset(fused, ml::ClassScheme::Binary50, f), 11);
  ml::CvOptions cv;
  cv.folds = 5;
  cv.seed = 11;
  cv.hyper.seed = 11;
  const auto r = ml::cross_validate(balanced, cv);
  o.check(r.model.accuracy >= 0.90, "pooled accuracy " + fmt(r.model.accuracy));
  o.check(r.model.accuracy > r.baseline.accuracy, "not above the majority baseline " + fmt(r.baseline.accuracy));
  std::string order;
  for (const auto& s : selection.steps) order += (order.empty() ? "" : ",") + s.name;
  o.detail << (o.pass ? "" : " | ") << "selected [" << order << "], " << balanced.rows()
           << " balanced rows, accuracy " << fmt(r.model.accuracy) << " vs baseline " << fmt(r.baseline.accuracy);
}

// ------------------------------------------------------------------ 11

void compliance_oracle(Outcome& o) {
  Rng rng(31);
  std::size_t mismatches = 0, non_monotone = 0;
  for (int trial = 0; trial < 10'000; ++trial) {
    std::vector<double> delays(1 + rng.below(200));
    for (auto& d : delays) d = rng.uniform() < 0.2 ? std::round(rng.uniform() * 20) * 10 : rng.exponential(1.0 / 40.0);
    std::vector<double> thresholds(analyze::kDefaultThresholdsMs.begin(), analyze::kDefaultThresholdsMs.end());
    for (int k = 0; k < 3; ++k) thresholds.push_back(std::round(rng.uniform() * 300));
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    const auto report = analyze::compliance(delays, thresholds);
    double previous = -1.0;
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
      const auto& e = report.entries[i];
      const auto brute = static_cast<std::uint64_t>(
          std::count_if(delays.begin(), delays.end(), [&](double d) { return d <= e.threshold_ms; }));
      const double fraction = static_cast<double>(brute) / static_cast<double>(delays.size());
      if (e.within != brute || e.total != delays.size() || e.fraction != fraction || e.threshold_ms != thresholds[i]) {
        ++mismatches;
      }
      if (e.fraction < previous) ++non_monotone;
      previous = e.fraction;
    }
  }
  o.check(mismatches == 0, std::to_string(mismatches) + " entries differ from the brute-force count");
  o.check(non_monotone == 0, std::to_string(non_monotone) + " monotonicity violations");
  o.detail << (o.pass ? "" : " | ") << "10000 delay sets, " << mismatches << " mismatches, " << non_monotone
           << " monotonicity violations";
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<void(Outcome&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "channel table fidelity", 1.0, channel_table},
      {2, "metric identities", 1.0, metric_identities},
      {3, "probe oracle", 120.0, probe_oracle},
      {4, "recorder losslessness", 120.0, recorder_losslessness},
      {5, "fusion oracle", 30.0, fusion_oracle},
      {6, "mutual information oracle", 30.0, mi_oracle},
      {7, "maximal-dependency selection", 120.0, md_selection},
      {8, "balancing arithmetic", 1.0, balancing},
      {9, "network correctness", 120.0, nn_correctness},
      {10, "end-to-end prediction", 300.0, end_to_end},
      {11, "compliance analytics", 10.0, compliance_oracle},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.check(elapsed <= c.budget_s, "runtime over the " + fmt(c.budget_s, 0) + " s budget");
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " (" << fmt(elapsed, 2) << " s / "
              << fmt(c.budget_s, 0) << " s): " << o.detail.str() << std::endl;
  }
  fs::remove_all(fs::temp_directory_path() / ("cvqos_acceptance_" + std::to_string(::getpid())));
  std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << std::endl;
  return failed == 0 ? 0 : 1;
}
