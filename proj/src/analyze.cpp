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

#include "cvqos/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "cvqos/csv.hpp"
#include "cvqos/error.hpp"

namespace cvqos::analyze {

namespace {

std::vector<ComplianceEntry> count_within(std::span<const double> sorted, std::span<const double> thresholds) {
  std::vector<double> th(thresholds.begin(), thresholds.end());
  std::sort(th.begin(), th.end());
  std::vector<ComplianceEntry> out;
  out.reserve(th.size());
  for (double t : th) {
    const auto within = static_cast<std::uint64_t>(std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
    const auto total = static_cast<std::uint64_t>(sorted.size());
    out.push_back({t, within, total, total == 0 ? 0.0 : static_cast<double>(within) / static_cast<double>(total)});
  }
  return out;
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

ComplianceReport compliance(std::span<const double> delays_ms, std::span<const double> thresholds_ms) {
  if (delays_ms.empty()) throw Error(Errc::EmptyInput, "no delivered packets to evaluate");
  std::vector<double> sorted(delays_ms.begin(), delays_ms.end());
  std::sort(sorted.begin(), sorted.end());
  return ComplianceReport{count_within(sorted, thresholds_ms)};
}

double percentile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(Errc::EmptyInput, "percentile of an empty sample");
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

std::vector<EnbDelayStats> enb_stats(std::span<const ingest::FusedRecord> records,
                                     std::span<const double> thresholds_ms) {
  // nullopt sorts first in std::map; the unknown bucket is moved last below.
  std::map<std::optional<std::uint32_t>, std::pair<std::vector<double>, std::uint64_t>> groups;
  for (const auto& r : records) {
    auto& g = groups[r.eci];
    if (r.delay.lost) {
      ++g.second;
    } else {
      g.first.push_back(r.delay.e2e_delay_ms);
    }
  }
  std::vector<EnbDelayStats> out;
  for (auto& [eci, group] : groups) {
    auto& [delays, lost] = group;
    EnbDelayStats s;
    s.eci = eci;
    s.packets = delays.size();
    s.lost = lost;
    std::sort(delays.begin(), delays.end());
    if (!delays.empty()) {
      s.mean_delay_ms = mean_of(delays);
      s.min_ms = delays.front();
      s.q1_ms = percentile(delays, 25);
      s.median_ms = percentile(delays, 50);
      s.q3_ms = percentile(delays, 75);
      s.p95_ms = percentile(delays, 95);
      s.max_ms = delays.back();
    }
    s.compliance = count_within(delays, thresholds_ms);
    out.push_back(std::move(s));
  }
  if (!out.empty() && !out.front().eci) std::rotate(out.begin(), out.begin() + 1, out.end());
  return out;
}

std::map<std::uint32_t, double> expected_delay_table(std::span<const ingest::FusedRecord> records) {
  std::map<std::uint32_t, std::pair<double, std::uint64_t>> acc;
  for (const auto& r : records) {
    if (r.delay.lost || !r.eci) continue;
    auto& a = acc[*r.eci];
    a.first += r.delay.e2e_delay_ms;
    ++a.second;
  }
  std::map<std::uint32_t, double> out;
  for (const auto& [eci, a] : acc) out[eci] = a.first / static_cast<double>(a.second);
  return out;
}

std::vector<std::optional<double>> expected_delay_online(std::span<const EciDelay> stream, std::size_t warmup_n) {
  if (warmup_n == 0) throw Error(Errc::Usage, "warmup must be at least one packet");
  std::map<std::uint32_t, std::pair<double, std::uint64_t>> state;
  std::vector<std::optional<double>> out;
  out.reserve(stream.size());
  for (const auto& item : stream) {
    if (!item.eci) {
      out.emplace_back();
      continue;
    }
    auto& [sum, n] = state[*item.eci];
    out.push_back(n >= warmup_n ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt);
    if (item.delay_ms) {
      sum += *item.delay_ms;
      ++n;
    }
  }
  return out;
}

CoverageStats coverage_stats(std::span<const double> rsrp_dbm, double threshold_dbm) {
  if (rsrp_dbm.empty()) throw Error(Errc::EmptyInput, "no RSRP samples");
  std::vector<double> sorted(rsrp_dbm.begin(), rsrp_dbm.end());
  std::sort(sorted.begin(), sorted.end());
  CoverageStats s;
  s.threshold_dbm = threshold_dbm;
  s.total = sorted.size();
  s.at_or_below = static_cast<std::uint64_t>(std::upper_bound(sorted.begin(), sorted.end(), threshold_dbm) -
                                             sorted.begin());
  s.fraction = static_cast<double>(s.at_or_below) / static_cast<double>(s.total);
  const auto lo = static_cast<long>(std::floor(sorted.front()));
  const auto hi = static_cast<long>(std::ceil(sorted.back()));
  for (long x = lo; x <= hi; ++x) {
    const auto le = std::upper_bound(sorted.begin(), sorted.end(), static_cast<double>(x)) - sorted.begin();
    s.cdf.push_back({static_cast<double>(x), static_cast<double>(le) / static_cast<double>(s.total)});
  }
  return s;
}

IntervalEffect interval_effect(const std::map<double, std::vector<double>>& runs, std::optional<double> reference_ms) {
  if (runs.size() < 2) throw Error(Errc::InsufficientGroups, "interval comparison needs at least two intervals");
  IntervalEffect e;
  for (const auto& [interval, delays] : runs) {
    if (delays.empty()) throw Error(Errc::EmptyInput, "interval " + csv::format(interval) + " ms has no delays");
    e.means.push_back({interval, delays.size(), mean_of(delays)});
  }
  for (std::size_t i = 0; i < e.means.size(); ++i) {
    for (std::size_t j = i + 1; j < e.means.size(); ++j) {
      e.pairwise.push_back({e.means[i].interval_ms, e.means[j].interval_ms,
                            e.means[j].mean_delay_ms - e.means[i].mean_delay_ms});
    }
  }
  e.reference_interval_ms = reference_ms.value_or(e.means.back().interval_ms);
  auto ref = std::find_if(e.means.begin(), e.means.end(),
                          [&](const IntervalMean& m) { return m.interval_ms == e.reference_interval_ms; });
  if (ref == e.means.end()) {
    throw Error(Errc::Usage, "reference interval " + csv::format(e.reference_interval_ms) + " ms is not among the runs");
  }
  for (const auto& m : e.means) e.reduction_vs_reference.emplace_back(m.interval_ms, ref->mean_delay_ms - m.mean_delay_ms);
  return e;
}

std::vector<WindowPoint> windowed_series(std::span<const TimedDelay> delays, double window_ms) {
  if (!(window_ms > 0.0)) throw Error(Errc::Usage, "window must be positive");
  const auto w = std::llround(window_ms * 1e6);
  std::map<std::int64_t, std::pair<double, std::uint64_t>> acc;
  for (const auto& d : delays) {
    // Floor division, correct for negative times too.
    auto q = d.time_ns / w;
    if (d.time_ns % w != 0 && d.time_ns < 0) --q;
    auto& a = acc[q * w];
    a.first += d.delay_ms;
    ++a.second;
  }
  std::vector<WindowPoint> out;
  out.reserve(acc.size());
  for (const auto& [start, a] : acc) out.push_back({start, a.second, a.first / static_cast<double>(a.second)});
  return out;
}

std::vector<ChannelShare> channel_inventory(std::span<const ingest::FusedRecord> records) {
  std::map<std::pair<int, std::uint32_t>, ChannelShare> acc;
  std::uint64_t total = 0;
  for (const auto& r : records) {
    if (!r.channel) continue;
    auto& share = acc[{r.channel->band, r.channel->earfcn}];
    if (share.records == 0) share.channel = *r.channel;
    if (!share.channel.bandwidth_mhz) share.channel.bandwidth_mhz = r.channel->bandwidth_mhz;
    ++share.records;
    ++total;
  }
  std::vector<ChannelShare> out;
  for (auto& [key, share] : acc) {
    share.channel.fc_dl_mhz = ingest::earfcn_to_fc(key.first, key.second);
    share.percent = 100.0 * static_cast<double>(share.records) / static_cast<double>(total);
    out.push_back(share);
  }
  return out;
}

std::vector<double> delivered_delays(std::span<const ingest::FusedRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (!r.delay.lost) out.push_back(r.delay.e2e_delay_ms);
  }
  return out;
}

std::string compliance_to_csv(const ComplianceReport& report) {
  csv::Writer w({"threshold_ms", "within", "total", "fraction"});
  for (const auto& e : report.entries) {
    w.field(e.threshold_ms).field(e.within).field(e.total).field(e.fraction);
    w.end_row();
  }
  return w.str();
}

std::string enb_stats_to_csv(const std::vector<EnbDelayStats>& stats) {
  std::vector<std::string> header = {"eci",   "packets", "lost",   "mean_delay_ms", "min_ms",
                                     "q1_ms", "median_ms", "q3_ms", "p95_ms",        "max_ms"};
  if (!stats.empty()) {
    for (const auto& c : stats.front().compliance) header.push_back("compliance_" + csv::format(c.threshold_ms));
  }
  csv::Writer w(header);
  for (const auto& s : stats) {
    if (s.eci) {
      w.field(*s.eci);
    } else {
      w.field("unknown");
    }
    w.field(s.packets).field(s.lost).field(s.mean_delay_ms).field(s.min_ms).field(s.q1_ms).field(s.median_ms);
    w.field(s.q3_ms).field(s.p95_ms).field(s.max_ms);
    for (const auto& c : s.compliance) w.field(c.fraction);
    w.end_row();
  }
  return w.str();
}

std::string coverage_to_csv(const CoverageStats& stats) {
  csv::Writer w({"rsrp_dbm", "cdf"});
  for (const auto& p : stats.cdf) {
    w.field(p.x).field(p.fraction);
    w.end_row();
  }
  return w.str();
}

std::string interval_effect_to_csv(const IntervalEffect& effect) {
  csv::Writer w({"interval_ms", "count", "mean_delay_ms", "reduction_vs_reference_ms"});
  for (std::size_t i = 0; i < effect.means.size(); ++i) {
    const auto& m = effect.means[i];
    w.field(m.interval_ms).field(m.count).field(m.mean_delay_ms).field(effect.reduction_vs_reference[i].second);
    w.end_row();
  }
  return w.str();
}

std::string series_to_csv(const std::vector<WindowPoint>& series) {
  csv::Writer w({"window_start_ns", "count", "mean_delay_ms"});
  for (const auto& p : series) {
    w.field(p.window_start_ns).field(p.count).field(p.mean_delay_ms);
    w.end_row();
  }
  return w.str();
}

std::string channels_to_csv(const std::vector<ChannelShare>& shares) {
  csv::Writer w({"band", "earfcn", "fc_dl_mhz", "bandwidth_mhz", "records", "percent"});
  for (const auto& s : shares) {
    w.field(s.channel.band).field(s.channel.earfcn).field(s.channel.fc_dl_mhz).field(s.channel.bandwidth_mhz);
    w.field(s.records).field(s.percent);
    w.end_row();
  }
  return w.str();
}

std::string delay_cdf_to_csv(std::span<const double> delays_ms) {
  csv::Writer w({"delay_ms", "cdf"});
  if (delays_ms.empty()) return w.str();
  std::vector<double> sorted(delays_ms.begin(), delays_ms.end());
  std::sort(sorted.begin(), sorted.end());
  const auto lo = static_cast<long>(std::floor(sorted.front()));
  const auto hi = static_cast<long>(std::ceil(sorted.back()));
  for (long x = lo; x <= hi; ++x) {
    const auto le = std::upper_bound(sorted.begin(), sorted.end(), static_cast<double>(x)) - sorted.begin();
    w.field(static_cast<double>(x)).field(static_cast<double>(le) / static_cast<double>(sorted.size()));
    w.end_row();
  }
  return w.str();
}

std::string summarize(const ComplianceReport& report, std::uint64_t lost, std::uint64_t total) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1);
  out << "packets " << total << ", lost " << lost << " (";
  out << (total == 0 ? 0.0 : 100.0 * static_cast<double>(lost) / static_cast<double>(total)) << "%)\n";
  for (const auto& e : report.entries) {
    out << "delay <= " << e.threshold_ms << " ms: " << 100.0 * e.fraction << "% (" << e.within << "/" << e.total
        << ")\n";
  }
  return out.str();
}

}  // namespace cvqos::analyze
