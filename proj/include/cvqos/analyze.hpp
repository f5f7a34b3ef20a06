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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cvqos/ingest.hpp"

namespace cvqos::analyze {

inline const std::vector<double> kDefaultThresholdsMs = {50.0, 100.0};

struct ComplianceEntry {
  double threshold_ms = 0.0;
  std::uint64_t within = 0;  // delays <= threshold
  std::uint64_t total = 0;
  double fraction = 0.0;
};

struct ComplianceReport {
  std::vector<ComplianceEntry> entries;  // ascending threshold
};

/// Fraction of delays at or below each threshold. Lost packets must already
/// be filtered out. Throws Errc::EmptyInput on an empty input.
ComplianceReport compliance(std::span<const double> delays_ms,
                            std::span<const double> thresholds_ms = kDefaultThresholdsMs);

/// Nearest-rank percentile, p in [0, 100]. `sorted` must be ascending and
/// non-empty.
double percentile(std::span<const double> sorted, double p);

/// Per-eNB aggregates. `eci` is empty for the reserved "unknown" bucket.
struct EnbDelayStats {
  std::optional<std::uint32_t> eci;
  std::uint64_t packets = 0;  // non-lost
  std::uint64_t lost = 0;
  double mean_delay_ms = 0.0;  // the expected E2E delay feature
  double min_ms = 0.0;
  double q1_ms = 0.0;
  double median_ms = 0.0;
  double q3_ms = 0.0;
  double p95_ms = 0.0;
  double max_ms = 0.0;
  std::vector<ComplianceEntry> compliance;
};

/// One entry per distinct eci in ascending eci order, unknown last. Entries
/// with no delivered packet carry zeroed delay statistics.
std::vector<EnbDelayStats> enb_stats(std::span<const ingest::FusedRecord> records,
                                     std::span<const double> thresholds_ms = kDefaultThresholdsMs);

/// Batch per-eNB means keyed by eci; the "crowdsourced" expected delay.
std::map<std::uint32_t, double> expected_delay_table(std::span<const ingest::FusedRecord> records);

struct EciDelay {
  std::optional<std::uint32_t> eci;
  std::optional<double> delay_ms;  // empty for a lost packet
};

/// Running per-eci mean of the delays seen before each packet. A value is
/// emitted only once `warmup_n` earlier delays exist for that eci. Lost
/// packets and packets without an eci receive a value but do not update it.
std::vector<std::optional<double>> expected_delay_online(std::span<const EciDelay> stream, std::size_t warmup_n);

struct CdfPoint {
  double x = 0.0;
  double fraction = 0.0;  // P(value <= x)
};

struct CoverageStats {
  double threshold_dbm = -90.0;
  std::uint64_t at_or_below = 0;
  std::uint64_t total = 0;
  double fraction = 0.0;
  std::vector<CdfPoint> cdf;  // 1 dB steps spanning the data
};

/// Throws Errc::EmptyInput on an empty input.
CoverageStats coverage_stats(std::span<const double> rsrp_dbm, double threshold_dbm = -90.0);

struct IntervalMean {
  double interval_ms = 0.0;
  std::uint64_t count = 0;
  double mean_delay_ms = 0.0;
};

struct IntervalDelta {
  double from_interval_ms = 0.0;
  double to_interval_ms = 0.0;
  double delta_ms = 0.0;  // mean(to) - mean(from)
};

struct IntervalEffect {
  std::vector<IntervalMean> means;      // ascending interval
  std::vector<IntervalDelta> pairwise;  // every from < to pair
  double reference_interval_ms = 0.0;
  /// Per interval: mean(reference) - mean(interval), i.e. the delay reduction.
  std::vector<std::pair<double, double>> reduction_vs_reference;
};

/// Throws Errc::InsufficientGroups for fewer than two intervals and
/// Errc::EmptyInput when a group has no delays. The reference defaults to the
/// longest interval.
IntervalEffect interval_effect(const std::map<double, std::vector<double>>& runs,
                               std::optional<double> reference_ms = std::nullopt);

struct TimedDelay {
  std::int64_t time_ns = 0;
  double delay_ms = 0.0;
};

struct WindowPoint {
  std::int64_t window_start_ns = 0;
  std::uint64_t count = 0;
  double mean_delay_ms = 0.0;
};

/// Tumbling-window means keyed by window start (floor(t / w) * w); empty
/// windows are omitted. Throws Errc::Usage for a non-positive window.
std::vector<WindowPoint> windowed_series(std::span<const TimedDelay> delays, double window_ms = 250.0);

struct ChannelShare {
  ingest::CellChannel channel;
  std::uint64_t records = 0;
  double percent = 0.0;
};

/// Occupancy of each (band, earfcn) over records that carry a channel.
std::vector<ChannelShare> channel_inventory(std::span<const ingest::FusedRecord> records);

// Plot-ready CSV and text renderings.
std::string compliance_to_csv(const ComplianceReport& report);
std::string enb_stats_to_csv(const std::vector<EnbDelayStats>& stats);
std::string coverage_to_csv(const CoverageStats& stats);
std::string interval_effect_to_csv(const IntervalEffect& effect);
std::string series_to_csv(const std::vector<WindowPoint>& series);
std::string channels_to_csv(const std::vector<ChannelShare>& shares);
std::string delay_cdf_to_csv(std::span<const double> delays_ms);

std::string summarize(const ComplianceReport& report, std::uint64_t lost, std::uint64_t total);

/// Delivered delays of `records`, in record order.
std::vector<double> delivered_delays(std::span<const ingest::FusedRecord> records);

}  // namespace cvqos::analyze
