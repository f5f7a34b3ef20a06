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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cvqos/ingest.hpp"
#include "cvqos/probe.hpp"

// Synthetic drive traces with a known generative model.
//
// The route visits the configured eNBs in order, each for its dwell time.
// Every packet draws a standardized radio deviation z ~ N(0, 1); the OAI
// sample taken at the packet's tx time reports rsrp = center + spread * z and
// the packet's delay is
//
//   delay = base - jitter * z + sum(active burst magnitudes)
//
// so within one eNB and burst state the delay never increases with RSRP.
// Bursts arrive as a Poisson process per eNB, last a fixed duration and add
// an exponentially distributed magnitude. Packets sent inside a coverage gap
// are lost and no OAI samples are decoded there.

namespace cvqos::simulate {

struct EnbConfig {
  std::uint32_t eci = 0;
  int pci = 0;
  int band = 3;
  std::uint32_t earfcn = 1300;
  double bandwidth_mhz = 20.0;
  double base_delay_ms = 30.0;
  double delay_jitter_ms = 0.0;
  double rsrp_center_dbm = -85.0;
  double burst_rate_per_min = 0.0;
  double burst_magnitude_ms = 0.0;
  double dwell_s = 0.0;
};

/// "key=value;key=value" with the EnbConfig field names.
EnbConfig parse_enb(std::string_view spec);
std::string format_enb(const EnbConfig& enb);

struct TimeInterval {
  double start_s = 0.0;
  double end_s = 0.0;
};

struct ScenarioConfig {
  double duration_s = 0.0;
  double packet_interval_ms = 40.0;
  std::vector<EnbConfig> enbs;
  std::vector<TimeInterval> coverage_gaps;

  double speed_mean_kmph = 28.4;
  double speed_amplitude_kmph = 15.0;
  double speed_period_s = 120.0;
  double start_lat_deg = 48.137;
  double start_lon_deg = 11.575;

  double rsrp_spread_db = 6.0;
  double sinr_center_db = 12.0;
  double sinr_per_rsrp_db = 0.8;  // SINR slope against the RSRP deviation
  double sinr_noise_db = 3.0;
  double burst_duration_ms = 500.0;

  std::uint32_t session_id = 1;
  std::uint64_t seed = 1;
};

/// Throws Errc::Config on inconsistent dwell/duration or invalid fields.
void validate(const ScenarioConfig& config);

struct GroundTruth {
  std::uint64_t sequence = 0;
  std::uint32_t eci = 0;
  bool burst_active = false;
  // In-memory only; not part of ground_truth.csv.
  double rsrp_dbm = 0.0;
  double burst_ms = 0.0;
};

struct TraceBundle {
  std::vector<probe::DelayRecord> delays;
  std::vector<ingest::KpiSample> modem;
  std::vector<ingest::KpiSample> oai;
  std::vector<ingest::GnssFix> gnss;
  std::vector<GroundTruth> truth;
  ingest::ChannelBandwidths channels;
};

inline constexpr std::int64_t kOaiPeriodNs = 10'000'000;
inline constexpr std::int64_t kGnssPeriodNs = 50'000'000;
inline constexpr std::int64_t kModemPeriodNs = 2'000'000'000;

TraceBundle generate(const ScenarioConfig& config);

extern const std::vector<std::string> kGroundTruthHeader;

std::string ground_truth_to_csv(const std::vector<GroundTruth>& truth);

/// Writes delay.csv, modem_kpi.csv, oai_kpi.csv, gnss.csv, ground_truth.csv
/// and channels.csv into `dir`.
void write_bundle(const TraceBundle& bundle, const std::filesystem::path& dir);

/// Named scenarios used by the CLI and the examples in the README.
ScenarioConfig preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace cvqos::simulate
