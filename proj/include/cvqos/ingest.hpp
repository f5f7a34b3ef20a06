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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cvqos/probe.hpp"

namespace cvqos::ingest {

enum class Source { Modem, Oai };

/// One radio KPI reading. Modem samples carry band/earfcn/eci, OAI samples
/// carry noise/rx power and pci.
struct KpiSample {
  std::int64_t time_ns = 0;
  Source source = Source::Oai;
  double sinr_db = 0.0;
  double rssi_dbm = 0.0;
  double rsrp_dbm = 0.0;
  double rsrq_db = 0.0;
  std::optional<double> noise_power_dbm;
  std::optional<double> rx_power_dbm;
  std::optional<int> lte_band;
  std::optional<std::uint32_t> earfcn;
  std::optional<std::uint32_t> eci;
  std::optional<int> pci;

  bool operator==(const KpiSample&) const = default;
};

struct GnssFix {
  std::int64_t time_ns = 0;
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double speed_kmph = 0.0;

  bool operator==(const GnssFix&) const = default;
};

/// Throws Errc::Parse when a sample violates its source's field contract.
void validate(const KpiSample& s);
void validate(const GnssFix& g);

struct CellChannel {
  int band = 0;
  std::uint32_t earfcn = 0;
  double fc_dl_mhz = 0.0;
  std::optional<double> bandwidth_mhz;

  bool operator==(const CellChannel&) const = default;
};

/// E-UTRA downlink carrier for bands 1, 3, 7, 8 and 20:
/// F_DL_low + 0.1 (N - N_offs), exact to 0.1 MHz.
/// Throws Errc::Mapping for other bands or an out-of-range earfcn.
double earfcn_to_fc(int band, std::uint32_t earfcn);

/// Bandwidth lookup keyed by (band, earfcn); the KPI traces do not carry it.
using ChannelBandwidths = std::map<std::pair<int, std::uint32_t>, double>;

struct CellMapping {
  struct Entry {
    int pci = 0;
    std::uint64_t support = 0;  // samples that voted for `pci`
    std::uint64_t total = 0;    // OAI samples observed while on this eci
  };
  std::map<std::uint32_t, Entry> eci_to_pci;
  /// ECIs whose modem windows contained no OAI samples.
  std::vector<std::uint32_t> unmapped;

  std::optional<int> pci_for(std::uint32_t eci) const;
  /// The eci mapped to `pci`, if exactly one eci maps to it.
  std::optional<std::uint32_t> eci_for(int pci) const;
};

/// Maximum-likelihood PCI for every ECI: OAI pci values are counted over the
/// modem windows in which that eci was reported, and the majority wins.
/// Ties go to the pci that was seen first. Both inputs must be time-sorted.
CellMapping build_cell_mapping(std::span<const KpiSample> modem, std::span<const KpiSample> oai);

struct FilterResult {
  std::vector<KpiSample> kept;
  std::size_t removed = 0;
};

/// Drops OAI samples whose pci disagrees with the mapped pci of the eci the
/// modem reported at that instant. Order is preserved; idempotent.
FilterResult remove_false_positives(std::span<const KpiSample> oai, const CellMapping& mapping,
                                    std::span<const KpiSample> modem);

struct FuseOptions {
  std::int64_t modem_staleness_ns = 4'000'000'000;
  std::int64_t oai_staleness_ns = 100'000'000;
  std::int64_t gnss_staleness_ns = 200'000'000;
  // Added to each source's timestamps before joining.
  std::int64_t modem_offset_ns = 0;
  std::int64_t oai_offset_ns = 0;
  std::int64_t gnss_offset_ns = 0;
  const CellMapping* mapping = nullptr;
  const ChannelBandwidths* bandwidths = nullptr;
};

struct FusedRecord {
  probe::DelayRecord delay;
  std::optional<KpiSample> modem;
  std::optional<KpiSample> oai;
  std::optional<GnssFix> gnss;
  std::optional<std::uint32_t> eci;
  std::optional<int> pci;
  std::optional<CellChannel> channel;
  std::optional<std::int64_t> modem_staleness_ns;
  std::optional<std::int64_t> oai_staleness_ns;
  std::optional<std::int64_t> gnss_staleness_ns;

  bool operator==(const FusedRecord&) const = default;
};

/// Joins each delay record with the latest sample of every source taken at or
/// before its tx time, within that source's staleness window. Output has one
/// record per delay record. Throws Errc::Ordering on unsorted input.
std::vector<FusedRecord> fuse(std::span<const probe::DelayRecord> delays, std::span<const KpiSample> modem,
                              std::span<const KpiSample> oai, std::span<const GnssFix> gnss,
                              const FuseOptions& options = {});

// Trace files.
extern const std::vector<std::string> kModemHeader;
extern const std::vector<std::string> kOaiHeader;
extern const std::vector<std::string> kGnssHeader;
extern const std::vector<std::string> kChannelsHeader;
extern const std::vector<std::string> kCellMappingHeader;
extern const std::vector<std::string> kFusedHeader;

std::vector<KpiSample> read_modem_csv(const std::filesystem::path& path);
std::vector<KpiSample> read_oai_csv(const std::filesystem::path& path);
std::vector<GnssFix> read_gnss_csv(const std::filesystem::path& path);
ChannelBandwidths read_channels_csv(const std::filesystem::path& path);
std::vector<FusedRecord> read_fused_csv(const std::filesystem::path& path);

std::string modem_to_csv(std::span<const KpiSample> samples);
std::string oai_to_csv(std::span<const KpiSample> samples);
std::string gnss_to_csv(std::span<const GnssFix> fixes);
std::string channels_to_csv(const ChannelBandwidths& bandwidths);
std::string mapping_to_csv(const CellMapping& mapping);
std::string fused_to_csv(std::span<const FusedRecord> records);

}  // namespace cvqos::ingest
