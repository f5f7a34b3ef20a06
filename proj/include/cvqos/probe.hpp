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
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cvqos::probe {

inline constexpr std::uint32_t kMagic = 0x43565158;  // "CVQX"
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 25;
inline constexpr std::size_t kDefaultPayloadSize = 300;
inline constexpr double kDefaultIntervalMs = 40.0;
inline constexpr double kDefaultTimeoutMs = 1000.0;

struct ProbePacket {
  std::uint8_t version = kVersion;
  std::uint32_t session_id = 0;
  std::uint64_t sequence = 0;
  std::uint64_t tx_timestamp_ns = 0;

  bool operator==(const ProbePacket&) const = default;
};

/// Encodes `p` in network byte order, zero-padded to exactly `payload_size`
/// octets. Throws Errc::Size when payload_size < kHeaderSize.
std::vector<std::uint8_t> encode_packet(const ProbePacket& p, std::size_t payload_size = kDefaultPayloadSize);

/// Returns nullopt for short datagrams or a wrong magic/version.
std::optional<ProbePacket> decode_packet(std::span<const std::uint8_t> datagram);

/// One probe observation. Timestamps are on the sender's monotonic clock.
struct DelayRecord {
  std::uint32_t session_id = 0;
  std::uint64_t sequence = 0;
  std::uint64_t tx_time_ns = 0;
  std::optional<std::uint64_t> rx_time_ns;
  double e2e_delay_ms = 0.0;
  bool lost = false;

  bool operator==(const DelayRecord&) const = default;
};

/// (rx - tx) / 1e6. Throws Errc::ClockOrder when rx < tx.
double compute_delay(std::uint64_t tx_time_ns, std::uint64_t rx_time_ns);

struct ProbeConfig {
  std::string target;  // host:port of the relay
  std::string bind = "0.0.0.0:0";
  double interval_ms = kDefaultIntervalMs;
  std::size_t payload_size = kDefaultPayloadSize;
  std::uint64_t count = 0;
  double timeout_ms = kDefaultTimeoutMs;
  std::uint32_t session_id = 1;
};

struct ProbeRun {
  std::vector<DelayRecord> records;  // ordered by sequence
  std::uint64_t sent = 0;
  std::uint64_t lost = 0;
  /// Largest |actual send time - (t0 + k * interval)| over the run.
  std::uint64_t max_schedule_deviation_ns = 0;
  /// Echoes that arrived for an unknown sequence, twice, or after the timeout.
  std::uint64_t stray_echoes = 0;
};

/// Sends `count` probes on an absolute schedule and collects echoes. Sender
/// and receiver run concurrently. Throws Errc::Transport on socket failure.
ProbeRun run_probe(const ProbeConfig& config);

extern const std::vector<std::string> kDelayCsvHeader;

std::string to_csv(std::span<const DelayRecord> records);
std::vector<DelayRecord> read_delay_csv(const std::filesystem::path& path);

}  // namespace cvqos::probe
