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

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "cvqos/net.hpp"

namespace cvqos::relay {

enum class Mode { Echo, Forward };

struct RelayConfig {
  std::string listen = "0.0.0.0:0";
  Mode mode = Mode::Echo;
  std::optional<std::string> peer;  // required in forward mode
  double injected_delay_ms = 0.0;
  double injected_loss_rate = 0.0;
  std::uint64_t loss_seed = 0;
};

void validate(const RelayConfig& config);

/// Loss decision for one datagram. Depends only on the datagram bytes, the
/// seed and the rate, so relay behavior stays stateless.
bool should_drop(std::span<const std::uint8_t> datagram, double loss_rate, std::uint64_t seed);

struct RelayStats {
  std::uint64_t seen = 0;
  std::uint64_t relayed = 0;
  std::uint64_t dropped_invalid = 0;
  std::uint64_t dropped_loss = 0;
  std::uint64_t send_errors = 0;
};

std::string format_stats(const RelayStats& stats);

/// Running relay service. Construction binds and starts the worker threads;
/// destruction stops them. Datagrams still waiting out their injected delay
/// at shutdown are discarded.
class Relay {
 public:
  explicit Relay(const RelayConfig& config);
  ~Relay();
  Relay(const Relay&) = delete;
  Relay& operator=(const Relay&) = delete;

  net::Endpoint local() const;
  RelayStats stats() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Starts a relay; the returned handle serves until stopped or destroyed.
std::unique_ptr<Relay> serve(const RelayConfig& config);

}  // namespace cvqos::relay
