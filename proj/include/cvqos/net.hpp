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

#include <netinet/in.h>

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace cvqos::net {

/// IPv4 UDP endpoint.
struct Endpoint {
  sockaddr_in addr{};

  std::uint16_t port() const noexcept;
  std::string to_string() const;
  bool operator==(const Endpoint& other) const noexcept;
};

/// Parses "host:port"; the host may be a dotted quad or a resolvable name.
Endpoint resolve(std::string_view host_port);

/// Owning UDP socket. Unconnected, so ICMP port-unreachable never surfaces as
/// a send error; an unreachable peer shows up as silence.
class UdpSocket {
 public:
  static UdpSocket bind(const Endpoint& local);

  UdpSocket(UdpSocket&& other) noexcept;
  UdpSocket& operator=(UdpSocket&& other) noexcept;
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;
  ~UdpSocket();

  void send_to(std::span<const std::uint8_t> data, const Endpoint& to) const;

  /// Waits at most `timeout` for one datagram. Returns its length, or nullopt
  /// when the wait expires.
  std::optional<std::size_t> recv_from(std::span<std::uint8_t> buffer, Endpoint* from,
                                       std::chrono::milliseconds timeout) const;

  Endpoint local() const;

 private:
  explicit UdpSocket(int fd) : fd_(fd) {}

  int fd_ = -1;
};

}  // namespace cvqos::net
