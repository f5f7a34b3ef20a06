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

#include "cvqos/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <utility>

#include "cvqos/error.hpp"

namespace cvqos::net {

namespace {

[[noreturn]] void throw_os(const std::string& what) {
  throw Error(Errc::Transport, what + ": " + std::strerror(errno));
}

}  // namespace

std::uint16_t Endpoint::port() const noexcept { return ntohs(addr.sin_port); }

std::string Endpoint::to_string() const {
  char buf[INET_ADDRSTRLEN] = {};
  ::inet_ntop(AF_INET, &addr.sin_addr, buf, sizeof(buf));
  return std::string(buf) + ":" + std::to_string(port());
}

bool Endpoint::operator==(const Endpoint& other) const noexcept {
  return addr.sin_addr.s_addr == other.addr.sin_addr.s_addr && addr.sin_port == other.addr.sin_port;
}

Endpoint resolve(std::string_view host_port) {
  const auto colon = host_port.rfind(':');
  if (colon == std::string_view::npos) {
    throw Error(Errc::Usage, "address '" + std::string(host_port) + "' is not host:port");
  }
  const std::string host(host_port.substr(0, colon));
  const auto port_text = host_port.substr(colon + 1);
  unsigned port = 0;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port > 65535) {
    throw Error(Errc::Usage, "bad port in '" + std::string(host_port) + "'");
  }

  Endpoint ep;
  ep.addr.sin_family = AF_INET;
  ep.addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (host.empty() || host == "*") {
    ep.addr.sin_addr.s_addr = htonl(INADDR_ANY);
    return ep;
  }
  if (::inet_pton(AF_INET, host.c_str(), &ep.addr.sin_addr) == 1) return ep;

  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* res = nullptr;
  if (int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &res); rc != 0 || res == nullptr) {
    throw Error(Errc::Transport, "cannot resolve '" + host + "': " + ::gai_strerror(rc));
  }
  ep.addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  ::freeaddrinfo(res);
  return ep;
}

UdpSocket UdpSocket::bind(const Endpoint& local) {
  int fd = ::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw_os("socket");
  UdpSocket sock(fd);
  if (::bind(fd, reinterpret_cast<const sockaddr*>(&local.addr), sizeof(local.addr)) != 0) {
    throw_os("bind " + local.to_string());
  }
  return sock;
}

UdpSocket::UdpSocket(UdpSocket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}

UdpSocket& UdpSocket::operator=(UdpSocket&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(other.fd_, -1);
  }
  return *this;
}

UdpSocket::~UdpSocket() {
  if (fd_ >= 0) ::close(fd_);
}

void UdpSocket::send_to(std::span<const std::uint8_t> data, const Endpoint& to) const {
  const auto n = ::sendto(fd_, data.data(), data.size(), 0, reinterpret_cast<const sockaddr*>(&to.addr),
                          sizeof(to.addr));
  if (n < 0) throw_os("sendto " + to.to_string());
}

std::optional<std::size_t> UdpSocket::recv_from(std::span<std::uint8_t> buffer, Endpoint* from,
                                                std::chrono::milliseconds timeout) const {
  pollfd pfd{fd_, POLLIN, 0};
  int rc;
  do {
    rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  } while (rc < 0 && errno == EINTR);
  if (rc < 0) throw_os("poll");
  if (rc == 0) return std::nullopt;

  sockaddr_in src{};
  socklen_t len = sizeof(src);
  const auto n = ::recvfrom(fd_, buffer.data(), buffer.size(), 0, reinterpret_cast<sockaddr*>(&src), &len);
  if (n < 0) {
    // Stale ICMP errors can be queued on the socket; they are not datagrams.
    if (errno == ECONNREFUSED || errno == EAGAIN || errno == EINTR) return std::nullopt;
    throw_os("recvfrom");
  }
  if (from != nullptr) from->addr = src;
  return static_cast<std::size_t>(n);
}

Endpoint UdpSocket::local() const {
  Endpoint ep;
  socklen_t len = sizeof(ep.addr);
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&ep.addr), &len) != 0) throw_os("getsockname");
  return ep;
}

}  // namespace cvqos::net
