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

#include "cvqos/relay.hpp"

#include <array>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <queue>
#include <sstream>
#include <thread>
#include <vector>

#include "cvqos/error.hpp"
#include "cvqos/probe.hpp"
#include "cvqos/rng.hpp"

namespace cvqos::relay {

using Clock = std::chrono::steady_clock;

void validate(const RelayConfig& config) {
  if (config.mode == Mode::Forward && !config.peer) {
    throw Error(Errc::Config, "forward mode requires a peer address");
  }
  if (!(config.injected_delay_ms >= 0.0)) throw Error(Errc::Config, "injected delay must be >= 0");
  if (!(config.injected_loss_rate >= 0.0 && config.injected_loss_rate <= 1.0)) {
    throw Error(Errc::Config, "injected loss rate must lie in [0, 1]");
  }
}

bool should_drop(std::span<const std::uint8_t> datagram, double loss_rate, std::uint64_t seed) {
  if (loss_rate <= 0.0) return false;
  if (loss_rate >= 1.0) return true;
  std::uint64_t h = mix64(seed);
  std::uint64_t word = 0;
  std::size_t filled = 0;
  for (auto byte : datagram) {
    word = (word << 8) | byte;
    if (++filled == 8) {
      h = mix64(h ^ word);
      word = 0;
      filled = 0;
    }
  }
  h = mix64(h ^ word ^ (static_cast<std::uint64_t>(datagram.size()) << 56));
  return to_unit(h) < loss_rate;
}

std::string format_stats(const RelayStats& s) {
  std::ostringstream out;
  out << "datagrams_seen " << s.seen << "\n"
      << "datagrams_relayed " << s.relayed << "\n"
      << "dropped_invalid " << s.dropped_invalid << "\n"
      << "dropped_loss " << s.dropped_loss << "\n"
      << "send_errors " << s.send_errors << "\n";
  return out.str();
}

struct Relay::Impl {
  struct Pending {
    Clock::time_point due;
    std::uint64_t order;
    std::vector<std::uint8_t> bytes;
    net::Endpoint to;

    bool operator>(const Pending& o) const { return due != o.due ? due > o.due : order > o.order; }
  };

  RelayConfig config;
  net::UdpSocket socket;
  std::optional<net::Endpoint> peer;

  std::atomic<std::uint64_t> seen{0}, relayed{0}, dropped_invalid{0}, dropped_loss{0}, send_errors{0};

  std::mutex mu;
  std::condition_variable_any cv;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue;
  std::uint64_t next_order = 0;

  std::jthread receiver;
  std::jthread dispatcher;

  explicit Impl(const RelayConfig& cfg) : config(cfg), socket(net::UdpSocket::bind(net::resolve(cfg.listen))) {
    if (cfg.mode == Mode::Forward) peer = net::resolve(*cfg.peer);
  }

  void send(std::span<const std::uint8_t> bytes, const net::Endpoint& to) {
    try {
      socket.send_to(bytes, to);
      relayed.fetch_add(1, std::memory_order_relaxed);
    } catch (const Error&) {
      // A vanished client must not take the service down.
      send_errors.fetch_add(1, std::memory_order_relaxed);
    }
  }

  void receive_loop(std::stop_token stop) {
    std::array<std::uint8_t, 65536> buf{};
    const auto delay = std::chrono::nanoseconds(static_cast<std::int64_t>(config.injected_delay_ms * 1e6));
    while (!stop.stop_requested()) {
      net::Endpoint from;
      auto len = socket.recv_from(buf, &from, std::chrono::milliseconds(20));
      if (!len) continue;
      const auto arrival = Clock::now();
      seen.fetch_add(1, std::memory_order_relaxed);
      std::span<const std::uint8_t> datagram(buf.data(), *len);
      if (!probe::decode_packet(datagram)) {
        dropped_invalid.fetch_add(1, std::memory_order_relaxed);
        continue;
      }
      if (should_drop(datagram, config.injected_loss_rate, config.loss_seed)) {
        dropped_loss.fetch_add(1, std::memory_order_relaxed);
        continue;
      }
      const auto& to = peer ? *peer : from;
      if (delay.count() == 0) {
        send(datagram, to);
        continue;
      }
      {
        std::lock_guard lock(mu);
        queue.push(Pending{arrival + delay, next_order++, {datagram.begin(), datagram.end()}, to});
      }
      cv.notify_one();
    }
  }

  void dispatch_loop(std::stop_token stop) {
    std::unique_lock lock(mu);
    while (!stop.stop_requested()) {
      if (queue.empty()) {
        cv.wait(lock, stop, [&] { return !queue.empty(); });
        continue;
      }
      const auto due = queue.top().due;
      if (Clock::now() < due) {
        cv.wait_until(lock, stop, due, [&] { return !queue.empty() && queue.top().due < due; });
        continue;
      }
      Pending p = queue.top();
      queue.pop();
      lock.unlock();
      send(p.bytes, p.to);
      lock.lock();
    }
  }
};

Relay::Relay(const RelayConfig& config) {
  validate(config);
  impl_ = std::make_unique<Impl>(config);
  impl_->receiver = std::jthread([this](std::stop_token st) { impl_->receive_loop(st); });
  impl_->dispatcher = std::jthread([this](std::stop_token st) { impl_->dispatch_loop(st); });
}

Relay::~Relay() { stop(); }

void Relay::stop() {
  if (!impl_) return;
  impl_->receiver.request_stop();
  impl_->dispatcher.request_stop();
  if (impl_->receiver.joinable()) impl_->receiver.join();
  if (impl_->dispatcher.joinable()) impl_->dispatcher.join();
}

net::Endpoint Relay::local() const { return impl_->socket.local(); }

RelayStats Relay::stats() const {
  return RelayStats{impl_->seen.load(), impl_->relayed.load(), impl_->dropped_invalid.load(),
                    impl_->dropped_loss.load(), impl_->send_errors.load()};
}

std::unique_ptr<Relay> serve(const RelayConfig& config) { return std::make_unique<Relay>(config); }

}  // namespace cvqos::relay
