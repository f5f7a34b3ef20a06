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

#include "cvqos/probe.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <thread>

#include "cvqos/csv.hpp"
#include "cvqos/error.hpp"
#include "cvqos/net.hpp"

namespace cvqos::probe {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t now_ns() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now().time_since_epoch()).count());
}

template <typename T>
void put_be(std::uint8_t* out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out[i] = static_cast<std::uint8_t>(v >> (8 * (sizeof(T) - 1 - i)));
  }
}

template <typename T>
T get_be(const std::uint8_t* in) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v = static_cast<T>((v << 8) | in[i]);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_packet(const ProbePacket& p, std::size_t payload_size) {
  if (payload_size < kHeaderSize) {
    throw Error(Errc::Size, "payload size " + std::to_string(payload_size) + " is below the " +
                                std::to_string(kHeaderSize) + "-octet header");
  }
  std::vector<std::uint8_t> out(payload_size, 0);
  put_be<std::uint32_t>(out.data(), kMagic);
  out[4] = p.version;
  put_be<std::uint32_t>(out.data() + 5, p.session_id);
  put_be<std::uint64_t>(out.data() + 9, p.sequence);
  put_be<std::uint64_t>(out.data() + 17, p.tx_timestamp_ns);
  return out;
}

std::optional<ProbePacket> decode_packet(std::span<const std::uint8_t> datagram) {
  if (datagram.size() < kHeaderSize) return std::nullopt;
  if (get_be<std::uint32_t>(datagram.data()) != kMagic) return std::nullopt;
  if (datagram[4] != kVersion) return std::nullopt;
  ProbePacket p;
  p.version = datagram[4];
  p.session_id = get_be<std::uint32_t>(datagram.data() + 5);
  p.sequence = get_be<std::uint64_t>(datagram.data() + 9);
  p.tx_timestamp_ns = get_be<std::uint64_t>(datagram.data() + 17);
  return p;
}

double compute_delay(std::uint64_t tx_time_ns, std::uint64_t rx_time_ns) {
  if (rx_time_ns < tx_time_ns) {
    throw Error(Errc::ClockOrder, "rx " + std::to_string(rx_time_ns) + " precedes tx " + std::to_string(tx_time_ns));
  }
  return static_cast<double>(rx_time_ns - tx_time_ns) / 1e6;
}

ProbeRun run_probe(const ProbeConfig& config) {
  if (!(config.interval_ms > 0.0)) throw Error(Errc::Usage, "interval_ms must be positive");
  if (config.timeout_ms < 0.0) throw Error(Errc::Usage, "timeout_ms must be non-negative");
  // Validates the size before any socket work.
  (void)encode_packet(ProbePacket{}, config.payload_size);

  ProbeRun run;
  if (config.count == 0) return run;

  const auto target = net::resolve(config.target);
  const auto socket = net::UdpSocket::bind(net::resolve(config.bind));
  const auto n = static_cast<std::size_t>(config.count);
  const auto timeout_ns = static_cast<std::uint64_t>(config.timeout_ms * 1e6);

  std::mutex mu;
  std::condition_variable answered_cv;
  std::vector<std::uint64_t> tx(n, 0);
  std::vector<std::uint64_t> rx(n, 0);
  std::vector<bool> sent(n, false);
  std::vector<bool> answered(n, false);
  std::size_t answered_count = 0;
  std::uint64_t stray = 0;

  std::jthread receiver([&](std::stop_token stop) {
    std::array<std::uint8_t, 65536> buf{};
    while (!stop.stop_requested()) {
      auto len = socket.recv_from(buf, nullptr, std::chrono::milliseconds(5));
      if (!len) continue;
      const auto arrival = now_ns();
      auto pkt = decode_packet(std::span<const std::uint8_t>(buf.data(), *len));
      std::lock_guard lock(mu);
      if (!pkt || pkt->session_id != config.session_id || pkt->sequence >= n || !sent[pkt->sequence] ||
          answered[pkt->sequence]) {
        ++stray;
        continue;
      }
      rx[pkt->sequence] = arrival;
      answered[pkt->sequence] = true;
      ++answered_count;
      answered_cv.notify_all();
    }
  });

  const auto interval = std::chrono::nanoseconds(static_cast<std::int64_t>(config.interval_ms * 1e6));
  const auto t0 = Clock::now() + std::chrono::milliseconds(1);
  const auto t0_ns =
      static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(t0.time_since_epoch()).count());
  std::uint64_t last_tx = 0;

  for (std::size_t k = 0; k < n; ++k) {
    // Absolute schedule: a late send never shifts the ones after it.
    std::this_thread::sleep_until(t0 + interval * static_cast<std::int64_t>(k));
    const auto tx_ns = now_ns();
    {
      std::lock_guard lock(mu);
      tx[k] = tx_ns;
      sent[k] = true;
    }
    auto bytes = encode_packet(ProbePacket{kVersion, config.session_id, k, tx_ns}, config.payload_size);
    socket.send_to(bytes, target);
    last_tx = tx_ns;

    const auto nominal = t0_ns + static_cast<std::uint64_t>(interval.count()) * k;
    const auto dev = tx_ns > nominal ? tx_ns - nominal : nominal - tx_ns;
    run.max_schedule_deviation_ns = std::max(run.max_schedule_deviation_ns, dev);
  }

  {
    std::unique_lock lock(mu);
    const auto deadline = Clock::time_point(std::chrono::nanoseconds(last_tx + timeout_ns));
    answered_cv.wait_until(lock, deadline, [&] { return answered_count == n; });
  }
  receiver.request_stop();
  receiver.join();

  run.sent = n;
  run.stray_echoes = stray;
  run.records.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    DelayRecord r;
    r.session_id = config.session_id;
    r.sequence = k;
    r.tx_time_ns = tx[k];
    if (answered[k] && rx[k] - tx[k] <= timeout_ns) {
      r.rx_time_ns = rx[k];
      r.e2e_delay_ms = compute_delay(tx[k], rx[k]);
    } else {
      if (answered[k]) ++run.stray_echoes;
      r.lost = true;
      ++run.lost;
    }
    run.records.push_back(r);
  }
  return run;
}

const std::vector<std::string> kDelayCsvHeader = {"session_id", "sequence",     "tx_time_ns",
                                                  "rx_time_ns", "e2e_delay_ms", "lost"};

std::string to_csv(std::span<const DelayRecord> records) {
  csv::Writer w(kDelayCsvHeader);
  for (const auto& r : records) {
    w.field(static_cast<std::uint64_t>(r.session_id)).field(r.sequence).field(r.tx_time_ns).field(r.rx_time_ns);
    if (r.lost) {
      w.empty();
    } else {
      w.field(r.e2e_delay_ms);
    }
    w.field(r.lost);
    w.end_row();
  }
  return w.str();
}

std::vector<DelayRecord> read_delay_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path, kDelayCsvHeader);
  std::vector<DelayRecord> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    DelayRecord r;
    r.session_id = static_cast<std::uint32_t>(csv::to_uint(row[0], "session_id"));
    r.sequence = csv::to_uint(row[1], "sequence");
    r.tx_time_ns = csv::to_uint(row[2], "tx_time_ns");
    if (!row[3].empty()) r.rx_time_ns = csv::to_uint(row[3], "rx_time_ns");
    r.lost = csv::to_int(row[5], "lost") != 0;
    if (r.lost) {
      if (r.rx_time_ns) throw Error(Errc::Parse, path.string() + ": lost record carries rx_time_ns");
    } else {
      if (!r.rx_time_ns) throw Error(Errc::Parse, path.string() + ": delivered record lacks rx_time_ns");
      r.e2e_delay_ms = csv::to_double(row[4], "e2e_delay_ms");
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace cvqos::probe
