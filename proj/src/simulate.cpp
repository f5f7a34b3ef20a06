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

#include "cvqos/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cvqos/csv.hpp"
#include "cvqos/error.hpp"
#include "cvqos/rng.hpp"

namespace cvqos::simulate {

namespace {

struct Burst {
  std::int64_t start_ns;
  std::int64_t end_ns;
  double magnitude_ms;
};

struct Segment {
  std::int64_t start_ns;
  std::int64_t end_ns;
  const EnbConfig* enb;
};

std::int64_t to_ns(double seconds) { return std::llround(seconds * 1e9); }

bool in_gap(const std::vector<TimeInterval>& gaps, std::int64_t t) {
  return std::any_of(gaps.begin(), gaps.end(),
                     [&](const TimeInterval& g) { return t >= to_ns(g.start_s) && t < to_ns(g.end_s); });
}

const Segment& segment_at(const std::vector<Segment>& segs, std::int64_t t) {
  auto it = std::upper_bound(segs.begin(), segs.end(), t,
                             [](std::int64_t v, const Segment& s) { return v < s.start_ns; });
  return *std::prev(it);
}

/// Wideband received power over all resource elements of the carrier plus a
/// non-negative load term, so rssi >= rsrp always holds.
struct RadioReading {
  double rsrp, rssi, rsrq, sinr;
};

RadioReading radio(const ScenarioConfig& c, const EnbConfig& enb, double rsrp, double sinr_noise, double load_db) {
  const double n_rb = enb.bandwidth_mhz * 5.0;
  const double rssi = rsrp + 10.0 * std::log10(12.0 * n_rb) + load_db;
  const double rsrq = 10.0 * std::log10(n_rb) + rsrp - rssi;
  const double sinr = c.sinr_center_db + c.sinr_per_rsrp_db * (rsrp - enb.rsrp_center_dbm) + sinr_noise;
  return {rsrp, rssi, rsrq, sinr};
}

template <typename T>
void require(bool ok, const T& what) {
  if (!ok) throw Error(Errc::Config, what);
}

}  // namespace

EnbConfig parse_enb(std::string_view spec) {
  EnbConfig e;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    auto end = spec.find(';', pos);
    if (end == std::string_view::npos) end = spec.size();
    auto item = spec.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw Error(Errc::Config, "enb item '" + std::string(item) + "' lacks '='");
    const auto key = item.substr(0, eq);
    const auto val = item.substr(eq + 1);
    if (key == "eci") e.eci = static_cast<std::uint32_t>(csv::to_uint(val, key));
    else if (key == "pci") e.pci = static_cast<int>(csv::to_int(val, key));
    else if (key == "band") e.band = static_cast<int>(csv::to_int(val, key));
    else if (key == "earfcn") e.earfcn = static_cast<std::uint32_t>(csv::to_uint(val, key));
    else if (key == "bandwidth_mhz") e.bandwidth_mhz = csv::to_double(val, key);
    else if (key == "base_delay_ms") e.base_delay_ms = csv::to_double(val, key);
    else if (key == "delay_jitter_ms") e.delay_jitter_ms = csv::to_double(val, key);
    else if (key == "rsrp_center_dbm") e.rsrp_center_dbm = csv::to_double(val, key);
    else if (key == "burst_rate_per_min") e.burst_rate_per_min = csv::to_double(val, key);
    else if (key == "burst_magnitude_ms") e.burst_magnitude_ms = csv::to_double(val, key);
    else if (key == "dwell_s") e.dwell_s = csv::to_double(val, key);
    else throw Error(Errc::Config, "unknown enb key '" + std::string(key) + "'");
  }
  return e;
}

std::string format_enb(const EnbConfig& e) {
  return "eci=" + std::to_string(e.eci) + ";pci=" + std::to_string(e.pci) + ";band=" + std::to_string(e.band) +
         ";earfcn=" + std::to_string(e.earfcn) + ";bandwidth_mhz=" + csv::format(e.bandwidth_mhz) +
         ";base_delay_ms=" + csv::format(e.base_delay_ms) + ";delay_jitter_ms=" + csv::format(e.delay_jitter_ms) +
         ";rsrp_center_dbm=" + csv::format(e.rsrp_center_dbm) +
         ";burst_rate_per_min=" + csv::format(e.burst_rate_per_min) +
         ";burst_magnitude_ms=" + csv::format(e.burst_magnitude_ms) + ";dwell_s=" + csv::format(e.dwell_s);
}

void validate(const ScenarioConfig& c) {
  require(c.duration_s >= 0.0, "duration_s must be non-negative");
  require(c.packet_interval_ms > 0.0, "packet_interval_ms must be positive");
  require(!c.enbs.empty() || c.duration_s == 0.0, "at least one eNB is required");
  double dwell = 0.0;
  for (const auto& e : c.enbs) {
    require(e.dwell_s > 0.0, "dwell_s must be positive for eci " + std::to_string(e.eci));
    require(e.base_delay_ms > 0.0, "base_delay_ms must be positive for eci " + std::to_string(e.eci));
    require(e.delay_jitter_ms >= 0.0, "delay_jitter_ms must be non-negative");
    require(e.burst_rate_per_min >= 0.0 && e.burst_magnitude_ms >= 0.0, "burst parameters must be non-negative");
    require(e.pci >= 0 && e.pci <= 503, "pci outside [0, 503]");
    require(e.eci < (1u << 28), "eci exceeds 28 bits");
    require(e.bandwidth_mhz > 0.0, "bandwidth_mhz must be positive");
    dwell += e.dwell_s;
  }
  if (!c.enbs.empty()) {
    require(std::abs(dwell - c.duration_s) <= 1e-6 * std::max(1.0, c.duration_s),
            "eNB dwell times sum to " + csv::format(dwell) + " s, duration is " + csv::format(c.duration_s) + " s");
  }
  for (const auto& g : c.coverage_gaps) require(g.end_s >= g.start_s, "coverage gap ends before it starts");
  require(c.rsrp_spread_db >= 0.0 && c.sinr_noise_db >= 0.0, "spreads must be non-negative");
  require(c.burst_duration_ms >= 0.0, "burst_duration_ms must be non-negative");
}

TraceBundle generate(const ScenarioConfig& c) {
  validate(c);
  TraceBundle out;
  if (c.duration_s == 0.0) return out;

  const std::int64_t duration_ns = to_ns(c.duration_s);
  const auto interval_ns = std::llround(c.packet_interval_ms * 1e6);

  std::vector<Segment> segs;
  double cum = 0.0;
  for (const auto& e : c.enbs) {
    const auto start = to_ns(cum);
    cum += e.dwell_s;
    segs.push_back({start, to_ns(cum), &e});
    out.channels[{e.band, e.earfcn}] = e.bandwidth_mhz;
  }
  segs.back().end_ns = duration_ns;

  // Independent streams per concern so that changing one cadence does not
  // reshuffle the others.
  Rng burst_rng(mix64(c.seed ^ 0xB0));
  Rng packet_rng(mix64(c.seed ^ 0xA1));
  Rng oai_rng(mix64(c.seed ^ 0xC2));
  Rng modem_rng(mix64(c.seed ^ 0xD3));
  Rng gnss_rng(mix64(c.seed ^ 0xE4));

  std::vector<Burst> bursts;
  const auto burst_len = std::llround(c.burst_duration_ms * 1e6);
  for (const auto& s : segs) {
    if (s.enb->burst_rate_per_min <= 0.0) continue;
    const double mean_gap_s = 60.0 / s.enb->burst_rate_per_min;
    double t = static_cast<double>(s.start_ns) / 1e9;
    while (true) {
      t += burst_rng.exponential(mean_gap_s);
      const auto start = to_ns(t);
      if (start >= s.end_ns) break;
      bursts.push_back({start, start + burst_len, burst_rng.exponential(s.enb->burst_magnitude_ms)});
    }
  }

  // Packets. The z draw of each packet is reused by the OAI tick at the same
  // instant, which couples observed RSRP to delay.
  std::vector<std::pair<std::int64_t, double>> packet_z;
  for (std::uint64_t k = 0;; ++k) {
    const auto t = static_cast<std::int64_t>(k) * interval_ns;
    if (t >= duration_ns) break;
    const auto& seg = segment_at(segs, t);
    const auto& enb = *seg.enb;
    const double z = packet_rng.normal();
    double burst_ms = 0.0;
    for (const auto& b : bursts) {
      if (t >= b.start_ns && t < b.end_ns) burst_ms += b.magnitude_ms;
    }
    const double delay = std::max(0.1, enb.base_delay_ms - enb.delay_jitter_ms * z + burst_ms);

    probe::DelayRecord r;
    r.session_id = c.session_id;
    r.sequence = k;
    r.tx_time_ns = static_cast<std::uint64_t>(t);
    if (in_gap(c.coverage_gaps, t)) {
      r.lost = true;
    } else {
      r.rx_time_ns = r.tx_time_ns + static_cast<std::uint64_t>(std::llround(delay * 1e6));
      r.e2e_delay_ms = probe::compute_delay(r.tx_time_ns, *r.rx_time_ns);
    }
    out.delays.push_back(r);
    out.truth.push_back({k, enb.eci, burst_ms > 0.0, enb.rsrp_center_dbm + c.rsrp_spread_db * z, burst_ms});
    packet_z.emplace_back(t, z);
  }

  std::size_t pz = 0;
  for (std::int64_t t = 0; t < duration_ns; t += kOaiPeriodNs) {
    while (pz < packet_z.size() && packet_z[pz].first < t) ++pz;
    const bool on_packet = pz < packet_z.size() && packet_z[pz].first == t;
    const double z = on_packet ? packet_z[pz].second : oai_rng.normal();
    const double sinr_noise = oai_rng.normal(0.0, c.sinr_noise_db);
    const double load = std::abs(oai_rng.normal(0.0, 1.0));
    const double noise_power = oai_rng.normal(-100.0, 1.5);
    if (in_gap(c.coverage_gaps, t)) continue;
    const auto& enb = *segment_at(segs, t).enb;
    const auto rd = radio(c, enb, enb.rsrp_center_dbm + c.rsrp_spread_db * z, sinr_noise, load);
    ingest::KpiSample s;
    s.time_ns = t;
    s.source = ingest::Source::Oai;
    s.sinr_db = rd.sinr;
    s.rssi_dbm = rd.rssi;
    s.rsrp_dbm = rd.rsrp;
    s.rsrq_db = rd.rsrq;
    s.noise_power_dbm = noise_power;
    s.rx_power_dbm = rd.rssi;
    s.pci = enb.pci;
    out.oai.push_back(s);
  }

  for (std::int64_t t = 0; t < duration_ns; t += kModemPeriodNs) {
    const auto& enb = *segment_at(segs, t).enb;
    // The modem reports a smoothed reading around the cell's center.
    const double rsrp = enb.rsrp_center_dbm + modem_rng.normal(0.0, 1.0);
    const auto rd = radio(c, enb, rsrp, modem_rng.normal(0.0, 1.0), std::abs(modem_rng.normal(0.0, 1.0)));
    ingest::KpiSample s;
    s.time_ns = t;
    s.source = ingest::Source::Modem;
    s.sinr_db = rd.sinr;
    s.rssi_dbm = rd.rssi;
    s.rsrp_dbm = rd.rsrp;
    s.rsrq_db = rd.rsrq;
    s.lte_band = enb.band;
    s.earfcn = enb.earfcn;
    s.eci = enb.eci;
    out.modem.push_back(s);
  }

  double lat = c.start_lat_deg;
  double lon = c.start_lon_deg;
  constexpr double kMetersPerDegLat = 111'320.0;
  for (std::int64_t t = 0; t < duration_ns; t += kGnssPeriodNs) {
    const double ts = static_cast<double>(t) / 1e9;
    const double speed = std::max(0.0, c.speed_mean_kmph +
                                           c.speed_amplitude_kmph * std::sin(2.0 * std::numbers::pi * ts / c.speed_period_s) +
                                           gnss_rng.normal(0.0, 0.5));
    out.gnss.push_back({t, lat, lon, speed});
    const double heading = 2.0 * std::numbers::pi * ts / (4.0 * c.speed_period_s);
    const double step_m = speed / 3.6 * static_cast<double>(kGnssPeriodNs) / 1e9;
    lat += step_m * std::cos(heading) / kMetersPerDegLat;
    lon += step_m * std::sin(heading) / (kMetersPerDegLat * std::cos(lat * std::numbers::pi / 180.0));
  }
  return out;
}

const std::vector<std::string> kGroundTruthHeader = {"sequence", "eci", "burst_active"};

std::string ground_truth_to_csv(const std::vector<GroundTruth>& truth) {
  csv::Writer w(kGroundTruthHeader);
  for (const auto& g : truth) {
    w.field(g.sequence).field(g.eci).field(g.burst_active);
    w.end_row();
  }
  return w.str();
}

void write_bundle(const TraceBundle& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  io::write_atomic(dir / "delay.csv", probe::to_csv(b.delays));
  io::write_atomic(dir / "modem_kpi.csv", ingest::modem_to_csv(b.modem));
  io::write_atomic(dir / "oai_kpi.csv", ingest::oai_to_csv(b.oai));
  io::write_atomic(dir / "gnss.csv", ingest::gnss_to_csv(b.gnss));
  io::write_atomic(dir / "ground_truth.csv", ground_truth_to_csv(b.truth));
  io::write_atomic(dir / "channels.csv", ingest::channels_to_csv(b.channels));
}

ScenarioConfig preset(std::string_view name) {
  ScenarioConfig c;
  if (name == "single") {
    c.duration_s = 60.0;
    c.enbs.push_back(parse_enb("eci=27447553;pci=101;band=3;earfcn=1300;bandwidth_mhz=20;base_delay_ms=30;"
                               "rsrp_center_dbm=-85;dwell_s=60"));
    return c;
  }
  if (name == "two-regime") {
    // Alternating fast/slow cells straddling the 50 ms threshold.
    c.duration_s = 600.0;
    const double bases[] = {30, 80, 32, 78, 28, 82};
    const double rsrp[] = {-84, -88, -92, -86, -90, -85};
    const int pcis[] = {101, 37, 250, 7, 412, 88};
    for (int i = 0; i < 6; ++i) {
      EnbConfig e;
      e.eci = 27447553 + static_cast<std::uint32_t>(i) * 17;
      e.pci = pcis[i];
      e.band = i % 2 == 0 ? 3 : 20;
      e.earfcn = i % 2 == 0 ? 1300 : 6300;
      e.bandwidth_mhz = i % 2 == 0 ? 20.0 : 10.0;
      e.base_delay_ms = bases[i];
      e.delay_jitter_ms = 6.0;
      e.rsrp_center_dbm = rsrp[i];
      e.burst_rate_per_min = 0.5;
      e.burst_magnitude_ms = 40.0;
      e.dwell_s = 100.0;
      c.enbs.push_back(e);
    }
    c.coverage_gaps.push_back({300.0, 310.0});
    return c;
  }
  if (name == "three-channel") {
    // Channel shares of 55.2 / 37.9 / 6.9 percent over 1000 s.
    c.duration_s = 1000.0;
    c.enbs.push_back(parse_enb("eci=30001;pci=11;band=3;earfcn=1600;bandwidth_mhz=10;base_delay_ms=45;"
                               "delay_jitter_ms=8;rsrp_center_dbm=-92;dwell_s=552"));
    c.enbs.push_back(parse_enb("eci=30002;pci=12;band=1;earfcn=252;bandwidth_mhz=20;base_delay_ms=55;"
                               "delay_jitter_ms=8;rsrp_center_dbm=-88;dwell_s=379"));
    c.enbs.push_back(parse_enb("eci=30003;pci=13;band=7;earfcn=3350;bandwidth_mhz=20;base_delay_ms=70;"
                               "delay_jitter_ms=8;rsrp_center_dbm=-95;dwell_s=69"));
    return c;
  }
  throw Error(Errc::Config, "unknown scenario preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() { return {"single", "two-regime", "three-channel"}; }

}  // namespace cvqos::simulate
