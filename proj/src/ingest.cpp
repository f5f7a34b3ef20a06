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

#include "cvqos/ingest.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cvqos/csv.hpp"
#include "cvqos/error.hpp"

namespace cvqos::ingest {

namespace {

struct BandPlan {
  int band;
  std::int64_t f_dl_low_100khz;  // F_DL_low in units of 0.1 MHz
  std::uint32_t n_offs;
  std::uint32_t n_max;
};

// 3GPP TS 36.101 Table 5.7.3-1, restricted to the bands seen in urban
// European deployments.
constexpr std::array<BandPlan, 5> kBandPlans = {{
    {1, 21100, 0, 599},
    {3, 18050, 1200, 1949},
    {7, 26200, 2750, 3449},
    {8, 9250, 3450, 3799},
    {20, 7910, 6150, 6449},
}};

template <typename T, typename TimeOf>
void require_sorted(std::span<const T> items, TimeOf time_of, const char* what) {
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (time_of(items[i]) < time_of(items[i - 1])) {
      throw Error(Errc::Ordering, std::string(what) + " not time-sorted at index " + std::to_string(i));
    }
  }
}

std::int64_t sample_time(const KpiSample& s) { return s.time_ns; }

/// Index of the latest modem sample with time <= t, or npos.
std::size_t latest_at_or_before(std::span<const KpiSample> modem, std::int64_t t) {
  auto it = std::upper_bound(modem.begin(), modem.end(), t,
                             [](std::int64_t v, const KpiSample& s) { return v < s.time_ns; });
  if (it == modem.begin()) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(std::distance(modem.begin(), it) - 1);
}

/// Advances `idx` through a sorted sequence and returns the newest element at
/// or before `t`, with its staleness, if it lies within `window`.
template <typename T>
struct Cursor {
  std::span<const T> items;
  std::int64_t offset = 0;
  std::size_t next = 0;

  std::optional<std::pair<T, std::int64_t>> at(std::int64_t t, std::int64_t window) {
    while (next < items.size() && items[next].time_ns + offset <= t) ++next;
    if (next == 0) return std::nullopt;
    T item = items[next - 1];
    item.time_ns += offset;
    const auto staleness = t - item.time_ns;
    if (staleness > window) return std::nullopt;
    return std::pair{item, staleness};
  }
};

}  // namespace

void validate(const KpiSample& s) {
  if (s.rsrp_dbm > s.rssi_dbm) {
    throw Error(Errc::Parse, "sample at " + std::to_string(s.time_ns) + " has rsrp above rssi");
  }
  if (s.source == Source::Modem) {
    if (!s.lte_band || !s.earfcn || !s.eci) {
      throw Error(Errc::Parse, "modem sample at " + std::to_string(s.time_ns) + " lacks band/earfcn/eci");
    }
    if (*s.eci >= (1u << 28)) throw Error(Errc::Parse, "eci exceeds 28 bits");
    if (s.pci || s.noise_power_dbm || s.rx_power_dbm) {
      throw Error(Errc::Parse, "modem sample carries OAI-only fields");
    }
  } else {
    if (!s.pci || !s.noise_power_dbm || !s.rx_power_dbm) {
      throw Error(Errc::Parse, "oai sample at " + std::to_string(s.time_ns) + " lacks pci/noise/rx power");
    }
    if (s.lte_band || s.earfcn || s.eci) throw Error(Errc::Parse, "oai sample carries modem-only fields");
  }
  if (s.pci && (*s.pci < 0 || *s.pci > 503)) {
    throw Error(Errc::Parse, "pci " + std::to_string(*s.pci) + " outside [0, 503]");
  }
}

void validate(const GnssFix& g) {
  if (std::abs(g.lat_deg) > 90.0 || std::abs(g.lon_deg) > 180.0) {
    throw Error(Errc::Parse, "gnss fix at " + std::to_string(g.time_ns) + " has invalid coordinates");
  }
  if (g.speed_kmph < 0.0) throw Error(Errc::Parse, "negative speed");
}

double earfcn_to_fc(int band, std::uint32_t earfcn) {
  for (const auto& plan : kBandPlans) {
    if (plan.band != band) continue;
    if (earfcn < plan.n_offs || earfcn > plan.n_max) {
      throw Error(Errc::Mapping, "earfcn " + std::to_string(earfcn) + " outside band " + std::to_string(band));
    }
    return static_cast<double>(plan.f_dl_low_100khz + (earfcn - plan.n_offs)) / 10.0;
  }
  throw Error(Errc::Mapping, "unsupported band " + std::to_string(band));
}

std::optional<int> CellMapping::pci_for(std::uint32_t eci) const {
  auto it = eci_to_pci.find(eci);
  if (it == eci_to_pci.end()) return std::nullopt;
  return it->second.pci;
}

std::optional<std::uint32_t> CellMapping::eci_for(int pci) const {
  std::optional<std::uint32_t> found;
  for (const auto& [eci, entry] : eci_to_pci) {
    if (entry.pci != pci) continue;
    if (found) return std::nullopt;
    found = eci;
  }
  return found;
}

CellMapping build_cell_mapping(std::span<const KpiSample> modem, std::span<const KpiSample> oai) {
  require_sorted(modem, sample_time, "modem samples");
  require_sorted(oai, sample_time, "oai samples");

  struct Vote {
    std::uint64_t count = 0;
    std::size_t first_seen = 0;
  };
  std::map<std::uint32_t, std::map<int, Vote>> votes;
  std::map<std::uint32_t, std::uint64_t> totals;
  for (const auto& m : modem) {
    if (m.eci) votes.try_emplace(*m.eci);
  }

  std::size_t cur = 0;
  std::optional<std::uint32_t> current_eci;
  for (std::size_t i = 0; i < oai.size(); ++i) {
    const auto& s = oai[i];
    while (cur < modem.size() && modem[cur].time_ns <= s.time_ns) {
      current_eci = modem[cur].eci;
      ++cur;
    }
    if (!current_eci || !s.pci) continue;
    auto [it, inserted] = votes[*current_eci].try_emplace(*s.pci, Vote{0, i});
    ++it->second.count;
    ++totals[*current_eci];
  }

  CellMapping mapping;
  for (const auto& [eci, by_pci] : votes) {
    if (by_pci.empty()) {
      mapping.unmapped.push_back(eci);
      continue;
    }
    const Vote* best = nullptr;
    int best_pci = 0;
    for (const auto& [pci, vote] : by_pci) {
      if (best == nullptr || vote.count > best->count ||
          (vote.count == best->count && vote.first_seen < best->first_seen)) {
        best = &vote;
        best_pci = pci;
      }
    }
    mapping.eci_to_pci[eci] = CellMapping::Entry{best_pci, best->count, totals[eci]};
  }
  return mapping;
}

FilterResult remove_false_positives(std::span<const KpiSample> oai, const CellMapping& mapping,
                                    std::span<const KpiSample> modem) {
  require_sorted(modem, sample_time, "modem samples");
  FilterResult result;
  result.kept.reserve(oai.size());
  for (const auto& s : oai) {
    const auto idx = latest_at_or_before(modem, s.time_ns);
    bool drop = false;
    if (idx != static_cast<std::size_t>(-1) && modem[idx].eci && s.pci) {
      if (auto expected = mapping.pci_for(*modem[idx].eci); expected && *expected != *s.pci) drop = true;
    }
    if (drop) {
      ++result.removed;
    } else {
      result.kept.push_back(s);
    }
  }
  return result;
}

std::vector<FusedRecord> fuse(std::span<const probe::DelayRecord> delays, std::span<const KpiSample> modem,
                              std::span<const KpiSample> oai, std::span<const GnssFix> gnss,
                              const FuseOptions& options) {
  require_sorted(delays, [](const probe::DelayRecord& d) { return d.tx_time_ns; }, "delay records");
  require_sorted(modem, sample_time, "modem samples");
  require_sorted(oai, sample_time, "oai samples");
  require_sorted(gnss, [](const GnssFix& g) { return g.time_ns; }, "gnss fixes");

  Cursor<KpiSample> modem_cur{modem, options.modem_offset_ns};
  Cursor<KpiSample> oai_cur{oai, options.oai_offset_ns};
  Cursor<GnssFix> gnss_cur{gnss, options.gnss_offset_ns};

  std::vector<FusedRecord> out;
  out.reserve(delays.size());
  for (const auto& d : delays) {
    FusedRecord r;
    r.delay = d;
    const auto t = static_cast<std::int64_t>(d.tx_time_ns);
    if (auto m = modem_cur.at(t, options.modem_staleness_ns)) {
      r.modem = m->first;
      r.modem_staleness_ns = m->second;
    }
    if (auto o = oai_cur.at(t, options.oai_staleness_ns)) {
      r.oai = o->first;
      r.oai_staleness_ns = o->second;
    }
    if (auto g = gnss_cur.at(t, options.gnss_staleness_ns)) {
      r.gnss = g->first;
      r.gnss_staleness_ns = g->second;
    }

    if (r.modem && r.modem->eci) {
      r.eci = r.modem->eci;
    } else if (r.oai && r.oai->pci && options.mapping != nullptr) {
      r.eci = options.mapping->eci_for(*r.oai->pci);
    }
    if (r.oai && r.oai->pci) {
      r.pci = r.oai->pci;
    } else if (r.eci && options.mapping != nullptr) {
      r.pci = options.mapping->pci_for(*r.eci);
    }
    if (r.modem && r.modem->lte_band && r.modem->earfcn) {
      const int band = *r.modem->lte_band;
      const auto earfcn = *r.modem->earfcn;
      CellChannel ch{band, earfcn, 0.0, std::nullopt};
      try {
        ch.fc_dl_mhz = earfcn_to_fc(band, earfcn);
        if (options.bandwidths != nullptr) {
          if (auto it = options.bandwidths->find({band, earfcn}); it != options.bandwidths->end()) {
            ch.bandwidth_mhz = it->second;
          }
        }
        r.channel = ch;
      } catch (const Error&) {
        // Unknown band plan: identity stays resolved, carrier stays absent.
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

const std::vector<std::string> kModemHeader = {"time_ns", "sinr_db",  "rssi_dbm", "rsrp_dbm",
                                               "rsrq_db", "lte_band", "earfcn",   "eci"};
const std::vector<std::string> kOaiHeader = {"time_ns", "sinr_db",         "rssi_dbm",     "rsrp_dbm",
                                             "rsrq_db", "noise_power_dbm", "rx_power_dbm", "pci"};
const std::vector<std::string> kGnssHeader = {"time_ns", "lat_deg", "lon_deg", "speed_kmph"};
const std::vector<std::string> kChannelsHeader = {"band", "earfcn", "bandwidth_mhz"};
const std::vector<std::string> kCellMappingHeader = {"eci", "pci", "support", "total"};
const std::vector<std::string> kFusedHeader = {
    "session_id",      "sequence",         "tx_time_ns",       "rx_time_ns",       "e2e_delay_ms",
    "lost",            "eci",              "pci",              "lte_band",         "earfcn",
    "fc_dl_mhz",       "bandwidth_mhz",    "modem_time_ns",    "modem_sinr_db",    "modem_rssi_dbm",
    "modem_rsrp_dbm",  "modem_rsrq_db",    "oai_time_ns",      "sinr_db",          "rssi_dbm",
    "rsrp_dbm",        "rsrq_db",          "noise_power_dbm",  "rx_power_dbm",     "gnss_time_ns",
    "lat_deg",         "lon_deg",          "speed_kmph",       "modem_staleness_ns", "oai_staleness_ns",
    "gnss_staleness_ns"};

std::vector<KpiSample> read_modem_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path, kModemHeader);
  std::vector<KpiSample> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    KpiSample s;
    s.source = Source::Modem;
    s.time_ns = csv::to_int(row[0], "time_ns");
    s.sinr_db = csv::to_double(row[1], "sinr_db");
    s.rssi_dbm = csv::to_double(row[2], "rssi_dbm");
    s.rsrp_dbm = csv::to_double(row[3], "rsrp_dbm");
    s.rsrq_db = csv::to_double(row[4], "rsrq_db");
    s.lte_band = static_cast<int>(csv::to_int(row[5], "lte_band"));
    s.earfcn = static_cast<std::uint32_t>(csv::to_uint(row[6], "earfcn"));
    s.eci = static_cast<std::uint32_t>(csv::to_uint(row[7], "eci"));
    validate(s);
    out.push_back(s);
  }
  return out;
}

std::vector<KpiSample> read_oai_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path, kOaiHeader);
  std::vector<KpiSample> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    KpiSample s;
    s.source = Source::Oai;
    s.time_ns = csv::to_int(row[0], "time_ns");
    s.sinr_db = csv::to_double(row[1], "sinr_db");
    s.rssi_dbm = csv::to_double(row[2], "rssi_dbm");
    s.rsrp_dbm = csv::to_double(row[3], "rsrp_dbm");
    s.rsrq_db = csv::to_double(row[4], "rsrq_db");
    s.noise_power_dbm = csv::to_double(row[5], "noise_power_dbm");
    s.rx_power_dbm = csv::to_double(row[6], "rx_power_dbm");
    s.pci = static_cast<int>(csv::to_int(row[7], "pci"));
    validate(s);
    out.push_back(s);
  }
  return out;
}

std::vector<GnssFix> read_gnss_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path, kGnssHeader);
  std::vector<GnssFix> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    GnssFix g{csv::to_int(row[0], "time_ns"), csv::to_double(row[1], "lat_deg"), csv::to_double(row[2], "lon_deg"),
              csv::to_double(row[3], "speed_kmph")};
    validate(g);
    out.push_back(g);
  }
  return out;
}

ChannelBandwidths read_channels_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path, kChannelsHeader);
  ChannelBandwidths out;
  for (const auto& row : table.rows) {
    out[{static_cast<int>(csv::to_int(row[0], "band")), static_cast<std::uint32_t>(csv::to_uint(row[1], "earfcn"))}] =
        csv::to_double(row[2], "bandwidth_mhz");
  }
  return out;
}

std::string modem_to_csv(std::span<const KpiSample> samples) {
  csv::Writer w(kModemHeader);
  for (const auto& s : samples) {
    w.field(s.time_ns).field(s.sinr_db).field(s.rssi_dbm).field(s.rsrp_dbm).field(s.rsrq_db);
    w.field(s.lte_band).field(s.earfcn).field(s.eci);
    w.end_row();
  }
  return w.str();
}

std::string oai_to_csv(std::span<const KpiSample> samples) {
  csv::Writer w(kOaiHeader);
  for (const auto& s : samples) {
    w.field(s.time_ns).field(s.sinr_db).field(s.rssi_dbm).field(s.rsrp_dbm).field(s.rsrq_db);
    w.field(s.noise_power_dbm).field(s.rx_power_dbm).field(s.pci);
    w.end_row();
  }
  return w.str();
}

std::string gnss_to_csv(std::span<const GnssFix> fixes) {
  csv::Writer w(kGnssHeader);
  for (const auto& g : fixes) {
    w.field(g.time_ns).field(g.lat_deg).field(g.lon_deg).field(g.speed_kmph);
    w.end_row();
  }
  return w.str();
}

std::string channels_to_csv(const ChannelBandwidths& bandwidths) {
  csv::Writer w(kChannelsHeader);
  for (const auto& [key, bw] : bandwidths) {
    w.field(key.first).field(key.second).field(bw);
    w.end_row();
  }
  return w.str();
}

std::string mapping_to_csv(const CellMapping& mapping) {
  csv::Writer w(kCellMappingHeader);
  for (const auto& [eci, e] : mapping.eci_to_pci) {
    w.field(eci).field(e.pci).field(e.support).field(e.total);
    w.end_row();
  }
  return w.str();
}

std::string fused_to_csv(std::span<const FusedRecord> records) {
  csv::Writer w(kFusedHeader);
  for (const auto& r : records) {
    const auto& d = r.delay;
    w.field(static_cast<std::uint64_t>(d.session_id)).field(d.sequence).field(d.tx_time_ns).field(d.rx_time_ns);
    if (d.lost) {
      w.empty();
    } else {
      w.field(d.e2e_delay_ms);
    }
    w.field(d.lost).field(r.eci).field(r.pci);
    if (r.channel) {
      w.field(r.channel->band).field(r.channel->earfcn).field(r.channel->fc_dl_mhz).field(r.channel->bandwidth_mhz);
    } else if (r.modem) {
      w.field(r.modem->lte_band).field(r.modem->earfcn).empty().empty();
    } else {
      w.empty().empty().empty().empty();
    }
    if (r.modem) {
      w.field(r.modem->time_ns).field(r.modem->sinr_db).field(r.modem->rssi_dbm).field(r.modem->rsrp_dbm);
      w.field(r.modem->rsrq_db);
    } else {
      for (int i = 0; i < 5; ++i) w.empty();
    }
    if (r.oai) {
      w.field(r.oai->time_ns).field(r.oai->sinr_db).field(r.oai->rssi_dbm).field(r.oai->rsrp_dbm);
      w.field(r.oai->rsrq_db).field(r.oai->noise_power_dbm).field(r.oai->rx_power_dbm);
    } else {
      for (int i = 0; i < 7; ++i) w.empty();
    }
    if (r.gnss) {
      w.field(r.gnss->time_ns).field(r.gnss->lat_deg).field(r.gnss->lon_deg).field(r.gnss->speed_kmph);
    } else {
      for (int i = 0; i < 4; ++i) w.empty();
    }
    w.field(r.modem_staleness_ns).field(r.oai_staleness_ns).field(r.gnss_staleness_ns);
    w.end_row();
  }
  return w.str();
}

std::vector<FusedRecord> read_fused_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path, kFusedHeader);
  std::vector<FusedRecord> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    FusedRecord r;
    auto& d = r.delay;
    d.session_id = static_cast<std::uint32_t>(csv::to_uint(row[0], "session_id"));
    d.sequence = csv::to_uint(row[1], "sequence");
    d.tx_time_ns = csv::to_uint(row[2], "tx_time_ns");
    if (!row[3].empty()) d.rx_time_ns = csv::to_uint(row[3], "rx_time_ns");
    d.lost = csv::to_int(row[5], "lost") != 0;
    if (!d.lost) d.e2e_delay_ms = csv::to_double(row[4], "e2e_delay_ms");
    if (auto v = csv::to_opt_int(row[6], "eci")) r.eci = static_cast<std::uint32_t>(*v);
    if (auto v = csv::to_opt_int(row[7], "pci")) r.pci = static_cast<int>(*v);
    const auto band = csv::to_opt_int(row[8], "lte_band");
    const auto earfcn = csv::to_opt_int(row[9], "earfcn");
    if (auto fc = csv::to_opt_double(row[10], "fc_dl_mhz"); fc && band && earfcn) {
      r.channel = CellChannel{static_cast<int>(*band), static_cast<std::uint32_t>(*earfcn), *fc,
                              csv::to_opt_double(row[11], "bandwidth_mhz")};
    }
    if (auto t = csv::to_opt_int(row[12], "modem_time_ns")) {
      KpiSample m;
      m.source = Source::Modem;
      m.time_ns = *t;
      m.sinr_db = csv::to_double(row[13], "modem_sinr_db");
      m.rssi_dbm = csv::to_double(row[14], "modem_rssi_dbm");
      m.rsrp_dbm = csv::to_double(row[15], "modem_rsrp_dbm");
      m.rsrq_db = csv::to_double(row[16], "modem_rsrq_db");
      if (band) m.lte_band = static_cast<int>(*band);
      if (earfcn) m.earfcn = static_cast<std::uint32_t>(*earfcn);
      m.eci = r.eci;
      r.modem = m;
    }
    if (auto t = csv::to_opt_int(row[17], "oai_time_ns")) {
      KpiSample o;
      o.source = Source::Oai;
      o.time_ns = *t;
      o.sinr_db = csv::to_double(row[18], "sinr_db");
      o.rssi_dbm = csv::to_double(row[19], "rssi_dbm");
      o.rsrp_dbm = csv::to_double(row[20], "rsrp_dbm");
      o.rsrq_db = csv::to_double(row[21], "rsrq_db");
      o.noise_power_dbm = csv::to_opt_double(row[22], "noise_power_dbm");
      o.rx_power_dbm = csv::to_opt_double(row[23], "rx_power_dbm");
      o.pci = r.pci;
      r.oai = o;
    }
    if (auto t = csv::to_opt_int(row[24], "gnss_time_ns")) {
      r.gnss = GnssFix{*t, csv::to_double(row[25], "lat_deg"), csv::to_double(row[26], "lon_deg"),
                       csv::to_double(row[27], "speed_kmph")};
    }
    r.modem_staleness_ns = csv::to_opt_int(row[28], "modem_staleness_ns");
    r.oai_staleness_ns = csv::to_opt_int(row[29], "oai_staleness_ns");
    r.gnss_staleness_ns = csv::to_opt_int(row[30], "gnss_staleness_ns");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace cvqos::ingest
