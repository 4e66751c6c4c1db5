#pragma once

// A-MPDU byte accounting and data airtime for 802.11ac-style aggregation.
//
// Subframe layout: | delimiter | MAC header | MSDU (IP + UDP + payload) | FCS | pad |
// Each subframe, the last one included (EOF padding), is padded to a 4-byte
// boundary.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mumimo/errors.hpp"
#include "mumimo/packet.hpp"

namespace mumimo {

struct FramingConstants {
  std::uint32_t mac_header = 36;  // bytes
  std::uint32_t delimiter = 4;
  std::uint32_t fcs = 4;
  std::uint32_t ip_header = 20;
  std::uint32_t udp_header = 8;
  std::uint32_t pad_align = 4;
  std::uint32_t max_aggregation = 64;  // hard cap on subframes per A-MPDU
  double phy_header = 44e-6;           // seconds, per PPDU
  double mcs_rate = 54e6;              // bits/second

  void validate() const {
    if (mac_header == 0) throw ConfigError("framing.mac_header_bytes", "must be positive");
    if (delimiter == 0) throw ConfigError("framing.delimiter_bytes", "must be positive");
    if (fcs == 0) throw ConfigError("framing.fcs_bytes", "must be positive");
    if (ip_header == 0) throw ConfigError("framing.ip_header_bytes", "must be positive");
    if (udp_header == 0) throw ConfigError("framing.udp_header_bytes", "must be positive");
    if (pad_align == 0) throw ConfigError("framing.pad_align_bytes", "must be positive");
    if (max_aggregation == 0 || max_aggregation > 64)
      throw ConfigError("framing.max_aggregation", "must be in [1, 64]");
    if (!(phy_header > 0.0)) throw ConfigError("framing.phy_header_us", "must be positive");
    if (!(mcs_rate > 0.0)) throw ConfigError("framing.mcs_rate_mbps", "must be positive");
  }
};

constexpr std::uint64_t msdu_len(std::uint64_t payload, const FramingConstants& c = {}) {
  return payload + c.ip_header + c.udp_header;
}

constexpr std::uint64_t subframe_len(std::uint64_t payload, const FramingConstants& c = {}) {
  const std::uint64_t raw = c.delimiter + c.mac_header + msdu_len(payload, c) + c.fcs;
  return (raw + c.pad_align - 1) / c.pad_align * c.pad_align;
}

struct Subframe {
  std::uint32_t payload = 0;  // application bytes
  std::uint32_t length = 0;   // on-air subframe bytes incl. padding
};

struct Ampdu {
  std::size_t user_id = 0;
  std::vector<Subframe> subframes;
  std::uint64_t total_psdu = 0;
  std::uint64_t payload_total = 0;
};

// Dequeues up to `max_agg` packets (FIFO) from `queue` into one A-MPDU.
// `Queue` is any FIFO of Packet with front()/pop_front()/empty().
template <typename Queue>
Ampdu build_ampdu(std::size_t user_id, Queue& queue, std::size_t max_agg,
                  const FramingConstants& c = {}) {
  if (queue.empty()) throw std::logic_error("build_ampdu: empty queue");
  if (max_agg == 0) throw std::logic_error("build_ampdu: max_agg must be positive");
  Ampdu out;
  out.user_id = user_id;
  out.subframes.reserve(max_agg);
  while (!queue.empty() && out.subframes.size() < max_agg) {
    const Packet& p = queue.front();
    const auto len = static_cast<std::uint32_t>(subframe_len(p.payload, c));
    out.subframes.push_back({p.payload, len});
    out.total_psdu += len;
    out.payload_total += p.payload;
    queue.pop_front();
  }
  return out;
}

// Data portion only; the PHY preamble is accounted for in the cycle overhead.
inline double psdu_airtime(std::uint64_t psdu_bytes, double mcs_rate) {
  return static_cast<double>(psdu_bytes) * 8.0 / mcs_rate;
}

}  // namespace mumimo
