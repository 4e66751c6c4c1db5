#pragma once

// Evaluation quantities computed from a cycle log.
//
// delay_i is the idle gap before cycle i: tx_start(i) - tx_end(i-1), with the
// first cycle measured from t = 0. The delay fraction is the sum of these
// gaps over the total time considered.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "mumimo/packet.hpp"
#include "mumimo/traffic.hpp"

namespace mumimo {

struct UserSlot {
  std::size_t user_id = 0;
  std::size_t subframes = 0;
  std::uint64_t payload_bytes = 0;
  std::uint64_t psdu_bytes = 0;
  double airtime = 0.0;  // data airtime of this user's stream, seconds
};

/// One downlink transmit cycle (sounding, parallel data streams, acks).
struct CycleRecord {
  std::size_t index = 0;
  double tx_start = 0.0;
  double tx_end = 0.0;
  double delay = 0.0;
  double overhead = 0.0;
  std::vector<UserSlot> per_user;

  double duration() const { return tx_end - tx_start; }

  double max_airtime() const {
    double m = 0.0;
    for (const auto& s : per_user) m = std::max(m, s.airtime);
    return m;
  }

  // Airtime left unused by streams shorter than the longest one.
  double wasted_airtime() const {
    const double m = max_airtime();
    double w = 0.0;
    for (const auto& s : per_user) w += m - s.airtime;
    return w;
  }

  std::uint64_t payload_bytes() const {
    std::uint64_t b = 0;
    for (const auto& s : per_user) b += s.payload_bytes;
    return b;
  }

  std::uint64_t psdu_bytes() const {
    std::uint64_t b = 0;
    for (const auto& s : per_user) b += s.psdu_bytes;
    return b;
  }
};

/// Measurement interval [begin, end] in seconds.
struct Window {
  double begin = 0.0;
  double end = 0.0;

  double length() const { return end - begin; }
  bool contains(double t) const { return t > begin && t <= end; }
};

inline void require_valid(const Window& w) {
  if (!(w.end > w.begin)) throw std::invalid_argument("metrics: window must have positive length");
}

struct RunMetrics {
  double aggregate_throughput = 0.0;  // application payload bits/s
  double psdu_throughput = 0.0;       // MAC-level PSDU bits/s
  double delay_fraction = 0.0;
  double offered_load = 0.0;  // payload bits/s; +inf for backlogged traffic
  double mean_cycle_duration = 0.0;
  double wasted_airtime_fraction = 0.0;
};

/// Payload bits of the cycles that finish inside the window, per second.
inline double aggregate_throughput(std::span<const CycleRecord> log, const Window& w) {
  require_valid(w);
  double bits = 0.0;
  for (const auto& c : log)
    if (w.contains(c.tx_end)) bits += static_cast<double>(c.payload_bytes()) * 8.0;
  return bits / w.length();
}

inline double psdu_throughput(std::span<const CycleRecord> log, const Window& w) {
  require_valid(w);
  double bits = 0.0;
  for (const auto& c : log)
    if (w.contains(c.tx_end)) bits += static_cast<double>(c.psdu_bytes()) * 8.0;
  return bits / w.length();
}

/// Plain ratio: sum of recorded delays over `total_time`.
inline double delay_fraction(std::span<const CycleRecord> log, double total_time) {
  if (!(total_time > 0.0)) throw std::invalid_argument("delay_fraction: total_time must be positive");
  double sum = 0.0;
  for (const auto& c : log) sum += c.delay;
  return sum / total_time;
}

/// Delay fraction restricted to a window: every idle gap is clipped to the
/// window before summing, so the result always lies in [0, 1].
inline double delay_fraction(std::span<const CycleRecord> log, const Window& w) {
  require_valid(w);
  double sum = 0.0;
  for (const auto& c : log) {
    const double gap_begin = std::max(c.tx_start - c.delay, w.begin);
    const double gap_end = std::min(c.tx_start, w.end);
    if (gap_end > gap_begin) sum += gap_end - gap_begin;
  }
  return sum / w.length();
}

/// Busy time of the cycles clipped to the window.
inline double busy_time(std::span<const CycleRecord> log, const Window& w) {
  double sum = 0.0;
  for (const auto& c : log) {
    const double b = std::max(c.tx_start, w.begin);
    const double e = std::min(c.tx_end, w.end);
    if (e > b) sum += e - b;
  }
  return sum;
}

inline double mean_cycle_duration(std::span<const CycleRecord> log, const Window& w) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : log)
    if (w.contains(c.tx_end)) {
      sum += c.duration();
      ++n;
    }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

inline double wasted_airtime_fraction(std::span<const CycleRecord> log, const Window& w) {
  double wasted = 0.0;
  double capacity = 0.0;
  for (const auto& c : log)
    if (w.contains(c.tx_end)) {
      wasted += c.wasted_airtime();
      capacity += static_cast<double>(c.per_user.size()) * c.duration();
    }
  return capacity > 0.0 ? wasted / capacity : 0.0;
}

inline constexpr double kInfiniteLoad = std::numeric_limits<double>::infinity();

/// Generated payload bits arriving inside the window, per second.
inline double offered_load(std::span<const Packet> arrivals, const Window& w) {
  require_valid(w);
  double bits = 0.0;
  for (const auto& p : arrivals)
    if (p.arrival_time >= w.begin && p.arrival_time < w.end) bits += static_cast<double>(p.payload) * 8.0;
  return bits / w.length();
}

/// As above, but any backlogged source makes the load infinite.
inline double offered_load(std::span<const TrafficSource> sources, std::span<const Packet> arrivals,
                           const Window& w) {
  for (const auto& s : sources)
    if (s.mode == SourceMode::backlogged) return kInfiniteLoad;
  return offered_load(arrivals, w);
}

inline RunMetrics compute_metrics(std::span<const CycleRecord> log, const Window& w, double offered) {
  RunMetrics m;
  m.aggregate_throughput = aggregate_throughput(log, w);
  m.psdu_throughput = psdu_throughput(log, w);
  m.delay_fraction = delay_fraction(log, w);
  m.offered_load = offered;
  m.mean_cycle_duration = mean_cycle_duration(log, w);
  m.wasted_airtime_fraction = wasted_airtime_fraction(log, w);
  return m;
}

}  // namespace mumimo
