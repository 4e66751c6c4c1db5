#pragma once

// Discrete-event model of a MU-MIMO access point serving N users with M
// antennas. Arrivals feed per-user FIFO queues; whenever at least M users are
// ready the AP sounds the channel, sends one A-MPDU per selected user in
// parallel, and collects block acks. Otherwise it idles until the next arrival.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mumimo/errors.hpp"
#include "mumimo/framing.hpp"
#include "mumimo/metrics.hpp"
#include "mumimo/overhead.hpp"
#include "mumimo/random.hpp"
#include "mumimo/traffic.hpp"

namespace mumimo {

struct SimConfig {
  std::size_t n_antennas = 4;
  std::size_t n_users = 4;
  std::size_t max_agg = 40;
  std::size_t readiness_threshold = 0;  // 0 means "same as max_agg"
  double horizon = 10.0;                // seconds
  double warmup = 1.0;                  // seconds excluded from metrics
  std::uint64_t seed = 1;
  std::size_t queue_limit = 10000;  // per-user drop-tail limit, packets
  FramingConstants framing;
  SoundingConfig sounding;
  std::vector<TrafficSource> sources;  // one per user, index == user_id

  std::size_t threshold() const { return readiness_threshold == 0 ? max_agg : readiness_threshold; }

  Window window() const { return Window{warmup, horizon}; }

  void validate() const {
    framing.validate();
    sounding.validate();
    if (n_antennas == 0) throw ConfigError("sim.n_antennas", "must be at least 1");
    if (n_users < n_antennas) throw ConfigError("sim.n_users", "must be at least sim.n_antennas");
    if (sounding.n_tx != n_antennas) throw ConfigError("sounding.n_tx", "must equal sim.n_antennas");
    if (max_agg == 0 || max_agg > framing.max_aggregation)
      throw ConfigError("sweep.agg_rates", "aggregation rate must be in [1, framing.max_aggregation]");
    if (threshold() > max_agg) throw ConfigError("sim.readiness_threshold", "must not exceed the aggregation rate");
    if (!(horizon > warmup)) throw ConfigError("sim.horizon_s", "must exceed sim.warmup_s");
    if (!(warmup >= 0.0)) throw ConfigError("sim.warmup_s", "must be non-negative");
    if (queue_limit < max_agg) throw ConfigError("sim.queue_limit", "must hold at least one full aggregate");
    if (sources.size() != n_users) throw ConfigError("traffic", "need exactly one source per user");
    for (std::size_t u = 0; u < sources.size(); ++u) {
      if (sources[u].user_id != u) throw ConfigError("traffic", "source user_id must match its index");
      sources[u].validate();
    }
  }
};

/// Gives every user a copy of `tmpl`. Users share the configuration and differ
/// only in their random stream, which is derived from (tmpl.seed, cfg.seed, user_id).
inline void assign_uniform_traffic(SimConfig& cfg, const TrafficSource& tmpl) {
  cfg.sources.clear();
  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    TrafficSource s = tmpl;
    s.user_id = u;
    s.seed = mix_seeds(tmpl.seed, cfg.seed);
    cfg.sources.push_back(s);
  }
}

/// FIFO group selection. A user is ready when its queue holds at least
/// `threshold` packets; the `m` ready users with the oldest head-of-line
/// packets are picked, ties going to the lower user id. Returns nullopt when
/// fewer than `m` users are ready.
template <typename Queues>
std::optional<std::vector<std::size_t>> select_users_fifo(const Queues& queues, std::size_t m,
                                                          std::size_t threshold) {
  std::vector<std::pair<double, std::size_t>> ready;
  std::size_t uid = 0;
  for (const auto& q : queues) {
    if (!q.empty() && q.size() >= threshold) ready.emplace_back(q.front().arrival_time, uid);
    ++uid;
  }
  if (ready.size() < m || m == 0) return std::nullopt;
  std::partial_sort(ready.begin(), ready.begin() + static_cast<std::ptrdiff_t>(m), ready.end());
  std::vector<std::size_t> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.push_back(ready[i].second);
  return out;
}

struct RunTotals {
  std::uint64_t generated_bits = 0;  // payload bits that entered the AP (drops included)
  std::uint64_t delivered_bits = 0;
  std::uint64_t generated_window_bits = 0;
  std::uint64_t dropped_packets = 0;
};

struct SimResult {
  std::vector<CycleRecord> cycles;
  RunMetrics metrics;
  RunTotals totals;
  Window window;
};

class Simulator {
 public:
  using Queue = std::deque<Packet>;

  explicit Simulator(SimConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    queues_.resize(cfg_.n_users);
    streams_.reserve(cfg_.n_users);
    pending_.resize(cfg_.n_users);
    for (const auto& src : cfg_.sources) {
      streams_.emplace_back(src, cfg_.framing);
      if (src.mode == SourceMode::backlogged)
        any_backlogged_ = true;
      else
        pending_[src.user_id] = streams_.back().next();
    }
    const std::size_t m = cfg_.n_antennas;
    overhead_sounded_ = overhead_breakdown(cfg_.sounding, m, cfg_.framing.phy_header, true).total();
    overhead_plain_ = overhead_breakdown(cfg_.sounding, m, cfg_.framing.phy_header, false).total();
  }

  const SimConfig& config() const { return cfg_; }
  double clock() const { return clock_; }
  const std::vector<Queue>& queues() const { return queues_; }
  const std::vector<CycleRecord>& cycles() const { return cycles_; }
  const RunTotals& totals() const { return totals_; }

  /// Places a packet directly in its user's queue (counted as generated).
  void enqueue(const Packet& p) {
    queues_.at(p.user_id).push_back(p);
    totals_.generated_bits += std::uint64_t{p.payload} * 8;
  }

  /// Moves the clock forward without running cycles (idle time).
  void advance_to(double t) {
    if (t < clock_) throw std::logic_error("Simulator: clock cannot move backwards");
    clock_ = t;
  }

  std::optional<std::vector<std::size_t>> select() const {
    return select_users_fifo(queues_, cfg_.n_antennas, cfg_.threshold());
  }

  /// Runs one transmit cycle for `selected` starting at the current clock.
  const CycleRecord& execute_cycle(std::span<const std::size_t> selected) {
    if (selected.empty()) throw std::logic_error("execute_cycle: no users selected");
    CycleRecord rec;
    rec.index = cycles_.size();
    rec.tx_start = clock_;
    rec.delay = clock_ - prev_end_;
    const bool sounded = rec.index % cfg_.sounding.sounding_every_n_cycles == 0;
    rec.overhead = sounded ? overhead_sounded_ : overhead_plain_;
    rec.per_user.reserve(selected.size());
    double longest = 0.0;
    for (std::size_t uid : selected) {
      Queue& q = queues_.at(uid);
      if (q.size() < cfg_.threshold() || q.empty())
        throw std::logic_error("execute_cycle: selected user is not ready");
      const Ampdu a = build_ampdu(uid, q, cfg_.max_agg, cfg_.framing);
      UserSlot slot;
      slot.user_id = uid;
      slot.subframes = a.subframes.size();
      slot.payload_bytes = a.payload_total;
      slot.psdu_bytes = a.total_psdu;
      slot.airtime = psdu_airtime(a.total_psdu, cfg_.framing.mcs_rate);
      longest = std::max(longest, slot.airtime);
      totals_.delivered_bits += a.payload_total * 8;
      rec.per_user.push_back(slot);
    }
    rec.tx_end = rec.tx_start + rec.overhead + longest;
    clock_ = rec.tx_end;
    prev_end_ = rec.tx_end;
    cycles_.push_back(std::move(rec));
    return cycles_.back();
  }

  /// Event loop up to the horizon.
  SimResult run() {
    const double horizon = cfg_.horizon;
    while (true) {
      ingest_until(clock_);
      top_up_backlogged();
      if (clock_ >= horizon) break;
      if (auto sel = select()) {
        execute_cycle(*sel);
        continue;
      }
      const double next = next_arrival_time();
      if (!(next < horizon)) break;
      clock_ = next;
    }
    SimResult out;
    out.window = cfg_.window();
    const double offered = any_backlogged_
                               ? kInfiniteLoad
                               : static_cast<double>(totals_.generated_window_bits) / out.window.length();
    out.metrics = compute_metrics(cycles_, out.window, offered);
    out.totals = totals_;
    out.cycles = std::move(cycles_);
    cycles_.clear();
    return out;
  }

 private:
  void ingest_until(double t) {
    const double horizon = cfg_.horizon;
    for (std::size_t u = 0; u < pending_.size(); ++u) {
      auto& next = pending_[u];
      while (next && next->arrival_time <= t && next->arrival_time < horizon) {
        accept(*next);
        next = streams_[u].next();
      }
    }
  }

  void accept(const Packet& p) {
    const std::uint64_t bits = std::uint64_t{p.payload} * 8;
    totals_.generated_bits += bits;
    if (p.arrival_time >= cfg_.warmup) totals_.generated_window_bits += bits;
    Queue& q = queues_[p.user_id];
    if (q.size() >= cfg_.queue_limit) {
      ++totals_.dropped_packets;
      return;
    }
    q.push_back(p);
  }

  void top_up_backlogged() {
    if (!any_backlogged_) return;
    const std::size_t fill = std::max(cfg_.threshold(), cfg_.max_agg);
    for (auto& stream : streams_) {
      if (!stream.backlogged()) continue;
      Queue& q = queues_[stream.source().user_id];
      while (q.size() < fill) {
        const Packet p = stream.request(clock_);
        totals_.generated_bits += std::uint64_t{p.payload} * 8;
        q.push_back(p);
      }
    }
  }

  double next_arrival_time() const {
    double t = std::numeric_limits<double>::infinity();
    for (const auto& p : pending_)
      if (p) t = std::min(t, p->arrival_time);
    return t;
  }

  SimConfig cfg_;
  std::vector<Queue> queues_;
  std::vector<ArrivalStream> streams_;
  std::vector<std::optional<Packet>> pending_;
  std::vector<CycleRecord> cycles_;
  RunTotals totals_;
  bool any_backlogged_ = false;
  double clock_ = 0.0;
  double prev_end_ = 0.0;
  double overhead_sounded_ = 0.0;
  double overhead_plain_ = 0.0;
};

inline SimResult run(const SimConfig& cfg) { return Simulator(cfg).run(); }

}  // namespace mumimo
