#pragma once

// Per-user downlink traffic: packet-size models and ON/OFF arrival streams.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mumimo/errors.hpp"
#include "mumimo/framing.hpp"
#include "mumimo/packet.hpp"
#include "mumimo/random.hpp"

namespace mumimo {

enum class SizeKind { fixed, three_point, three_point_correlated };

inline std::string_view to_string(SizeKind k) {
  switch (k) {
    case SizeKind::fixed: return "fixed";
    case SizeKind::three_point: return "three_point";
    case SizeKind::three_point_correlated: return "three_point_correlated";
  }
  return "?";
}

inline std::optional<SizeKind> parse_size_kind(std::string_view s) {
  if (s == "fixed") return SizeKind::fixed;
  if (s == "three_point") return SizeKind::three_point;
  if (s == "three_point_correlated") return SizeKind::three_point_correlated;
  return std::nullopt;
}

/// Fixed-mean packet-size family.
///
/// Sizes take one of three values {size_min, mean, size_max} with masses
/// {w, 1 - 2w, w}, where mean = (size_min + size_max) / 2. The mean does not
/// move with w, and after mapping sizes affinely onto [0, 1] the variance is
/// exactly w / 2, so w in [0, 0.5] sweeps the normalized variance over
/// [0, 0.25]. The fixed kind always returns the mean.
///
/// The correlated kind repeats each drawn size for `correlation_coefficient`
/// consecutive packets before drawing again; a coefficient of 0 or 1 is IID.
struct PacketSizeModel {
  SizeKind kind = SizeKind::fixed;
  std::uint32_t size_min = 0;
  std::uint32_t size_max = 1024;
  double extreme_weight = 0.0;
  std::uint32_t correlation_coefficient = 0;

  std::uint32_t mean() const { return static_cast<std::uint32_t>((std::uint64_t{size_min} + size_max) / 2); }

  double normalized_variance() const { return kind == SizeKind::fixed ? 0.0 : extreme_weight / 2.0; }

  void validate() const {
    if (size_min >= size_max) throw ConfigError("traffic.size_min", "must be smaller than traffic.size_max");
    if ((std::uint64_t{size_min} + size_max) % 2 != 0)
      throw ConfigError("traffic.size_max", "size_min + size_max must be even so the mean is a whole byte count");
    if (!(extreme_weight >= 0.0 && extreme_weight <= 0.5))
      throw ConfigError("traffic.extreme_weight", "must be in [0, 0.5]");
    if (correlation_coefficient > 64)
      throw ConfigError("traffic.correlation_coefficient", "must be in [0, 64]");
  }
};

/// Stateful sampler for a PacketSizeModel; keeps the run counter of the
/// correlated kind.
class PacketSizeSampler {
 public:
  explicit PacketSizeSampler(PacketSizeModel model) : model_(model) { model_.validate(); }

  std::uint32_t sample(Rng& rng) {
    switch (model_.kind) {
      case SizeKind::fixed:
        return model_.mean();
      case SizeKind::three_point:
        return draw(rng);
      case SizeKind::three_point_correlated:
        if (model_.correlation_coefficient <= 1) return draw(rng);
        if (remaining_ == 0) {
          current_ = draw(rng);
          remaining_ = model_.correlation_coefficient;
        }
        --remaining_;
        return current_;
    }
    return model_.mean();
  }

  const PacketSizeModel& model() const { return model_; }

 private:
  std::uint32_t draw(Rng& rng) const {
    const double u = rng.uniform();
    if (u < model_.extreme_weight) return model_.size_min;
    if (u < 2.0 * model_.extreme_weight) return model_.size_max;
    return model_.mean();
  }

  PacketSizeModel model_;
  std::uint32_t current_ = 0;
  std::uint32_t remaining_ = 0;
};

enum class SourceMode { backlogged, on_off };

/// One user's traffic source. Rates are in MSDU bits (payload + IP + UDP).
struct TrafficSource {
  std::size_t user_id = 0;
  SourceMode mode = SourceMode::backlogged;
  double mean_on = 10e-3;   // seconds
  double mean_off = 0.0;    // seconds
  double peak_rate = 54e6;  // bits/second; 0 makes the source silent
  PacketSizeModel size_model;
  std::uint64_t seed = 0;

  void validate() const {
    size_model.validate();
    if (mode == SourceMode::on_off) {
      if (!(mean_on >= 0.0)) throw ConfigError("traffic.mean_on_ms", "must be non-negative");
      if (!(mean_off >= 0.0)) throw ConfigError("traffic.mean_off_ms", "must be non-negative");
      if (!(peak_rate >= 0.0)) throw ConfigError("traffic.peak_rate_mbps", "must be non-negative");
    }
  }
};

/// Burstiness of a source. A backlogged source has no finite ratio and is
/// reported with value 0, the position it is plotted at.
class PeakToAverage {
 public:
  static PeakToAverage backlogged() { return PeakToAverage(0.0); }
  static PeakToAverage ratio(double r) { return PeakToAverage(r); }

  bool is_backlogged() const { return value_ == 0.0; }
  double value() const { return value_; }

 private:
  explicit PeakToAverage(double v) : value_(v) {}
  double value_;
};

inline PeakToAverage peak_to_average_ratio(const TrafficSource& s) {
  if (s.mode == SourceMode::backlogged) return PeakToAverage::backlogged();
  if (!(s.mean_on > 0.0)) throw std::invalid_argument("peak_to_average_ratio: mean_on must be positive");
  return PeakToAverage::ratio(1.0 + s.mean_off / s.mean_on);
}

/// Lazy packet stream for one source.
///
/// ON/OFF mode: ON and OFF durations are exponential with the configured
/// means, starting with an ON period at t = 0. During ON, packets leave back
/// to back at the peak rate (gap = MSDU bits / peak_rate). The emission clock
/// carries across a period boundary, so the source never exceeds its peak
/// rate and mean_off = 0 gives an exactly constant-rate stream.
///
/// Backlogged mode: `request(now)` hands out a packet stamped `now`.
class ArrivalStream {
 public:
  explicit ArrivalStream(const TrafficSource& source, const FramingConstants& framing = {})
      : source_(source), framing_(framing), sizes_(source.size_model), rng_(source.seed, source.user_id) {
    source_.validate();
    if (source_.mode == SourceMode::on_off) {
      silent_ = !(source_.peak_rate > 0.0) || !(source_.mean_on > 0.0);
      if (!silent_) on_end_ = rng_.exponential(source_.mean_on);
    }
  }

  bool backlogged() const { return source_.mode == SourceMode::backlogged; }
  const TrafficSource& source() const { return source_; }

  /// Next ON/OFF arrival, or nullopt for a silent source.
  std::optional<Packet> next() {
    if (backlogged()) throw std::logic_error("ArrivalStream::next on a backlogged source; use request()");
    if (silent_) return std::nullopt;
    while (next_emit_ >= on_end_) {
      const double on_start = on_end_ + rng_.exponential(source_.mean_off);
      on_end_ = on_start + rng_.exponential(source_.mean_on);
      next_emit_ = std::max(next_emit_, on_start);
    }
    Packet p{source_.user_id, next_emit_, sizes_.sample(rng_)};
    next_emit_ += static_cast<double>(msdu_len(p.payload, framing_)) * 8.0 / source_.peak_rate;
    return p;
  }

  Packet request(double now) {
    if (!backlogged()) throw std::logic_error("ArrivalStream::request on an ON/OFF source; use next()");
    return Packet{source_.user_id, now, sizes_.sample(rng_)};
  }

 private:
  TrafficSource source_;
  FramingConstants framing_;
  PacketSizeSampler sizes_;
  Rng rng_;
  bool silent_ = false;
  double on_end_ = 0.0;
  double next_emit_ = 0.0;
};

/// Materializes every ON/OFF arrival before `horizon`. Backlogged sources are
/// unbounded and must be consumed through ArrivalStream::request instead.
inline std::vector<Packet> generate_arrivals(const TrafficSource& source, double horizon,
                                             const FramingConstants& framing = {}) {
  if (!(horizon > 0.0)) throw std::invalid_argument("generate_arrivals: horizon must be positive");
  if (source.mode == SourceMode::backlogged)
    throw std::invalid_argument("generate_arrivals: a backlogged source has no finite arrival list");
  ArrivalStream stream(source, framing);
  std::vector<Packet> out;
  while (auto p = stream.next()) {
    if (p->arrival_time >= horizon) break;
    out.push_back(*p);
  }
  return out;
}

}  // namespace mumimo
