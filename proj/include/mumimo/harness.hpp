#pragma once

// Parameter sweeps over the simulator and their CSV output.

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "mumimo/engine.hpp"
#include "mumimo/errors.hpp"
#include "mumimo/metrics.hpp"
#include "mumimo/traffic.hpp"

namespace mumimo {

enum class SweepKind { variance, correlation, burstiness, custom };
enum class Figure { fig5, fig6, fig7 };

inline std::string_view to_string(SweepKind k) {
  switch (k) {
    case SweepKind::variance: return "variance";
    case SweepKind::correlation: return "correlation";
    case SweepKind::burstiness: return "burstiness";
    case SweepKind::custom: return "custom";
  }
  return "?";
}

inline std::optional<SweepKind> parse_sweep_kind(std::string_view s) {
  if (s == "variance") return SweepKind::variance;
  if (s == "correlation") return SweepKind::correlation;
  if (s == "burstiness") return SweepKind::burstiness;
  if (s == "custom") return SweepKind::custom;
  return std::nullopt;
}

inline std::optional<Figure> parse_figure(std::string_view s) {
  if (s == "fig5") return Figure::fig5;
  if (s == "fig6") return Figure::fig6;
  if (s == "fig7") return Figure::fig7;
  return std::nullopt;
}

inline std::string_view to_string(Figure f) {
  switch (f) {
    case Figure::fig5: return "fig5";
    case Figure::fig6: return "fig6";
    case Figure::fig7: return "fig7";
  }
  return "?";
}

/// A grid of runs: every swept value x aggregation rate x seed.
///
/// variance     value = extreme weight w of the three-point size model
/// correlation  value = correlation coefficient C (w taken from `traffic`)
/// burstiness   value = peak-to-average ratio; 0 selects backlogged traffic.
///              The ratio is reached by scaling mean OFF time at fixed mean ON.
/// custom       `base` and `traffic` as given; the value only labels rows
struct SweepSpec {
  SweepKind kind = SweepKind::custom;
  std::vector<double> values{0.0};
  std::vector<std::size_t> agg_rates{10, 20, 40};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  SimConfig base;
  TrafficSource traffic;
};

struct RunPoint {
  double value = 0.0;
  std::size_t agg = 0;
  std::uint64_t seed = 0;
};

inline std::vector<RunPoint> enumerate_points(const SweepSpec& spec) {
  std::vector<RunPoint> pts;
  pts.reserve(spec.values.size() * spec.agg_rates.size() * spec.seeds.size());
  for (double v : spec.values)
    for (std::size_t a : spec.agg_rates)
      for (std::uint64_t s : spec.seeds) pts.push_back({v, a, s});
  return pts;
}

inline SimConfig configure_point(const SweepSpec& spec, const RunPoint& pt) {
  SimConfig cfg = spec.base;
  cfg.max_agg = pt.agg;
  cfg.seed = pt.seed;
  TrafficSource t = spec.traffic;
  switch (spec.kind) {
    case SweepKind::variance:
      if (t.size_model.kind == SizeKind::fixed) t.size_model.kind = SizeKind::three_point;
      t.size_model.extreme_weight = pt.value;
      break;
    case SweepKind::correlation:
      t.size_model.kind = SizeKind::three_point_correlated;
      t.size_model.correlation_coefficient = static_cast<std::uint32_t>(pt.value);
      break;
    case SweepKind::burstiness:
      if (pt.value == 0.0) {
        t.mode = SourceMode::backlogged;
      } else {
        t.mode = SourceMode::on_off;
        t.mean_off = (pt.value - 1.0) * t.mean_on;
      }
      break;
    case SweepKind::custom:
      break;
  }
  assign_uniform_traffic(cfg, t);
  return cfg;
}

inline void validate(const SweepSpec& spec) {
  if (spec.values.empty()) throw ConfigError("sweep.values", "must not be empty");
  if (spec.agg_rates.empty()) throw ConfigError("sweep.agg_rates", "must not be empty");
  if (spec.seeds.empty()) throw ConfigError("sweep.seeds", "must not be empty");
  for (double v : spec.values) {
    if (!std::isfinite(v)) throw ConfigError("sweep.values", "values must be finite");
    switch (spec.kind) {
      case SweepKind::variance:
        if (v < 0.0 || v > 0.5) throw ConfigError("sweep.values", "extreme weight must be in [0, 0.5]");
        break;
      case SweepKind::correlation:
        if (v < 0.0 || v > 64.0 || v != std::floor(v))
          throw ConfigError("sweep.values", "correlation coefficient must be an integer in [0, 64]");
        break;
      case SweepKind::burstiness:
        if (v != 0.0 && v < 1.0)
          throw ConfigError("sweep.values", "peak-to-average ratio must be >= 1 (0 = backlogged)");
        if (v != 0.0 && !(spec.traffic.mean_on > 0.0))
          throw ConfigError("traffic.mean_on_ms", "must be positive for a burstiness sweep");
        break;
      case SweepKind::custom:
        break;
    }
  }
  for (std::size_t a : spec.agg_rates)
    if (a == 0 || a > 64) throw ConfigError("sweep.agg_rates", "aggregation rates must be in [1, 64]");
  // Every grid point must form a valid simulation.
  for (double v : spec.values)
    for (std::size_t a : spec.agg_rates) configure_point(spec, {v, a, spec.seeds.front()}).validate();
}

/// Preset grids for the three experiments: size variance (fig5), size
/// correlation (fig6) and burstiness (fig7).
inline SweepSpec make_figure_config(Figure fig) {
  SweepSpec spec;
  spec.base.n_antennas = 4;
  spec.base.sounding.n_tx = 4;
  spec.base.horizon = 10.0;
  spec.base.warmup = 1.0;
  spec.traffic.size_model = PacketSizeModel{};
  switch (fig) {
    case Figure::fig5:
      spec.kind = SweepKind::variance;
      spec.base.n_users = 4;
      spec.traffic.mode = SourceMode::backlogged;
      spec.traffic.size_model.kind = SizeKind::three_point;
      spec.values = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
      break;
    case Figure::fig6:
      spec.kind = SweepKind::correlation;
      spec.base.n_users = 4;
      spec.traffic.mode = SourceMode::backlogged;
      spec.traffic.size_model.kind = SizeKind::three_point_correlated;
      spec.traffic.size_model.extreme_weight = 0.5;
      // Divisors/multiples of the default aggregation rates, see README.
      spec.values = {0, 1, 2, 4, 5, 10, 20, 40};
      break;
    case Figure::fig7:
      spec.kind = SweepKind::burstiness;
      spec.base.n_users = 12;
      // queues fill from empty at the overloaded ratios; give that time
      spec.base.horizon = 21.0;
      spec.base.warmup = 3.0;
      spec.traffic.mode = SourceMode::on_off;
      spec.traffic.size_model.kind = SizeKind::fixed;
      spec.traffic.mean_on = 10e-3;
      spec.traffic.peak_rate = 280e6;
      spec.values = {0, 1, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24, 26, 27, 28, 30};
      break;
  }
  return spec;
}

struct SweepRow {
  SweepKind kind = SweepKind::custom;
  double value = 0.0;
  std::size_t agg = 0;
  std::uint64_t seed = 0;
  RunMetrics metrics;
  RunTotals totals;
};

/// Throws InvariantViolation if a finished run breaks a model bound.
inline void check_row(const SweepRow& row, const SimConfig& cfg) {
  const auto& m = row.metrics;
  const double cap = static_cast<double>(cfg.n_antennas) * cfg.framing.mcs_rate;
  auto fail = [&](const std::string& what) {
    throw InvariantViolation(std::string(to_string(row.kind)) + " value " + std::to_string(row.value) + " agg " +
                             std::to_string(row.agg) + " seed " + std::to_string(row.seed) + ": " + what);
  };
  if (!(m.aggregate_throughput >= 0.0 && m.aggregate_throughput < cap)) fail("throughput outside [0, M x mcs_rate)");
  if (!(m.psdu_throughput >= m.aggregate_throughput && m.psdu_throughput < cap)) fail("PSDU throughput out of range");
  if (!(m.delay_fraction >= 0.0 && m.delay_fraction <= 1.0)) fail("delay fraction outside [0, 1]");
  if (!(m.wasted_airtime_fraction >= 0.0 && m.wasted_airtime_fraction < 1.0)) fail("wasted airtime fraction outside [0, 1)");
  if (row.totals.delivered_bits > row.totals.generated_bits) fail("delivered more payload than generated");
}

struct SweepOptions {
  unsigned jobs = 1;
  std::optional<std::filesystem::path> dump_cycles;
};

inline std::string format_double(double v, int precision) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

inline std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline void write_cycles_csv(std::ostream& os, std::span<const CycleRecord> log, std::size_t slots) {
  os << "cycle_index,tx_start_us,tx_end_us,delay_us";
  for (std::size_t k = 0; k < slots; ++k)
    os << ",user_id_" << k << ",subframes_" << k << ",payload_bytes_" << k;
  os << '\n';
  for (const auto& c : log) {
    os << c.index << ',' << format_double(c.tx_start * 1e6, 3) << ',' << format_double(c.tx_end * 1e6, 3) << ','
       << format_double(c.delay * 1e6, 3);
    for (std::size_t k = 0; k < slots; ++k) {
      if (k < c.per_user.size())
        os << ',' << c.per_user[k].user_id << ',' << c.per_user[k].subframes << ',' << c.per_user[k].payload_bytes;
      else
        os << ",,,";
    }
    os << '\n';
  }
}

inline std::string cycles_file_name(const SweepRow& r) {
  return "cycles_" + std::string(to_string(r.kind)) + "_" + format_value(r.value) + "_agg" + std::to_string(r.agg) +
         "_seed" + std::to_string(r.seed) + ".csv";
}

/// Runs every grid point and returns rows in (value, agg, seed) order,
/// independent of `jobs`.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SweepOptions& opt = {}) {
  validate(spec);
  const auto points = enumerate_points(spec);
  std::vector<SweepRow> rows(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        const SimConfig cfg = configure_point(spec, points[i]);
        SimResult res = run(cfg);
        SweepRow& row = rows[i];
        row.kind = spec.kind;
        row.value = points[i].value;
        row.agg = points[i].agg;
        row.seed = points[i].seed;
        row.metrics = res.metrics;
        row.totals = res.totals;
        check_row(row, cfg);
        if (opt.dump_cycles) {
          std::ofstream f(*opt.dump_cycles / cycles_file_name(row));
          if (!f) throw std::runtime_error("cannot write cycle dump in " + opt.dump_cycles->string());
          write_cycles_csv(f, res.cycles, cfg.n_antennas);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const unsigned jobs = std::max(1u, opt.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

inline constexpr std::string_view kResultsHeader =
    "sweep_kind,sweep_value,agg_rate,seed,throughput_mbps,psdu_throughput_mbps,delay_fraction,"
    "offered_load_mbps,mean_cycle_us,wasted_airtime_fraction";

inline void write_results_csv(std::ostream& os, std::span<const SweepRow> rows) {
  os << kResultsHeader << '\n';
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    os << to_string(r.kind) << ',' << format_value(r.value) << ',' << r.agg << ',' << r.seed << ','
       << format_double(m.aggregate_throughput / 1e6, 6) << ',' << format_double(m.psdu_throughput / 1e6, 6) << ','
       << format_double(m.delay_fraction, 9) << ',' << format_double(m.offered_load / 1e6, 6) << ','
       << format_double(m.mean_cycle_duration * 1e6, 4) << ',' << format_double(m.wasted_airtime_fraction, 9)
       << '\n';
  }
}

}  // namespace mumimo
