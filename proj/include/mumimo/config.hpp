#pragma once

// Run configuration file: INI-style `key = value` lines grouped in sections
// [sim], [framing], [sounding], [traffic] and [sweep]. Only keys present in
// the file change the preset they are applied to; unknown keys are errors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mumimo/errors.hpp"
#include "mumimo/harness.hpp"

namespace mumimo {

/// Everything a `simulate` invocation needs besides the CLI flags.
struct HarnessConfig {
  std::optional<Figure> figure;
  SweepSpec spec;
  std::string out;          // empty: stdout
  std::string dump_cycles;  // empty: no dumps
  unsigned jobs = 1;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::string t = trim(v);
    const double d = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
}

inline std::uint64_t to_uint(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
  try {
    return std::stoull(t);
  } catch (const std::exception&) {
    throw ConfigError(key, "integer out of range: '" + v + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key, "expected true/false, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>)
      out += num(xs[i]);
    else
      out += std::to_string(xs[i]);
  }
  return out;
}

struct Binding {
  std::string key;
  std::function<std::string(const HarnessConfig&)> get;
  std::function<void(HarnessConfig&, const std::string& key, const std::string& value)> set;
};

// `scale` converts SI units to file units (1e6 for us, 1e3 for ms, 1e-6 for
// Mb/s). Reading divides by 1e6/1e3 or multiplies by 1e6 so "44" us maps to
// the same double as the literal 44e-6.
#define MUMIMO_BIND_UINT(k, field)                                                             \
  Binding{k, [](const HarnessConfig& c) { return std::to_string(c.field); },                   \
          [](HarnessConfig& c, const std::string& key, const std::string& v) {                 \
            c.field = static_cast<decltype(c.field)>(to_uint(key, v));                         \
          }}
#define MUMIMO_BIND_SCALED(k, field, scale)                                                    \
  Binding{k, [](const HarnessConfig& c) { return num(c.field * (scale)); },                    \
          [](HarnessConfig& c, const std::string& key, const std::string& v) {                 \
            const double x = to_double(key, v);                                                \
            c.field = (scale) >= 1.0 ? x / (scale) : x * std::round(1.0 / (scale));            \
          }}

inline const std::vector<Binding>& bindings() {
  static const std::vector<Binding> table = {
      // [sim]
      Binding{"sim.n_antennas", [](const HarnessConfig& c) { return std::to_string(c.spec.base.n_antennas); },
              [](HarnessConfig& c, const std::string& key, const std::string& v) {
                c.spec.base.n_antennas = to_uint(key, v);
                c.spec.base.sounding.n_tx = static_cast<std::uint32_t>(c.spec.base.n_antennas);
              }},
      MUMIMO_BIND_UINT("sim.n_users", spec.base.n_users),
      MUMIMO_BIND_UINT("sim.readiness_threshold", spec.base.readiness_threshold),
      MUMIMO_BIND_SCALED("sim.horizon_s", spec.base.horizon, 1.0),
      MUMIMO_BIND_SCALED("sim.warmup_s", spec.base.warmup, 1.0),
      MUMIMO_BIND_UINT("sim.queue_limit", spec.base.queue_limit),
      // [framing]
      MUMIMO_BIND_UINT("framing.mac_header_bytes", spec.base.framing.mac_header),
      MUMIMO_BIND_UINT("framing.delimiter_bytes", spec.base.framing.delimiter),
      MUMIMO_BIND_UINT("framing.fcs_bytes", spec.base.framing.fcs),
      MUMIMO_BIND_UINT("framing.ip_header_bytes", spec.base.framing.ip_header),
      MUMIMO_BIND_UINT("framing.udp_header_bytes", spec.base.framing.udp_header),
      MUMIMO_BIND_UINT("framing.pad_align_bytes", spec.base.framing.pad_align),
      MUMIMO_BIND_UINT("framing.max_aggregation", spec.base.framing.max_aggregation),
      MUMIMO_BIND_SCALED("framing.phy_header_us", spec.base.framing.phy_header, 1e6),
      MUMIMO_BIND_SCALED("framing.mcs_rate_mbps", spec.base.framing.mcs_rate, 1e-6),
      // [sounding]
      MUMIMO_BIND_SCALED("sounding.bandwidth_mhz", spec.base.sounding.bandwidth_mhz, 1.0),
      MUMIMO_BIND_UINT("sounding.grouping", spec.base.sounding.grouping),
      MUMIMO_BIND_UINT("sounding.psi_bits", spec.base.sounding.psi_bits),
      MUMIMO_BIND_UINT("sounding.phi_bits", spec.base.sounding.phi_bits),
      MUMIMO_BIND_UINT("sounding.n_tx", spec.base.sounding.n_tx),
      MUMIMO_BIND_UINT("sounding.n_rx_per_user", spec.base.sounding.n_rx_per_user),
      MUMIMO_BIND_UINT("sounding.feedback_subcarriers", spec.base.sounding.feedback_subcarriers),
      MUMIMO_BIND_UINT("sounding.snr_bits", spec.base.sounding.snr_bits),
      MUMIMO_BIND_UINT("sounding.feedback_mac_overhead_bytes", spec.base.sounding.feedback_mac_overhead),
      MUMIMO_BIND_SCALED("sounding.sifs_us", spec.base.sounding.sifs, 1e6),
      MUMIMO_BIND_UINT("sounding.ndpa_bytes", spec.base.sounding.ndpa_bytes),
      MUMIMO_BIND_SCALED("sounding.ndp_duration_us", spec.base.sounding.ndp_duration, 1e6),
      MUMIMO_BIND_UINT("sounding.poll_bytes", spec.base.sounding.poll_bytes),
      MUMIMO_BIND_UINT("sounding.ba_bytes", spec.base.sounding.ba_bytes),
      MUMIMO_BIND_SCALED("sounding.control_rate_mbps", spec.base.sounding.control_rate, 1e-6),
      Binding{"sounding.include_ba",
              [](const HarnessConfig& c) { return std::string(c.spec.base.sounding.include_ba ? "true" : "false"); },
              [](HarnessConfig& c, const std::string& key, const std::string& v) {
                c.spec.base.sounding.include_ba = to_bool(key, v);
              }},
      MUMIMO_BIND_UINT("sounding.sounding_every_n_cycles", spec.base.sounding.sounding_every_n_cycles),
      // [traffic]
      Binding{"traffic.mode",
              [](const HarnessConfig& c) {
                return std::string(c.spec.traffic.mode == SourceMode::backlogged ? "backlogged" : "on_off");
              },
              [](HarnessConfig& c, const std::string& key, const std::string& v) {
                const std::string t = trim(v);
                if (t == "backlogged")
                  c.spec.traffic.mode = SourceMode::backlogged;
                else if (t == "on_off")
                  c.spec.traffic.mode = SourceMode::on_off;
                else
                  throw ConfigError(key, "expected backlogged or on_off, got '" + v + "'");
              }},
      Binding{"traffic.kind", [](const HarnessConfig& c) { return std::string(to_string(c.spec.traffic.size_model.kind)); },
              [](HarnessConfig& c, const std::string& key, const std::string& v) {
                const auto k = parse_size_kind(trim(v));
                if (!k) throw ConfigError(key, "expected fixed, three_point or three_point_correlated, got '" + v + "'");
                c.spec.traffic.size_model.kind = *k;
              }},
      MUMIMO_BIND_UINT("traffic.size_min", spec.traffic.size_model.size_min),
      MUMIMO_BIND_UINT("traffic.size_max", spec.traffic.size_model.size_max),
      MUMIMO_BIND_SCALED("traffic.extreme_weight", spec.traffic.size_model.extreme_weight, 1.0),
      MUMIMO_BIND_UINT("traffic.correlation_coefficient", spec.traffic.size_model.correlation_coefficient),
      MUMIMO_BIND_SCALED("traffic.mean_on_ms", spec.traffic.mean_on, 1e3),
      MUMIMO_BIND_SCALED("traffic.mean_off_ms", spec.traffic.mean_off, 1e3),
      MUMIMO_BIND_SCALED("traffic.peak_rate_mbps", spec.traffic.peak_rate, 1e-6),
      MUMIMO_BIND_UINT("traffic.seed", spec.traffic.seed),
      // [sweep]
      Binding{"sweep.kind", [](const HarnessConfig& c) { return std::string(to_string(c.spec.kind)); },
              [](HarnessConfig& c, const std::string& key, const std::string& v) {
                const auto k = parse_sweep_kind(trim(v));
                if (!k) throw ConfigError(key, "expected variance, correlation, burstiness or custom, got '" + v + "'");
                c.spec.kind = *k;
              }},
      Binding{"sweep.values", [](const HarnessConfig& c) { return join(c.spec.values); },
              [](HarnessConfig& c, const std::string& key, const std::string& v) {
                c.spec.values.clear();
                for (const auto& item : split_list(v))
                  c.spec.values.push_back(item == "backlogged" ? 0.0 : to_double(key, item));
              }},
      Binding{"sweep.agg_rates", [](const HarnessConfig& c) { return join(c.spec.agg_rates); },
              [](HarnessConfig& c, const std::string& key, const std::string& v) {
                c.spec.agg_rates.clear();
                for (const auto& item : split_list(v)) c.spec.agg_rates.push_back(to_uint(key, item));
              }},
      Binding{"sweep.seeds", [](const HarnessConfig& c) { return join(c.spec.seeds); },
              [](HarnessConfig& c, const std::string& key, const std::string& v) {
                c.spec.seeds.clear();
                for (const auto& item : split_list(v)) c.spec.seeds.push_back(to_uint(key, item));
              }},
      Binding{"sweep.out", [](const HarnessConfig& c) { return c.out; },
              [](HarnessConfig& c, const std::string&, const std::string& v) { c.out = trim(v); }},
      Binding{"sweep.dump_cycles", [](const HarnessConfig& c) { return c.dump_cycles; },
              [](HarnessConfig& c, const std::string&, const std::string& v) { c.dump_cycles = trim(v); }},
      MUMIMO_BIND_UINT("sweep.jobs", jobs),
  };
  return table;
}

#undef MUMIMO_BIND_UINT
#undef MUMIMO_BIND_SCALED

}  // namespace detail

using ConfigTree = boost::property_tree::ptree;

inline ConfigTree parse_config(std::istream& is) {
  ConfigTree pt;
  try {
    boost::property_tree::ini_parser::read_ini(is, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config", e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return pt;
}

inline ConfigTree parse_config_string(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

/// Applies `section.key=value` on top of a parsed tree (CLI overrides).
inline void set_override(ConfigTree& pt, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(assignment, "override must look like section.key=value");
  const std::string key = detail::trim(assignment.substr(0, eq));
  if (key.find('.') == std::string::npos) throw ConfigError(key, "override key must be section.key");
  pt.put(key, assignment.substr(eq + 1));
}

/// Resolves a configuration: figure preset (or the plain defaults), then
/// every key present in `pt`. `figure` wins over `sweep.figure` in the file.
inline HarnessConfig resolve_config(const ConfigTree& pt, std::optional<Figure> figure = std::nullopt) {
  HarnessConfig cfg;
  if (!figure) {
    if (auto f = pt.get_optional<std::string>("sweep.figure")) {
      figure = parse_figure(detail::trim(*f));
      if (!figure) throw ConfigError("sweep.figure", "unknown figure id '" + *f + "'");
    }
  }
  if (figure) cfg.spec = make_figure_config(*figure);
  cfg.figure = figure;

  for (const auto& [section, children] : pt) {
    if (children.empty() && !children.data().empty())
      throw ConfigError(section, "setting outside of a [section]");
    for (const auto& [name, node] : children) {
      const std::string key = section + "." + name;
      if (key == "sweep.figure") continue;
      const auto& table = detail::bindings();
      const auto it = std::find_if(table.begin(), table.end(), [&](const auto& b) { return b.key == key; });
      if (it == table.end()) throw ConfigError(key, "unknown setting");
      it->set(cfg, key, node.data());
    }
  }
  return cfg;
}

/// Writes a configuration file that resolves back to `cfg`.
inline void write_config(std::ostream& os, const HarnessConfig& cfg) {
  std::string section;
  for (const auto& b : detail::bindings()) {
    const auto dot = b.key.find('.');
    const std::string sec = b.key.substr(0, dot);
    if (sec != section) {
      os << (section.empty() ? "" : "\n") << "[" << sec << "]\n";
      section = sec;
      if (sec == "sweep" && cfg.figure) os << "figure = " << to_string(*cfg.figure) << "\n";
    }
    os << b.key.substr(dot + 1) << " = " << b.get(cfg) << "\n";
  }
}

}  // namespace mumimo
