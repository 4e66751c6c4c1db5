#pragma once

// Fixed per-cycle cost of a MU-MIMO downlink transmission.
//
// Timeline of one cycle for a group of n users:
//
//   NDPA  SIFS  NDP  SIFS  FB_1  [SIFS  POLL  SIFS  FB_k] x (n-1)  PHY(data)  ...data...  [SIFS  BA] x n
//
// Every control and feedback frame carries a PHY header and is sent at the
// control rate. Data airtime itself is not part of the overhead.

#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "mumimo/errors.hpp"
#include "mumimo/framing.hpp"

namespace mumimo {

struct SoundingConfig {
  double bandwidth_mhz = 20.0;
  std::uint32_t grouping = 4;              // Ng
  std::uint32_t psi_bits = 5;
  std::uint32_t phi_bits = 7;
  std::uint32_t n_tx = 4;
  std::uint32_t n_rx_per_user = 1;
  std::uint32_t feedback_subcarriers = 16;  // Ns for 20 MHz, Ng = 4
  std::uint32_t snr_bits = 8;              // average SNR field per stream
  std::uint32_t feedback_mac_overhead = 28;  // bytes around the feedback report
  double sifs = 16e-6;
  std::uint32_t ndpa_bytes = 25;
  double ndp_duration = 44e-6;
  std::uint32_t poll_bytes = 21;
  std::uint32_t ba_bytes = 32;
  double control_rate = 24e6;
  bool include_ba = true;
  std::uint32_t sounding_every_n_cycles = 1;

  void validate() const {
    if (!(psi_bits < phi_bits)) throw ConfigError("sounding.psi_bits", "must be smaller than sounding.phi_bits");
    if (feedback_subcarriers == 0) throw ConfigError("sounding.feedback_subcarriers", "must be at least 1");
    if (grouping == 0) throw ConfigError("sounding.grouping", "must be positive");
    if (!(bandwidth_mhz > 0.0)) throw ConfigError("sounding.bandwidth_mhz", "must be positive");
    if (!(sifs > 0.0)) throw ConfigError("sounding.sifs_us", "must be positive");
    if (!(ndp_duration > 0.0)) throw ConfigError("sounding.ndp_duration_us", "must be positive");
    if (ndpa_bytes == 0) throw ConfigError("sounding.ndpa_bytes", "must be positive");
    if (poll_bytes == 0) throw ConfigError("sounding.poll_bytes", "must be positive");
    if (ba_bytes == 0) throw ConfigError("sounding.ba_bytes", "must be positive");
    if (!(control_rate > 0.0)) throw ConfigError("sounding.control_rate_mbps", "must be positive");
    if (sounding_every_n_cycles == 0) throw ConfigError("sounding.sounding_every_n_cycles", "must be at least 1");
    if (n_tx < 2 || n_tx > 8) throw ConfigError("sounding.n_tx", "must be in [2, 8]");
    if (n_rx_per_user == 0 || n_rx_per_user > n_tx)
      throw ConfigError("sounding.n_rx_per_user", "must be in [1, n_tx]");
  }
};

// Number of phi angles (equal to the number of psi angles) in a compressed
// beamforming report for an n_tx x n_cols steering matrix: sum over the first
// min(n_cols, n_tx - 1) columns of (n_tx - column).
inline std::uint32_t givens_angle_pairs(std::uint32_t n_tx, std::uint32_t n_cols) {
  if (n_tx < 2 || n_tx > 8 || n_cols == 0 || n_cols > n_tx)
    throw std::invalid_argument("unsupported antenna geometry for compressed feedback");
  std::uint32_t pairs = 0;
  for (std::uint32_t i = 1; i <= n_cols && i < n_tx; ++i) pairs += n_tx - i;
  return pairs;
}

inline std::uint64_t feedback_bits_per_user(const SoundingConfig& cfg) {
  const std::uint64_t pairs = givens_angle_pairs(cfg.n_tx, cfg.n_rx_per_user);
  const std::uint64_t per_subcarrier = pairs * cfg.phi_bits + pairs * cfg.psi_bits;
  return std::uint64_t{cfg.feedback_subcarriers} * per_subcarrier + std::uint64_t{cfg.snr_bits} * cfg.n_rx_per_user;
}

// Airtime of a control-rate frame of `bits` bits, PHY header included.
inline double control_frame_airtime(const SoundingConfig& cfg, double bits, double phy_header) {
  return phy_header + bits / cfg.control_rate;
}

/// Per-component cycle overhead, in seconds.
struct OverheadBreakdown {
  double ndpa = 0.0;
  double ndp = 0.0;
  double feedback = 0.0;  // all users' feedback frames
  double polls = 0.0;     // n - 1 report polls
  double sounding_sifs = 0.0;  // SIFS gaps inside the sounding exchange
  double sifs = 0.0;           // every SIFS gap, sounding and BA legs
  double data_phy_header = 0.0;
  double block_acks = 0.0;

  double sounding() const { return ndpa + ndp + feedback + polls + sounding_sifs; }
  double total() const { return ndpa + ndp + feedback + polls + sifs + data_phy_header + block_acks; }
};

inline OverheadBreakdown overhead_breakdown(const SoundingConfig& cfg, std::size_t n_users,
                                            double phy_header = FramingConstants{}.phy_header,
                                            bool with_sounding = true) {
  if (n_users == 0) throw std::invalid_argument("overhead: n_users must be at least 1");
  const double n = static_cast<double>(n_users);
  OverheadBreakdown b;
  if (with_sounding) {
    const double fb_bits = static_cast<double>(cfg.feedback_mac_overhead) * 8.0 +
                           static_cast<double>(feedback_bits_per_user(cfg));
    b.ndpa = control_frame_airtime(cfg, cfg.ndpa_bytes * 8.0, phy_header);
    b.ndp = cfg.ndp_duration;
    b.feedback = n * control_frame_airtime(cfg, fb_bits, phy_header);
    b.polls = (n - 1.0) * control_frame_airtime(cfg, cfg.poll_bytes * 8.0, phy_header);
    // NDPA-NDP, NDP-FB1, then a poll leg (SIFS POLL SIFS FB) per extra user.
    b.sounding_sifs = (2.0 + 2.0 * (n - 1.0)) * cfg.sifs;
  }
  b.data_phy_header = phy_header;
  double ba_sifs = 0.0;
  if (cfg.include_ba) {
    b.block_acks = n * control_frame_airtime(cfg, cfg.ba_bytes * 8.0, phy_header);
    ba_sifs = n * cfg.sifs;
  }
  b.sifs = b.sounding_sifs + ba_sifs;
  return b;
}

inline double sounding_duration(const SoundingConfig& cfg, std::size_t n_users,
                                 double phy_header = FramingConstants{}.phy_header) {
  return overhead_breakdown(cfg, n_users, phy_header).sounding();
}

inline double cycle_overhead(const SoundingConfig& cfg, std::size_t n_users,
                             double phy_header = FramingConstants{}.phy_header) {
  return overhead_breakdown(cfg, n_users, phy_header).total();
}

}  // namespace mumimo
