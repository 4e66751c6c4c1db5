#pragma once

#include <cstddef>
#include <cstdint>

namespace mumimo {

/// One downlink packet as it sits in the AP transmit queue.
/// `payload` is the application payload; IP/UDP headers are added at framing time.
struct Packet {
  std::size_t user_id = 0;
  double arrival_time = 0.0;  // seconds
  std::uint32_t payload = 0;  // bytes
};

inline bool operator==(const Packet& a, const Packet& b) {
  return a.user_id == b.user_id && a.arrival_time == b.arrival_time && a.payload == b.payload;
}

}  // namespace mumimo
