#pragma once

#include <cstdint>
#include <string>

#include "floodguard/model.hpp"

namespace floodguard {

enum class PacketKind : std::uint8_t { Rreq, Rrep, Hello, Data, Isolate };

const char* to_string(PacketKind kind);

/// Cumulative RREQ counters a node advertises in its Hello beacons.
struct RreqCounters {
  std::uint64_t sent = 0;
  std::uint64_t received = 0;

  bool operator==(const RreqCounters&) const = default;
};

/// One frame on the air. Fields not meaningful for `kind` stay zero.
///
/// RREQ:    origin floods a request for `dest`; `rreq_id` is per-origin and
///          strictly increasing, `seq` is the origin's sequence number and
///          `dest_seq` the freshest destination sequence number it knows.
/// RREP:    `dest` is the discovered destination, `origin` the requester the
///          reply travels back to, `seq` the destination sequence number.
/// HELLO:   one-hop beacon carrying `hello_counters`.
/// DATA:    CBR payload from `origin` to `dest`; `created` is the send time.
/// ISOLATE: one-hop notice that `suspect` is detained until `expiry`.
struct Packet {
  PacketKind kind = PacketKind::Data;
  NodeId origin = 0;
  NodeId sender = 0;  // last hop
  NodeId dest = 0;
  std::uint32_t seq = 0;
  std::uint32_t dest_seq = 0;
  std::uint32_t rreq_id = 0;
  std::uint32_t hop_count = 0;
  std::uint64_t payload_id = 0;
  std::uint32_t payload_bytes = 0;
  SimTime created = 0.0;
  RreqCounters hello_counters;
  NodeId suspect = 0;
  SimTime expiry = 0.0;

  /// Bytes on the air including IPv6/UDP/MAC headers.
  std::uint32_t size_bytes() const;
  std::string describe() const;
};

}  // namespace floodguard
