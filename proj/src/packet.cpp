#include "floodguard/packet.hpp"

namespace floodguard {
namespace {
// IPv6 (40) + UDP (8) + 802.11 MAC header and FCS (34).
constexpr std::uint32_t kHeaderBytes = 82;
}  // namespace

const char* to_string(PacketKind kind) {
  switch (kind) {
    case PacketKind::Rreq: return "RREQ";
    case PacketKind::Rrep: return "RREP";
    case PacketKind::Hello: return "HELLO";
    case PacketKind::Data: return "DATA";
    case PacketKind::Isolate: return "ISOLATE";
  }
  return "?";
}

std::uint32_t Packet::size_bytes() const {
  switch (kind) {
    case PacketKind::Rreq: return kHeaderBytes + 24;
    case PacketKind::Rrep: return kHeaderBytes + 20;
    case PacketKind::Hello: return kHeaderBytes + 20 + 16;
    case PacketKind::Data: return kHeaderBytes + payload_bytes;
    case PacketKind::Isolate: return kHeaderBytes + 16;
  }
  return kHeaderBytes;
}

std::string Packet::describe() const {
  std::string s = to_string(kind);
  auto field = [&s](const char* name, auto v) {
    s += ' ';
    s += name;
    s += '=';
    s += std::to_string(v);
  };
  field("o", origin);
  field("s", sender);
  switch (kind) {
    case PacketKind::Rreq:
      field("d", dest);
      field("id", rreq_id);
      field("h", hop_count);
      break;
    case PacketKind::Rrep:
      field("d", dest);
      field("h", hop_count);
      break;
    case PacketKind::Hello:
      field("tx", hello_counters.sent);
      field("rx", hello_counters.received);
      break;
    case PacketKind::Data:
      field("d", dest);
      field("p", payload_id);
      field("h", hop_count);
      break;
    case PacketKind::Isolate:
      field("x", suspect);
      break;
  }
  return s;
}

}  // namespace floodguard
