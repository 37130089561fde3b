#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>

#include "aqt/errors.hpp"
#include "aqt/network.hpp"

namespace aqt {

using PacketId = std::uint64_t;

struct Packet {
  PacketId id = 0;
  Step injected_at = 0;
  PacketPath path;
  std::size_t hops_done = 0;
  Step arrived_in_queue_at = 0;
  std::optional<Step> delivered_at;

  std::size_t hops_remaining() const { return path.length() - hops_done; }
  bool delivered() const { return delivered_at.has_value(); }
  // Edge the packet is waiting to cross; undefined once delivered.
  EdgeIndex current_edge() const { return path[hops_done]; }
};

// Greedy per-queue disciplines. Each is a total order over waiting packets,
// ties broken by the smaller packet id.
enum class Discipline { FIFO, LIFO, LIS, SIS, NTS, FFS, NTG, FTG };

inline constexpr std::array<Discipline, 8> kAllDisciplines{
    Discipline::FIFO, Discipline::LIFO, Discipline::LIS, Discipline::SIS,
    Discipline::NTS,  Discipline::FFS,  Discipline::NTG, Discipline::FTG};

inline std::string_view to_string(Discipline d) {
  switch (d) {
    case Discipline::FIFO: return "FIFO";
    case Discipline::LIFO: return "LIFO";
    case Discipline::LIS: return "LIS";
    case Discipline::SIS: return "SIS";
    case Discipline::NTS: return "NTS";
    case Discipline::FFS: return "FFS";
    case Discipline::NTG: return "NTG";
    case Discipline::FTG: return "FTG";
  }
  return "?";
}

inline Discipline parse_discipline(std::string_view name) {
  for (const auto d : kAllDisciplines)
    if (to_string(d) == name) return d;
  throw ValidationError("unknown discipline '" + std::string(name) +
                        "' (expected FIFO, LIFO, LIS, SIS, NTS, FFS, NTG or FTG)");
}

// Priority key; the packet with the smallest (key, id) wins.
inline std::int64_t priority_key(Discipline d, const Packet& p) {
  const auto done = static_cast<std::int64_t>(p.hops_done);
  const auto left = static_cast<std::int64_t>(p.hops_remaining());
  switch (d) {
    case Discipline::FIFO: return p.arrived_in_queue_at;
    case Discipline::LIFO: return -p.arrived_in_queue_at;
    case Discipline::LIS: return p.injected_at;
    case Discipline::SIS: return -p.injected_at;
    case Discipline::NTS: return done;
    case Discipline::FFS: return -done;
    case Discipline::NTG: return left;
    case Discipline::FTG: return -left;
  }
  return 0;
}

// Keys of non-forward-looking disciplines depend only on the packet's past.
inline bool is_non_forward_looking(Discipline d) {
  return d != Discipline::NTG && d != Discipline::FTG;
}

// Index into `queue` of the packet the discipline forwards next.
inline std::size_t select(Discipline d, std::span<const Packet* const> queue) {
  if (queue.empty()) throw ValidationError("select: empty queue");
  std::size_t best = 0;
  auto rank = [d](const Packet* p) { return std::tuple{priority_key(d, *p), p->id}; };
  for (std::size_t k = 1; k < queue.size(); ++k)
    if (rank(queue[k]) < rank(queue[best])) best = k;
  return best;
}

inline const Packet& select(Discipline d, std::span<const Packet> queue) {
  if (queue.empty()) throw ValidationError("select: empty queue");
  const Packet* best = &queue.front();
  for (const auto& p : queue)
    if (std::tuple{priority_key(d, p), p.id} < std::tuple{priority_key(d, *best), best->id}) best = &p;
  return *best;
}

}  // namespace aqt
