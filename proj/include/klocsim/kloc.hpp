#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "klocsim/objects.hpp"

namespace klocsim {

struct KlocMapEntry {
  ObjectKind kind;
  std::vector<FrameId> frames;
};

struct Kloc {
  enum class State : std::uint8_t { kActive, kInactive };

  KlocKey key;
  // Red-black tree keyed by object id; iteration is ordered.
  std::map<ObjectId, KlocMapEntry> object_map;
  State state = State::kInactive;
  std::set<CpuId> active_cpus;
  Nanos last_active_ns = 0;

  bool is_active() const { return state == State::kActive; }
};

struct CpuContext {
  CpuId cpu_id = 0;
  std::optional<KlocKey> current_kloc;
};

// File- and socket-keyed kernel object contexts, their ordered object maps,
// and the per-CPU active-context tracking driven by syscall events.
class KlocRegistry {
 public:
  Kloc& get_or_create(const KlocKey& key, Nanos now);
  Kloc* find(const KlocKey& key);
  const Kloc* find(const KlocKey& key) const;
  bool is_active(const KlocKey& key) const;

  void on_op_begin(CpuId cpu, const KlocKey& key, Nanos now);

  void map_insert(const KlocKey& key, ObjectId id, const ObjectStore& store);
  void map_remove(const KlocKey& key, ObjectId id);

  // Deactivates the KLOC and unmaps its cache-page entries (the objects stay
  // live). Returns the fast-tier frames exclusively owned by the KLOC so the
  // policy engine can demote them.
  std::vector<FrameId> on_close(const KlocKey& key, Nanos now, ObjectStore& store,
                                const TierSystem& tiers);

  // Frees every owned object and removes the KLOC.
  void on_delete(const KlocKey& key, Nanos now, ObjectStore& store);

  // Flips KLOCs with no active CPU and idle past the grace window to INACTIVE.
  std::vector<KlocKey> sweep_idle(Nanos now, Nanos idle_grace_ns);

  // Fast-tier frames exclusively owned by the KLOC right now (map entries plus
  // its vmalloc region). Used for sweep-triggered demotion.
  std::vector<FrameId> exclusive_fast_frames(const KlocKey& key, const ObjectStore& store,
                                             const TierSystem& tiers) const;

  const CpuContext& cpu(CpuId id) const;
  std::size_t kloc_count() const { return klocs_.size(); }
  const std::map<KlocKey, Kloc>& all() const { return klocs_; }

 private:
  void detach_cpu(CpuId cpu, Nanos now);

  std::map<KlocKey, Kloc> klocs_;
  std::vector<CpuContext> cpus_;
};

}  // namespace klocsim
