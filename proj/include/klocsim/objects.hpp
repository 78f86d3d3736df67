#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "klocsim/kloc_key.hpp"
#include "klocsim/memory.hpp"
#include "klocsim/types.hpp"

namespace klocsim {

enum class ObjectKind : std::uint8_t {
  kInode = 0,
  kDentry,
  kRadixNode,
  kJournalRecord,
  kBlockIo,
  kCachePage,
  kSkbuff,
  kNetQueue,
};
inline constexpr int kObjectKindCount = 8;

const char* object_kind_name(ObjectKind k);
std::optional<ObjectKind> object_kind_from_name(const std::string& name);

// Base sizes in bytes. SKBUFF is the 256-byte header; payload rides on
// dedicated data frames sized per allocation.
struct ObjectSizes {
  std::array<std::uint32_t, kObjectKindCount> bytes = {
      1024,  // inode
      192,   // dentry
      576,   // radix node
      4096,  // journal record
      384,   // block I/O
      4096,  // cache page
      256,   // skbuff header
      8192,  // net queue
  };
  std::uint32_t of(ObjectKind k) const { return bytes[static_cast<int>(k)]; }
};

enum class Grouping : std::uint8_t { kSlab, kVmalloc };

struct KernelObject {
  ObjectId id = 0;
  ObjectKind kind = ObjectKind::kInode;
  std::optional<KlocKey> kloc;
  std::vector<FrameId> frames;
  Nanos alloc_ns = 0;
  std::uint64_t payload_bytes = 0;  // SKBUFF only
};

struct VmallocRegion {
  KlocKey owner;
  std::vector<FrameId> frames;     // virtually contiguous, in allocation order
  std::uint32_t fill_cursor = 0;   // used bytes in the last frame
};

struct ObjectAllocOutcome {
  ObjectId object_id = 0;
  Tier landed_tier = Tier::kFast;
  std::uint64_t new_frames = 0;
  bool fast_miss = false;  // some new frame preferred FAST but landed SLOW
};

struct LifetimeStats {
  std::uint64_t count = 0;
  double mean_ns = 0;
  Nanos p50_ns = 0;
  Nanos p99_ns = 0;
};

// Typed kernel allocations packed into slab frames or per-KLOC vmalloc
// regions, plus the lifetime ledger of freed objects.
class ObjectStore {
 public:
  explicit ObjectStore(TierSystem& tiers, ObjectSizes sizes = {});

  ObjectAllocOutcome alloc_object(ObjectKind kind, std::optional<KlocKey> kloc,
                                  Tier preferred, Nanos now, Grouping grouping,
                                  std::uint64_t payload_bytes = 0);
  void free_object(ObjectId id, Nanos now);

  LifetimeStats lifetime_stats(ObjectKind kind) const;
  LifetimeStats lifetime_stats(const std::vector<ObjectKind>& kinds) const;

  // True iff any object resident on the frame belongs to a KLOC the oracle
  // reports ACTIVE.
  bool is_shared_with_active(FrameId frame,
                             const std::function<bool(const KlocKey&)>& active) const;
  // True iff every object on the frame belongs to `key` (frames with no
  // objects are not exclusive to anyone).
  bool exclusively_owned_by(FrameId frame, const KlocKey& key) const;

  bool is_live(ObjectId id) const { return live_.count(id) != 0; }
  const KernelObject& object(ObjectId id) const;
  KernelObject& object(ObjectId id);
  void clear_kloc(ObjectId id);

  const VmallocRegion* region(const KlocKey& key) const;
  void drop_region_if_empty(const KlocKey& key);

  std::uint64_t live_count() const { return live_.size(); }
  std::uint64_t alloc_count(ObjectKind k, Tier t) const {
    return allocs_[static_cast<int>(k)][static_cast<int>(t)];
  }
  std::uint64_t total_allocs() const;
  std::uint64_t freed_count() const { return freed_total_; }
  const ObjectSizes& sizes() const { return sizes_; }

 private:
  FrameId slab_host(ObjectKind kind, Tier preferred, Nanos now, ObjectAllocOutcome& out);
  FrameId vmalloc_host(const KlocKey& key, std::uint32_t bytes, Tier preferred, Nanos now,
                       ObjectAllocOutcome& out);
  FrameId new_frame(FrameKind fk, Tier preferred, Nanos now, ObjectAllocOutcome& out);
  void release_from_frame(const KernelObject& obj, Nanos now);

  TierSystem& tiers_;
  ObjectSizes sizes_;
  ObjectId next_id_ = 1;
  std::unordered_map<ObjectId, KernelObject> live_;
  // Partially filled slab frames per object kind, in creation order (first fit).
  std::array<std::vector<FrameId>, kObjectKindCount> partial_slabs_;
  std::map<KlocKey, VmallocRegion> regions_;
  std::array<std::vector<Nanos>, kObjectKindCount> lifetimes_;
  std::uint64_t allocs_[kObjectKindCount][2] = {};
  std::uint64_t freed_total_ = 0;
};

}  // namespace klocsim
