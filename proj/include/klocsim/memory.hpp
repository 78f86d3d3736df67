#pragma once

#include <functional>
#include <list>
#include <optional>
#include <unordered_map>
#include <vector>

#include "klocsim/kloc_key.hpp"
#include "klocsim/types.hpp"

namespace klocsim {

struct TierConfig {
  Tier tier = Tier::kFast;
  std::uint64_t capacity_pages = 0;
  Nanos access_latency_ns = 0;
  std::uint64_t bandwidth_bytes_per_sec = 0;

  void validate() const;
};

struct MigrationCostModel {
  Nanos tlb_shootdown_ns = 4000;
  // Concurrent-migration stand-in: page-copy time is divided by this.
  std::uint32_t copy_cost_divisor = 1;
};

struct PageFrame {
  FrameId id = 0;
  Tier tier = Tier::kFast;
  FrameKind kind = FrameKind::kApp;
  std::optional<KlocKey> owner_kloc;        // CACHE and VMALLOC frames only
  std::vector<ObjectId> resident;           // SLAB/VMALLOC may host many, CACHE/APP at most one
  std::uint32_t used_bytes = 0;
  Nanos last_access_ns = 0;
  std::uint8_t migration_count = 0;  // saturates at 255
  bool pinned = false;
  LruList lru = LruList::kNone;

  bool hosts_kernel_objects() const { return kind != FrameKind::kApp; }
};

struct AllocOutcome {
  FrameId frame_id = 0;
  Tier landed_tier = Tier::kFast;
};

// Two memory tiers with capacity/latency/bandwidth, page frames, per-tier
// ACTIVE/INACTIVE LRU lists and the access/migration cost accounting.
class TierSystem {
 public:
  using MigrationObserver = std::function<void(const PageFrame&, Tier dest)>;

  TierSystem(TierConfig fast, TierConfig slow, MigrationCostModel cost_model,
             std::uint32_t pin_threshold);

  AllocOutcome allocate_frame(FrameKind kind, Tier preferred, Nanos now);
  void free_frame(FrameId id, Nanos now);
  Nanos charge_access(FrameId id, std::uint64_t bytes, bool is_write, Nanos now);
  Nanos migrate_frame(FrameId id, Tier dest, Nanos now);

  // Up to n unpinned, non-SLAB frames from the tier's INACTIVE tail, then the
  // ACTIVE tail when allowed. `veto` may reject frames (e.g. shared with an
  // active KLOC). Scans a bounded number of entries per list so a clump of
  // pinned or vetoed frames at the tail cannot turn every call into a full walk.
  std::vector<FrameId> demotion_candidates(
      Tier tier, std::size_t n, bool allow_active_lru,
      const std::function<bool(const PageFrame&)>& veto = {}) const;

  // Moves ACTIVE frames idle longer than `idle_threshold_ns` to the INACTIVE list.
  std::size_t age_lists(Tier tier, Nanos now, Nanos idle_threshold_ns);

  PageFrame& frame(FrameId id);
  const PageFrame& frame(FrameId id) const;
  bool has_frame(FrameId id) const { return frames_.count(id) != 0; }

  const TierConfig& config(Tier t) const { return t == Tier::kFast ? fast_ : slow_; }
  std::uint64_t used_pages(Tier t) const { return used_[idx(t)]; }
  std::uint64_t free_pages(Tier t) const { return config(t).capacity_pages - used_[idx(t)]; }
  std::uint64_t kernel_pages(Tier t) const { return kernel_[idx(t)]; }
  std::uint64_t peak_used_pages(Tier t) const { return peak_used_[idx(t)]; }
  std::uint64_t peak_kernel_pages(Tier t) const { return peak_kernel_[idx(t)]; }
  std::size_t live_frame_count() const { return frames_.size(); }
  std::uint64_t frames_allocated(FrameKind kind, Tier t) const {
    return frames_allocated_[static_cast<int>(kind)][idx(t)];
  }

  std::size_t lru_size(Tier t, LruList l) const;
  // Frames in list order, head (most recent) first. Test and debugging aid.
  std::vector<FrameId> lru_snapshot(Tier t, LruList l) const;

  std::uint32_t pin_threshold() const { return pin_threshold_; }
  const MigrationCostModel& cost_model() const { return cost_model_; }
  void set_migration_observer(MigrationObserver obs) { observer_ = std::move(obs); }
  std::uint64_t migration_count() const { return migration_count_; }
  Nanos migration_cost_total() const { return migration_cost_total_; }

 private:
  static int idx(Tier t) { return static_cast<int>(t); }
  std::list<FrameId>& list_for(Tier t, LruList l);
  void detach_from_lru(PageFrame& f);
  void push_front(PageFrame& f, LruList l);
  void count_alloc(const PageFrame& f);
  void count_place(const PageFrame& f, int delta);

  TierConfig fast_;
  TierConfig slow_;
  MigrationCostModel cost_model_;
  std::uint32_t pin_threshold_;

  std::unordered_map<FrameId, PageFrame> frames_;
  std::unordered_map<FrameId, std::list<FrameId>::iterator> lru_pos_;
  std::list<FrameId> active_[2];
  std::list<FrameId> inactive_[2];
  std::uint64_t used_[2] = {0, 0};
  std::uint64_t kernel_[2] = {0, 0};
  std::uint64_t peak_used_[2] = {0, 0};
  std::uint64_t peak_kernel_[2] = {0, 0};
  std::uint64_t frames_allocated_[4][2] = {};
  FrameId next_frame_id_ = 1;
  std::uint64_t migration_count_ = 0;
  Nanos migration_cost_total_ = 0;
  MigrationObserver observer_;
};

}  // namespace klocsim
