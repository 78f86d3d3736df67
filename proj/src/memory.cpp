#include "klocsim/memory.hpp"

#include <algorithm>

namespace klocsim {

void TierConfig::validate() const {
  if (capacity_pages == 0) throw SimError(ErrorCode::kInvalidConfig, "capacity_pages must be > 0");
  if (bandwidth_bytes_per_sec == 0)
    throw SimError(ErrorCode::kInvalidConfig, "bandwidth_bytes_per_sec must be > 0");
}

TierSystem::TierSystem(TierConfig fast, TierConfig slow, MigrationCostModel cost_model,
                       std::uint32_t pin_threshold)
    : fast_(fast), slow_(slow), cost_model_(cost_model), pin_threshold_(pin_threshold) {
  fast_.tier = Tier::kFast;
  slow_.tier = Tier::kSlow;
  fast_.validate();
  slow_.validate();
  if (fast_.bandwidth_bytes_per_sec < slow_.bandwidth_bytes_per_sec)
    throw SimError(ErrorCode::kInvalidConfig, "fast bandwidth below slow bandwidth");
  if (fast_.access_latency_ns > slow_.access_latency_ns)
    throw SimError(ErrorCode::kInvalidConfig, "fast latency above slow latency");
  if (cost_model_.copy_cost_divisor == 0)
    throw SimError(ErrorCode::kInvalidConfig, "copy_cost_divisor must be > 0");
}

std::list<FrameId>& TierSystem::list_for(Tier t, LruList l) {
  return l == LruList::kActive ? active_[idx(t)] : inactive_[idx(t)];
}

void TierSystem::detach_from_lru(PageFrame& f) {
  if (f.lru == LruList::kNone) return;
  list_for(f.tier, f.lru).erase(lru_pos_.at(f.id));
  lru_pos_.erase(f.id);
  f.lru = LruList::kNone;
}

void TierSystem::push_front(PageFrame& f, LruList l) {
  detach_from_lru(f);
  auto& lst = list_for(f.tier, l);
  lst.push_front(f.id);
  lru_pos_[f.id] = lst.begin();
  f.lru = l;
}

void TierSystem::count_alloc(const PageFrame& f) {
  frames_allocated_[static_cast<int>(f.kind)][idx(f.tier)]++;
}

void TierSystem::count_place(const PageFrame& f, int delta) {
  int t = idx(f.tier);
  used_[t] += delta;
  if (f.hosts_kernel_objects()) kernel_[t] += delta;
  peak_used_[t] = std::max(peak_used_[t], used_[t]);
  peak_kernel_[t] = std::max(peak_kernel_[t], kernel_[t]);
}

AllocOutcome TierSystem::allocate_frame(FrameKind kind, Tier preferred, Nanos now) {
  Tier landed = preferred;
  if (free_pages(landed) == 0) {
    landed = other_tier(preferred);
    if (free_pages(landed) == 0)
      throw SimError(ErrorCode::kOutOfMemory, "both tiers full");
  }
  PageFrame f;
  f.id = next_frame_id_++;
  f.tier = landed;
  f.kind = kind;
  f.last_access_ns = now;
  auto [it, ok] = frames_.emplace(f.id, std::move(f));
  (void)ok;
  count_place(it->second, +1);
  count_alloc(it->second);
  push_front(it->second, LruList::kActive);
  return AllocOutcome{it->second.id, landed};
}

void TierSystem::free_frame(FrameId id, Nanos now) {
  (void)now;
  auto it = frames_.find(id);
  if (it == frames_.end()) throw SimError(ErrorCode::kUnknownFrame, "free_frame");
  PageFrame& f = it->second;
  if (!f.resident.empty())
    throw SimError(ErrorCode::kFrameBusy, "frame hosts live objects");
  detach_from_lru(f);
  count_place(f, -1);
  frames_.erase(it);
}

Nanos TierSystem::charge_access(FrameId id, std::uint64_t bytes, bool is_write, Nanos now) {
  (void)is_write;
  auto it = frames_.find(id);
  if (it == frames_.end()) throw SimError(ErrorCode::kUnknownFrame, "charge_access");
  PageFrame& f = it->second;
  const TierConfig& cfg = config(f.tier);
  Nanos cost = cfg.access_latency_ns + transfer_ns(bytes, cfg.bandwidth_bytes_per_sec);
  f.last_access_ns = now;
  push_front(f, LruList::kActive);
  return cost;
}

Nanos TierSystem::migrate_frame(FrameId id, Tier dest, Nanos now) {
  auto it = frames_.find(id);
  if (it == frames_.end()) throw SimError(ErrorCode::kUnknownFrame, "migrate_frame");
  PageFrame& f = it->second;
  if (f.pinned) throw SimError(ErrorCode::kPinned, "frame pinned in fast memory");
  if (f.kind == FrameKind::kSlab)
    throw SimError(ErrorCode::kNonMigratableKind, "slab frames are not migratable");
  if (dest == f.tier) throw SimError(ErrorCode::kDestFull, "migrate to same tier");
  if (free_pages(dest) == 0) throw SimError(ErrorCode::kDestFull, "destination tier full");

  if (observer_) observer_(f, dest);

  std::uint64_t min_bw = std::min(fast_.bandwidth_bytes_per_sec, slow_.bandwidth_bytes_per_sec);
  Nanos cost = transfer_ns(kPageBytes, min_bw) / cost_model_.copy_cost_divisor;
  if (cost == 0) cost = 1;
  // APP, CACHE and VMALLOC frames are mapped, so moving them invalidates TLBs.
  cost += cost_model_.tlb_shootdown_ns;

  detach_from_lru(f);
  count_place(f, -1);
  f.tier = dest;
  count_place(f, +1);
  if (f.migration_count < 255) f.migration_count++;
  if (f.migration_count >= pin_threshold_ && dest == Tier::kFast) f.pinned = true;
  f.last_access_ns = now;
  push_front(f, dest == Tier::kSlow ? LruList::kInactive : LruList::kActive);
  migration_count_++;
  migration_cost_total_ += cost;
  return cost;
}

std::vector<FrameId> TierSystem::demotion_candidates(
    Tier tier, std::size_t n, bool allow_active_lru,
    const std::function<bool(const PageFrame&)>& veto) const {
  std::vector<FrameId> out;
  if (n == 0) return out;
  const std::size_t scan_cap = std::max<std::size_t>(4 * n, 1024);
  auto take_from = [&](const std::list<FrameId>& lst) {
    std::size_t scanned = 0;
    for (auto it = lst.rbegin(); it != lst.rend() && out.size() < n && scanned < scan_cap; ++it) {
      ++scanned;
      const PageFrame& f = frames_.at(*it);
      if (f.pinned || f.kind == FrameKind::kSlab) continue;
      if (veto && veto(f)) continue;
      out.push_back(f.id);
    }
  };
  take_from(inactive_[idx(tier)]);
  if (allow_active_lru && out.size() < n) take_from(active_[idx(tier)]);
  return out;
}

std::size_t TierSystem::age_lists(Tier tier, Nanos now, Nanos idle_threshold_ns) {
  std::size_t moved = 0;
  auto& act = active_[idx(tier)];
  // Oldest entries sit at the tail; stop at the first one still warm.
  while (!act.empty()) {
    PageFrame& f = frames_.at(act.back());
    if (now < f.last_access_ns || now - f.last_access_ns <= idle_threshold_ns) break;
    push_front(f, LruList::kInactive);
    ++moved;
  }
  return moved;
}

PageFrame& TierSystem::frame(FrameId id) {
  auto it = frames_.find(id);
  if (it == frames_.end()) throw SimError(ErrorCode::kUnknownFrame, "frame lookup");
  return it->second;
}

const PageFrame& TierSystem::frame(FrameId id) const {
  auto it = frames_.find(id);
  if (it == frames_.end()) throw SimError(ErrorCode::kUnknownFrame, "frame lookup");
  return it->second;
}

std::size_t TierSystem::lru_size(Tier t, LruList l) const {
  return (l == LruList::kActive ? active_[idx(t)] : inactive_[idx(t)]).size();
}

std::vector<FrameId> TierSystem::lru_snapshot(Tier t, LruList l) const {
  const auto& lst = l == LruList::kActive ? active_[idx(t)] : inactive_[idx(t)];
  return {lst.begin(), lst.end()};
}

}  // namespace klocsim
