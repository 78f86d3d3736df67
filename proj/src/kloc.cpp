#include "klocsim/kloc.hpp"

#include <algorithm>

namespace klocsim {

Kloc& KlocRegistry::get_or_create(const KlocKey& key, Nanos now) {
  auto [it, created] = klocs_.try_emplace(key);
  if (created) {
    it->second.key = key;
    it->second.last_active_ns = now;
  }
  return it->second;
}

Kloc* KlocRegistry::find(const KlocKey& key) {
  auto it = klocs_.find(key);
  return it == klocs_.end() ? nullptr : &it->second;
}

const Kloc* KlocRegistry::find(const KlocKey& key) const {
  auto it = klocs_.find(key);
  return it == klocs_.end() ? nullptr : &it->second;
}

bool KlocRegistry::is_active(const KlocKey& key) const {
  const Kloc* k = find(key);
  return k && k->is_active();
}

void KlocRegistry::detach_cpu(CpuId cpu, Nanos now) {
  CpuContext& ctx = cpus_[cpu];
  if (!ctx.current_kloc) return;
  if (Kloc* prev = find(*ctx.current_kloc)) {
    prev->active_cpus.erase(cpu);
    // Stays ACTIVE through the idle grace window; sweep_idle retires it.
    if (prev->active_cpus.empty()) prev->last_active_ns = now;
  }
  ctx.current_kloc.reset();
}

void KlocRegistry::on_op_begin(CpuId cpu, const KlocKey& key, Nanos now) {
  if (cpus_.size() <= cpu) cpus_.resize(cpu + 1);
  cpus_[cpu].cpu_id = cpu;
  if (cpus_[cpu].current_kloc != key) detach_cpu(cpu, now);
  Kloc& k = get_or_create(key, now);
  k.active_cpus.insert(cpu);
  k.state = Kloc::State::kActive;
  k.last_active_ns = now;
  cpus_[cpu].current_kloc = key;
}

void KlocRegistry::map_insert(const KlocKey& key, ObjectId id, const ObjectStore& store) {
  Kloc* k = find(key);
  if (!k) throw SimError(ErrorCode::kUnknownKloc, "map_insert " + key.str());
  const KernelObject& obj = store.object(id);
  auto [it, ok] = k->object_map.try_emplace(id, KlocMapEntry{obj.kind, obj.frames});
  if (!ok) throw SimError(ErrorCode::kDuplicateInsert, "object already mapped");
}

void KlocRegistry::map_remove(const KlocKey& key, ObjectId id) {
  Kloc* k = find(key);
  if (!k) throw SimError(ErrorCode::kUnknownKloc, "map_remove " + key.str());
  k->object_map.erase(id);
}

std::vector<FrameId> KlocRegistry::on_close(const KlocKey& key, Nanos now, ObjectStore& store,
                                            const TierSystem& tiers) {
  Kloc* k = find(key);
  if (!k) throw SimError(ErrorCode::kUnknownKloc, "on_close " + key.str());

  std::vector<FrameId> candidates = exclusive_fast_frames(key, store, tiers);

  for (CpuId cpu : std::vector<CpuId>(k->active_cpus.begin(), k->active_cpus.end())) {
    if (cpu < cpus_.size() && cpus_[cpu].current_kloc == key)
      cpus_[cpu].current_kloc.reset();
  }
  k->active_cpus.clear();
  k->state = Kloc::State::kInactive;
  k->last_active_ns = now;

  // Cache entries leave the map on close; the pages themselves stay resident
  // until eviction or delete.
  for (auto it = k->object_map.begin(); it != k->object_map.end();) {
    if (it->second.kind == ObjectKind::kCachePage) {
      store.clear_kloc(it->first);
      it = k->object_map.erase(it);
    } else {
      ++it;
    }
  }
  return candidates;
}

void KlocRegistry::on_delete(const KlocKey& key, Nanos now, ObjectStore& store) {
  Kloc* k = find(key);
  if (!k) throw SimError(ErrorCode::kUnknownKloc, "on_delete " + key.str());
  for (CpuId cpu : k->active_cpus) {
    if (cpu < cpus_.size() && cpus_[cpu].current_kloc == key)
      cpus_[cpu].current_kloc.reset();
  }
  for (auto& [oid, entry] : k->object_map) store.free_object(oid, now);
  k->object_map.clear();
  klocs_.erase(key);
  store.drop_region_if_empty(key);
}

std::vector<KlocKey> KlocRegistry::sweep_idle(Nanos now, Nanos idle_grace_ns) {
  std::vector<KlocKey> flipped;
  for (auto& [key, k] : klocs_) {
    if (k.is_active() && k.active_cpus.empty() && now > k.last_active_ns &&
        now - k.last_active_ns > idle_grace_ns) {
      k.state = Kloc::State::kInactive;
      flipped.push_back(key);
    }
  }
  return flipped;
}

std::vector<FrameId> KlocRegistry::exclusive_fast_frames(const KlocKey& key,
                                                         const ObjectStore& store,
                                                         const TierSystem& tiers) const {
  const Kloc* k = find(key);
  if (!k) return {};
  std::vector<FrameId> out;
  std::set<FrameId> seen;
  auto consider = [&](FrameId fid) {
    if (!tiers.has_frame(fid) || !seen.insert(fid).second) return;
    const PageFrame& f = tiers.frame(fid);
    if (f.tier != Tier::kFast) return;
    if (store.exclusively_owned_by(fid, key)) out.push_back(fid);
  };
  for (const auto& [oid, entry] : k->object_map)
    for (FrameId fid : entry.frames) consider(fid);
  if (const VmallocRegion* r = store.region(key))
    for (FrameId fid : r->frames) consider(fid);
  return out;
}

const CpuContext& KlocRegistry::cpu(CpuId id) const {
  static const CpuContext kEmpty{};
  return id < cpus_.size() ? cpus_[id] : kEmpty;
}

}  // namespace klocsim
