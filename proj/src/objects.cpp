#include "klocsim/objects.hpp"

#include <algorithm>
#include <cmath>

namespace klocsim {

namespace {

const char* kKindNames[kObjectKindCount] = {
    "inode", "dentry", "radix_node", "journal_record",
    "block_io", "cache_page", "skbuff", "net_queue",
};

}  // namespace

const char* object_kind_name(ObjectKind k) { return kKindNames[static_cast<int>(k)]; }

std::optional<ObjectKind> object_kind_from_name(const std::string& name) {
  for (int i = 0; i < kObjectKindCount; ++i)
    if (name == kKindNames[i]) return static_cast<ObjectKind>(i);
  return std::nullopt;
}

ObjectStore::ObjectStore(TierSystem& tiers, ObjectSizes sizes)
    : tiers_(tiers), sizes_(sizes) {}

FrameId ObjectStore::new_frame(FrameKind fk, Tier preferred, Nanos now,
                               ObjectAllocOutcome& out) {
  AllocOutcome a = tiers_.allocate_frame(fk, preferred, now);
  if (out.new_frames == 0) out.landed_tier = a.landed_tier;
  out.new_frames++;
  if (preferred == Tier::kFast && a.landed_tier == Tier::kSlow) out.fast_miss = true;
  return a.frame_id;
}

FrameId ObjectStore::slab_host(ObjectKind kind, Tier preferred, Nanos now,
                               ObjectAllocOutcome& out) {
  const std::uint32_t size = sizes_.of(kind);
  auto& partials = partial_slabs_[static_cast<int>(kind)];
  // First fit among partial slabs of this kind, preferred tier first.
  for (int pass = 0; pass < 2; ++pass) {
    Tier want = pass == 0 ? preferred : other_tier(preferred);
    for (FrameId fid : partials) {
      const PageFrame& f = tiers_.frame(fid);
      if (f.tier == want && f.used_bytes + size <= kPageBytes) {
        if (out.new_frames == 0) out.landed_tier = f.tier;
        return fid;
      }
    }
  }
  FrameId fid = new_frame(FrameKind::kSlab, preferred, now, out);
  partials.push_back(fid);
  return fid;
}

FrameId ObjectStore::vmalloc_host(const KlocKey& key, std::uint32_t bytes, Tier preferred,
                                  Nanos now, ObjectAllocOutcome& out) {
  auto [it, created] = regions_.try_emplace(key, VmallocRegion{key, {}, 0});
  VmallocRegion& r = it->second;
  if (r.frames.empty() || r.fill_cursor + bytes > kPageBytes) {
    FrameId fid = new_frame(FrameKind::kVmalloc, preferred, now, out);
    tiers_.frame(fid).owner_kloc = key;
    r.frames.push_back(fid);
    r.fill_cursor = 0;
  } else if (out.new_frames == 0) {
    out.landed_tier = tiers_.frame(r.frames.back()).tier;
  }
  r.fill_cursor += bytes;
  return r.frames.back();
}

ObjectAllocOutcome ObjectStore::alloc_object(ObjectKind kind, std::optional<KlocKey> kloc,
                                             Tier preferred, Nanos now, Grouping grouping,
                                             std::uint64_t payload_bytes) {
  if (grouping == Grouping::kVmalloc && !kloc)
    throw SimError(ErrorCode::kInvalidConfig, "vmalloc grouping requires a kloc");

  ObjectAllocOutcome out;
  KernelObject obj;
  obj.id = next_id_++;
  obj.kind = kind;
  obj.kloc = kloc;
  obj.alloc_ns = now;
  obj.payload_bytes = payload_bytes;

  const std::uint32_t size = sizes_.of(kind);
  auto attach = [&](FrameId fid, std::uint32_t bytes) {
    PageFrame& f = tiers_.frame(fid);
    f.resident.push_back(obj.id);
    f.used_bytes += bytes;
    obj.frames.push_back(fid);
  };

  if (kind == ObjectKind::kCachePage) {
    FrameId fid = new_frame(FrameKind::kCache, preferred, now, out);
    tiers_.frame(fid).owner_kloc = kloc;
    attach(fid, kPageBytes);
  } else if (size >= kPageBytes) {
    // Full-page objects take dedicated frames of the grouping's kind.
    std::uint64_t n = (size + kPageBytes - 1) / kPageBytes;
    for (std::uint64_t i = 0; i < n; ++i) {
      FrameId fid = grouping == Grouping::kVmalloc
                        ? vmalloc_host(*kloc, kPageBytes, preferred, now, out)
                        : new_frame(FrameKind::kSlab, preferred, now, out);
      attach(fid, kPageBytes);
    }
  } else {
    FrameId host = grouping == Grouping::kVmalloc
                       ? vmalloc_host(*kloc, size, preferred, now, out)
                       : slab_host(kind, preferred, now, out);
    attach(host, size);
    if (grouping == Grouping::kSlab && tiers_.frame(host).used_bytes + size > kPageBytes) {
      auto& partials = partial_slabs_[static_cast<int>(kind)];
      partials.erase(std::remove(partials.begin(), partials.end(), host), partials.end());
    }
  }

  // SKBUFF payload rides on dedicated data frames next to the packed header.
  if (payload_bytes > 0) {
    std::uint64_t n = (payload_bytes + kPageBytes - 1) / kPageBytes;
    for (std::uint64_t i = 0; i < n; ++i) {
      FrameId fid = grouping == Grouping::kVmalloc
                        ? vmalloc_host(*kloc, kPageBytes, preferred, now, out)
                        : new_frame(FrameKind::kSlab, preferred, now, out);
      attach(fid, kPageBytes);
    }
  }

  allocs_[static_cast<int>(kind)][static_cast<int>(out.landed_tier)]++;
  out.object_id = obj.id;
  live_.emplace(obj.id, std::move(obj));
  return out;
}

void ObjectStore::release_from_frame(const KernelObject& obj, Nanos now) {
  const std::uint32_t size = sizes_.of(obj.kind);
  bool sub_page = size < kPageBytes && obj.kind != ObjectKind::kCachePage;
  for (std::size_t i = 0; i < obj.frames.size(); ++i) {
    FrameId fid = obj.frames[i];
    PageFrame& f = tiers_.frame(fid);
    f.resident.erase(std::remove(f.resident.begin(), f.resident.end(), obj.id),
                     f.resident.end());
    std::uint32_t bytes = (sub_page && i == 0) ? size : static_cast<std::uint32_t>(kPageBytes);
    f.used_bytes -= bytes;

    if (f.kind == FrameKind::kSlab && sub_page && i == 0) {
      auto& partials = partial_slabs_[static_cast<int>(obj.kind)];
      if (!f.resident.empty() &&
          std::find(partials.begin(), partials.end(), fid) == partials.end())
        partials.push_back(fid);
      if (f.resident.empty())
        partials.erase(std::remove(partials.begin(), partials.end(), fid), partials.end());
    }

    if (f.resident.empty()) {
      if (f.kind == FrameKind::kVmalloc && obj.kloc) {
        auto rit = regions_.find(*obj.kloc);
        if (rit != regions_.end()) {
          auto& frames = rit->second.frames;
          bool was_last = !frames.empty() && frames.back() == fid;
          frames.erase(std::remove(frames.begin(), frames.end(), fid), frames.end());
          // Older frames never accept appends again; close the cursor.
          if (was_last) rit->second.fill_cursor = frames.empty() ? 0 : kPageBytes;
        }
      }
      tiers_.free_frame(fid, now);
    }
  }
}

void ObjectStore::free_object(ObjectId id, Nanos now) {
  auto it = live_.find(id);
  if (it == live_.end()) {
    if (id != 0 && id < next_id_) throw SimError(ErrorCode::kDoubleFree, "object already freed");
    throw SimError(ErrorCode::kUnknownObject, "free_object");
  }
  KernelObject obj = std::move(it->second);
  live_.erase(it);
  release_from_frame(obj, now);
  lifetimes_[static_cast<int>(obj.kind)].push_back(now - obj.alloc_ns);
  freed_total_++;
}

LifetimeStats ObjectStore::lifetime_stats(ObjectKind kind) const {
  return lifetime_stats(std::vector<ObjectKind>{kind});
}

LifetimeStats ObjectStore::lifetime_stats(const std::vector<ObjectKind>& kinds) const {
  std::vector<Nanos> all;
  for (ObjectKind k : kinds) {
    const auto& v = lifetimes_[static_cast<int>(k)];
    all.insert(all.end(), v.begin(), v.end());
  }
  LifetimeStats s;
  s.count = all.size();
  if (all.empty()) return s;
  std::sort(all.begin(), all.end());
  long double sum = 0;
  for (Nanos x : all) sum += x;
  s.mean_ns = static_cast<double>(sum / all.size());
  auto rank = [&](double q) {
    std::size_t i = static_cast<std::size_t>(std::ceil(q * all.size()));
    return all[i == 0 ? 0 : i - 1];
  };
  s.p50_ns = rank(0.50);
  s.p99_ns = rank(0.99);
  return s;
}

bool ObjectStore::is_shared_with_active(
    FrameId frame, const std::function<bool(const KlocKey&)>& active) const {
  const PageFrame& f = tiers_.frame(frame);
  for (ObjectId oid : f.resident) {
    const KernelObject& obj = live_.at(oid);
    if (obj.kloc && active(*obj.kloc)) return true;
  }
  return false;
}

bool ObjectStore::exclusively_owned_by(FrameId frame, const KlocKey& key) const {
  const PageFrame& f = tiers_.frame(frame);
  if (f.resident.empty()) return false;
  for (ObjectId oid : f.resident) {
    const KernelObject& obj = live_.at(oid);
    if (!obj.kloc || *obj.kloc != key) return false;
  }
  return true;
}

const KernelObject& ObjectStore::object(ObjectId id) const {
  auto it = live_.find(id);
  if (it == live_.end()) throw SimError(ErrorCode::kUnknownObject, "object lookup");
  return it->second;
}

KernelObject& ObjectStore::object(ObjectId id) {
  auto it = live_.find(id);
  if (it == live_.end()) throw SimError(ErrorCode::kUnknownObject, "object lookup");
  return it->second;
}

void ObjectStore::clear_kloc(ObjectId id) { object(id).kloc.reset(); }

const VmallocRegion* ObjectStore::region(const KlocKey& key) const {
  auto it = regions_.find(key);
  return it == regions_.end() ? nullptr : &it->second;
}

void ObjectStore::drop_region_if_empty(const KlocKey& key) {
  auto it = regions_.find(key);
  if (it != regions_.end() && it->second.frames.empty()) regions_.erase(it);
}

std::uint64_t ObjectStore::total_allocs() const {
  std::uint64_t n = 0;
  for (int k = 0; k < kObjectKindCount; ++k) n += allocs_[k][0] + allocs_[k][1];
  return n;
}

}  // namespace klocsim
