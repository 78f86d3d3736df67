#include "klocsim/policy.hpp"

#include <algorithm>
#include <cctype>

namespace klocsim {

namespace {

const char* kPolicyNames[kPolicyCount] = {
    "all-slow",        "all-fast",        "naive",
    "nimble",          "migration-only",  "kloc-nomigrate",
    "kloc-migrate-fs", "kloc-migrate-fs-nw", "kloc-migrate-fs-nw-prefetch",
};

}  // namespace

const char* policy_name(PolicyKind p) { return kPolicyNames[static_cast<int>(p)]; }

std::optional<PolicyKind> policy_from_name(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (int i = 0; i < kPolicyCount; ++i)
    if (lower == kPolicyNames[i]) return static_cast<PolicyKind>(i);
  return std::nullopt;
}

Tier decide_tier(PolicyKind policy, const AllocRequest& req) {
  switch (policy) {
    case PolicyKind::kAllSlow:
      return Tier::kSlow;
    case PolicyKind::kAllFast:
      return Tier::kFast;
    case PolicyKind::kNaive:
    case PolicyKind::kNimble:
    case PolicyKind::kMigrationOnly:
      return Tier::kFast;
    case PolicyKind::kKlocNoMigrate:
    case PolicyKind::kKlocMigrateFs:
    case PolicyKind::kKlocMigrateFsNw:
    case PolicyKind::kKlocMigrateFsNwPrefetch:
      break;
  }
  // KLOC placement: application pages stay fast-first; kernel objects follow
  // their context's activity; speculative readahead pages are fast only under
  // the prefetch variant.
  if (req.is_app_page()) return Tier::kFast;
  if (req.is_prefetch)
    return policy == PolicyKind::kKlocMigrateFsNwPrefetch ? Tier::kFast : Tier::kSlow;
  if (req.is_network_kind() && !kloc_groups_sockets(policy)) return Tier::kFast;  // naive fallback
  if (req.kloc && req.kloc_active) return Tier::kFast;
  return Tier::kSlow;
}

Tier prefetch_tier(PolicyKind policy, const AllocRequest& req) {
  if (policy == PolicyKind::kKlocMigrateFsNwPrefetch) return Tier::kFast;
  AllocRequest r = req;
  r.is_prefetch = true;
  return decide_tier(policy, r);
}

Grouping PolicyEngine::grouping_for(const AllocRequest& req) const {
  if (!req.kloc || !is_kloc_policy(policy_)) return Grouping::kSlab;
  if (req.is_network_kind() && !kloc_groups_sockets(policy_)) return Grouping::kSlab;
  return Grouping::kVmalloc;
}

bool PolicyEngine::migratable(const PageFrame& f) const {
  if (f.pinned || f.kind == FrameKind::kSlab) return false;
  if (policy_ == PolicyKind::kNimble &&
      !(f.kind == FrameKind::kApp || f.kind == FrameKind::kCache))
    return false;  // Nimble only handles application-level pages
  return !store_.is_shared_with_active(
      f.id, [this](const KlocKey& k) { return klocs_.is_active(k); });
}

Nanos PolicyEngine::demote(FrameId fid, Nanos now) {
  return tiers_.migrate_frame(fid, Tier::kSlow, now);
}

MakeRoomResult PolicyEngine::make_room(std::uint64_t pages_needed, Nanos now) {
  MakeRoomResult res;
  if (pages_needed == 0 || !policy_supports_make_room(policy_)) return res;
  auto veto = [this](const PageFrame& f) { return !migratable(f); };
  std::vector<FrameId> victims =
      tiers_.demotion_candidates(Tier::kFast, pages_needed, /*allow_active_lru=*/true, veto);
  for (FrameId fid : victims) {
    if (tiers_.free_pages(Tier::kSlow) == 0) break;
    res.cost_ns += demote(fid, now);
    res.freed_pages++;
  }
  return res;
}

Nanos PolicyEngine::on_kloc_inactive(const KlocKey& key, std::span<const FrameId> candidates,
                                     Nanos now) {
  if (!policy_demotes_inactive_klocs(policy_)) return 0;
  if (key.type == KlocKey::Type::kSocket && !kloc_groups_sockets(policy_)) return 0;
  Nanos cost = 0;
  std::vector<FrameId> frames(candidates.begin(), candidates.end());
  if (frames.empty()) frames = klocs_.exclusive_fast_frames(key, store_, tiers_);
  for (FrameId fid : frames) {
    if (!tiers_.has_frame(fid)) continue;
    const PageFrame& f = tiers_.frame(fid);
    if (f.tier != Tier::kFast || !migratable(f)) continue;
    if (tiers_.free_pages(Tier::kSlow) == 0) break;
    cost += demote(fid, now);
    kloc_demotions_++;
  }
  return cost;
}

ScanResult PolicyEngine::periodic_scan(Nanos now) {
  ScanResult res;
  if (!policy_scans(policy_)) return res;

  // The hotness walk touches every fast frame; LRU aging happens as part of it.
  res.scanned_frames = tiers_.used_pages(Tier::kFast);
  res.cost_ns = res.scanned_frames * scan_.scan_cost_per_frame_ns;
  tiers_.age_lists(Tier::kFast, now, scan_.idle_threshold_ns);

  auto veto = [&](const PageFrame& f) {
    if (now - f.last_access_ns <= scan_.cold_threshold_ns) return true;  // still warm
    return !migratable(f);
  };
  std::vector<FrameId> victims = tiers_.demotion_candidates(
      Tier::kFast, tiers_.used_pages(Tier::kFast), /*allow_active_lru=*/true, veto);
  for (FrameId fid : victims) {
    if (tiers_.free_pages(Tier::kSlow) == 0) break;
    FrameKind fk = tiers_.frame(fid).kind;
    res.cost_ns += demote(fid, now);
    res.demoted_pages++;
    if (fk == FrameKind::kSlab || fk == FrameKind::kVmalloc)
      res.demoted_kernel_buffer_pages++;
  }
  return res;
}

}  // namespace klocsim
