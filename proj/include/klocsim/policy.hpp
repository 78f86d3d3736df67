#pragma once

#include <optional>
#include <span>
#include <string>

#include "klocsim/kloc.hpp"
#include "klocsim/objects.hpp"

namespace klocsim {

enum class PolicyKind : std::uint8_t {
  kAllSlow = 0,
  kAllFast,
  kNaive,
  kNimble,
  kMigrationOnly,
  kKlocNoMigrate,
  kKlocMigrateFs,
  kKlocMigrateFsNw,
  kKlocMigrateFsNwPrefetch,
};
inline constexpr int kPolicyCount = 9;

const char* policy_name(PolicyKind p);
std::optional<PolicyKind> policy_from_name(const std::string& name);  // case-insensitive

inline bool is_kloc_policy(PolicyKind p) { return p >= PolicyKind::kKlocNoMigrate; }
inline bool kloc_groups_sockets(PolicyKind p) {
  // The fs-only migrate variant leaves the network stack ungrouped.
  return p == PolicyKind::kKlocNoMigrate || p >= PolicyKind::kKlocMigrateFsNw;
}
inline bool policy_supports_make_room(PolicyKind p) {
  return p == PolicyKind::kNimble || p == PolicyKind::kMigrationOnly ||
         p >= PolicyKind::kKlocMigrateFs;
}
inline bool policy_scans(PolicyKind p) {
  return p == PolicyKind::kNimble || p == PolicyKind::kMigrationOnly;
}
inline bool policy_demotes_inactive_klocs(PolicyKind p) {
  return p >= PolicyKind::kKlocMigrateFs;
}

struct ScanConfig {
  Nanos scan_interval_ns = 30'000'000'000ull;  // Thermostat's 30 s hotness interval
  Nanos cold_threshold_ns = 30'000'000'000ull;
  Nanos scan_cost_per_frame_ns = 50;
  Nanos idle_threshold_ns = 50'000'000;  // ACTIVE -> INACTIVE aging during scans
  double background_interference = 0.1;
};

struct AllocRequest {
  // nullopt kind = application page.
  std::optional<ObjectKind> kind;
  std::optional<KlocKey> kloc;
  bool kloc_active = false;
  bool is_prefetch = false;
  CpuId cpu = 0;
  Nanos now = 0;

  bool is_app_page() const { return !kind.has_value(); }
  bool is_network_kind() const {
    return kind && (*kind == ObjectKind::kSkbuff || *kind == ObjectKind::kNetQueue);
  }
};

// Pure placement decision for one allocation under one policy.
Tier decide_tier(PolicyKind policy, const AllocRequest& req);

// Readahead placement: fast memory under the prefetch variant, the policy's
// ordinary cache decision otherwise.
Tier prefetch_tier(PolicyKind policy, const AllocRequest& req);

struct MakeRoomResult {
  std::uint64_t freed_pages = 0;
  Nanos cost_ns = 0;
};

struct ScanResult {
  std::uint64_t demoted_pages = 0;
  std::uint64_t demoted_kernel_buffer_pages = 0;
  std::uint64_t scanned_frames = 0;
  Nanos cost_ns = 0;
};

// Demotion machinery shared by the nine strategies: make-room under fast
// pressure, immediate demotion of inactive KLOCs, and the periodic cold scan
// used by the baselines.
class PolicyEngine {
 public:
  PolicyEngine(PolicyKind policy, ScanConfig scan, TierSystem& tiers, ObjectStore& store,
               KlocRegistry& klocs)
      : policy_(policy), scan_(scan), tiers_(tiers), store_(store), klocs_(klocs) {}

  PolicyKind policy() const { return policy_; }
  const ScanConfig& scan_config() const { return scan_; }

  Tier place(const AllocRequest& req) const {
    return req.is_prefetch ? prefetch_tier(policy_, req) : decide_tier(policy_, req);
  }

  Grouping grouping_for(const AllocRequest& req) const;

  // True when nothing forbids moving this frame right now: not pinned, not a
  // slab page, and not sharing a frame with any ACTIVE KLOC's object.
  bool migratable(const PageFrame& f) const;

  MakeRoomResult make_room(std::uint64_t pages_needed, Nanos now);
  Nanos on_kloc_inactive(const KlocKey& key, std::span<const FrameId> candidates, Nanos now);
  ScanResult periodic_scan(Nanos now);

  std::uint64_t kloc_demotions() const { return kloc_demotions_; }

 private:
  Nanos demote(FrameId fid, Nanos now);

  PolicyKind policy_;
  ScanConfig scan_;
  TierSystem& tiers_;
  ObjectStore& store_;
  KlocRegistry& klocs_;
  std::uint64_t kloc_demotions_ = 0;
};

}  // namespace klocsim
