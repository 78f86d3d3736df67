#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "klocsim/config.hpp"
#include "klocsim/kloc.hpp"
#include "klocsim/policy.hpp"
#include "klocsim/prefetch.hpp"
#include "klocsim/workload.hpp"

namespace klocsim {

// --- Micro-events -----------------------------------------------------------
// One trace op expands into an ordered plan of allocation, access, disk and
// free micro-events that the engine routes through policy, memory, and KLOC.

struct AllocEvent {
  std::optional<ObjectKind> kind;  // nullopt = application page
  std::optional<KlocKey> kloc;
  bool prefetch = false;
  std::uint64_t page_index = 0;     // cache page: file page index; app: region page
  std::uint64_t payload_bytes = 0;  // skbuff data
  std::uint64_t app_region = 0;
};

struct AccessEvent {
  enum class What : std::uint8_t { kSlot, kFileRange, kAppRange };
  What what = What::kSlot;
  int slot = -1;  // index into this plan's alloc events
  std::uint64_t target = 0;
  std::uint64_t start_page = 0;
  std::uint64_t page_count = 0;
  std::uint64_t bytes = 0;
  bool write = false;
};

struct DiskEvent {
  std::uint64_t bytes = 0;
  bool sequential = true;
};

struct FreeEvent {
  ObjectId object = 0;  // 0: resolve via slot
  int slot = -1;
};

using MicroEvent = std::variant<AllocEvent, AccessEvent, DiskEvent, FreeEvent>;

struct OpPlan {
  std::vector<MicroEvent> events;
  Nanos fixed_overhead_ns = 0;  // NIC transmit, driver tagging
};

// --- Expander ----------------------------------------------------------------
// Turns syscall-level ops into micro-event plans against the current cache
// state; the engine reports allocation results back so later plans can free
// what earlier ones created.

class WorkloadExpander {
 public:
  WorkloadExpander(const SimConfig& cfg, ObjectStore& store)
      : cfg_(cfg), store_(store) {}

  OpPlan expand(const TraceOp& op, Nanos now);

  // Execution feedback, in plan order.
  void record_alloc(const TraceOp& op, const AllocEvent& ev, ObjectId object_id);
  void record_app_alloc(const AllocEvent& ev, FrameId frame_id);
  void record_free(ObjectId object_id);
  void finish_op(const TraceOp& op);

  ObjectId cached_page(std::uint64_t file, std::uint64_t page) const;
  FrameId app_frame(std::uint64_t region, std::uint64_t page) const;
  std::uint64_t prefetch_issued_pages() const { return prefetch_issued_; }
  std::uint64_t prefetch_hit_pages() const { return prefetch_hits_; }

 private:
  struct FileState {
    std::map<std::uint64_t, ObjectId> cached;  // page index -> cache object
    std::vector<ObjectId> pending_journal;
    std::vector<ObjectId> pending_bio;
    std::uint64_t dirty_bytes = 0;
    std::uint64_t size_bytes = 0;
    std::uint64_t pages_allocated = 0;  // drives radix-node fan-out
    std::uint64_t disk_cursor_page = 0;
    std::unique_ptr<ReadaheadState> readahead;
    bool exists = false;
  };

  FileState& file(std::uint64_t target);
  void plan_write(const TraceOp& op, FileState& f, OpPlan& plan);
  void plan_read(const TraceOp& op, FileState& f, OpPlan& plan);
  void plan_fsync(const TraceOp& op, FileState& f, OpPlan& plan);
  void add_cache_alloc(const KlocKey& key, FileState& f, std::uint64_t page, bool prefetch,
                       OpPlan& plan);

  const SimConfig& cfg_;
  ObjectStore& store_;
  std::map<std::uint64_t, FileState> files_;
  std::map<std::uint64_t, std::map<std::uint64_t, FrameId>> app_regions_;
  std::map<std::uint64_t, ObjectId> socket_queues_;
  std::uint64_t prefetch_issued_ = 0;
  std::uint64_t prefetch_hits_ = 0;
};

// --- Stats -------------------------------------------------------------------

struct Stats {
  std::uint64_t ops_completed = 0;
  Nanos sim_time_ns = 0;
  double throughput_ops_per_sec = 0;

  std::uint64_t object_allocs[kObjectKindCount][2] = {};  // kind x tier
  std::uint64_t frame_allocs[4][2] = {};                  // frame kind x tier
  std::uint64_t fast_miss_count = 0;

  std::uint64_t migration_count = 0;
  std::uint64_t migration_pages = 0;
  Nanos migration_cost_ns = 0;
  std::uint64_t kloc_demotions = 0;
  std::uint64_t scan_count = 0;
  std::uint64_t scan_demotions = 0;
  std::uint64_t scan_demoted_kernel_buffers = 0;

  LifetimeStats lifetime[kObjectKindCount];

  std::uint64_t peak_slow_kernel_pages = 0;
  std::uint64_t peak_fast_occupancy = 0;
  std::uint64_t live_objects_end = 0;
  std::uint64_t live_frames_end = 0;

  std::uint64_t prefetch_issued_pages = 0;
  std::uint64_t prefetch_hit_pages = 0;

  Nanos total_charged_ns = 0;     // foreground cost summed over cpus
  Nanos total_idle_ns = 0;        // waiting for op timestamps
  Nanos background_charged_ns = 0;

  std::string to_csv() const;

  friend bool operator==(const Stats&, const Stats&);
};

bool operator==(const Stats& a, const Stats& b);

// --- Engine ------------------------------------------------------------------

class Simulator {
 public:
  Simulator(const SimConfig& cfg, std::vector<TraceOp> trace);

  Stats run();

  // Observe every migration (frame snapshot before the move plus activity
  // context). Used by the legality test suite.
  using MigrationProbe = std::function<void(const PageFrame&, Tier, const KlocRegistry&,
                                            const ObjectStore&)>;
  void set_migration_probe(MigrationProbe probe) { probe_ = std::move(probe); }

 private:
  struct CpuState {
    Nanos clock = 0;
    std::size_t next = 0;  // index into its op list
    std::vector<std::size_t> ops;
  };

  void fire_scans_until(Nanos now);
  void execute_op(const TraceOp& op, Nanos start, Nanos& cost);
  Nanos execute_alloc(const TraceOp& op, const AllocEvent& ev, std::vector<ObjectId>& slots,
                      std::vector<FrameId>& app_slots, Nanos now);
  Nanos execute_access(const AccessEvent& ev, const std::vector<ObjectId>& slots,
                       const std::vector<FrameId>& app_slots, Nanos now);
  void charge_background(Nanos cost);
  void handle_kloc_transitions(const TraceOp& op, Nanos now, Nanos& bg_cost);

  SimConfig cfg_;
  std::vector<TraceOp> trace_;
  TierSystem tiers_;
  ObjectStore store_;
  KlocRegistry klocs_;
  PolicyEngine engine_;
  WorkloadExpander expander_;
  std::vector<CpuState> cpus_;
  Nanos next_scan_ns_;
  Stats stats_;
  MigrationProbe probe_;
};

Stats run(const SimConfig& cfg, const std::vector<TraceOp>& trace);

struct CompareRow {
  PolicyKind policy;
  Stats stats;
};
std::vector<CompareRow> compare(const std::vector<TraceOp>& trace,
                                const std::vector<PolicyKind>& policies,
                                const SimConfig& base);

enum class SweepAxis : std::uint8_t { kSlowBandwidthRatio, kFastCapacityRatio };

struct SweepRow {
  double axis_value;
  PolicyKind policy;
  double throughput_ops_per_sec;
};
std::vector<SweepRow> sweep(const std::vector<TraceOp>& trace, const SimConfig& base,
                            SweepAxis axis, const std::vector<double>& values,
                            const std::vector<PolicyKind>& policies);

// Peak page footprint of the trace, measured with an unconstrained fast tier.
std::uint64_t measure_footprint_pages(const std::vector<TraceOp>& trace, const SimConfig& base);

}  // namespace klocsim
