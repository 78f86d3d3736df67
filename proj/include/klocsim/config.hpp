#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "klocsim/memory.hpp"
#include "klocsim/objects.hpp"
#include "klocsim/policy.hpp"
#include "klocsim/prefetch.hpp"
#include "klocsim/workload.hpp"

namespace klocsim {

// Whole-simulation configuration. Serializes to flat `key = value` lines and
// round-trips losslessly.
struct SimConfig {
  std::uint64_t fast_capacity_bytes = 5ull << 30;  // 5 GB
  std::uint64_t fast_bandwidth_bytes_per_sec = 30'000'000'000ull;
  Nanos fast_latency_ns = 100;
  std::uint64_t slow_capacity_bytes = 40ull << 30;  // 40 GB
  double slow_bandwidth_ratio = 0.2;                // of fast
  Nanos slow_latency_ns = 300;

  PolicyKind policy = PolicyKind::kNaive;
  ScanConfig scan;
  ReadaheadConfig prefetch;
  DiskModel disk;

  std::uint64_t nic_bandwidth_bytes_per_sec = 1'250'000'000;  // 10 Gb/s
  Nanos tag_cost_ns = 200;

  std::uint32_t pin_threshold = 3;
  Nanos idle_grace_ns = 10'000'000;
  Nanos tlb_shootdown_ns = 4000;
  std::uint32_t migrate_parallelism = 1;  // nimble's concurrent-copy divisor
  std::uint32_t radix_fanout = 64;
  // All-fast is the ideal baseline: give it fast capacity >= any footprint.
  bool autosize_all_fast = true;
  std::uint64_t seed = 42;

  std::uint64_t slow_bandwidth_bytes_per_sec() const {
    return static_cast<std::uint64_t>(static_cast<double>(fast_bandwidth_bytes_per_sec) *
                                      slow_bandwidth_ratio);
  }
  TierConfig fast_tier() const;
  TierConfig slow_tier() const;
  MigrationCostModel cost_model() const;

  void validate() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

SimConfig parse_config(std::istream& in);
SimConfig parse_config(const std::string& text);
std::string format_config(const SimConfig& cfg);

}  // namespace klocsim
