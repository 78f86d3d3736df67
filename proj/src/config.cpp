#include "klocsim/config.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace klocsim {

TierConfig SimConfig::fast_tier() const {
  return TierConfig{Tier::kFast, fast_capacity_bytes / kPageBytes, fast_latency_ns,
                    fast_bandwidth_bytes_per_sec};
}

TierConfig SimConfig::slow_tier() const {
  return TierConfig{Tier::kSlow, slow_capacity_bytes / kPageBytes, slow_latency_ns,
                    slow_bandwidth_bytes_per_sec()};
}

MigrationCostModel SimConfig::cost_model() const {
  return MigrationCostModel{tlb_shootdown_ns,
                            policy == PolicyKind::kNimble ? migrate_parallelism : 1};
}

void SimConfig::validate() const {
  fast_tier().validate();
  slow_tier().validate();
  if (slow_bandwidth_ratio <= 0.0 || slow_bandwidth_ratio > 1.0)
    throw SimError(ErrorCode::kInvalidConfig, "slow_bandwidth_ratio must be in (0, 1]");
  prefetch.validate();
  disk.validate();
  if (nic_bandwidth_bytes_per_sec == 0)
    throw SimError(ErrorCode::kInvalidConfig, "nic bandwidth must be > 0");
  if (radix_fanout == 0) throw SimError(ErrorCode::kInvalidConfig, "radix_fanout must be > 0");
  if (migrate_parallelism == 0)
    throw SimError(ErrorCode::kInvalidConfig, "migrate_parallelism must be > 0");
  if (scan.scan_interval_ns == 0 && policy_scans(policy))
    throw SimError(ErrorCode::kInvalidConfig, "scan interval must be > 0 for scan policies");
  if (scan.background_interference < 0.0)
    throw SimError(ErrorCode::kInvalidConfig, "background_interference must be >= 0");
}

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << v;
  return os.str();
}

struct KeyValue {
  std::string key;
  std::string value;
  int line;
};

std::uint64_t to_u64(const KeyValue& kv) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(kv.value.data(), kv.value.data() + kv.value.size(), v);
  if (ec != std::errc() || p != kv.value.data() + kv.value.size())
    throw SimError(ErrorCode::kInvalidConfig,
                   "line " + std::to_string(kv.line) + ": bad integer for " + kv.key);
  return v;
}

double to_double(const KeyValue& kv) {
  try {
    std::size_t pos = 0;
    double v = std::stod(kv.value, &pos);
    if (pos != kv.value.size() || !std::isfinite(v)) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw SimError(ErrorCode::kInvalidConfig,
                   "line " + std::to_string(kv.line) + ": bad number for " + kv.key);
  }
}

bool to_bool(const KeyValue& kv) {
  if (kv.value == "true" || kv.value == "1") return true;
  if (kv.value == "false" || kv.value == "0") return false;
  throw SimError(ErrorCode::kInvalidConfig,
                 "line " + std::to_string(kv.line) + ": bad bool for " + kv.key);
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

SimConfig parse_config(std::istream& in) {
  SimConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw SimError(ErrorCode::kInvalidConfig,
                     "line " + std::to_string(lineno) + ": expected key = value");
    KeyValue kv{trim(t.substr(0, eq)), trim(t.substr(eq + 1)), lineno};
    if (kv.key == "tier.fast.capacity_bytes") cfg.fast_capacity_bytes = to_u64(kv);
    else if (kv.key == "tier.fast.bandwidth_bytes_per_sec") cfg.fast_bandwidth_bytes_per_sec = to_u64(kv);
    else if (kv.key == "tier.fast.latency_ns") cfg.fast_latency_ns = to_u64(kv);
    else if (kv.key == "tier.slow.capacity_bytes") cfg.slow_capacity_bytes = to_u64(kv);
    else if (kv.key == "tier.slow.bandwidth_ratio") cfg.slow_bandwidth_ratio = to_double(kv);
    else if (kv.key == "tier.slow.latency_ns") cfg.slow_latency_ns = to_u64(kv);
    else if (kv.key == "policy") {
      auto p = policy_from_name(kv.value);
      if (!p)
        throw SimError(ErrorCode::kInvalidConfig,
                       "line " + std::to_string(lineno) + ": unknown policy " + kv.value);
      cfg.policy = *p;
    } else if (kv.key == "scan.interval_ns") cfg.scan.scan_interval_ns = to_u64(kv);
    else if (kv.key == "scan.cold_threshold_ns") cfg.scan.cold_threshold_ns = to_u64(kv);
    else if (kv.key == "scan.cost_per_frame_ns") cfg.scan.scan_cost_per_frame_ns = to_u64(kv);
    else if (kv.key == "scan.idle_threshold_ns") cfg.scan.idle_threshold_ns = to_u64(kv);
    else if (kv.key == "scan.background_interference") cfg.scan.background_interference = to_double(kv);
    else if (kv.key == "prefetch.initial_pages") cfg.prefetch.initial_pages = static_cast<std::uint32_t>(to_u64(kv));
    else if (kv.key == "prefetch.min_pages") cfg.prefetch.min_pages = static_cast<std::uint32_t>(to_u64(kv));
    else if (kv.key == "prefetch.max_pages") cfg.prefetch.max_pages = static_cast<std::uint32_t>(to_u64(kv));
    else if (kv.key == "prefetch.shrink_mode") {
      if (kv.value == "halve") cfg.prefetch.shrink = ReadaheadConfig::Shrink::kHalve;
      else if (kv.value == "reset") cfg.prefetch.shrink = ReadaheadConfig::Shrink::kReset;
      else
        throw SimError(ErrorCode::kInvalidConfig,
                       "line " + std::to_string(lineno) + ": shrink_mode is halve or reset");
    } else if (kv.key == "disk.seq_bw") cfg.disk.seq_bandwidth_bytes_per_sec = to_u64(kv);
    else if (kv.key == "disk.rand_bw") cfg.disk.rand_bandwidth_bytes_per_sec = to_u64(kv);
    else if (kv.key == "disk.latency_ns") cfg.disk.request_latency_ns = to_u64(kv);
    else if (kv.key == "net.nic_bandwidth_bytes_per_sec") cfg.nic_bandwidth_bytes_per_sec = to_u64(kv);
    else if (kv.key == "net.tag_cost_ns") cfg.tag_cost_ns = to_u64(kv);
    else if (kv.key == "pin_threshold") cfg.pin_threshold = static_cast<std::uint32_t>(to_u64(kv));
    else if (kv.key == "idle_grace_ns") cfg.idle_grace_ns = to_u64(kv);
    else if (kv.key == "migrate.tlb_shootdown_ns") cfg.tlb_shootdown_ns = to_u64(kv);
    else if (kv.key == "migrate.parallelism") cfg.migrate_parallelism = static_cast<std::uint32_t>(to_u64(kv));
    else if (kv.key == "workload.radix_fanout") cfg.radix_fanout = static_cast<std::uint32_t>(to_u64(kv));
    else if (kv.key == "sim.autosize_all_fast") cfg.autosize_all_fast = to_bool(kv);
    else if (kv.key == "seed") cfg.seed = to_u64(kv);
    else
      throw SimError(ErrorCode::kInvalidConfig,
                     "line " + std::to_string(lineno) + ": unknown key " + kv.key);
  }
  cfg.validate();
  return cfg;
}

SimConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string format_config(const SimConfig& cfg) {
  std::ostringstream os;
  os << "tier.fast.capacity_bytes = " << cfg.fast_capacity_bytes << '\n'
     << "tier.fast.bandwidth_bytes_per_sec = " << cfg.fast_bandwidth_bytes_per_sec << '\n'
     << "tier.fast.latency_ns = " << cfg.fast_latency_ns << '\n'
     << "tier.slow.capacity_bytes = " << cfg.slow_capacity_bytes << '\n'
     << "tier.slow.bandwidth_ratio = " << format_double(cfg.slow_bandwidth_ratio) << '\n'
     << "tier.slow.latency_ns = " << cfg.slow_latency_ns << '\n'
     << "policy = " << policy_name(cfg.policy) << '\n'
     << "scan.interval_ns = " << cfg.scan.scan_interval_ns << '\n'
     << "scan.cold_threshold_ns = " << cfg.scan.cold_threshold_ns << '\n'
     << "scan.cost_per_frame_ns = " << cfg.scan.scan_cost_per_frame_ns << '\n'
     << "scan.idle_threshold_ns = " << cfg.scan.idle_threshold_ns << '\n'
     << "scan.background_interference = " << format_double(cfg.scan.background_interference)
     << '\n'
     << "prefetch.initial_pages = " << cfg.prefetch.initial_pages << '\n'
     << "prefetch.min_pages = " << cfg.prefetch.min_pages << '\n'
     << "prefetch.max_pages = " << cfg.prefetch.max_pages << '\n'
     << "prefetch.shrink_mode = "
     << (cfg.prefetch.shrink == ReadaheadConfig::Shrink::kHalve ? "halve" : "reset") << '\n'
     << "disk.seq_bw = " << cfg.disk.seq_bandwidth_bytes_per_sec << '\n'
     << "disk.rand_bw = " << cfg.disk.rand_bandwidth_bytes_per_sec << '\n'
     << "disk.latency_ns = " << cfg.disk.request_latency_ns << '\n'
     << "net.nic_bandwidth_bytes_per_sec = " << cfg.nic_bandwidth_bytes_per_sec << '\n'
     << "net.tag_cost_ns = " << cfg.tag_cost_ns << '\n'
     << "pin_threshold = " << cfg.pin_threshold << '\n'
     << "idle_grace_ns = " << cfg.idle_grace_ns << '\n'
     << "migrate.tlb_shootdown_ns = " << cfg.tlb_shootdown_ns << '\n'
     << "migrate.parallelism = " << cfg.migrate_parallelism << '\n'
     << "workload.radix_fanout = " << cfg.radix_fanout << '\n'
     << "sim.autosize_all_fast = " << (cfg.autosize_all_fast ? "true" : "false") << '\n'
     << "seed = " << cfg.seed << '\n';
  return os.str();
}

}  // namespace klocsim
