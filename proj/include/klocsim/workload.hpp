#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "klocsim/types.hpp"

namespace klocsim {

enum class OpType : std::uint8_t {
  kCreate = 0,
  kOpen,
  kRead,
  kWrite,
  kFsync,
  kClose,
  kDelete,
  kSockOpen,
  kSend,
  kRecv,
  kSockClose,
  kAppTouch,
};
inline constexpr int kOpTypeCount = 12;

const char* op_name(OpType op);
std::optional<OpType> op_from_name(const std::string& name);

struct TraceOp {
  Nanos t_ns = 0;
  CpuId cpu = 0;
  OpType op = OpType::kOpen;
  std::uint64_t target = 0;
  std::uint64_t offset_bytes = 0;
  std::uint64_t len_bytes = 0;

  bool is_socket_op() const {
    return op == OpType::kSockOpen || op == OpType::kSend || op == OpType::kRecv ||
           op == OpType::kSockClose;
  }
  bool needs_len() const {
    return op == OpType::kRead || op == OpType::kWrite || op == OpType::kSend ||
           op == OpType::kRecv || op == OpType::kAppTouch;
  }

  friend bool operator==(const TraceOp&, const TraceOp&) = default;
};

struct DiskModel {
  std::uint64_t seq_bandwidth_bytes_per_sec = 1'200'000'000;
  std::uint64_t rand_bandwidth_bytes_per_sec = 425'000'000;
  Nanos request_latency_ns = 10'000;

  void validate() const {
    if (rand_bandwidth_bytes_per_sec == 0 ||
        seq_bandwidth_bytes_per_sec < rand_bandwidth_bytes_per_sec)
      throw SimError(ErrorCode::kInvalidConfig, "disk bandwidths must satisfy seq >= rand > 0");
  }
};

Nanos disk_cost(const DiskModel& model, std::uint64_t bytes, bool sequential);

enum class Pattern : std::uint8_t {
  kSeqRead = 0,
  kSeqWrite,
  kRandRead,
  kRandWrite,
  kReadWrite,
  kRocksdbLike,
  kRedisLike,
  kFilebenchLike,
};
inline constexpr int kPatternCount = 8;

const char* pattern_name(Pattern p);
std::optional<Pattern> pattern_from_name(const std::string& name);

struct GeneratorSpec {
  Pattern pattern = Pattern::kSeqRead;
  std::uint64_t n_ops = 10'000;
  std::uint32_t n_cpus = 4;
  std::uint64_t file_size_bytes = 4 << 20;
  std::uint32_t n_files = 200;
  std::uint64_t value_bytes = 16'384;
  std::uint64_t seed = 1;
};

// Line format, one op per line: `t_ns cpu OP target offset len`.
// `#` starts a comment. Bit-exact for golden-file tests.
std::vector<TraceOp> parse_trace(std::istream& in);
std::vector<TraceOp> parse_trace(const std::string& text);
void write_trace(std::ostream& out, const std::vector<TraceOp>& ops);
std::string format_trace(const std::vector<TraceOp>& ops);

std::vector<TraceOp> generate(const GeneratorSpec& spec);

// Splitmix-style generator so traces are identical across compilers.
class TraceRng {
 public:
  explicit TraceRng(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next();
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }
  bool chance(std::uint32_t percent) { return below(100) < percent; }

 private:
  std::uint64_t state_;
};

}  // namespace klocsim
