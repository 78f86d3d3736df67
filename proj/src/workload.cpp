#include "klocsim/workload.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace klocsim {

namespace {

const char* kOpNames[kOpTypeCount] = {
    "CREATE", "OPEN", "READ", "WRITE", "FSYNC", "CLOSE",
    "DELETE", "SOCK_OPEN", "SEND", "RECV", "SOCK_CLOSE", "APP_TOUCH",
};

const char* kPatternNames[kPatternCount] = {
    "seq_read", "seq_write", "rand_read", "rand_write",
    "readwrite", "rocksdb_like", "redis_like", "filebench_like",
};

std::uint64_t parse_u64(const std::string& tok, int line, const char* what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw SimError(ErrorCode::kParseError,
                   "line " + std::to_string(line) + ": bad " + what + " '" + tok + "'");
  return v;
}

}  // namespace

const char* op_name(OpType op) { return kOpNames[static_cast<int>(op)]; }

std::optional<OpType> op_from_name(const std::string& name) {
  for (int i = 0; i < kOpTypeCount; ++i)
    if (name == kOpNames[i]) return static_cast<OpType>(i);
  return std::nullopt;
}

const char* pattern_name(Pattern p) { return kPatternNames[static_cast<int>(p)]; }

std::optional<Pattern> pattern_from_name(const std::string& name) {
  for (int i = 0; i < kPatternCount; ++i)
    if (name == kPatternNames[i]) return static_cast<Pattern>(i);
  return std::nullopt;
}

Nanos disk_cost(const DiskModel& model, std::uint64_t bytes, bool sequential) {
  std::uint64_t bw =
      sequential ? model.seq_bandwidth_bytes_per_sec : model.rand_bandwidth_bytes_per_sec;
  return model.request_latency_ns + transfer_ns(bytes, bw);
}

std::uint64_t TraceRng::next() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::vector<TraceOp> parse_trace(std::istream& in) {
  std::vector<TraceOp> ops;
  std::unordered_map<CpuId, Nanos> last_t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ls(line);
    std::string t_tok, cpu_tok, op_tok, tgt_tok, off_tok, len_tok, extra;
    if (!(ls >> t_tok >> cpu_tok >> op_tok >> tgt_tok >> off_tok >> len_tok))
      throw SimError(ErrorCode::kParseError,
                     "line " + std::to_string(lineno) + ": expected 6 fields");
    if (ls >> extra)
      throw SimError(ErrorCode::kParseError,
                     "line " + std::to_string(lineno) + ": trailing fields");
    TraceOp op;
    op.t_ns = parse_u64(t_tok, lineno, "timestamp");
    op.cpu = static_cast<CpuId>(parse_u64(cpu_tok, lineno, "cpu"));
    auto kind = op_from_name(op_tok);
    if (!kind)
      throw SimError(ErrorCode::kParseError,
                     "line " + std::to_string(lineno) + ": unknown op '" + op_tok + "'");
    op.op = *kind;
    op.target = parse_u64(tgt_tok, lineno, "target");
    op.offset_bytes = parse_u64(off_tok, lineno, "offset");
    op.len_bytes = parse_u64(len_tok, lineno, "len");
    if (op.needs_len() && op.len_bytes == 0)
      throw SimError(ErrorCode::kParseError,
                     "line " + std::to_string(lineno) + ": len must be > 0 for " + op_tok);
    auto [it, fresh] = last_t.try_emplace(op.cpu, op.t_ns);
    if (!fresh) {
      if (op.t_ns < it->second)
        throw SimError(ErrorCode::kOrderingViolation,
                       "line " + std::to_string(lineno) + ": cpu " + std::to_string(op.cpu) +
                           " timestamp goes backwards");
      it->second = op.t_ns;
    }
    ops.push_back(op);
  }
  return ops;
}

std::vector<TraceOp> parse_trace(const std::string& text) {
  std::istringstream in(text);
  return parse_trace(in);
}

void write_trace(std::ostream& out, const std::vector<TraceOp>& ops) {
  for (const TraceOp& op : ops)
    out << op.t_ns << ' ' << op.cpu << ' ' << op_name(op.op) << ' ' << op.target << ' '
        << op.offset_bytes << ' ' << op.len_bytes << '\n';
}

std::string format_trace(const std::vector<TraceOp>& ops) {
  std::ostringstream out;
  write_trace(out, ops);
  return out.str();
}

namespace {

class TraceBuilder {
 public:
  explicit TraceBuilder(std::uint64_t cap) : cap_(cap) {}

  bool full() const { return ops_.size() >= cap_; }
  std::uint64_t remaining() const { return full() ? 0 : cap_ - ops_.size(); }

  void emit(CpuId cpu, OpType op, std::uint64_t target, std::uint64_t off = 0,
            std::uint64_t len = 0) {
    if (full()) return;
    ops_.push_back(TraceOp{0, cpu, op, target, off, len});
  }

  std::vector<TraceOp> take() { return std::move(ops_); }

 private:
  std::uint64_t cap_;
  std::vector<TraceOp> ops_;
};

std::uint64_t page_align(std::uint64_t v) { return v & ~(kPageBytes - 1); }

void gen_seq_rw(const GeneratorSpec& s, TraceBuilder& b, bool write) {
  std::uint32_t n_files = std::max<std::uint32_t>(s.n_files, 1);
  std::vector<std::uint64_t> cursor(n_files, 0);
  std::vector<std::uint32_t> writes_since_sync(n_files, 0);
  for (std::uint32_t f = 0; f < n_files; ++f)
    b.emit(f % s.n_cpus, write ? OpType::kCreate : OpType::kOpen, f + 1);
  for (std::uint64_t i = 0; !b.full() && i < s.n_ops; ++i) {
    std::uint32_t f = static_cast<std::uint32_t>(i % n_files);
    CpuId cpu = f % s.n_cpus;
    if (cursor[f] + s.value_bytes > s.file_size_bytes) cursor[f] = 0;
    b.emit(cpu, write ? OpType::kWrite : OpType::kRead, f + 1, cursor[f], s.value_bytes);
    cursor[f] += s.value_bytes;
    if (write && ++writes_since_sync[f] >= 32) {
      writes_since_sync[f] = 0;
      b.emit(cpu, OpType::kFsync, f + 1);
    }
  }
  if (write)
    for (std::uint32_t f = 0; f < n_files; ++f) {
      b.emit(f % s.n_cpus, OpType::kFsync, f + 1);
      b.emit(f % s.n_cpus, OpType::kClose, f + 1);
    }
}

void gen_rand_rw(const GeneratorSpec& s, TraceBuilder& b, bool write) {
  TraceRng rng(s.seed);
  std::uint32_t n_files = std::max<std::uint32_t>(s.n_files, 1);
  std::vector<std::uint32_t> writes_since_sync(n_files, 0);
  std::uint64_t span = s.file_size_bytes > s.value_bytes ? s.file_size_bytes - s.value_bytes : 1;
  for (std::uint32_t f = 0; f < n_files; ++f)
    b.emit(f % s.n_cpus, write ? OpType::kCreate : OpType::kOpen, f + 1);
  for (std::uint64_t i = 0; !b.full() && i < s.n_ops; ++i) {
    std::uint32_t f = static_cast<std::uint32_t>(i % n_files);
    CpuId cpu = f % s.n_cpus;
    std::uint64_t off = page_align(rng.below(span));
    b.emit(cpu, write ? OpType::kWrite : OpType::kRead, f + 1, off, s.value_bytes);
    if (write && ++writes_since_sync[f] >= 32) {
      writes_since_sync[f] = 0;
      b.emit(cpu, OpType::kFsync, f + 1);
    }
  }
  if (write)
    for (std::uint32_t f = 0; f < n_files; ++f) {
      b.emit(f % s.n_cpus, OpType::kFsync, f + 1);
      b.emit(f % s.n_cpus, OpType::kClose, f + 1);
    }
}

// Sequential read stream with a random write stream on a second file.
void gen_readwrite(const GeneratorSpec& s, TraceBuilder& b) {
  TraceRng rng(s.seed);
  std::uint64_t read_file = 1, write_file = 2;
  b.emit(0, OpType::kOpen, read_file);
  b.emit(1 % s.n_cpus, OpType::kCreate, write_file);
  std::uint64_t rcur = 0;
  std::uint32_t writes_since_sync = 0;
  std::uint64_t span = s.file_size_bytes > s.value_bytes ? s.file_size_bytes - s.value_bytes : 1;
  for (std::uint64_t i = 0; !b.full() && i < s.n_ops; ++i) {
    if (i % 2 == 0) {
      if (rcur + s.value_bytes > s.file_size_bytes) rcur = 0;
      b.emit(0, OpType::kRead, read_file, rcur, s.value_bytes);
      rcur += s.value_bytes;
    } else {
      b.emit(1 % s.n_cpus, OpType::kWrite, write_file, page_align(rng.below(span)),
             s.value_bytes);
      if (++writes_since_sync >= 32) {
        writes_since_sync = 0;
        b.emit(1 % s.n_cpus, OpType::kFsync, write_file);
      }
    }
  }
  b.emit(1 % s.n_cpus, OpType::kFsync, write_file);
  b.emit(1 % s.n_cpus, OpType::kClose, write_file);
}

// Create -> fill 4 MB sequentially -> fsync -> close, cycling over n_files,
// with interleaved random reads over a recency window, a steadily growing
// application footprint, and LSM-style deletion of files that leave the window.
void gen_rocksdb(const GeneratorSpec& s, TraceBuilder& b) {
  TraceRng rng(s.seed);
  const std::uint32_t window = 24;
  const std::uint64_t chunk = std::min<std::uint64_t>(s.value_bytes, s.file_size_bytes);
  const std::uint64_t writes_per_file = (s.file_size_bytes + chunk - 1) / chunk;
  const std::uint64_t file_pages = s.file_size_bytes / kPageBytes;
  // Keep the heap roughly 64/36 against kernel pages (cache + buffers).
  const std::uint64_t grow_pages_per_cycle = (file_pages * 7) / 4;
  const std::uint64_t hot_pages = 2048;
  const std::uint64_t reads_per_cycle = 24;
  const std::uint64_t read_run = 4;  // short sequential bursts

  std::uint64_t app_grow_cursor = 0;
  // Per-cycle op estimate so we never emit a partial file cycle.
  const std::uint64_t cycle_ops = 1 + writes_per_file + writes_per_file / 16 + 2 +
                                  reads_per_cycle + 3 + 1;

  for (std::uint32_t f = 0; f < s.n_files; ++f) {
    if (b.remaining() < cycle_ops) break;
    CpuId cpu = f % s.n_cpus;
    std::uint64_t file = f + 1;
    b.emit(cpu, OpType::kCreate, file);
    std::uint64_t off = 0;
    for (std::uint64_t w = 0; w < writes_per_file; ++w) {
      std::uint64_t len = std::min(chunk, s.file_size_bytes - off);
      b.emit(cpu, OpType::kWrite, file, off, len);
      off += len;
      if ((w + 1) % 16 == 0) b.emit(cpu, OpType::kFsync, file);
    }
    b.emit(cpu, OpType::kFsync, file);
    b.emit(cpu, OpType::kClose, file);

    // Point lookups against the recent window: short sequential runs that
    // keep the readahead window alive without turning into a full scan.
    std::uint32_t lo = f >= window ? f - window : 0;
    for (std::uint64_t r = 0; r < reads_per_cycle / read_run; ++r) {
      std::uint64_t victim = lo + rng.below(f - lo + 1) + 1;
      CpuId rcpu = (victim - 1) % s.n_cpus;
      std::uint64_t start = page_align(rng.below(std::max<std::uint64_t>(
          s.file_size_bytes - read_run * s.value_bytes, 1)));
      for (std::uint64_t k = 0; k < read_run; ++k)
        b.emit(rcpu, OpType::kRead, victim, start + k * s.value_bytes, s.value_bytes);
    }

    // Application heap: a hot core touched every cycle plus cold growth.
    b.emit(cpu, OpType::kAppTouch, cpu, 0, hot_pages * kPageBytes);
    b.emit(cpu, OpType::kAppTouch, cpu, app_grow_cursor * kPageBytes,
           grow_pages_per_cycle * kPageBytes);
    app_grow_cursor += grow_pages_per_cycle;

    if (f >= window) b.emit((f - window) % s.n_cpus, OpType::kDelete, f - window + 1);
  }
}

// SEND/RECV key operations (75% GET) over per-instance sockets, a growing
// in-memory store touched per operation, and a periodic sequential
// checkpoint write stream.
void gen_redis(const GeneratorSpec& s, TraceBuilder& b) {
  TraceRng rng(s.seed);
  const std::uint32_t instances = 8;
  const std::uint64_t cmd_bytes = 64;
  const std::uint64_t checkpoint_every = 8192;       // key ops per instance
  const std::uint64_t checkpoint_bytes = 4 << 20;    // per checkpoint
  const std::uint64_t store_touch = 2 * kPageBytes;  // per key op

  for (std::uint32_t i = 0; i < instances; ++i)
    b.emit(i % s.n_cpus, OpType::kSockOpen, i + 1);

  std::vector<std::uint64_t> store_pages(s.n_cpus, 0);
  std::vector<std::uint64_t> since_checkpoint(instances, 0);
  std::uint64_t i = 0;
  while (!b.full() && i < s.n_ops) {
    std::uint32_t inst = static_cast<std::uint32_t>(i % instances);
    CpuId cpu = inst % s.n_cpus;
    std::uint64_t sock = inst + 1;
    bool get = rng.chance(75);
    if (get) {
      b.emit(cpu, OpType::kRecv, sock, 0, cmd_bytes);
      b.emit(cpu, OpType::kSend, sock, 0, s.value_bytes);
    } else {
      b.emit(cpu, OpType::kRecv, sock, 0, cmd_bytes + s.value_bytes);
      b.emit(cpu, OpType::kSend, sock, 0, cmd_bytes);
      if (i % 4 == 0) {  // the store grows with inserts
        b.emit(cpu, OpType::kAppTouch, cpu, store_pages[cpu] * kPageBytes, kPageBytes);
        store_pages[cpu]++;
      }
    }
    std::uint64_t touch_at = store_pages[cpu] ? rng.below(store_pages[cpu]) : 0;
    b.emit(cpu, OpType::kAppTouch, cpu, touch_at * kPageBytes, store_touch);

    if (++since_checkpoint[inst] >= checkpoint_every) {
      since_checkpoint[inst] = 0;
      std::uint64_t ckpt = 1000 + inst;
      b.emit(cpu, OpType::kOpen, ckpt);
      for (std::uint64_t off = 0; off < checkpoint_bytes; off += 262144)
        b.emit(cpu, OpType::kWrite, ckpt, off, 262144);
      b.emit(cpu, OpType::kFsync, ckpt);
      b.emit(cpu, OpType::kClose, ckpt);
    }
    ++i;
  }
  for (std::uint32_t inst = 0; inst < instances; ++inst)
    b.emit(inst % s.n_cpus, OpType::kSockClose, inst + 1);
}

// Per-thread file churn with mixed random reads and writes, periodic fsync,
// and delete at end of each file's life.
void gen_filebench(const GeneratorSpec& s, TraceBuilder& b) {
  TraceRng rng(s.seed);
  const std::uint64_t ops_per_file =
      std::max<std::uint64_t>(2 * s.file_size_bytes / s.value_bytes, 16);
  std::uint64_t span = s.file_size_bytes > s.value_bytes ? s.file_size_bytes - s.value_bytes : 1;

  std::vector<std::uint64_t> next_file(s.n_cpus);
  std::vector<std::uint64_t> ops_left(s.n_cpus, 0);
  std::vector<std::uint64_t> current(s.n_cpus, 0);
  std::vector<std::uint64_t> write_cursor(s.n_cpus, 0);
  std::vector<std::uint32_t> writes_since_sync(s.n_cpus, 0);
  for (std::uint32_t c = 0; c < s.n_cpus; ++c) next_file[c] = 1'000'000ull * (c + 1);

  for (std::uint64_t i = 0; !b.full() && i < s.n_ops; ++i) {
    CpuId cpu = static_cast<CpuId>(i % s.n_cpus);
    if (ops_left[cpu] == 0) {
      if (current[cpu] != 0) {
        b.emit(cpu, OpType::kFsync, current[cpu]);
        b.emit(cpu, OpType::kClose, current[cpu]);
        b.emit(cpu, OpType::kDelete, current[cpu]);
      }
      current[cpu] = next_file[cpu]++;
      write_cursor[cpu] = 0;
      b.emit(cpu, OpType::kCreate, current[cpu]);
      ops_left[cpu] = ops_per_file;
    }
    // Fill sequentially first so reads have data, then a random mix.
    if (write_cursor[cpu] < s.file_size_bytes) {
      b.emit(cpu, OpType::kWrite, current[cpu], write_cursor[cpu], s.value_bytes);
      write_cursor[cpu] += s.value_bytes;
    } else if (rng.chance(50)) {
      b.emit(cpu, OpType::kWrite, current[cpu], page_align(rng.below(span)), s.value_bytes);
    } else {
      b.emit(cpu, OpType::kRead, current[cpu], page_align(rng.below(span)), s.value_bytes);
    }
    if (++writes_since_sync[cpu] >= 16) {
      writes_since_sync[cpu] = 0;
      b.emit(cpu, OpType::kFsync, current[cpu]);
    }
    ops_left[cpu]--;
  }
  for (std::uint32_t c = 0; c < s.n_cpus; ++c)
    if (current[c] != 0) {
      b.emit(c, OpType::kFsync, current[c]);
      b.emit(c, OpType::kClose, current[c]);
      b.emit(c, OpType::kDelete, current[c]);
    }
}

}  // namespace

std::vector<TraceOp> generate(const GeneratorSpec& spec) {
  if (spec.n_cpus == 0 || spec.value_bytes == 0 || spec.file_size_bytes == 0)
    throw SimError(ErrorCode::kInvalidConfig, "generator spec requires nonzero sizes");
  // Structural ops (opens, fsyncs, closes) ride on top of the n_ops budget.
  TraceBuilder b(spec.n_ops + 16 + 4ull * std::max<std::uint32_t>(spec.n_files, 8));
  switch (spec.pattern) {
    case Pattern::kSeqRead: gen_seq_rw(spec, b, false); break;
    case Pattern::kSeqWrite: gen_seq_rw(spec, b, true); break;
    case Pattern::kRandRead: gen_rand_rw(spec, b, false); break;
    case Pattern::kRandWrite: gen_rand_rw(spec, b, true); break;
    case Pattern::kReadWrite: gen_readwrite(spec, b); break;
    case Pattern::kRocksdbLike: gen_rocksdb(spec, b); break;
    case Pattern::kRedisLike: gen_redis(spec, b); break;
    case Pattern::kFilebenchLike: gen_filebench(spec, b); break;
  }
  return b.take();
}

}  // namespace klocsim
