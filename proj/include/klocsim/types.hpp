#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace klocsim {

using Nanos = std::uint64_t;
using FrameId = std::uint64_t;
using ObjectId = std::uint64_t;
using CpuId = std::uint32_t;

inline constexpr std::uint64_t kPageBytes = 4096;

enum class Tier : std::uint8_t { kFast = 0, kSlow = 1 };

inline const char* tier_name(Tier t) { return t == Tier::kFast ? "fast" : "slow"; }
inline Tier other_tier(Tier t) { return t == Tier::kFast ? Tier::kSlow : Tier::kFast; }

enum class FrameKind : std::uint8_t { kApp = 0, kCache, kSlab, kVmalloc };

inline const char* frame_kind_name(FrameKind k) {
  switch (k) {
    case FrameKind::kApp: return "app";
    case FrameKind::kCache: return "cache";
    case FrameKind::kSlab: return "slab";
    case FrameKind::kVmalloc: return "vmalloc";
  }
  return "?";
}

enum class LruList : std::uint8_t { kActive, kInactive, kNone };

enum class ErrorCode {
  kInvalidConfig,
  kOutOfMemory,
  kUnknownFrame,
  kFrameBusy,
  kPinned,
  kNonMigratableKind,
  kDestFull,
  kUnknownObject,
  kDoubleFree,
  kUnknownKloc,
  kDuplicateInsert,
  kParseError,
  kOrderingViolation,
  kUnknownTarget,
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kOutOfMemory: return "OutOfMemory";
    case ErrorCode::kUnknownFrame: return "UnknownFrame";
    case ErrorCode::kFrameBusy: return "FrameBusy";
    case ErrorCode::kPinned: return "Pinned";
    case ErrorCode::kNonMigratableKind: return "NonMigratableKind";
    case ErrorCode::kDestFull: return "DestFull";
    case ErrorCode::kUnknownObject: return "UnknownObject";
    case ErrorCode::kDoubleFree: return "DoubleFree";
    case ErrorCode::kUnknownKloc: return "UnknownKloc";
    case ErrorCode::kDuplicateInsert: return "DuplicateInsert";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kOrderingViolation: return "OrderingViolation";
    case ErrorCode::kUnknownTarget: return "UnknownTarget";
  }
  return "?";
}

class SimError : public std::runtime_error {
 public:
  SimError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// ceil(bytes * 1e9 / bw), exact in 128-bit so runs are bit-reproducible.
inline Nanos transfer_ns(std::uint64_t bytes, std::uint64_t bandwidth_bytes_per_sec) {
  if (bytes == 0) return 0;
  unsigned __int128 num = static_cast<unsigned __int128>(bytes) * 1000000000ull;
  unsigned __int128 bw = bandwidth_bytes_per_sec;
  return static_cast<Nanos>((num + bw - 1) / bw);
}

}  // namespace klocsim
