#pragma once

#include <cstdint>
#include <optional>
#include <set>

#include "klocsim/types.hpp"

namespace klocsim {

struct ReadaheadConfig {
  std::uint32_t initial_pages = 32;
  std::uint32_t min_pages = 8;
  // 128 MB, the Linux readahead window ceiling.
  std::uint32_t max_pages = 32768;
  enum class Shrink : std::uint8_t { kHalve, kReset } shrink = Shrink::kHalve;

  void validate() const {
    if (min_pages == 0 || min_pages > initial_pages || initial_pages > max_pages)
      throw SimError(ErrorCode::kInvalidConfig, "readahead window bounds");
  }
};

struct PrefetchPlan {
  std::uint64_t fetch_start = 0;
  std::uint64_t fetch_count = 0;
  std::uint32_t window_after = 0;
};

// Adaptive per-file readahead: the window doubles while reads stay sequential
// and shrinks when they do not, so random streams prefetch almost nothing.
class ReadaheadState {
 public:
  explicit ReadaheadState(ReadaheadConfig cfg = {}) : cfg_(cfg), window_(cfg.initial_pages) {
    cfg_.validate();
  }

  PrefetchPlan on_read(std::uint64_t start_page, std::uint64_t len_pages, Nanos now);
  bool consume(std::uint64_t page_index);

  std::uint32_t window_pages() const { return window_; }
  std::size_t pending() const { return prefetched_pending_.size(); }
  bool is_pending(std::uint64_t page) const { return prefetched_pending_.count(page) != 0; }
  void note_prefetched(std::uint64_t page) { prefetched_pending_.insert(page); }

 private:
  ReadaheadConfig cfg_;
  std::uint32_t window_;
  std::optional<std::uint64_t> next_expected_page_;
  std::uint64_t prefetch_cursor_ = 0;
  std::set<std::uint64_t> prefetched_pending_;
};

}  // namespace klocsim
