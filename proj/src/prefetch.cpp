#include "klocsim/prefetch.hpp"

#include <algorithm>

namespace klocsim {

PrefetchPlan ReadaheadState::on_read(std::uint64_t start_page, std::uint64_t len_pages,
                                     Nanos now) {
  (void)now;
  bool sequential = !next_expected_page_.has_value();
  if (next_expected_page_) {
    if (start_page == *next_expected_page_) {
      sequential = true;
      window_ = std::min<std::uint64_t>(static_cast<std::uint64_t>(window_) * 2, cfg_.max_pages);
    } else {
      window_ = cfg_.shrink == ReadaheadConfig::Shrink::kHalve
                    ? std::max(window_ / 2, cfg_.min_pages)
                    : cfg_.initial_pages;
      // The old ahead-window is abandoned on a jump.
      prefetched_pending_.clear();
      prefetch_cursor_ = 0;
    }
  }
  std::uint64_t read_end = start_page + len_pages;
  next_expected_page_ = read_end;

  PrefetchPlan plan;
  plan.window_after = window_;
  // Only sequential streams fetch ahead; a jump just shrinks the window, so
  // random access prefetches next to nothing.
  if (!sequential) return plan;
  // Re-arm only once the pending ahead-window has drained below half.
  if (prefetched_pending_.size() >= window_ / 2) return plan;
  std::uint64_t start = std::max(read_end, prefetch_cursor_);
  std::uint64_t end = read_end + window_;
  if (start >= end) return plan;
  plan.fetch_start = start;
  plan.fetch_count = end - start;
  prefetch_cursor_ = end;
  return plan;
}

bool ReadaheadState::consume(std::uint64_t page_index) {
  return prefetched_pending_.erase(page_index) != 0;
}

}  // namespace klocsim
