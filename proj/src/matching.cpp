#include "crnoma/matching.hpp"

#include <algorithm>

namespace crnoma {

BipartiteMatcher::BipartiteMatcher(std::size_t left_count, std::size_t right_count)
    : adj_(left_count), match_left_(left_count, kUnmatched), match_right_(right_count, kUnmatched),
      seen_(right_count, 0) {}

void BipartiteMatcher::clear_edges() {
  for (auto& a : adj_) a.clear();
}

bool BipartiteMatcher::augment(std::size_t left) {
  for (const std::size_t r : adj_[left]) {
    if (seen_[r] == stamp_) continue;
    seen_[r] = stamp_;
    if (match_right_[r] == kUnmatched || augment(match_right_[r])) {
      match_right_[r] = left;
      match_left_[left] = r;
      return true;
    }
  }
  return false;
}

const std::vector<std::size_t>& BipartiteMatcher::solve(std::span<const std::size_t> order, bool greedy_start) {
  std::fill(match_left_.begin(), match_left_.end(), kUnmatched);
  std::fill(match_right_.begin(), match_right_.end(), kUnmatched);
  matched_ = 0;
  auto for_each_left = [&](auto&& fn) {
    if (order.empty()) {
      for (std::size_t l = 0; l < adj_.size(); ++l) fn(l);
    } else {
      for (const std::size_t l : order) fn(l);
    }
  };
  if (greedy_start) {
    for_each_left([&](std::size_t l) {
      for (const std::size_t r : adj_[l]) {
        if (match_right_[r] == kUnmatched) {
          match_right_[r] = l;
          match_left_[l] = r;
          ++matched_;
          break;
        }
      }
    });
  }
  for_each_left([&](std::size_t l) {
    if (match_left_[l] != kUnmatched) return;
    if (++stamp_ == 0) {
      std::fill(seen_.begin(), seen_.end(), 0);
      stamp_ = 1;
    }
    if (augment(l)) ++matched_;
  });
  return match_left_;
}

}  // namespace crnoma
