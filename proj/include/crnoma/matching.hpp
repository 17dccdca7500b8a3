#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace crnoma {

inline constexpr std::size_t kUnmatched = static_cast<std::size_t>(-1);

/// Maximum-cardinality bipartite matching by augmenting paths (Kuhn).
///
/// Left vertices are tried in `order` (identity when empty); neighbours in the
/// order stored in `adj`. A left vertex that gets matched stays matched, so
/// earlier vertices in `order` have priority. With `greedy_start` every vertex
/// first grabs a free neighbour if it has one before augmentation starts; the
/// result is still maximum but the priority guarantee is lost.
class BipartiteMatcher {
 public:
  BipartiteMatcher(std::size_t left_count, std::size_t right_count);

  void add_edge(std::size_t left, std::size_t right) { adj_[left].push_back(right); }
  void clear_edges();

  /// Returns, for every left vertex, the matched right vertex or kUnmatched.
  const std::vector<std::size_t>& solve(std::span<const std::size_t> order = {}, bool greedy_start = false);

  std::size_t matched_count() const { return matched_; }
  std::size_t left_count() const { return adj_.size(); }
  std::size_t right_count() const { return match_right_.size(); }

 private:
  bool augment(std::size_t left);

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> match_left_;
  std::vector<std::size_t> match_right_;
  std::vector<unsigned> seen_;
  unsigned stamp_ = 0;
  std::size_t matched_ = 0;
};

}  // namespace crnoma
