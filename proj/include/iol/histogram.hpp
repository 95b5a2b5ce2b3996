#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace iol {

// Posts per topic, sorted ascending, every count >= 1.
struct TopicHistogram {
  std::vector<std::int64_t> counts;

  // Sorts, validates (nonempty, all positive) and wraps `counts`.
  static TopicHistogram from_counts(std::vector<std::int64_t> counts);
  // Same, but silently drops zero counts first. Throws only if nothing is left.
  static TopicHistogram from_counts_dropping_zeros(std::vector<std::int64_t> counts);

  std::int64_t topic_count() const noexcept { return static_cast<std::int64_t>(counts.size()); }
  std::int64_t post_count() const noexcept;

  bool operator==(const TopicHistogram&) const = default;
};

}  // namespace iol
