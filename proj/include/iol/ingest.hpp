#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace iol {

struct Post {
  std::string id;
  std::string community;
  std::int64_t created_utc = 0;
  std::string text;

  bool operator==(const Post&) const = default;
};

// ISO-8601 week (Monday start), always evaluated in UTC.
struct WeekKey {
  int iso_year = 0;
  int iso_week = 0;

  auto operator<=>(const WeekKey&) const = default;
};

int iso_weeks_in_year(int iso_year);
bool is_valid_week(WeekKey week);
WeekKey week_of(std::int64_t epoch_seconds);
// Days since 1970-01-01 of the Monday opening `week`.
std::int64_t week_monday(WeekKey week);
WeekKey next_week(WeekKey week);
std::string to_string(WeekKey week);

// Either the whole dataset or one named community.
struct Scope {
  bool global = true;
  std::string community;

  static Scope whole() { return {}; }
  static Scope of(std::string name) { return {false, std::move(name)}; }
  // "global" for the whole dataset, otherwise the community name.
  std::string label() const { return global ? std::string("global") : community; }

  bool operator==(const Scope&) const = default;
};

struct WeekBin {
  WeekKey week;
  std::vector<std::string> post_ids;

  std::size_t post_count() const noexcept { return post_ids.size(); }
};

struct BinSeries {
  Scope scope;
  std::vector<WeekBin> bins;  // strictly increasing weeks, gaps materialized

  std::size_t total_posts() const noexcept;
  const WeekBin* find(WeekKey week) const noexcept;
};

struct ParseOptions {
  // Drop records whose text is empty after removing "[deleted]"/"[removed]".
  bool drop_empty = false;
};

struct IngestStats {
  std::size_t lines = 0;
  std::size_t parsed = 0;
  std::size_t malformed = 0;
  std::size_t dropped_empty = 0;
  std::size_t filtered_out = 0;
  std::size_t duplicates = 0;
  std::vector<std::string> diagnostics;  // capped at kMaxDiagnostics

  static constexpr std::size_t kMaxDiagnostics = 100;
  void diagnose(std::string message);
};

// One NDJSON record in Pushshift submission shape. Malformed records are
// counted in `stats` and yield nullopt; nothing here throws on bad input.
std::optional<Post> parse_post_line(std::string_view line, const ParseOptions& options,
                                    IngestStats& stats, std::size_t line_no = 0);

// Inverse of parse_post_line for normalized posts (title carries the text).
std::string format_post_line(const Post& post);

// Case-insensitive substring match of community names against keywords.
class CommunityFilter {
 public:
  explicit CommunityFilter(std::vector<std::string> keywords);

  bool matches(std::string_view community) const;
  const std::vector<std::string>& keywords() const noexcept { return keywords_; }

 private:
  std::vector<std::string> keywords_;  // lowercased
};

std::vector<Post> filter_communities(std::vector<Post> posts,
                                     const std::vector<std::string>& keywords);

// Streams posts from one newline-delimited file (gzip transparently
// supported), applying the community filter. Blank lines are ignored.
void read_posts(const std::string& path, const ParseOptions& options,
                const CommunityFilter* filter, IngestStats& stats,
                const std::function<void(Post&&)>& sink);

// Reads every file in order; later records with an already-seen id are
// counted as duplicates and skipped.
std::vector<Post> read_posts(std::span<const std::string> paths, const ParseOptions& options,
                             const CommunityFilter* filter, IngestStats& stats);

enum class BinScope { global, per_community };

// Global scope returns exactly one series. Per-community series are sorted by
// community name and all span the dataset-wide first..last week, so indices
// line up across communities and with the global series.
std::vector<BinSeries> bin_weekly(std::span<const Post> posts, BinScope scope);

// (community, post count), sorted by count descending then name.
std::vector<std::pair<std::string, std::size_t>> community_census(std::span<const Post> posts);

void write_bins_csv(std::ostream& out, std::span<const BinSeries> series);
void write_post_index_csv(std::ostream& out, std::span<const Post> posts);
void write_census_csv(std::ostream& out,
                      std::span<const std::pair<std::string, std::size_t>> census);

}  // namespace iol
