#include "iol/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "iol/csv.hpp"
#include "iol/error.hpp"
#include "json.hpp"

namespace iol {

namespace {

using json = nlohmann::json;
namespace chr = std::chrono;

constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Monday = 0 ... Sunday = 6; day 0 (1970-01-01) is a Thursday.
int weekday_from_monday(std::int64_t days) {
  return static_cast<int>(((days + 3) % 7 + 7) % 7);
}

int civil_year(std::int64_t days) {
  chr::year_month_day ymd{chr::sys_days{chr::days{days}}};
  return static_cast<int>(ymd.year());
}

std::int64_t days_of(int year, unsigned month, unsigned day) {
  chr::sys_days d{chr::year{year} / chr::month{month} / chr::day{day}};
  return d.time_since_epoch().count();
}

WeekKey week_of_day(std::int64_t days) {
  std::int64_t thursday = days - weekday_from_monday(days) + 3;
  int year = civil_year(thursday);
  std::int64_t jan1 = days_of(year, 1, 1);
  return {year, static_cast<int>((thursday - jan1) / 7 + 1)};
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_placeholder(const std::string& s) { return s == "[deleted]" || s == "[removed]"; }

// Accepts integer, integral float, or a decimal string.
std::optional<std::int64_t> epoch_field(const json& v) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (!std::isfinite(d) || d != std::floor(d)) return std::nullopt;
    return static_cast<std::int64_t>(d);
  }
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s.empty() || s.size() > 18) return std::nullopt;
    std::int64_t out = 0;
    for (char c : s) {
      if (c < '0' || c > '9') return std::nullopt;
      out = out * 10 + (c - '0');
    }
    return out;
  }
  return std::nullopt;
}

std::string string_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

}  // namespace

int iso_weeks_in_year(int iso_year) {
  // December 28 always falls in the last ISO week of its year.
  return week_of_day(days_of(iso_year, 12, 28)).iso_week;
}

bool is_valid_week(WeekKey week) {
  return week.iso_week >= 1 && week.iso_week <= iso_weeks_in_year(week.iso_year);
}

WeekKey week_of(std::int64_t epoch_seconds) {
  return week_of_day(floor_div(epoch_seconds, kSecondsPerDay));
}

std::int64_t week_monday(WeekKey week) {
  std::int64_t jan4 = days_of(week.iso_year, 1, 4);
  return jan4 - weekday_from_monday(jan4) + 7 * static_cast<std::int64_t>(week.iso_week - 1);
}

WeekKey next_week(WeekKey week) { return week_of_day(week_monday(week) + 7); }

std::string to_string(WeekKey week) {
  std::string w = std::to_string(week.iso_week);
  if (w.size() < 2) w.insert(0, "0");
  return std::to_string(week.iso_year) + "-W" + w;
}

std::size_t BinSeries::total_posts() const noexcept {
  std::size_t n = 0;
  for (const auto& b : bins) n += b.post_count();
  return n;
}

const WeekBin* BinSeries::find(WeekKey week) const noexcept {
  auto it = std::lower_bound(bins.begin(), bins.end(), week,
                             [](const WeekBin& b, WeekKey w) { return b.week < w; });
  return (it != bins.end() && it->week == week) ? &*it : nullptr;
}

void IngestStats::diagnose(std::string message) {
  if (diagnostics.size() < kMaxDiagnostics) diagnostics.push_back(std::move(message));
}

std::optional<Post> parse_post_line(std::string_view line, const ParseOptions& options,
                                    IngestStats& stats, std::size_t line_no) {
  ++stats.lines;
  auto malformed = [&](const char* why) -> std::optional<Post> {
    ++stats.malformed;
    stats.diagnose("line " + std::to_string(line_no) + ": " + why);
    return std::nullopt;
  };

  json obj = json::parse(line.begin(), line.end(), nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) return malformed("not a JSON object");

  auto id = obj.find("id");
  if (id == obj.end() || !id->is_string() || id->get_ref<const std::string&>().empty())
    return malformed("missing or empty id");
  auto sub = obj.find("subreddit");
  if (sub == obj.end() || !sub->is_string() || sub->get_ref<const std::string&>().empty())
    return malformed("missing subreddit");
  auto ts = obj.find("created_utc");
  if (ts == obj.end()) return malformed("missing created_utc");
  auto created = epoch_field(*ts);
  if (!created || *created < 0) return malformed("invalid created_utc");

  std::string title = string_field(obj, "title");
  std::string body = string_field(obj, "selftext");
  if (is_placeholder(title)) title.clear();
  if (is_placeholder(body)) body.clear();

  Post post;
  post.id = id->get<std::string>();
  post.community = sub->get<std::string>();
  post.created_utc = *created;
  if (!title.empty() && !body.empty())
    post.text = title + " " + body;
  else
    post.text = title.empty() ? std::move(body) : std::move(title);

  if (options.drop_empty && post.text.empty()) {
    ++stats.dropped_empty;
    return std::nullopt;
  }
  ++stats.parsed;
  return post;
}

std::string format_post_line(const Post& post) {
  json obj = {{"id", post.id},
              {"subreddit", post.community},
              {"created_utc", post.created_utc},
              {"title", post.text},
              {"selftext", ""}};
  return obj.dump();
}

CommunityFilter::CommunityFilter(std::vector<std::string> keywords) {
  if (keywords.empty()) throw Error("community filter needs at least one keyword");
  for (auto& k : keywords) {
    if (k.empty()) throw Error("community filter keywords must be nonempty");
    keywords_.push_back(lower(k));
  }
}

bool CommunityFilter::matches(std::string_view community) const {
  std::string name = lower(community);
  return std::any_of(keywords_.begin(), keywords_.end(),
                     [&](const std::string& k) { return name.find(k) != std::string::npos; });
}

std::vector<Post> filter_communities(std::vector<Post> posts,
                                     const std::vector<std::string>& keywords) {
  CommunityFilter filter(keywords);
  std::erase_if(posts, [&](const Post& p) { return !filter.matches(p.community); });
  return posts;
}

void read_posts(const std::string& path, const ParseOptions& options,
                const CommunityFilter* filter, IngestStats& stats,
                const std::function<void(Post&&)>& sink) {
  // gzopen reads uncompressed files transparently.
  gzFile file = gzopen(path.c_str(), "rb");
  if (!file) throw Error("cannot open " + path);
  gzbuffer(file, 1 << 18);

  std::string line;
  std::vector<char> buf(1 << 16);
  std::size_t line_no = 0;
  auto flush = [&] {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      line.clear();
      return;
    }
    auto post = parse_post_line(line, options, stats, line_no);
    line.clear();
    if (!post) return;
    if (filter && !filter->matches(post->community)) {
      ++stats.filtered_out;
      return;
    }
    sink(std::move(*post));
  };

  while (gzgets(file, buf.data(), static_cast<int>(buf.size())) != nullptr) {
    std::string_view chunk(buf.data());
    bool eol = !chunk.empty() && chunk.back() == '\n';
    if (eol) chunk.remove_suffix(1);
    line.append(chunk);
    if (eol) flush();
  }
  int err = 0;
  const char* msg = gzerror(file, &err);
  std::string error = (err != Z_OK && err != Z_STREAM_END) ? std::string(msg) : std::string();
  gzclose(file);
  if (!line.empty()) flush();
  if (!error.empty()) throw Error("read error in " + path + ": " + error);
}

std::vector<Post> read_posts(std::span<const std::string> paths, const ParseOptions& options,
                             const CommunityFilter* filter, IngestStats& stats) {
  std::vector<Post> out;
  std::unordered_set<std::string> ids;
  for (const auto& path : paths) {
    read_posts(path, options, filter, stats, [&](Post&& p) {
      if (!ids.insert(p.id).second) {
        ++stats.duplicates;
        stats.diagnose(path + ": duplicate id " + p.id);
        return;
      }
      out.push_back(std::move(p));
    });
  }
  return out;
}

std::vector<BinSeries> bin_weekly(std::span<const Post> posts, BinScope scope) {
  std::vector<BinSeries> out;
  if (posts.empty()) {
    if (scope == BinScope::global) out.push_back(BinSeries{Scope::whole(), {}});
    return out;
  }

  std::int64_t first = INT64_MAX;
  std::int64_t last = INT64_MIN;
  std::vector<std::int64_t> monday(posts.size());
  for (std::size_t i = 0; i < posts.size(); ++i) {
    monday[i] = week_monday(week_of(posts[i].created_utc));
    first = std::min(first, monday[i]);
    last = std::max(last, monday[i]);
  }
  const std::size_t n_weeks = static_cast<std::size_t>((last - first) / 7 + 1);

  auto empty_series = [&](Scope s) {
    BinSeries series{std::move(s), {}};
    series.bins.reserve(n_weeks);
    for (std::size_t w = 0; w < n_weeks; ++w)
      series.bins.push_back(WeekBin{week_of_day(first + 7 * static_cast<std::int64_t>(w)), {}});
    return series;
  };

  if (scope == BinScope::global) {
    out.push_back(empty_series(Scope::whole()));
    for (std::size_t i = 0; i < posts.size(); ++i)
      out[0].bins[static_cast<std::size_t>((monday[i] - first) / 7)].post_ids.push_back(posts[i].id);
    return out;
  }

  std::map<std::string, std::size_t> index;
  for (const auto& p : posts) index.emplace(p.community, 0);
  for (auto& [name, slot] : index) {
    slot = out.size();
    out.push_back(empty_series(Scope::of(name)));
  }
  for (std::size_t i = 0; i < posts.size(); ++i) {
    auto& series = out[index[posts[i].community]];
    series.bins[static_cast<std::size_t>((monday[i] - first) / 7)].post_ids.push_back(posts[i].id);
  }
  return out;
}

std::vector<std::pair<std::string, std::size_t>> community_census(std::span<const Post> posts) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& p : posts) ++counts[p.community];
  std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return out;
}

void write_bins_csv(std::ostream& out, std::span<const BinSeries> series) {
  out << "scope,iso_year,iso_week,post_count\n";
  for (const auto& s : series)
    for (const auto& b : s.bins)
      csv::write_row(out, {s.scope.label(), std::to_string(b.week.iso_year),
                           std::to_string(b.week.iso_week), std::to_string(b.post_count())});
}

void write_post_index_csv(std::ostream& out, std::span<const Post> posts) {
  out << "post_id,community,iso_year,iso_week\n";
  for (const auto& p : posts) {
    WeekKey w = week_of(p.created_utc);
    csv::write_row(out, {p.id, p.community, std::to_string(w.iso_year), std::to_string(w.iso_week)});
  }
}

void write_census_csv(std::ostream& out,
                      std::span<const std::pair<std::string, std::size_t>> census) {
  out << "community,post_count\n";
  for (const auto& [name, n] : census) csv::write_row(out, {name, std::to_string(n)});
}

}  // namespace iol
