#include "iol/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "iol/csv.hpp"
#include "iol/error.hpp"
#include "iol/kernels.hpp"
#include "iol/topic_model.hpp"

namespace iol {

TopicHistogram TopicHistogram::from_counts(std::vector<std::int64_t> counts) {
  if (counts.empty()) throw Error("empty histogram");
  for (auto c : counts)
    if (c < 1) throw Error("topic histogram counts must be positive");
  std::sort(counts.begin(), counts.end());
  return TopicHistogram{std::move(counts)};
}

TopicHistogram TopicHistogram::from_counts_dropping_zeros(std::vector<std::int64_t> counts) {
  std::erase(counts, 0);
  return from_counts(std::move(counts));
}

std::int64_t TopicHistogram::post_count() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::string to_string(GiniVariant v) {
  switch (v) {
    case GiniVariant::exact: return "exact";
    case GiniVariant::rewritten: return "rewritten";
    case GiniVariant::degenerate_approx: return "degenerate_approx";
    case GiniVariant::bias_corrected: return "bias_corrected";
  }
  return "exact";
}

GiniVariant parse_gini_variant(const std::string& name) {
  for (auto v : {GiniVariant::exact, GiniVariant::rewritten, GiniVariant::degenerate_approx,
                 GiniVariant::bias_corrected})
    if (to_string(v) == name) return v;
  throw Error("unknown Gini variant '" + name + "'");
}

namespace {

// Ascending copy; validates the histogram invariants.
std::vector<std::int64_t> sorted_counts(const TopicHistogram& x) {
  if (x.counts.empty()) throw Error("empty histogram");
  std::vector<std::int64_t> v = x.counts;
  for (auto c : v)
    if (c < 1) throw Error("topic histogram counts must be positive");
  if (!std::is_sorted(v.begin(), v.end())) std::sort(v.begin(), v.end());
  return v;
}

double ratio_of(__int128 num, __int128 den) {
  constexpr __int128 kExact = __int128{1} << 53;
  if (num < kExact && num > -kExact && den < kExact)
    return static_cast<double>(num) / static_cast<double>(den);
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

}  // namespace

GiniResult gini(const TopicHistogram& x) {
  auto v = sorted_counts(x);
  const auto tc = static_cast<__int128>(v.size());
  __int128 num = 0;
  __int128 pc = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const __int128 rank = static_cast<__int128>(i) + 1;
    num += (2 * rank - tc - 1) * v[i];
    pc += v[i];
  }
  return {ratio_of(num, tc * pc), static_cast<std::int64_t>(tc), static_cast<std::int64_t>(pc),
          GiniVariant::exact};
}

GiniResult gini_rewritten(const TopicHistogram& x) {
  auto v = sorted_counts(x);
  const double tc = static_cast<double>(v.size());
  double weighted = 0.0;
  double pc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    weighted += static_cast<double>(i + 1) * static_cast<double>(v[i]);
    pc += static_cast<double>(v[i]);
  }
  double g = 2.0 * weighted / (tc * pc) - (tc + 1.0) / tc;
  return {g, static_cast<std::int64_t>(v.size()), static_cast<std::int64_t>(pc),
          GiniVariant::rewritten};
}

GiniResult gini_bias_corrected(const TopicHistogram& x) {
  GiniResult r = gini(x);
  r.variant = GiniVariant::bias_corrected;
  if (r.topic_count < 2) {
    r.value = 0.0;
    return r;
  }
  const auto tc = static_cast<double>(r.topic_count);
  r.value = r.value * tc / (tc - 1.0);
  return r;
}

double gini_degenerate_approx(std::int64_t topic_count, std::int64_t post_count) {
  if (topic_count < 1) throw Error("degenerate approximation needs TC >= 1");
  if (topic_count > post_count) throw Error("degenerate approximation needs TC <= PC");
  return 1.0 - static_cast<double>(topic_count) / static_cast<double>(post_count);
}

GiniResult gini_variant(const TopicHistogram& x, GiniVariant variant) {
  switch (variant) {
    case GiniVariant::exact: return gini(x);
    case GiniVariant::rewritten: return gini_rewritten(x);
    case GiniVariant::bias_corrected: return gini_bias_corrected(x);
    case GiniVariant::degenerate_approx: {
      auto v = sorted_counts(x);
      auto tc = static_cast<std::int64_t>(v.size());
      auto pc = std::accumulate(v.begin(), v.end(), std::int64_t{0});
      return {gini_degenerate_approx(tc, pc), tc, pc, variant};
    }
  }
  return gini(x);
}

double shannon_entropy(const TopicHistogram& x) {
  auto v = sorted_counts(x);
  double pc = 0.0;
  for (auto c : v) pc += static_cast<double>(c);
  double h = 0.0;
  for (auto c : v) {
    double p = static_cast<double>(c) / pc;
    h -= p * std::log(p);
  }
  return h;
}

OverloadSeries overload_series(const TopicAssignment& assignment, const BinSeries& bins,
                               const OverloadOptions& options) {
  OverloadSeries out{bins.scope, {}};
  out.entries.reserve(bins.bins.size());
  std::vector<TopicHistogram> histograms;
  std::vector<std::size_t> where;
  for (const auto& bin : bins.bins) {
    OverloadEntry e;
    e.week = bin.week;
    e.post_count = static_cast<std::int64_t>(bin.post_count());
    if (auto h = topic_histogram(assignment, bin.post_ids, options.include_outliers)) {
      e.topic_count = h->topic_count();
      e.ratio = static_cast<double>(h->topic_count()) / static_cast<double>(e.post_count);
      e.entropy = shannon_entropy(*h);
      where.push_back(out.entries.size());
      histograms.push_back(std::move(*h));
    }
    out.entries.push_back(std::move(e));
  }

  if (options.variant == GiniVariant::exact) {
    auto g = kernels::omp::gini_batch(histograms);
    for (std::size_t i = 0; i < where.size(); ++i) out.entries[where[i]].gini = g[i];
  } else {
    for (std::size_t i = 0; i < where.size(); ++i)
      out.entries[where[i]].gini = gini_variant(histograms[i], options.variant).value;
  }
  return out;
}

void write_overload_csv(std::ostream& out, std::span<const OverloadSeries> series) {
  out << "scope,iso_year,iso_week,post_count,topic_count,ratio,gini\n";
  for (const auto& s : series) {
    for (const auto& e : s.entries) {
      csv::write_row(out, {s.scope.label(), std::to_string(e.week.iso_year),
                           std::to_string(e.week.iso_week), std::to_string(e.post_count),
                           e.topic_count ? std::to_string(*e.topic_count) : std::string(),
                           csv::format_optional(e.ratio), csv::format_optional(e.gini)});
    }
  }
}

BandPoint confidence_band(std::span<const double> values) {
  BandPoint b;
  b.n = values.size();
  if (values.empty()) return b;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  b.mean = mean;
  if (values.size() < 2) return b;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  double half = 1.96 * sd / std::sqrt(static_cast<double>(values.size()));
  b.low = mean - half;
  b.high = mean + half;
  return b;
}

}  // namespace iol
