#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "iol/histogram.hpp"
#include "iol/ingest.hpp"

namespace iol {

struct TopicAssignment;

enum class GiniVariant {
  exact,              // sum (2i - TC - 1) x_i / (TC * PC), x ascending
  rewritten,          // 2 sum i x_i / (TC * PC) - (TC + 1) / TC
  degenerate_approx,  // 1 - TC / PC
  bias_corrected,     // exact * TC / (TC - 1); 0 when TC == 1
};

std::string to_string(GiniVariant v);
GiniVariant parse_gini_variant(const std::string& name);

struct GiniResult {
  double value = 0.0;
  std::int64_t topic_count = 0;
  std::int64_t post_count = 0;
  GiniVariant variant = GiniVariant::exact;
};

// The exact form accumulates its numerator in 128-bit integers and performs a
// single division. Every entry point re-sorts the histogram, so a caller that
// builds TopicHistogram by hand in the wrong order still gets the right value.
GiniResult gini(const TopicHistogram& x);
GiniResult gini_rewritten(const TopicHistogram& x);
GiniResult gini_bias_corrected(const TopicHistogram& x);
GiniResult gini_variant(const TopicHistogram& x, GiniVariant variant);

// Single-dominant-topic approximation; requires 1 <= TC <= PC.
double gini_degenerate_approx(std::int64_t topic_count, std::int64_t post_count);

// Natural-log Shannon entropy of the topic shares.
double shannon_entropy(const TopicHistogram& x);

struct OverloadOptions {
  bool include_outliers = false;
  GiniVariant variant = GiniVariant::exact;
};

// Gap weeks (no posts, or nothing left after dropping outliers) carry no
// topic_count/ratio/gini/entropy.
struct OverloadEntry {
  WeekKey week;
  std::int64_t post_count = 0;
  std::optional<std::int64_t> topic_count;
  std::optional<double> ratio;
  std::optional<double> gini;
  std::optional<double> entropy;

  bool is_gap() const noexcept { return !gini.has_value(); }
  bool operator==(const OverloadEntry&) const = default;
};

struct OverloadSeries {
  Scope scope;
  std::vector<OverloadEntry> entries;
};

OverloadSeries overload_series(const TopicAssignment& assignment, const BinSeries& bins,
                               const OverloadOptions& options = {});

// `scope,iso_year,iso_week,post_count,topic_count,ratio,gini` with empty
// metric cells for gap weeks.
void write_overload_csv(std::ostream& out, std::span<const OverloadSeries> series);

// Mean with a normal-approximation 95% band (mean +- 1.96 s / sqrt(n)) over
// whichever values are present; the band is absent for n < 2.
struct BandPoint {
  std::size_t n = 0;
  std::optional<double> mean;
  std::optional<double> low;
  std::optional<double> high;
};
BandPoint confidence_band(std::span<const double> values);

}  // namespace iol
