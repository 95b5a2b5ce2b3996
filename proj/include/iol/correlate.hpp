#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "iol/ingest.hpp"
#include "iol/metrics.hpp"
#include "iol/topic_model.hpp"
#include "iol/veracity.hpp"

namespace iol {

inline constexpr double kSignificanceLevel = 0.05;
inline constexpr std::size_t kMinPairedWeeks = 3;

// Drops every index where either series has a gap. Lengths must match.
struct PairedSeries {
  std::vector<double> first;
  std::vector<double> second;
};
PairedSeries pair_series(std::span<const std::optional<double>> first,
                         std::span<const std::optional<double>> second);

// Sample Pearson correlation. Throws Error("insufficient data") below three
// points and Error("zero variance") for a constant series.
double pearson(std::span<const double> f, std::span<const double> g);

// I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided p-value of rho over `t` paired points:
// t = rho sqrt((T - 2) / (1 - rho^2)), df = T - 2.
double p_value(double rho, std::size_t t);

struct CorrelationResult {
  char scheme = 'c';
  std::string community;
  std::size_t community_size = 0;
  std::size_t paired_weeks = 0;
  std::optional<double> rho;
  std::optional<double> p_value;
  bool significant = false;
  std::string skipped_reason;  // empty when rho was computed

  bool skipped() const noexcept { return !skipped_reason.empty(); }
  bool operator==(const CorrelationResult&) const = default;
};

// Which topic fit and which fake-fraction series a scheme pairs.
struct SchemeSpec {
  char name = 'c';
  TopicScope topic_scope = TopicScope::per_community;
  bool global_fake_fraction = false;
};

// a: global topics, dataset-wide f_t; b: global topics, per-community f_t;
// c: per-community topics, per-community f_t.
SchemeSpec scheme_spec(char name);

struct CorrelationInputs {
  std::span<const BinSeries> community_bins;  // aligned with global_bins
  const BinSeries* global_bins = nullptr;     // needed when global_fake_fraction
  const TopicAssignment* global_topics = nullptr;
  const TopicAssignment* community_topics = nullptr;
  const VeracityAssignment* veracity = nullptr;
  OverloadOptions overload;
};

// One result per community, in the order of `community_bins`; communities
// without three usable paired weeks (or with a constant series) are reported
// as skipped.
std::vector<CorrelationResult> run_scheme(const SchemeSpec& scheme, const CorrelationInputs& inputs);

// Correlates precomputed weekly series for one community.
CorrelationResult correlate_series(char scheme, std::string community, std::size_t community_size,
                                   std::span<const std::optional<double>> fake,
                                   std::span<const std::optional<double>> gini);

// `scheme,community,community_size,T,rho,p_value,significant,skipped_reason`
void write_correlation_csv(std::ostream& out, std::span<const CorrelationResult> results);

}  // namespace iol
