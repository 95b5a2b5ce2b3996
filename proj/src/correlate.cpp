#include "iol/correlate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "iol/csv.hpp"
#include "iol/error.hpp"

namespace iol {

PairedSeries pair_series(std::span<const std::optional<double>> first,
                         std::span<const std::optional<double>> second) {
  if (first.size() != second.size())
    throw Error("series lengths differ (" + std::to_string(first.size()) + " vs " +
                std::to_string(second.size()) + ")");
  PairedSeries out;
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (!first[i] || !second[i]) continue;
    out.first.push_back(*first[i]);
    out.second.push_back(*second[i]);
  }
  return out;
}

double pearson(std::span<const double> f, std::span<const double> g) {
  if (f.size() != g.size()) throw Error("series lengths differ");
  if (f.size() < kMinPairedWeeks) throw Error("insufficient data");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(f) || constant(g)) throw Error("zero variance");

  const auto n = static_cast<double>(f.size());
  double mf = 0.0, mg = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    mf += f[i];
    mg += g[i];
  }
  mf /= n;
  mg /= n;
  double sfg = 0.0, sff = 0.0, sgg = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double df = f[i] - mf;
    const double dg = g[i] - mg;
    sfg += df * dg;
    sff += df * df;
    sgg += dg * dg;
  }
  if (sff <= 0.0 || sgg <= 0.0) throw Error("zero variance");
  return std::clamp(sfg / std::sqrt(sff * sgg), -1.0, 1.0);
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) return h;
  }
  throw Error("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw Error("incomplete beta needs a, b > 0");
  if (x < 0.0 || x > 1.0) throw Error("incomplete beta needs 0 <= x <= 1");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double p_value(double rho, std::size_t t) {
  if (t < kMinPairedWeeks) throw Error("p-value needs at least 3 paired points");
  if (!(std::fabs(rho) <= 1.0)) throw Error("|rho| must not exceed 1");
  if (std::fabs(rho) == 1.0) return 0.0;
  if (rho == 0.0) return 1.0;
  const double df = static_cast<double>(t - 2);
  // df / (df + t_stat^2) simplifies to 1 - rho^2.
  const double x = (1.0 - rho) * (1.0 + rho);
  return std::clamp(regularized_incomplete_beta(df / 2.0, 0.5, x), 0.0, 1.0);
}

SchemeSpec scheme_spec(char name) {
  switch (name) {
    case 'a': return {'a', TopicScope::global, true};
    case 'b': return {'b', TopicScope::global, false};
    case 'c': return {'c', TopicScope::per_community, false};
    default: throw Error(std::string("unknown scheme '") + name + "' (expected a, b or c)");
  }
}

CorrelationResult correlate_series(char scheme, std::string community, std::size_t community_size,
                                   std::span<const std::optional<double>> fake,
                                   std::span<const std::optional<double>> gini) {
  CorrelationResult r;
  r.scheme = scheme;
  r.community = std::move(community);
  r.community_size = community_size;
  auto paired = pair_series(fake, gini);
  r.paired_weeks = paired.first.size();
  try {
    double rho = pearson(paired.first, paired.second);
    r.rho = rho;
    r.p_value = p_value(rho, r.paired_weeks);
    r.significant = *r.p_value < kSignificanceLevel;
  } catch (const Error& e) {
    r.rho.reset();
    r.p_value.reset();
    r.significant = false;
    r.skipped_reason = e.what();
  }
  return r;
}

std::vector<CorrelationResult> run_scheme(const SchemeSpec& scheme, const CorrelationInputs& inputs) {
  const TopicAssignment* topics =
      scheme.topic_scope == TopicScope::global ? inputs.global_topics : inputs.community_topics;
  if (!topics)
    throw Error(std::string("scheme ") + scheme.name + " needs " + to_string(scheme.topic_scope) +
                " topic labels");
  if (!inputs.veracity) throw Error(std::string("scheme ") + scheme.name + " needs veracity labels");

  std::vector<std::optional<double>> global_f;
  if (scheme.global_fake_fraction) {
    if (!inputs.global_bins) throw Error(std::string("scheme ") + scheme.name + " needs global bins");
    for (const auto& e : fake_fraction(*inputs.veracity, *inputs.global_bins).entries)
      global_f.push_back(e.fake_fraction);
  }

  std::vector<CorrelationResult> out(inputs.community_bins.size());
  const auto n = static_cast<std::int64_t>(out.size());
  std::vector<std::string> errors(out.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t ci = 0; ci < n; ++ci) {
    const auto i = static_cast<std::size_t>(ci);
    const BinSeries& bins = inputs.community_bins[i];
    try {
      std::vector<std::optional<double>> g, f;
      for (const auto& e : overload_series(*topics, bins, inputs.overload).entries) g.push_back(e.gini);
      if (scheme.global_fake_fraction) {
        if (global_f.size() != g.size())
          throw Error("community " + bins.scope.community + " is not aligned with the global weeks");
        f = global_f;
      } else {
        for (const auto& e : fake_fraction(*inputs.veracity, bins).entries) f.push_back(e.fake_fraction);
      }
      out[i] = correlate_series(scheme.name, bins.scope.label(), bins.total_posts(), f, g);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw Error(e);
  return out;
}

void write_correlation_csv(std::ostream& out, std::span<const CorrelationResult> results) {
  out << "scheme,community,community_size,T,rho,p_value,significant,skipped_reason\n";
  for (const auto& r : results)
    csv::write_row(out, {std::string(1, r.scheme), r.community, std::to_string(r.community_size),
                         std::to_string(r.paired_weeks), csv::format_optional(r.rho),
                         csv::format_optional(r.p_value), r.significant ? "1" : "0",
                         r.skipped_reason});
}

}  // namespace iol
