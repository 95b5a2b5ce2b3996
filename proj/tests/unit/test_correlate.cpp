#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <gtest/gtest.h>

#include "iol/correlate.hpp"
#include "iol/error.hpp"

using namespace iol;

namespace {

double p_oracle(double rho, std::size_t n) {
  const double df = static_cast<double>(n - 2);
  const double t = std::fabs(rho) * std::sqrt(df / (1.0 - rho * rho));
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

std::vector<std::optional<double>> opt(std::vector<double> v) {
  return {v.begin(), v.end()};
}

}  // namespace

TEST(Pearson, HandCase) {
  std::vector<double> f{1, 2, 3, 4}, g{1, 3, 2, 4};
  EXPECT_NEAR(pearson(f, g), 0.8, 1e-15);
}

TEST(Pearson, PerfectAndAnti) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  std::vector<double> g(50), neg(50);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = d(rng);
    neg[i] = 3.0 - g[i];
  }
  EXPECT_NEAR(pearson(g, g), 1.0, 1e-15);
  EXPECT_NEAR(pearson(neg, g), -1.0, 1e-15);
}

TEST(Pearson, Errors) {
  std::vector<double> two{1, 2}, flat{2, 2, 2}, ok{1, 2, 3};
  EXPECT_THROW(pearson(two, two), Error);
  EXPECT_THROW(pearson(flat, ok), Error);
  EXPECT_THROW(pearson(ok, two), Error);
}

TEST(IncompleteBeta, MatchesBoost) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> a(0.2, 300.0), x(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    double aa = a(rng), bb = i % 2 ? 0.5 : a(rng), xx = x(rng);
    double expect = boost::math::ibeta(aa, bb, xx);
    EXPECT_NEAR(regularized_incomplete_beta(aa, bb, xx), expect, 1e-11 + 1e-9 * expect) << aa << " " << bb << " " << xx;
  }
  EXPECT_EQ(regularized_incomplete_beta(2, 3, 0.0), 0.0);
  EXPECT_EQ(regularized_incomplete_beta(2, 3, 1.0), 1.0);
  EXPECT_THROW(regularized_incomplete_beta(0, 1, 0.5), Error);
}

TEST(PValue, CriticalValue) {
  EXPECT_NEAR(p_value(0.6319, 10), 0.0500, 0.0005);
  EXPECT_EQ(p_value(0.0, 10), 1.0);
  EXPECT_EQ(p_value(0.0, 500), 1.0);
  EXPECT_EQ(p_value(1.0, 10), 0.0);
  EXPECT_EQ(p_value(-1.0, 3), 0.0);
  EXPECT_THROW(p_value(0.5, 2), Error);
  EXPECT_THROW(p_value(1.5, 10), Error);
}

TEST(PValue, MatchesStudentT) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(-0.999, 0.999);
  std::uniform_int_distribution<std::size_t> n(3, 2000);
  for (int i = 0; i < 3000; ++i) {
    double rho = r(rng);
    std::size_t t = n(rng);
    double expect = p_oracle(rho, t);
    EXPECT_NEAR(p_value(rho, t), expect, 1e-10 + 1e-8 * expect) << rho << " " << t;
    EXPECT_EQ(p_value(rho, t), p_value(-rho, t));
  }
}

TEST(CorrelateSeries, PairsAndSkips) {
  auto f = opt({0.1, 0.2, 0.3, 0.4});
  auto g = opt({0.1, 0.3, 0.2, 0.4});
  g[1].reset();
  auto r = correlate_series('c', "X", 9, f, g);
  EXPECT_EQ(r.paired_weeks, 3u);
  ASSERT_TRUE(r.rho);
  EXPECT_FALSE(r.skipped());

  std::vector<std::optional<double>> gaps(4);
  auto s = correlate_series('c', "Y", 0, f, gaps);
  EXPECT_TRUE(s.skipped());
  EXPECT_EQ(s.skipped_reason, "insufficient data");
  EXPECT_FALSE(s.significant);

  auto flat = opt({0.5, 0.5, 0.5, 0.5});
  EXPECT_EQ(correlate_series('a', "Z", 1, flat, f).skipped_reason, "zero variance");
}

TEST(CorrelateSeries, Csv) {
  std::vector<CorrelationResult> rs(1);
  rs[0].scheme = 'b';
  rs[0].community = "CoronavirusUK";
  rs[0].community_size = 12;
  rs[0].paired_weeks = 4;
  rs[0].rho = 0.8;
  rs[0].p_value = 0.2;
  std::ostringstream out;
  write_correlation_csv(out, rs);
  EXPECT_EQ(out.str(),
            "scheme,community,community_size,T,rho,p_value,significant,skipped_reason\n"
            "b,CoronavirusUK,12,4,0.8,0.2,0,\n");
}

namespace {

struct Fixture {
  std::vector<BinSeries> community;
  BinSeries global;
  TopicAssignment topics;
  VeracityAssignment veracity;
};

// One community, four weeks with distinct topic shapes and fake shares.
Fixture single_community() {
  Fixture fx;
  BinSeries s{Scope::of("Only"), {}};
  WeekKey w{2020, 20};
  const std::vector<std::vector<int>> topics{{0, 0, 1}, {0, 1, 2, 3}, {0, 0, 0, 0, 1}, {0, 1, 1, 2, 2, 2}};
  const std::vector<int> fakes{1, 3, 2, 5};
  int id = 0;
  for (std::size_t i = 0; i < topics.size(); ++i) {
    WeekBin bin{w, {}};
    for (std::size_t j = 0; j < topics[i].size(); ++j) {
      std::string p = std::to_string(id++);
      bin.post_ids.push_back(p);
      fx.topics.post_topic[p] = topics[i][j];
      fx.veracity.post_class[p] = static_cast<int>(j) < fakes[i] ? Veracity::fake : Veracity::truthful;
    }
    s.bins.push_back(bin);
    w = next_week(w);
  }
  fx.community.push_back(s);
  fx.global = s;
  fx.global.scope = Scope::whole();
  return fx;
}

}  // namespace

TEST(RunScheme, SingleCommunityDegeneracy) {
  auto fx = single_community();
  CorrelationInputs in;
  in.community_bins = fx.community;
  in.global_bins = &fx.global;
  in.global_topics = &fx.topics;
  in.community_topics = &fx.topics;
  in.veracity = &fx.veracity;
  auto a = run_scheme(scheme_spec('a'), in);
  auto b = run_scheme(scheme_spec('b'), in);
  auto c = run_scheme(scheme_spec('c'), in);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].rho, c[0].rho);
  EXPECT_EQ(a[0].rho, b[0].rho);
  EXPECT_EQ(c[0].paired_weeks, 4u);
  EXPECT_EQ(c[0].community_size, 18u);
  EXPECT_EQ(c[0].scheme, 'c');
}

TEST(RunScheme, MissingInputs) {
  auto fx = single_community();
  CorrelationInputs in;
  in.community_bins = fx.community;
  in.veracity = &fx.veracity;
  EXPECT_THROW(run_scheme(scheme_spec('c'), in), Error);
  in.community_topics = &fx.topics;
  EXPECT_NO_THROW(run_scheme(scheme_spec('c'), in));
  in.global_topics = &fx.topics;
  EXPECT_THROW(run_scheme(scheme_spec('a'), in), Error);  // no global bins
  EXPECT_THROW(scheme_spec('d'), Error);
}

TEST(RunScheme, AllGapCommunitySkipped) {
  auto fx = single_community();
  BinSeries empty{Scope::of("Empty"), fx.community[0].bins};
  for (auto& b : empty.bins) b.post_ids.clear();
  fx.community.push_back(empty);
  CorrelationInputs in;
  in.community_bins = fx.community;
  in.community_topics = &fx.topics;
  in.veracity = &fx.veracity;
  auto r = run_scheme(scheme_spec('c'), in);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_FALSE(r[0].skipped());
  EXPECT_TRUE(r[1].skipped());
  EXPECT_EQ(r[1].paired_weeks, 0u);
}
