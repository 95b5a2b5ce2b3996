#include <algorithm>
#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "iol/correlate.hpp"
#include "iol/error.hpp"
#include "iol/metrics.hpp"
#include "iol/synth.hpp"
#include "util.hpp"

using namespace iol;
using namespace iol::synth;

namespace {

// Gini over raw counts, zeros allowed (pairwise form).
double gini_with_zeros(const std::vector<std::int64_t>& x) {
  long double diff = 0, total = 0;
  for (auto a : x) {
    total += a;
    for (auto b : x) diff += std::llabs(a - b);
  }
  return static_cast<double>(diff / (2.0L * x.size() * total));
}

SynthConfig small() {
  SynthConfig c;
  c.communities = 3;
  c.weeks = 8;
  c.posts_per_week = 25;
  c.topics_per_community = 5;
  c.training_rows = 30;
  return c;
}

}  // namespace

TEST(GenTopicCounts, Basics) {
  auto h = gen_topic_counts(1, 500, 0.5, 1);
  EXPECT_EQ(h.counts, std::vector<std::int64_t>{500});
  EXPECT_EQ(gini(h).value, 0.0);
  for (std::uint64_t s = 1; s <= 20; ++s) {
    auto x = gen_topic_counts(30, 1000, 0.3, s);
    EXPECT_EQ(x.post_count(), 1000);
    EXPECT_LE(x.topic_count(), 30);
    EXPECT_TRUE(std::is_sorted(x.counts.begin(), x.counts.end()));
    EXPECT_EQ(x, gen_topic_counts(30, 1000, 0.3, s));
  }
  EXPECT_THROW(gen_topic_counts(11, 10, 1.0, 1), Error);
  EXPECT_THROW(gen_topic_counts(0, 10, 1.0, 1), Error);
}

TEST(GenTopicCounts, NearUniformLimit) {
  for (std::uint64_t s = 1; s <= 100; ++s) {
    auto h = gen_topic_counts(50, 100000, 1e6, s);
    EXPECT_EQ(h.topic_count(), 50);
    EXPECT_LT(gini(h).value, 0.05);
  }
}

TEST(GenTopicCounts, SparseConcentration) {
  // With alpha = 0.01 most of the 50 topics receive no post at all. Counting
  // those empty topics the draws are highly unequal; over the occupied topics
  // alone they are less so (see the README note on this regime).
  std::size_t over_with_zeros = 0, over_occupied = 0;
  std::vector<double> occupied;
  for (std::uint64_t s = 1; s <= 100; ++s) {
    std::mt19937_64 rng(s);
    auto raw = draw_topic_counts(50, 100000, 0.01, rng);
    over_with_zeros += gini_with_zeros(raw) > 0.7;
    double g = gini(TopicHistogram::from_counts_dropping_zeros(raw)).value;
    occupied.push_back(g);
    over_occupied += g > 0.7;
  }
  EXPECT_GE(over_with_zeros, 95u);
  std::nth_element(occupied.begin(), occupied.begin() + 50, occupied.end());
  EXPECT_GT(occupied[50], 0.6);
  EXPECT_GE(over_occupied, 50u);
}

TEST(PlantCorrelation, NoiseFreeLimit) {
  std::vector<double> g;
  for (int i = 0; i < 200; ++i) g.push_back(0.3 + 0.1 * std::sin(i * 0.7));
  auto p = plant_correlation(g, 1.0, 0.5, 0.05, 3);
  EXPECT_EQ(p.clipped_fraction, 0.0);
  EXPECT_NEAR(pearson(p.fake_fraction, g), 1.0, 1e-12);
}

TEST(PlantCorrelation, IndependentNull) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> g(10000);
  for (auto& x : g) x = u(rng);
  auto p = plant_correlation(g, 0.0, 0.5, 0.1, 5);
  EXPECT_LE(std::fabs(pearson(p.fake_fraction, g)), 2.0 / std::sqrt(10000.0));
}

TEST(PlantCorrelation, RecoveryAtFiveHundredWeeks) {
  std::size_t inside = 0;
  for (std::uint64_t s = 1; s <= 100; ++s) {
    auto h_seed = s * 7919;
    std::vector<double> g;
    for (int w = 0; w < 500; ++w) g.push_back(gini(gen_topic_counts(20, 100, 0.5, h_seed + w)).value);
    auto p = plant_correlation(g, 0.9, 0.4, 0.15, s);
    double r = pearson(p.fake_fraction, g);
    inside += r >= 0.8 && r <= 0.97;
  }
  EXPECT_GE(inside, 95u);
}

TEST(PlantCorrelation, Errors) {
  std::vector<double> flat(10, 0.2);
  EXPECT_THROW(plant_correlation(flat, 0.5, 0.4, 0.1, 1), Error);
  std::vector<double> g{0.1, 0.2, 0.3};
  EXPECT_THROW(plant_correlation(g, 1.5, 0.4, 0.1, 1), Error);
  auto p = plant_correlation(g, 0.5, 0.0, 10.0, 1);
  for (double f : p.fake_fraction) {
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
  }
  EXPECT_GT(p.clipped_fraction, 0.0);
}

TEST(GenStream, ShapeAndGroundTruth) {
  auto cfg = small();
  auto ds = gen_stream(cfg);
  ASSERT_EQ(ds.communities.size(), 3u);
  EXPECT_EQ(ds.communities[0], "CovidSynth00");
  EXPECT_EQ(ds.posts.size(), ds.topics.post_topic.size());
  EXPECT_EQ(ds.posts.size(), ds.veracity.post_class.size());
  EXPECT_EQ(ds.training.size(), 30u);

  auto bins = bin_weekly(ds.posts, BinScope::per_community);
  ASSERT_EQ(bins.size(), 3u);
  for (std::size_t c = 0; c < bins.size(); ++c) {
    ASSERT_EQ(bins[c].bins.size(), 8u);
    EXPECT_EQ(bins[c].scope.community, ds.communities[c]);
    for (std::size_t w = 0; w < 8; ++w) {
      auto h = topic_histogram(ds.topics, bins[c].bins[w].post_ids);
      ASSERT_TRUE(h);
      EXPECT_EQ(*h, ds.histograms[c][w]);
      EXPECT_EQ(gini(*h).value, ds.gini[c][w]);
    }
  }
}

TEST(GenStream, FiftyTwoWeeksTenCommunities) {
  SynthConfig cfg;
  cfg.emit_text = false;
  cfg.posts_per_week = 5;
  cfg.training_rows = 0;
  auto ds = gen_stream(cfg);
  auto bins = bin_weekly(ds.posts, BinScope::per_community);
  ASSERT_EQ(bins.size(), 10u);
  for (const auto& s : bins) {
    ASSERT_EQ(s.bins.size(), 52u);
    EXPECT_EQ(s.bins.front().week, (WeekKey{2020, 2}));
    EXPECT_GT(s.bins.back().post_count(), 0u);
  }
}

TEST(GenStream, SeedDeterminesBytes) {
  test::TempDir dir;
  auto cfg = small();
  auto a = write_dataset(gen_stream(cfg), dir.file("a"));
  auto b = write_dataset(gen_stream(cfg), dir.file("b"));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(test::read_file(a[i]), test::read_file(b[i])) << a[i];
  cfg.seed = 2;
  auto c = write_dataset(gen_stream(cfg), dir.file("c"));
  EXPECT_NE(test::read_file(a[0]), test::read_file(c[0]));
}

TEST(GenStream, DisjointVocabularies) {
  auto ds = gen_stream(small());
  // every topical word belongs to the post's own ground-truth topic
  std::unordered_map<int, int> raw_of;
  for (const auto& p : ds.posts) {
    auto first = p.text.substr(0, p.text.find(' '));
    ASSERT_EQ(first.rfind("tp", 0), 0u) << p.text;
    int raw = std::stoi(first.substr(2));
    int truth = ds.topics.post_topic.at(p.id);
    auto [it, fresh] = raw_of.emplace(truth, raw);
    EXPECT_EQ(it->second, raw);
  }
}

TEST(GenStream, SingleWeek) {
  auto cfg = small();
  cfg.weeks = 1;
  auto ds = gen_stream(cfg);
  auto g = bin_weekly(ds.posts, BinScope::global);
  EXPECT_EQ(g[0].bins.size(), 1u);
}

TEST(SynthConfigFile, ParseAndRoundTrip) {
  test::TempDir dir;
  test::write_file(dir.file("s.conf"), "# comment\nweeks = 12\n\ncommunities=4\nalpha = 0.25\nemit_text = false\n");
  auto cfg = load_config(dir.file("s.conf"));
  EXPECT_EQ(cfg.weeks, 12);
  EXPECT_EQ(cfg.communities, 4);
  EXPECT_EQ(cfg.alpha, 0.25);
  EXPECT_FALSE(cfg.emit_text);
  test::write_file(dir.file("t.conf"), to_config_text(cfg));
  auto back = load_config(dir.file("t.conf"));
  EXPECT_EQ(to_config_text(back), to_config_text(cfg));

  test::write_file(dir.file("bad.conf"), "weeks = 3\nwobble = 1\n");
  try {
    load_config(dir.file("bad.conf"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  test::write_file(dir.file("bad2.conf"), "weeks = many\n");
  EXPECT_THROW(load_config(dir.file("bad2.conf")), ParseError);
}

TEST(SynthConfigFile, Validation) {
  SynthConfig c;
  c.start_utc += 3600;
  EXPECT_THROW(c.validate(), Error);
  c = SynthConfig{};
  c.weeks = 0;
  EXPECT_THROW(gen_stream(c), Error);
  c = SynthConfig{};
  c.target_rho = 1.2;
  EXPECT_THROW(c.validate(), Error);
}
