#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "iol/error.hpp"
#include "iol/synth.hpp"
#include "iol/topic_model.hpp"
#include "util.hpp"

using namespace iol;

namespace {

std::vector<Post> corpus(const std::vector<std::pair<std::string, int>>& docs, const std::string& community = "c") {
  std::vector<Post> out;
  int id = 0;
  for (const auto& [text, copies] : docs)
    for (int i = 0; i < copies; ++i) out.push_back(Post{"p" + std::to_string(id++), community, 0, text});
  return out;
}

// Share of posts whose predicted topic's majority truth label matches theirs.
double purity(const TopicAssignment& predicted, const TopicAssignment& truth) {
  std::map<int, std::map<int, std::size_t>> overlap;
  for (const auto& [id, t] : predicted.post_topic) ++overlap[t][truth.post_topic.at(id)];
  std::size_t hit = 0;
  for (const auto& [_, row] : overlap) {
    std::size_t best = 0;
    for (const auto& [__, n] : row) best = std::max(best, n);
    hit += best;
  }
  return static_cast<double>(hit) / static_cast<double>(predicted.post_topic.size());
}

double row_norm(const CsrMatrix& m, std::size_t r) {
  double s = 0;
  for (double v : m.row_vals(r)) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST(Vectorize, IdenticalDocsGiveIdenticalRows) {
  std::vector<std::string> texts{"vaccine trial news", "mask mandate", "vaccine trial news"};
  auto m = vectorize(texts);
  EXPECT_TRUE(std::ranges::equal(m.weights.row_cols(0), m.weights.row_cols(2)));
  EXPECT_TRUE(std::ranges::equal(m.weights.row_vals(0), m.weights.row_vals(2)));
}

TEST(Vectorize, SingleDocument) {
  std::vector<std::string> texts{"vaccine trial news vaccine"};
  auto m = vectorize(texts);
  ASSERT_EQ(m.vocabulary, (std::vector<std::string>{"news", "trial", "vaccine"}));
  for (double w : m.idf) EXPECT_EQ(w, m.idf[0]);
  EXPECT_NEAR(row_norm(m.weights, 0), 1.0, 1e-12);
  EXPECT_EQ(m.counts.row_vals(0)[2], 2.0);
}

TEST(Vectorize, HandEvaluatedIdf) {
  std::vector<std::string> texts{"a b", "b c"};
  VectorizerConfig cfg;
  cfg.remove_stopwords = false;
  auto m = vectorize(texts, cfg);
  ASSERT_EQ(m.vocabulary, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_NEAR(m.idf[0], std::log(3.0 / 2.0) + 1.0, 1e-15);
  EXPECT_NEAR(m.idf[1], 1.0, 1e-15);
  EXPECT_LT(m.idf[1], m.idf[0]);
  EXPECT_EQ(m.idf[0], m.idf[2]);
  // row 0: (idf_a, 1) normalized
  const double n = std::hypot(m.idf[0], 1.0);
  EXPECT_NEAR(m.weights.row_vals(0)[0], m.idf[0] / n, 1e-15);
  EXPECT_NEAR(m.weights.row_vals(0)[1], 1.0 / n, 1e-15);
  EXPECT_EQ(m.term_index("c"), 2u);
  EXPECT_FALSE(m.term_index("zzz"));
}

TEST(Vectorize, BigramsAndTransform) {
  std::vector<std::string> texts{"red fox", "lazy dog"};
  VectorizerConfig cfg{true, 2, 1};
  auto m = vectorize(texts, cfg);
  EXPECT_TRUE(m.term_index("red fox"));
  std::vector<std::string> fresh{"red dog unknownword", ""};
  auto t = transform(m, fresh, cfg);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.row_cols(0).size(), 2u);
  EXPECT_EQ(t.row_cols(1).size(), 0u);
  EXPECT_NEAR(row_norm(t, 0), 1.0, 1e-12);
}

TEST(Vectorize, NoVocabularyThrows) {
  std::vector<std::string> texts{"", "the and of"};
  EXPECT_THROW(vectorize(texts), Error);
}

TEST(AutoK, Rule) {
  EXPECT_EQ(auto_topic_count(1), 2);
  EXPECT_EQ(auto_topic_count(800), 20);
  EXPECT_EQ(auto_topic_count(1000000), 200);
}

TEST(FitTopics, SeparableCorpus) {
  auto posts = corpus({{"vaccine dose booster shot", 10}, {"lockdown curfew police fine", 10}});
  TopicModelConfig cfg;
  cfg.k = 2;
  auto fit = fit_topics(posts, cfg);
  auto a = fit.assignment();
  EXPECT_EQ(a.topic_count(), 2);
  EXPECT_EQ(a.outlier_count(), 0u);
  for (int i = 1; i < 10; ++i) EXPECT_EQ(a.post_topic.at("p" + std::to_string(i)), a.post_topic.at("p0"));
  for (int i = 11; i < 20; ++i) EXPECT_EQ(a.post_topic.at("p" + std::to_string(i)), a.post_topic.at("p10"));
  EXPECT_NE(a.post_topic.at("p0"), a.post_topic.at("p10"));
}

TEST(FitTopics, SingleTopicHasNoOutliers) {
  auto posts = corpus({{"vaccine dose", 3}, {"lockdown curfew", 3}, {"", 1}});
  TopicModelConfig cfg;
  cfg.k = 1;
  auto a = fit_topics(posts, cfg).assignment();
  for (const auto& [_, t] : a.post_topic) EXPECT_EQ(t, 0);
}

TEST(FitTopics, KClampedToDistinctDocuments) {
  auto posts = corpus({{"vaccine dose", 4}, {"lockdown curfew", 4}});
  TopicModelConfig cfg;
  cfg.k = 5;
  auto fit = fit_topics(posts, cfg);
  EXPECT_EQ(fit.units[0].k, 2u);
  EXPECT_FALSE(fit.warnings.empty());
}

TEST(FitTopics, EmptyTextBecomesOutlier) {
  auto posts = corpus({{"vaccine dose", 4}, {"lockdown curfew", 4}});
  posts.push_back(Post{"empty", "c", 0, ""});
  TopicModelConfig cfg;
  cfg.k = 2;
  auto a = fit_topics(posts, cfg).assignment();
  EXPECT_EQ(a.post_topic.at("empty"), kOutlierTopic);
}

TEST(FitTopics, UnitWithoutVocabulary) {
  auto posts = corpus({{"", 3}}, "deleted_only");
  auto more = corpus({{"vaccine dose", 3}, {"lockdown curfew", 3}}, "live");
  for (auto& p : more) p.id = "m" + p.id;
  posts.insert(posts.end(), more.begin(), more.end());
  TopicModelConfig cfg;
  cfg.scope = TopicScope::per_community;
  auto fit = fit_topics(posts, cfg);
  auto a = reduce_outliers(fit, OutlierReduction::distribution);
  EXPECT_EQ(a.post_topic.at("p0"), a.post_topic.at("p2"));
  EXPECT_NE(a.post_topic.at("p0"), kOutlierTopic);
}

TEST(FitTopics, DeterministicAndScopeIds) {
  synth::SynthConfig sc;
  sc.communities = 3;
  sc.weeks = 4;
  sc.posts_per_week = 20;
  sc.topics_per_community = 3;
  auto ds = synth::gen_stream(sc);
  TopicModelConfig cfg;
  cfg.scope = TopicScope::per_community;
  cfg.k = 3;
  auto a1 = fit_topics(ds.posts, cfg).assignment();
  auto a2 = fit_topics(ds.posts, cfg).assignment();
  EXPECT_EQ(a1.post_topic, a2.post_topic);
  // per-community fits use disjoint id ranges
  std::map<int, std::set<std::string>> owner;
  for (const auto& p : ds.posts) owner[a1.post_topic.at(p.id)].insert(p.community);
  for (const auto& [t, who] : owner)
    if (t >= 0) EXPECT_EQ(who.size(), 1u);
  EXPECT_GE(a1.topic_count(), 9 - 1);
}

TEST(FitTopics, PerCommunityOnOneCommunityEqualsGlobal) {
  synth::SynthConfig sc;
  sc.communities = 1;
  sc.weeks = 6;
  sc.posts_per_week = 20;
  sc.topics_per_community = 4;
  auto ds = synth::gen_stream(sc);
  TopicModelConfig cfg;
  auto f = fit_topics(ds.posts, cfg).assignment();
  cfg.scope = TopicScope::per_community;
  auto d = fit_topics(ds.posts, cfg).assignment();
  EXPECT_EQ(f.post_topic, d.post_topic);
}

TEST(FitTopics, PlantedThreeClusterPurity) {
  synth::SynthConfig sc;
  sc.communities = 1;
  sc.weeks = 10;
  sc.posts_per_week = 30;
  sc.topics_per_community = 3;
  sc.alpha = 5.0;
  auto ds = synth::gen_stream(sc);
  TopicModelConfig cfg;
  cfg.k = 3;
  auto a = reduce_outliers(fit_topics(ds.posts, cfg), OutlierReduction::distribution);
  EXPECT_GE(purity(a, ds.topics), 0.95);
}

TEST(ReduceOutliers, ZeroOutliersUnchanged) {
  auto posts = corpus({{"vaccine dose booster", 6}, {"lockdown curfew police", 6}});
  TopicModelConfig cfg;
  cfg.k = 2;
  auto fit = fit_topics(posts, cfg);
  ASSERT_EQ(fit.assignment().outlier_count(), 0u);
  for (auto m : {OutlierReduction::distribution, OutlierReduction::centroid})
    EXPECT_EQ(reduce_outliers(fit, m).post_topic, fit.assignment().post_topic);
}

TEST(ReduceOutliers, SingleOutlierOneTopic) {
  auto posts = corpus({{"vaccine dose", 3}, {"lockdown curfew", 1}});
  TopicModelConfig cfg;
  cfg.k = 1;
  auto fit = fit_topics(posts, cfg);
  fit.units[0].outlier[3] = true;
  EXPECT_EQ(fit.assignment().post_topic.at("p3"), kOutlierTopic);
  for (auto m : {OutlierReduction::distribution, OutlierReduction::centroid})
    EXPECT_EQ(reduce_outliers(fit, m).post_topic.at("p3"), 0);
}

TEST(ReduceOutliers, DistributionPicksMatchingVocabulary) {
  auto posts = corpus({{"vaccine dose booster", 5}, {"lockdown curfew police", 5}, {"vaccine police", 0}});
  TopicModelConfig cfg;
  cfg.k = 2;
  auto fit = fit_topics(posts, cfg);
  // pretend one vaccine post fell below the threshold
  fit.units[0].outlier[4] = true;
  auto a = reduce_outliers(fit, OutlierReduction::distribution);
  EXPECT_EQ(a.post_topic.at("p4"), a.post_topic.at("p0"));
  a = reduce_outliers(fit, OutlierReduction::centroid);
  EXPECT_EQ(a.post_topic.at("p4"), a.post_topic.at("p0"));
}

TEST(ReduceOutliers, PlantedNoiseAllAssigned) {
  synth::SynthConfig sc;
  sc.communities = 1;
  sc.weeks = 10;
  sc.posts_per_week = 40;
  sc.topics_per_community = 4;
  sc.alpha = 5.0;
  sc.noise_fraction = 0.1;
  auto ds = synth::gen_stream(sc);
  TopicModelConfig cfg;
  cfg.k = 4;
  auto fit = fit_topics(ds.posts, cfg);
  const int tc = fit.assignment().topic_count();
  for (auto m : {OutlierReduction::distribution, OutlierReduction::centroid}) {
    auto a = reduce_outliers(fit, m);
    EXPECT_EQ(a.outlier_count(), 0u);
    EXPECT_EQ(a.topic_count(), tc);
  }
}

TEST(Assignment, Compact) {
  TopicAssignment a;
  a.post_topic = {{"x", 7}, {"y", 3}, {"z", -1}, {"w", 7}};
  a.compact();
  EXPECT_EQ(a.post_topic.at("y"), 0);
  EXPECT_EQ(a.post_topic.at("x"), 1);
  EXPECT_EQ(a.post_topic.at("z"), -1);
  EXPECT_EQ(a.topic_count(), 2);
  EXPECT_EQ(a.outlier_count(), 1u);
}

TEST(TopicLabels, LoadCompactsAndRoundTrips) {
  test::TempDir dir;
  std::unordered_set<std::string> known{"a", "b", "c", "d"};
  test::write_file(dir.file("t.csv"), "post_id,topic_id\na,4\nb,4\nc,9\n");
  auto a = load_topic_labels(dir.file("t.csv"), known);
  EXPECT_EQ(a.topic_count(), 2);
  EXPECT_EQ(a.post_topic.at("a"), 0);
  EXPECT_EQ(a.post_topic.at("c"), 1);
  EXPECT_TRUE(a.external());

  std::ostringstream out;
  write_topic_labels(out, a);
  EXPECT_EQ(out.str(), "post_id,topic_id\na,0\nb,0\nc,1\n");
  test::write_file(dir.file("u.csv"), out.str());
  EXPECT_EQ(load_topic_labels(dir.file("u.csv"), known).post_topic, a.post_topic);
}

TEST(TopicLabels, Errors) {
  test::TempDir dir;
  std::unordered_set<std::string> known{"a", "b"};
  auto line_of = [&](const std::string& body) -> std::size_t {
    test::write_file(dir.file("t.csv"), body);
    try {
      load_topic_labels(dir.file("t.csv"), known);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("post_id,topic_id\na,0\na,1\n"), 3u);
  EXPECT_EQ(line_of("post_id,topic_id\na,0\nzz,1\n"), 3u);
  EXPECT_EQ(line_of("post_id,topic_id\na,x\n"), 2u);
  EXPECT_EQ(line_of("post_id,topic_id\na,-2\n"), 2u);
  EXPECT_EQ(line_of("id,topic\na,1\n"), 1u);
  EXPECT_EQ(line_of("post_id,topic_id\na,-1\nb,0\n"), 0u);
}

TEST(TopicHistogram, Counting) {
  TopicAssignment a;
  for (auto [id, t] : std::vector<std::pair<std::string, int>>{{"1", 0}, {"2", 0}, {"3", 0}, {"4", 1}, {"5", 2}})
    a.post_topic[id] = t;
  std::vector<std::string> ids{"1", "2", "3", "4", "5"};
  auto h = topic_histogram(a, ids);
  ASSERT_TRUE(h);
  EXPECT_EQ(h->counts, (std::vector<std::int64_t>{1, 1, 3}));
  EXPECT_EQ(h->topic_count(), 3);
  EXPECT_EQ(h->post_count(), 5);
}

TEST(TopicHistogram, OutliersAndDominantBin) {
  TopicAssignment a;
  a.post_topic = {{"o1", -1}, {"o2", -1}};
  std::vector<std::string> outliers{"o1", "o2"};
  EXPECT_FALSE(topic_histogram(a, outliers));
  EXPECT_EQ(topic_histogram(a, outliers, true)->counts, std::vector<std::int64_t>{2});

  std::vector<std::string> ids;
  for (int i = 0; i < 100; ++i) {
    ids.push_back("p" + std::to_string(i));
    a.post_topic[ids.back()] = i < 51 ? 0 : i - 50;
  }
  auto h = topic_histogram(a, ids);
  EXPECT_EQ(h->topic_count(), 50);
  EXPECT_EQ(h->post_count(), 100);
  EXPECT_EQ(h->counts.back(), 51);
  EXPECT_EQ(h->counts.front(), 1);
  std::vector<std::string> missing{"nope"};
  EXPECT_THROW(topic_histogram(a, missing), Error);
}

TEST(TopicNames, ParseRoundTrip) {
  EXPECT_EQ(parse_topic_scope("Ds"), TopicScope::per_community);
  EXPECT_EQ(parse_topic_scope("F"), TopicScope::global);
  EXPECT_EQ(parse_outlier_reduction(to_string(OutlierReduction::centroid)), OutlierReduction::centroid);
  EXPECT_THROW(parse_topic_scope("X"), Error);
}
