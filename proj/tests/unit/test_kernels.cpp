#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "iol/histogram.hpp"
#include "iol/kernels.hpp"
#include "iol/metrics.hpp"

using namespace iol;
namespace ks = iol::kernels::serial;
namespace ko = iol::kernels::omp;

namespace {

CsrMatrix random_docs(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  CsrMatrix m;
  m.cols = cols;
  std::bernoulli_distribution keep(0.05);
  std::uniform_real_distribution<double> v(0.0, 1.0);
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::uint32_t> c;
    std::vector<double> x;
    double norm = 0;
    for (std::size_t j = 0; j < cols; ++j)
      if (keep(rng)) {
        c.push_back(static_cast<std::uint32_t>(j));
        x.push_back(v(rng));
        norm += x.back() * x.back();
      }
    for (auto& e : x) e /= std::sqrt(norm);
    m.append_row(c, x);  // some rows stay empty
  }
  return m;
}

std::vector<double> random_dense(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  std::vector<double> out(n);
  for (auto& x : out) x = d(rng);
  return out;
}

}  // namespace

TEST(Kernels, NearestCentroidMatchesSerial) {
  std::mt19937_64 rng(3);
  auto docs = random_docs(500, 120, rng);
  const std::size_t k = 7;
  auto cent = random_dense(k * docs.cols, rng);
  std::vector<int> l1(docs.rows()), l2(docs.rows());
  std::vector<double> s1(docs.rows()), s2(docs.rows());
  ks::nearest_centroid(docs, cent, k, l1, s1);
  ko::nearest_centroid(docs, cent, k, l2, s2);
  EXPECT_EQ(l1, l2);
  EXPECT_EQ(s1, s2);
}

TEST(Kernels, NearestCentroidTiesAndEmptyRows) {
  CsrMatrix docs;
  docs.cols = 2;
  docs.append_row(std::vector<std::uint32_t>{0}, std::vector<double>{1.0});
  docs.append_row({}, {});
  std::vector<double> cent{0.5, 0.0, 0.5, 0.0};  // identical centroids
  std::vector<int> labels(2, -5);
  std::vector<double> sim(2, -5);
  ks::nearest_centroid(docs, cent, 2, labels, sim);
  EXPECT_EQ(labels[0], 0);
  EXPECT_DOUBLE_EQ(sim[0], 0.5);
  EXPECT_EQ(labels[1], 0);
  EXPECT_EQ(sim[1], 0.0);
}

TEST(Kernels, UpdateCentroidsMatchesSerial) {
  std::mt19937_64 rng(4);
  auto docs = random_docs(400, 90, rng);
  const std::size_t k = 5;
  std::vector<int> labels(docs.rows());
  std::uniform_int_distribution<int> l(-1, static_cast<int>(k) - 1);
  for (auto& x : labels) x = l(rng);
  labels[0] = 99;  // out of range: ignored
  std::vector<double> c1(k * docs.cols), c2(k * docs.cols);
  auto n1 = ks::update_centroids(docs, labels, k, c1);
  auto n2 = ko::update_centroids(docs, labels, k, c2);
  EXPECT_EQ(n1, n2);
  EXPECT_EQ(c1, c2);
  for (std::size_t c = 0; c < k; ++c) {
    double norm = 0;
    for (std::size_t j = 0; j < docs.cols; ++j) norm += c1[c * docs.cols + j] * c1[c * docs.cols + j];
    EXPECT_NEAR(norm, 1.0, 1e-12);
  }
}

TEST(Kernels, LinearScoresMatchesSerialAndDense) {
  std::mt19937_64 rng(5);
  auto docs = random_docs(300, 64, rng);
  const std::size_t classes = 3;
  auto w = random_dense(classes * docs.cols, rng);
  auto b = random_dense(classes, rng);
  std::vector<double> s1(docs.rows() * classes), s2(docs.rows() * classes);
  ks::linear_scores(docs, w, b, classes, s1);
  ko::linear_scores(docs, w, b, classes, s2);
  EXPECT_EQ(s1, s2);
  // dense check on a few rows
  for (std::size_t r = 0; r < 10; ++r) {
    for (std::size_t c = 0; c < classes; ++c) {
      double expect = b[c];
      auto cols = docs.row_cols(r);
      auto vals = docs.row_vals(r);
      for (std::size_t i = 0; i < cols.size(); ++i) expect += w[c * docs.cols + cols[i]] * vals[i];
      EXPECT_NEAR(s1[r * classes + c], expect, 1e-12);
    }
  }
}

TEST(Kernels, GiniBatchMatchesScalar) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> tc(1, 300);
  std::uniform_int_distribution<std::int64_t> x(1, 5000);
  std::vector<TopicHistogram> hs;
  for (int i = 0; i < 300; ++i) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(tc(rng)));
    for (auto& c : counts) c = x(rng);
    hs.push_back(TopicHistogram::from_counts(counts));
  }
  auto a = ks::gini_batch(hs);
  auto b = ko::gini_batch(hs);
  EXPECT_EQ(a, b);
  for (std::size_t i = 0; i < hs.size(); ++i) EXPECT_EQ(a[i], gini(hs[i]).value);
}
