#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "iol/kernels.hpp"
#include "iol/metrics.hpp"

namespace iol::kernels::omp {

void nearest_centroid(const CsrMatrix& docs, std::span<const double> centroids, std::size_t k,
                      std::span<int> labels, std::span<double> similarity) {
  const std::size_t cols = docs.cols;
  const auto rows = static_cast<std::int64_t>(docs.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t ri = 0; ri < rows; ++ri) {
    const auto r = static_cast<std::size_t>(ri);
    auto rc = docs.row_cols(r);
    auto rv = docs.row_vals(r);
    int best = 0;
    double best_sim = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      const double* cen = centroids.data() + c * cols;
      double dot = 0.0;
      for (std::size_t j = 0; j < rc.size(); ++j) dot += rv[j] * cen[rc[j]];
      if (c == 0 || dot > best_sim) {
        best = static_cast<int>(c);
        best_sim = dot;
      }
    }
    if (rc.empty()) best_sim = 0.0;
    labels[r] = best;
    similarity[r] = best_sim;
  }
}

std::vector<std::size_t> update_centroids(const CsrMatrix& docs, std::span<const int> labels,
                                          std::size_t k, std::span<double> centroids) {
  const std::size_t cols = docs.cols;
  // Bucket rows by label (stable, so each centroid sums its rows in row order).
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t r = 0; r < docs.rows(); ++r) {
    int l = labels[r];
    if (l >= 0 && static_cast<std::size_t>(l) < k) ++counts[static_cast<std::size_t>(l)];
  }
  std::vector<std::size_t> start(k + 1, 0);
  for (std::size_t c = 0; c < k; ++c) start[c + 1] = start[c] + counts[c];
  std::vector<std::size_t> members(start[k]);
  std::vector<std::size_t> fill(start.begin(), start.end() - 1);
  for (std::size_t r = 0; r < docs.rows(); ++r) {
    int l = labels[r];
    if (l >= 0 && static_cast<std::size_t>(l) < k) members[fill[static_cast<std::size_t>(l)]++] = r;
  }

  const auto kk = static_cast<std::int64_t>(k);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t ci = 0; ci < kk; ++ci) {
    const auto c = static_cast<std::size_t>(ci);
    double* cen = centroids.data() + c * cols;
    std::fill(cen, cen + cols, 0.0);
    for (std::size_t m = start[c]; m < start[c + 1]; ++m) {
      auto rc = docs.row_cols(members[m]);
      auto rv = docs.row_vals(members[m]);
      for (std::size_t j = 0; j < rc.size(); ++j) cen[rc[j]] += rv[j];
    }
    double norm = 0.0;
    for (std::size_t j = 0; j < cols; ++j) norm += cen[j] * cen[j];
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (std::size_t j = 0; j < cols; ++j) cen[j] /= norm;
    }
  }
  return counts;
}

void linear_scores(const CsrMatrix& docs, std::span<const double> weights,
                   std::span<const double> bias, std::size_t classes, std::span<double> scores) {
  const std::size_t cols = docs.cols;
  const auto rows = static_cast<std::int64_t>(docs.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t ri = 0; ri < rows; ++ri) {
    const auto r = static_cast<std::size_t>(ri);
    auto rc = docs.row_cols(r);
    auto rv = docs.row_vals(r);
    for (std::size_t c = 0; c < classes; ++c) {
      const double* w = weights.data() + c * cols;
      double s = bias[c];
      for (std::size_t j = 0; j < rc.size(); ++j) s += rv[j] * w[rc[j]];
      scores[r * classes + c] = s;
    }
  }
}

std::vector<double> gini_batch(std::span<const TopicHistogram> histograms) {
  std::vector<double> out(histograms.size());
  const auto n = static_cast<std::int64_t>(histograms.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = gini(histograms[static_cast<std::size_t>(i)]).value;
  return out;
}

}  // namespace iol::kernels::omp
