#include <algorithm>
#include <cmath>

#include "iol/kernels.hpp"
#include "iol/metrics.hpp"

namespace iol::kernels::serial {

void nearest_centroid(const CsrMatrix& docs, std::span<const double> centroids, std::size_t k,
                      std::span<int> labels, std::span<double> similarity) {
  const std::size_t cols = docs.cols;
  for (std::size_t r = 0; r < docs.rows(); ++r) {
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
  std::fill(centroids.begin(), centroids.end(), 0.0);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t r = 0; r < docs.rows(); ++r) {
    int l = labels[r];
    if (l < 0 || static_cast<std::size_t>(l) >= k) continue;
    ++counts[static_cast<std::size_t>(l)];
    double* cen = centroids.data() + static_cast<std::size_t>(l) * cols;
    auto rc = docs.row_cols(r);
    auto rv = docs.row_vals(r);
    for (std::size_t j = 0; j < rc.size(); ++j) cen[rc[j]] += rv[j];
  }
  for (std::size_t c = 0; c < k; ++c) {
    double* cen = centroids.data() + c * cols;
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
  for (std::size_t r = 0; r < docs.rows(); ++r) {
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
  std::vector<double> out;
  out.reserve(histograms.size());
  for (const auto& h : histograms) out.push_back(gini(h).value);
  return out;
}

}  // namespace iol::kernels::serial
