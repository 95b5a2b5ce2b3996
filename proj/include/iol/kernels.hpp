#pragma once

// Data-parallel inner loops. Each kernel exists twice: `serial` is the
// reference implementation used by the tests, `omp` is the OpenMP version the
// pipeline calls. Both produce bit-identical results: every output element is
// accumulated in the same order regardless of thread count.

#include <cstddef>
#include <span>
#include <vector>

#include "iol/sparse.hpp"

namespace iol {
struct TopicHistogram;
}

namespace iol::kernels {

namespace serial {

// Best centroid per row by dot product (ties -> lowest index). Centroids are
// a row-major k x docs.cols block. Empty rows get label 0, similarity 0.
void nearest_centroid(const CsrMatrix& docs, std::span<const double> centroids, std::size_t k,
                      std::span<int> labels, std::span<double> similarity);

// Sums member rows into each centroid and L2-normalizes nonzero sums. Labels
// outside [0, k) are ignored. Returns the member count per centroid.
std::vector<std::size_t> update_centroids(const CsrMatrix& docs, std::span<const int> labels,
                                          std::size_t k, std::span<double> centroids);

// scores (rows x classes) = docs * weights^T + bias; weights is classes x cols.
void linear_scores(const CsrMatrix& docs, std::span<const double> weights,
                   std::span<const double> bias, std::size_t classes, std::span<double> scores);

std::vector<double> gini_batch(std::span<const TopicHistogram> histograms);

}  // namespace serial

namespace omp {

void nearest_centroid(const CsrMatrix& docs, std::span<const double> centroids, std::size_t k,
                      std::span<int> labels, std::span<double> similarity);
std::vector<std::size_t> update_centroids(const CsrMatrix& docs, std::span<const int> labels,
                                          std::size_t k, std::span<double> centroids);
void linear_scores(const CsrMatrix& docs, std::span<const double> weights,
                   std::span<const double> bias, std::size_t classes, std::span<double> scores);
std::vector<double> gini_batch(std::span<const TopicHistogram> histograms);

}  // namespace omp

}  // namespace iol::kernels
