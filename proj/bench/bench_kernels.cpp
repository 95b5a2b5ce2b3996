// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to compare
// thread counts, e.g. OMP_NUM_THREADS=8 ./iol_bench
#include <algorithm>
#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "iol/histogram.hpp"
#include "iol/kernels.hpp"

namespace {

namespace ks = iol::kernels::serial;
namespace ko = iol::kernels::omp;

iol::CsrMatrix docs(std::size_t rows, std::size_t cols, std::size_t per_row) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint32_t> col(0, static_cast<std::uint32_t>(cols - 1));
  iol::CsrMatrix m;
  m.cols = cols;
  std::vector<std::uint32_t> c;
  std::vector<double> v;
  for (std::size_t r = 0; r < rows; ++r) {
    c.clear();
    for (std::size_t i = 0; i < per_row; ++i) c.push_back(col(rng));
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    v.assign(c.size(), 1.0 / std::sqrt(static_cast<double>(c.size())));
    m.append_row(c, v);
  }
  return m;
}

std::vector<double> dense(std::size_t n) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d;
  std::vector<double> out(n);
  for (auto& x : out) x = d(rng);
  return out;
}

const iol::CsrMatrix& corpus() {
  static const auto m = docs(50000, 8000, 14);
  return m;
}

template <auto Kernel>
void BM_nearest_centroid(benchmark::State& state) {
  const auto& m = corpus();
  const auto k = static_cast<std::size_t>(state.range(0));
  auto cent = dense(k * m.cols);
  std::vector<int> labels(m.rows());
  std::vector<double> sim(m.rows());
  for (auto _ : state) {
    Kernel(m, cent, k, labels, sim);
    benchmark::DoNotOptimize(labels.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.rows()));
}

template <auto Kernel>
void BM_update_centroids(benchmark::State& state) {
  const auto& m = corpus();
  const auto k = static_cast<std::size_t>(state.range(0));
  std::vector<int> labels(m.rows());
  for (std::size_t r = 0; r < labels.size(); ++r) labels[r] = static_cast<int>(r % k);
  std::vector<double> cent(k * m.cols);
  for (auto _ : state) {
    auto counts = Kernel(m, labels, k, cent);
    benchmark::DoNotOptimize(counts.data());
  }
}

template <auto Kernel>
void BM_linear_scores(benchmark::State& state) {
  const auto& m = corpus();
  auto w = dense(3 * m.cols);
  auto b = dense(3);
  std::vector<double> s(m.rows() * 3);
  for (auto _ : state) {
    Kernel(m, w, b, 3, s);
    benchmark::DoNotOptimize(s.data());
  }
}

template <auto Kernel>
void BM_gini_batch(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> x(1, 1000);
  std::vector<iol::TopicHistogram> hs;
  for (int i = 0; i < 5000; ++i) {
    std::vector<std::int64_t> c(200);
    for (auto& v : c) v = x(rng);
    hs.push_back(iol::TopicHistogram::from_counts(c));
  }
  for (auto _ : state) {
    auto g = Kernel(hs);
    benchmark::DoNotOptimize(g.data());
  }
}

BENCHMARK(BM_nearest_centroid<ks::nearest_centroid>)->Name("nearest_centroid/serial")->Arg(20)->Arg(150);
BENCHMARK(BM_nearest_centroid<ko::nearest_centroid>)->Name("nearest_centroid/omp")->Arg(20)->Arg(150)->UseRealTime();
BENCHMARK(BM_update_centroids<ks::update_centroids>)->Name("update_centroids/serial")->Arg(20)->Arg(150);
BENCHMARK(BM_update_centroids<ko::update_centroids>)->Name("update_centroids/omp")->Arg(20)->Arg(150)->UseRealTime();
BENCHMARK(BM_linear_scores<ks::linear_scores>)->Name("linear_scores/serial");
BENCHMARK(BM_linear_scores<ko::linear_scores>)->Name("linear_scores/omp")->UseRealTime();
BENCHMARK(BM_gini_batch<ks::gini_batch>)->Name("gini_batch/serial");
BENCHMARK(BM_gini_batch<ko::gini_batch>)->Name("gini_batch/omp")->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
