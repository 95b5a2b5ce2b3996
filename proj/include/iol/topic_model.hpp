#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "iol/histogram.hpp"
#include "iol/ingest.hpp"
#include "iol/sparse.hpp"

namespace iol {

inline constexpr int kOutlierTopic = -1;

// Ds fits one model per community, F one model over the whole dataset.
enum class TopicScope { per_community, global };
enum class OutlierReduction { none, distribution, centroid };

std::string to_string(TopicScope s);
std::string to_string(OutlierReduction r);
TopicScope parse_topic_scope(const std::string& name);
OutlierReduction parse_outlier_reduction(const std::string& name);

struct TopicStrategy {
  TopicScope scope = TopicScope::global;
  OutlierReduction reduction = OutlierReduction::none;
};

// post-id -> topic id. Topic ids are contiguous 0..TC-1 across the whole
// assignment (per-community fits get disjoint id ranges), plus kOutlierTopic.
struct TopicAssignment {
  std::unordered_map<std::string, int> post_topic;
  TopicStrategy strategy;
  std::string source;  // label file path when loaded externally, empty when builtin

  bool external() const noexcept { return !source.empty(); }
  int topic_count() const;
  std::size_t outlier_count() const;
  // Relabels non-outlier topics to 0..TC-1 preserving their relative order.
  void compact();
};

// --- vectorizer -------------------------------------------------------------

struct VectorizerConfig {
  bool remove_stopwords = true;
  int ngram_max = 1;
  std::size_t min_df = 1;
};

// Term weights are tf * idf with raw term counts for tf and the smoothed
// idf(t) = ln((1 + N) / (1 + df(t))) + 1; rows are L2-normalized. The
// vocabulary is sorted lexicographically, so column order is deterministic.
struct DocTermMatrix {
  std::vector<std::string> vocabulary;
  std::vector<double> idf;
  CsrMatrix weights;  // tf-idf, unit rows (empty rows stay empty)
  CsrMatrix counts;   // raw term counts

  std::optional<std::uint32_t> term_index(const std::string& term) const;
};

// Throws Error("no vocabulary") when no document yields a term.
DocTermMatrix vectorize(std::span<const std::string> texts, const VectorizerConfig& config = {});
DocTermMatrix vectorize(std::span<const Post> posts, const VectorizerConfig& config = {});

// Transforms new texts with a fitted vocabulary and idf (unknown terms dropped).
CsrMatrix transform(const DocTermMatrix& fitted, std::span<const std::string> texts,
                    const VectorizerConfig& config);

// --- builtin topic model ------------------------------------------------------

struct TopicModelConfig {
  TopicScope scope = TopicScope::global;
  std::optional<int> k;  // nullopt: max(2, round(sqrt(N / 2))) capped at 200
  double outlier_threshold = 0.1;
  int max_iterations = 100;
  std::uint64_t seed = 1;
  VectorizerConfig vectorizer;
};

int auto_topic_count(std::size_t documents);

// One independently fitted unit: the whole dataset (F) or one community (Ds).
struct TopicUnit {
  std::string community;  // empty for the global unit
  std::vector<std::string> post_ids;
  DocTermMatrix matrix;
  std::size_t k = 0;
  std::vector<double> centroids;  // k x vocabulary, unit rows
  std::vector<int> cluster;       // nearest centroid per document
  std::vector<double> similarity; // cosine to that centroid
  std::vector<bool> outlier;      // similarity below threshold (never when k == 1)
};

struct TopicFit {
  std::vector<TopicUnit> units;
  TopicModelConfig config;
  std::vector<std::string> warnings;

  // Assignment with outliers left as kOutlierTopic.
  TopicAssignment assignment() const;
};

// Spherical k-means (k-means++ seeding) per unit, deterministic given seed.
TopicFit fit_topics(std::span<const Post> posts, const TopicModelConfig& config);

// Reassigns every outlier to an existing topic; never touches other posts.
// distribution: highest Laplace-smoothed multinomial log-likelihood of the
// document's term counts under each topic's pooled term counts.
// centroid: nearest centroid, ignoring the threshold.
TopicAssignment reduce_outliers(const TopicFit& fit, OutlierReduction method);

// --- label interchange: CSV `post_id,topic_id` -------------------------------

// Unknown ids, duplicates, non-integer or < -1 topics raise ParseError with the
// offending line. The result is compacted.
TopicAssignment load_topic_labels(const std::string& path,
                                  const std::unordered_set<std::string>& known_ids);
// Rows sorted by post id.
void write_topic_labels(std::ostream& out, const TopicAssignment& assignment);

// Histogram of the bin's posts; nullopt when the bin is empty after the
// outlier policy (the caller records a gap). Throws if a post is unassigned.
std::optional<TopicHistogram> topic_histogram(const TopicAssignment& assignment,
                                              std::span<const std::string> post_ids,
                                              bool include_outliers = false);

}  // namespace iol
