#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "iol/histogram.hpp"
#include "iol/ingest.hpp"
#include "iol/topic_model.hpp"
#include "iol/veracity.hpp"

namespace iol::synth {

struct SynthConfig {
  int communities = 10;
  int weeks = 52;
  double posts_per_week = 100.0;  // Poisson mean per community-week; at least one post
  int topics_per_community = 20;
  double alpha = 0.5;             // symmetric Dirichlet concentration
  double target_rho = 0.9;
  double base_fake_rate = 0.4;
  double fake_spread = 0.15;      // std-dev of the planted f_t around the base rate
  double true_share = 0.5;        // share of non-fake posts labelled T (rest U)
  int vocabulary_per_topic = 40;
  int words_per_post = 12;
  int veracity_words = 2;
  double noise_fraction = 0.0;    // posts whose text comes from a shared noise vocabulary
  bool emit_text = true;
  int training_rows = 3000;
  std::int64_t start_utc = 1578268800;  // Monday 2020-01-06 00:00 UTC
  std::string community_prefix = "CovidSynth";
  std::uint64_t seed = 1;

  void validate() const;  // throws iol::Error
};

// Reads a flat `key = value` file (blank lines and '#' comments ignored) on
// top of the defaults. Unknown keys are errors.
SynthConfig load_config(const std::string& path);
std::string to_config_text(const SynthConfig& config);

// Dirichlet(alpha)-multinomial topic counts, zero-count topics dropped,
// sorted ascending. Requires 1 <= topic_count <= post_count.
TopicHistogram gen_topic_counts(int topic_count, std::int64_t post_count, double alpha,
                                std::uint64_t seed);
// Per-topic counts (zeros kept, topic order preserved) drawn from `rng`.
std::vector<std::int64_t> draw_topic_counts(int topic_count, std::int64_t post_count, double alpha,
                                            std::mt19937_64& rng);

struct PlantedSeries {
  std::vector<double> fake_fraction;
  double clipped_fraction = 0.0;  // share of values clipped into [0, 1]
};

// f_t = base + spread * (rho z_t + sqrt(1 - rho^2) e_t), z the standardized
// Gini series and e i.i.d. standard normal; population corr(f, G) = rho
// before clipping. Throws for a constant series.
PlantedSeries plant_correlation(std::span<const double> gini_series, double rho, double base_rate,
                                double spread, std::uint64_t seed);

struct SynthDataset {
  SynthConfig config;
  std::vector<std::string> communities;
  std::vector<Post> posts;  // by community, then creation time
  TopicAssignment topics;
  VeracityAssignment veracity;
  std::vector<LabeledText> training;
  // [community][week]
  std::vector<std::vector<TopicHistogram>> histograms;
  std::vector<std::vector<double>> gini;
  std::vector<std::vector<double>> planted_fake;
  std::vector<double> clipped_fraction;  // per community
};

SynthDataset gen_stream(const SynthConfig& config);

// posts.ndjson, topics_truth.csv, veracity_truth.csv, train.csv,
// truth_histograms.csv, planted.csv and synth.conf under `dir`. Returns the
// written paths.
std::vector<std::string> write_dataset(const SynthDataset& dataset, const std::string& dir);

}  // namespace iol::synth
