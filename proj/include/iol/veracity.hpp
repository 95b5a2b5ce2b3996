#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "iol/ingest.hpp"
#include "iol/topic_model.hpp"

namespace iol {

// Fixed class order F < T < U; also the tie-break order.
enum class Veracity : std::uint8_t { fake = 0, truthful = 1, unverified = 2 };
inline constexpr std::size_t kVeracityClasses = 3;

char to_char(Veracity v);
std::optional<Veracity> parse_veracity(std::string_view token);  // exactly "F", "T" or "U"

struct VeracityAssignment {
  std::unordered_map<std::string, Veracity> post_class;
  std::string source;  // label file path, empty when builtin
};

// CSV `post_id,class`. Unknown ids, duplicates and tokens other than F/T/U
// raise ParseError with the line number.
VeracityAssignment load_veracity_labels(const std::string& path,
                                        const std::unordered_set<std::string>& known_ids);
void write_veracity_labels(std::ostream& out, const VeracityAssignment& assignment);

struct LabeledText {
  std::string text;
  Veracity label = Veracity::fake;
};

// CSV `text,class`.
std::vector<LabeledText> load_training_csv(const std::string& path);
void write_training_csv(std::ostream& out, std::span<const LabeledText> rows);

struct TrainingConfig {
  std::uint64_t seed = 1;
  int epochs = 300;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  VectorizerConfig features{.remove_stopwords = true, .ngram_max = 2, .min_df = 1};
};

// Multinomial logistic regression over unit-normalized word 1-2-gram tf-idf
// features, trained by full-batch Adam from a seeded initialization.
class VeracityModel {
 public:
  static constexpr const char* kFormat = "iol-veracity-model";
  static constexpr int kVersion = 1;

  // Argmax of the class scores, ties resolved F < T < U. A text with no known
  // features (including empty text) gets the class with the largest training
  // prior.
  Veracity classify(std::string_view text) const;
  std::vector<Veracity> classify_batch(std::span<const std::string> texts) const;

  // Class scores (logits) for one text.
  std::array<double, kVeracityClasses> scores(std::string_view text) const;

  Veracity prior_class() const;
  const std::array<double, kVeracityClasses>& prior() const noexcept { return prior_; }

  void save(std::ostream& out) const;
  static VeracityModel load(std::istream& in);

  friend VeracityModel train_baseline(std::span<const LabeledText> labeled,
                                      const TrainingConfig& config);

 private:
  Veracity decide(std::span<const double> scores, bool has_features) const;

  VectorizerConfig features_;
  std::vector<std::string> vocabulary_;
  std::vector<double> idf_;
  std::vector<double> weights_;  // classes x vocabulary
  std::array<double, kVeracityClasses> bias_{};
  std::array<double, kVeracityClasses> prior_{};
};

// Throws if fewer than two classes are present or any text is empty.
VeracityModel train_baseline(std::span<const LabeledText> labeled, const TrainingConfig& config);

// --- evaluation ----------------------------------------------------------------

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct ClassReport {
  std::vector<ClassMetrics> classes;
  double accuracy = 0.0;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
  std::size_t total = 0;
};

// Harmonic mean; 0 when precision + recall == 0.
double f1_score(double precision, double recall);

// confusion[gold][predicted].
ClassReport classification_report(const std::vector<std::vector<std::size_t>>& confusion);
// Labels are class indices in [0, classes).
ClassReport classification_report(std::span<const int> predictions, std::span<const int> golds,
                                  std::size_t classes);
ClassReport classification_report(std::span<const Veracity> predictions,
                                  std::span<const Veracity> golds);
void write_class_report_csv(std::ostream& out, const ClassReport& report);

// --- weekly fractions ------------------------------------------------------------

struct FractionEntry {
  WeekKey week;
  std::size_t post_count = 0;
  std::size_t fake = 0;
  std::size_t truthful = 0;
  std::size_t unverified = 0;
  // Absent for empty weeks.
  std::optional<double> fake_fraction;
  std::optional<double> true_fraction;
  std::optional<double> unverified_fraction;
};

struct FakeFractionSeries {
  Scope scope;
  std::vector<FractionEntry> entries;
};

// Denominator is every post of the week (F + T + U). Throws naming the first
// post without a class.
FakeFractionSeries fake_fraction(const VeracityAssignment& assignment, const BinSeries& bins);

void write_fraction_csv(std::ostream& out, std::span<const FakeFractionSeries> series);

}  // namespace iol
