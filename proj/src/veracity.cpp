#include "iol/veracity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "iol/csv.hpp"
#include "iol/error.hpp"
#include "iol/kernels.hpp"
#include "json.hpp"

namespace iol {

char to_char(Veracity v) {
  switch (v) {
    case Veracity::fake: return 'F';
    case Veracity::truthful: return 'T';
    case Veracity::unverified: return 'U';
  }
  return '?';
}

std::optional<Veracity> parse_veracity(std::string_view token) {
  if (token == "F") return Veracity::fake;
  if (token == "T") return Veracity::truthful;
  if (token == "U") return Veracity::unverified;
  return std::nullopt;
}

VeracityAssignment load_veracity_labels(const std::string& path,
                                        const std::unordered_set<std::string>& known_ids) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row) || row != std::vector<std::string>{"post_id", "class"})
    throw ParseError(path, 1, "expected header post_id,class");

  VeracityAssignment out;
  out.source = path;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 2) throw ParseError(path, reader.line(), "expected 2 fields");
    if (!known_ids.contains(row[0]))
      throw ParseError(path, reader.line(), "unknown post id '" + row[0] + "'");
    auto cls = parse_veracity(row[1]);
    if (!cls) throw ParseError(path, reader.line(), "unknown class '" + row[1] + "' (expected F, T or U)");
    if (!out.post_class.emplace(row[0], *cls).second)
      throw ParseError(path, reader.line(), "duplicate post id '" + row[0] + "'");
  }
  return out;
}

void write_veracity_labels(std::ostream& out, const VeracityAssignment& assignment) {
  std::vector<std::pair<std::string, Veracity>> rows(assignment.post_class.begin(),
                                                     assignment.post_class.end());
  std::sort(rows.begin(), rows.end());
  out << "post_id,class\n";
  for (const auto& [id, v] : rows) csv::write_row(out, {id, std::string(1, to_char(v))});
}

std::vector<LabeledText> load_training_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row) || row != std::vector<std::string>{"text", "class"})
    throw ParseError(path, 1, "expected header text,class");
  std::vector<LabeledText> out;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 2) throw ParseError(path, reader.line(), "expected 2 fields");
    auto cls = parse_veracity(row[1]);
    if (!cls) throw ParseError(path, reader.line(), "unknown class '" + row[1] + "'");
    out.push_back({row[0], *cls});
  }
  return out;
}

void write_training_csv(std::ostream& out, std::span<const LabeledText> rows) {
  out << "text,class\n";
  for (const auto& r : rows) csv::write_row(out, {r.text, std::string(1, to_char(r.label))});
}

// --- model -------------------------------------------------------------------

namespace {

std::size_t argmax_ordered(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < values.size(); ++c)
    if (values[c] > values[best]) best = c;
  return best;
}

}  // namespace

Veracity VeracityModel::prior_class() const {
  return static_cast<Veracity>(argmax_ordered(prior_));
}

Veracity VeracityModel::decide(std::span<const double> scores, bool has_features) const {
  if (!has_features) return prior_class();
  return static_cast<Veracity>(argmax_ordered(scores));
}

std::array<double, kVeracityClasses> VeracityModel::scores(std::string_view text) const {
  DocTermMatrix fitted;
  fitted.vocabulary = vocabulary_;
  fitted.idf = idf_;
  std::string t(text);
  CsrMatrix x = transform(fitted, std::span<const std::string>(&t, 1), features_);
  std::array<double, kVeracityClasses> s{};
  kernels::serial::linear_scores(x, weights_, bias_, kVeracityClasses, s);
  return s;
}

Veracity VeracityModel::classify(std::string_view text) const {
  std::string t(text);
  return classify_batch(std::span<const std::string>(&t, 1)).front();
}

std::vector<Veracity> VeracityModel::classify_batch(std::span<const std::string> texts) const {
  DocTermMatrix fitted;
  fitted.vocabulary = vocabulary_;
  fitted.idf = idf_;
  CsrMatrix x = transform(fitted, texts, features_);
  std::vector<double> s(x.rows() * kVeracityClasses);
  kernels::omp::linear_scores(x, weights_, bias_, kVeracityClasses, s);
  std::vector<Veracity> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r)
    out[r] = decide(std::span<const double>(s).subspan(r * kVeracityClasses, kVeracityClasses),
                    x.row_ptr[r + 1] > x.row_ptr[r]);
  return out;
}

void VeracityModel::save(std::ostream& out) const {
  nlohmann::json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["classes"] = {"F", "T", "U"};
  j["features"] = {{"remove_stopwords", features_.remove_stopwords},
                   {"ngram_max", features_.ngram_max},
                   {"min_df", features_.min_df}};
  j["vocabulary"] = vocabulary_;
  j["idf"] = idf_;
  j["weights"] = weights_;
  j["bias"] = bias_;
  j["prior"] = prior_;
  out << j.dump() << '\n';
}

VeracityModel VeracityModel::load(std::istream& in) {
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error("model file is not valid JSON");
  if (j.value("format", "") != kFormat) throw Error("not a veracity model file");
  if (j.value("version", 0) != kVersion)
    throw Error("unsupported model version " + std::to_string(j.value("version", 0)));
  try {
    VeracityModel m;
    const auto& f = j.at("features");
    m.features_.remove_stopwords = f.at("remove_stopwords").get<bool>();
    m.features_.ngram_max = f.at("ngram_max").get<int>();
    m.features_.min_df = f.at("min_df").get<std::size_t>();
    m.vocabulary_ = j.at("vocabulary").get<std::vector<std::string>>();
    m.idf_ = j.at("idf").get<std::vector<double>>();
    m.weights_ = j.at("weights").get<std::vector<double>>();
    m.bias_ = j.at("bias").get<std::array<double, kVeracityClasses>>();
    m.prior_ = j.at("prior").get<std::array<double, kVeracityClasses>>();
    if (m.idf_.size() != m.vocabulary_.size() ||
        m.weights_.size() != m.vocabulary_.size() * kVeracityClasses)
      throw Error("model file has inconsistent dimensions");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed model file: ") + e.what());
  }
}

VeracityModel train_baseline(std::span<const LabeledText> labeled, const TrainingConfig& config) {
  std::array<std::size_t, kVeracityClasses> counts{};
  std::vector<std::string> texts;
  texts.reserve(labeled.size());
  for (const auto& l : labeled) {
    if (l.text.empty()) throw Error("training texts must be nonempty");
    ++counts[static_cast<std::size_t>(l.label)];
    texts.push_back(l.text);
  }
  if (std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) < 2)
    throw Error("training data needs at least two classes");

  DocTermMatrix m = vectorize(texts, config.features);
  const CsrMatrix& x = m.weights;
  const std::size_t n = x.rows();
  const std::size_t v = x.cols;
  constexpr std::size_t C = kVeracityClasses;

  VeracityModel model;
  model.features_ = config.features;
  model.vocabulary_ = std::move(m.vocabulary);
  model.idf_ = std::move(m.idf);
  for (std::size_t c = 0; c < C; ++c)
    model.prior_[c] = static_cast<double>(counts[c]) / static_cast<double>(n);

  std::mt19937_64 rng(config.seed);
  model.weights_.resize(C * v);
  for (auto& w : model.weights_) w = (static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5) * 0.01;

  std::vector<double> grad_w(C * v);
  std::array<double, C> grad_b{};
  std::vector<double> m1(C * v, 0.0), m2(C * v, 0.0);
  std::array<double, C> b1{}, b2{};
  std::vector<double> scores(n * C);
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    kernels::omp::linear_scores(x, model.weights_, model.bias_, C, scores);
    for (std::size_t i = 0; i < C * v; ++i) grad_w[i] = config.l2 * model.weights_[i];
    grad_b.fill(0.0);
    for (std::size_t r = 0; r < n; ++r) {
      double* s = scores.data() + r * C;
      double mx = *std::max_element(s, s + C);
      double z = 0.0;
      for (std::size_t c = 0; c < C; ++c) z += std::exp(s[c] - mx);
      auto cols = x.row_cols(r);
      auto vals = x.row_vals(r);
      for (std::size_t c = 0; c < C; ++c) {
        double p = std::exp(s[c] - mx) / z;
        double g = (p - (static_cast<std::size_t>(labeled[r].label) == c ? 1.0 : 0.0)) / static_cast<double>(n);
        grad_b[c] += g;
        double* gw = grad_w.data() + c * v;
        for (std::size_t j = 0; j < cols.size(); ++j) gw[cols[j]] += g * vals[j];
      }
    }
    const double corr1 = 1.0 - std::pow(beta1, epoch);
    const double corr2 = 1.0 - std::pow(beta2, epoch);
    auto step = [&](double& param, double grad, double& mom, double& vel) {
      mom = beta1 * mom + (1.0 - beta1) * grad;
      vel = beta2 * vel + (1.0 - beta2) * grad * grad;
      param -= config.learning_rate * (mom / corr1) / (std::sqrt(vel / corr2) + eps);
    };
    for (std::size_t i = 0; i < C * v; ++i) step(model.weights_[i], grad_w[i], m1[i], m2[i]);
    for (std::size_t c = 0; c < C; ++c) step(model.bias_[c], grad_b[c], b1[c], b2[c]);
  }
  return model;
}

// --- evaluation ----------------------------------------------------------------

double f1_score(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

ClassReport classification_report(const std::vector<std::vector<std::size_t>>& confusion) {
  const std::size_t k = confusion.size();
  for (const auto& row : confusion)
    if (row.size() != k) throw Error("confusion matrix must be square");
  ClassReport report;
  report.classes.resize(k);
  std::size_t correct = 0, total = 0, tp_sum = 0, support_sum = 0, predicted_sum = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t tp = confusion[c][c];
    std::size_t support = 0, predicted = 0;
    for (std::size_t o = 0; o < k; ++o) {
      support += confusion[c][o];
      predicted += confusion[o][c];
      total += confusion[c][o];
    }
    auto& m = report.classes[c];
    m.support = support;
    m.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    m.recall = support ? static_cast<double>(tp) / static_cast<double>(support) : 0.0;
    m.f1 = f1_score(m.precision, m.recall);
    correct += tp;
    tp_sum += tp;
    support_sum += support;
    predicted_sum += predicted;
  }
  report.total = total;
  if (total) {
    report.accuracy = static_cast<double>(correct) / static_cast<double>(total);
    report.micro_recall = static_cast<double>(tp_sum) / static_cast<double>(support_sum);
    report.micro_precision = static_cast<double>(tp_sum) / static_cast<double>(predicted_sum);
    report.micro_f1 = f1_score(report.micro_precision, report.micro_recall);
  }
  return report;
}

ClassReport classification_report(std::span<const int> predictions, std::span<const int> golds,
                                  std::size_t classes) {
  if (predictions.size() != golds.size())
    throw Error("predictions and golds differ in length (" + std::to_string(predictions.size()) +
                " vs " + std::to_string(golds.size()) + ")");
  std::vector<std::vector<std::size_t>> confusion(classes, std::vector<std::size_t>(classes, 0));
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if (golds[i] < 0 || static_cast<std::size_t>(golds[i]) >= classes || predictions[i] < 0 ||
        static_cast<std::size_t>(predictions[i]) >= classes)
      throw Error("label out of range at position " + std::to_string(i));
    ++confusion[static_cast<std::size_t>(golds[i])][static_cast<std::size_t>(predictions[i])];
  }
  return classification_report(confusion);
}

ClassReport classification_report(std::span<const Veracity> predictions,
                                  std::span<const Veracity> golds) {
  std::vector<int> p(predictions.size()), g(golds.size());
  std::transform(predictions.begin(), predictions.end(), p.begin(), [](Veracity v) { return static_cast<int>(v); });
  std::transform(golds.begin(), golds.end(), g.begin(), [](Veracity v) { return static_cast<int>(v); });
  return classification_report(p, g, kVeracityClasses);
}

void write_class_report_csv(std::ostream& out, const ClassReport& report) {
  out << "class,precision,recall,f1,support\n";
  for (std::size_t c = 0; c < report.classes.size(); ++c) {
    const auto& m = report.classes[c];
    std::string name = report.classes.size() == kVeracityClasses
                           ? std::string(1, to_char(static_cast<Veracity>(c)))
                           : std::to_string(c);
    csv::write_row(out, {name, csv::format_double(m.precision), csv::format_double(m.recall),
                         csv::format_double(m.f1), std::to_string(m.support)});
  }
  csv::write_row(out, {"accuracy", "", "", csv::format_double(report.accuracy), std::to_string(report.total)});
}

// --- weekly fractions ------------------------------------------------------------

FakeFractionSeries fake_fraction(const VeracityAssignment& assignment, const BinSeries& bins) {
  FakeFractionSeries out{bins.scope, {}};
  out.entries.reserve(bins.bins.size());
  for (const auto& bin : bins.bins) {
    FractionEntry e;
    e.week = bin.week;
    e.post_count = bin.post_count();
    for (const auto& id : bin.post_ids) {
      auto it = assignment.post_class.find(id);
      if (it == assignment.post_class.end()) throw Error("post '" + id + "' has no veracity class");
      switch (it->second) {
        case Veracity::fake: ++e.fake; break;
        case Veracity::truthful: ++e.truthful; break;
        case Veracity::unverified: ++e.unverified; break;
      }
    }
    if (e.post_count > 0) {
      const auto n = static_cast<double>(e.post_count);
      e.fake_fraction = static_cast<double>(e.fake) / n;
      e.true_fraction = static_cast<double>(e.truthful) / n;
      e.unverified_fraction = static_cast<double>(e.unverified) / n;
    }
    out.entries.push_back(e);
  }
  return out;
}

void write_fraction_csv(std::ostream& out, std::span<const FakeFractionSeries> series) {
  out << "scope,iso_year,iso_week,post_count,fake_fraction,true_fraction,unverified_fraction\n";
  for (const auto& s : series)
    for (const auto& e : s.entries)
      csv::write_row(out, {s.scope.label(), std::to_string(e.week.iso_year), std::to_string(e.week.iso_week),
                           std::to_string(e.post_count), csv::format_optional(e.fake_fraction),
                           csv::format_optional(e.true_fraction),
                           csv::format_optional(e.unverified_fraction)});
}

}  // namespace iol
