#include "iol/topic_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "iol/csv.hpp"
#include "iol/error.hpp"
#include "iol/kernels.hpp"
#include "iol/text.hpp"

namespace iol {

std::string to_string(TopicScope s) { return s == TopicScope::per_community ? "Ds" : "F"; }

std::string to_string(OutlierReduction r) {
  switch (r) {
    case OutlierReduction::none: return "none";
    case OutlierReduction::distribution: return "distribution";
    case OutlierReduction::centroid: return "centroid";
  }
  return "none";
}

TopicScope parse_topic_scope(const std::string& name) {
  if (name == "Ds" || name == "per_community" || name == "community") return TopicScope::per_community;
  if (name == "F" || name == "global") return TopicScope::global;
  throw Error("unknown topic scope '" + name + "' (expected Ds or F)");
}

OutlierReduction parse_outlier_reduction(const std::string& name) {
  for (auto r : {OutlierReduction::none, OutlierReduction::distribution, OutlierReduction::centroid})
    if (to_string(r) == name) return r;
  throw Error("unknown outlier reduction '" + name + "'");
}

int TopicAssignment::topic_count() const {
  std::unordered_set<int> ids;
  for (const auto& [_, t] : post_topic)
    if (t != kOutlierTopic) ids.insert(t);
  return static_cast<int>(ids.size());
}

std::size_t TopicAssignment::outlier_count() const {
  return static_cast<std::size_t>(std::count_if(post_topic.begin(), post_topic.end(),
                                                [](const auto& kv) { return kv.second == kOutlierTopic; }));
}

void TopicAssignment::compact() {
  std::set<int> ids;
  for (const auto& [_, t] : post_topic)
    if (t != kOutlierTopic) ids.insert(t);
  std::unordered_map<int, int> remap;
  int next = 0;
  for (int t : ids) remap[t] = next++;
  for (auto& [_, t] : post_topic)
    if (t != kOutlierTopic) t = remap[t];
}

// --- vectorizer -------------------------------------------------------------

std::optional<std::uint32_t> DocTermMatrix::term_index(const std::string& term) const {
  auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), term);
  if (it == vocabulary.end() || *it != term) return std::nullopt;
  return static_cast<std::uint32_t>(it - vocabulary.begin());
}

namespace {

std::vector<std::string> terms_of(std::string_view text, const VectorizerConfig& config) {
  return text::ngrams(text::tokenize(text, config.remove_stopwords), config.ngram_max);
}

// Builds one weighted, unit-norm row from sorted (column, count) pairs.
void append_weighted(CsrMatrix& weights, CsrMatrix& counts,
                     const std::vector<std::pair<std::uint32_t, double>>& row,
                     const std::vector<double>& idf) {
  std::vector<std::uint32_t> cols;
  std::vector<double> raw;
  std::vector<double> w;
  cols.reserve(row.size());
  double norm = 0.0;
  for (const auto& [c, n] : row) {
    cols.push_back(c);
    raw.push_back(n);
    w.push_back(n * idf[c]);
    norm += w.back() * w.back();
  }
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& x : w) x /= norm;
  }
  weights.append_row(cols, w);
  counts.append_row(cols, raw);
}

}  // namespace

DocTermMatrix vectorize(std::span<const std::string> texts, const VectorizerConfig& config) {
  if (texts.empty()) throw Error("vectorize needs at least one document");

  // First pass: provisional ids in order of first appearance.
  std::unordered_map<std::string, std::uint32_t> provisional;
  std::vector<std::string> names;
  std::vector<std::size_t> df;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> docs(texts.size());
  for (std::size_t d = 0; d < texts.size(); ++d) {
    std::unordered_map<std::uint32_t, double> tf;
    for (auto& term : terms_of(texts[d], config)) {
      auto [it, inserted] = provisional.try_emplace(term, static_cast<std::uint32_t>(names.size()));
      if (inserted) {
        names.push_back(term);
        df.push_back(0);
      }
      tf[it->second] += 1.0;
    }
    for (const auto& [id, _] : tf) ++df[id];
    docs[d].assign(tf.begin(), tf.end());
  }

  // Final ids: lexicographic order of the retained terms.
  std::vector<std::uint32_t> order;
  for (std::uint32_t i = 0; i < names.size(); ++i)
    if (df[i] >= config.min_df) order.push_back(i);
  if (order.empty()) throw Error("no vocabulary");
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return names[a] < names[b]; });

  DocTermMatrix m;
  constexpr std::uint32_t kDropped = UINT32_MAX;
  std::vector<std::uint32_t> remap(names.size(), kDropped);
  const double n = static_cast<double>(texts.size());
  for (std::uint32_t j = 0; j < order.size(); ++j) {
    remap[order[j]] = j;
    m.vocabulary.push_back(names[order[j]]);
    m.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(df[order[j]]))) + 1.0);
  }
  m.weights.cols = m.counts.cols = m.vocabulary.size();

  for (auto& row : docs) {
    std::vector<std::pair<std::uint32_t, double>> mapped;
    mapped.reserve(row.size());
    for (const auto& [id, c] : row)
      if (remap[id] != kDropped) mapped.emplace_back(remap[id], c);
    std::sort(mapped.begin(), mapped.end());
    append_weighted(m.weights, m.counts, mapped, m.idf);
    row.clear();
    row.shrink_to_fit();
  }
  return m;
}

DocTermMatrix vectorize(std::span<const Post> posts, const VectorizerConfig& config) {
  std::vector<std::string> texts;
  texts.reserve(posts.size());
  for (const auto& p : posts) texts.push_back(p.text);
  return vectorize(texts, config);
}

CsrMatrix transform(const DocTermMatrix& fitted, std::span<const std::string> texts,
                    const VectorizerConfig& config) {
  CsrMatrix weights;
  CsrMatrix counts;
  weights.cols = counts.cols = fitted.vocabulary.size();
  for (const auto& t : texts) {
    std::map<std::uint32_t, double> tf;
    for (auto& term : terms_of(t, config))
      if (auto j = fitted.term_index(term)) tf[*j] += 1.0;
    std::vector<std::pair<std::uint32_t, double>> row(tf.begin(), tf.end());
    append_weighted(weights, counts, row, fitted.idf);
  }
  return weights;
}

// --- builtin topic model ------------------------------------------------------

int auto_topic_count(std::size_t documents) {
  int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(documents) / 2.0)));
  return std::clamp(k, 2, 200);
}

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t distinct_nonempty_rows(const CsrMatrix& m) {
  std::set<std::pair<std::vector<std::uint32_t>, std::vector<double>>> rows;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto c = m.row_cols(r);
    if (c.empty()) continue;
    auto v = m.row_vals(r);
    rows.emplace(std::vector<std::uint32_t>(c.begin(), c.end()),
                 std::vector<double>(v.begin(), v.end()));
  }
  return rows.size();
}

void set_centroid_to_row(const CsrMatrix& m, std::size_t row, std::span<double> centroid) {
  std::fill(centroid.begin(), centroid.end(), 0.0);
  auto c = m.row_cols(row);
  auto v = m.row_vals(row);
  for (std::size_t j = 0; j < c.size(); ++j) centroid[c[j]] = v[j];
}

double row_dot(const CsrMatrix& m, std::size_t row, std::span<const double> dense) {
  auto c = m.row_cols(row);
  auto v = m.row_vals(row);
  double s = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) s += v[j] * dense[c[j]];
  return s;
}

// k-means++ over cosine distance 1 - sim. May return fewer than k seeds when
// the remaining documents coincide with chosen ones.
std::vector<std::size_t> seed_centroids(const CsrMatrix& m, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> nonempty;
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (m.row_ptr[r + 1] > m.row_ptr[r]) nonempty.push_back(r);
  std::vector<std::size_t> seeds;
  if (nonempty.empty()) return seeds;

  seeds.push_back(nonempty[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(nonempty.size()))]);
  std::vector<double> best_sim(nonempty.size(), -1.0);
  std::vector<double> centroid(m.cols);
  while (seeds.size() < k) {
    set_centroid_to_row(m, seeds.back(), centroid);
    double total = 0.0;
    for (std::size_t i = 0; i < nonempty.size(); ++i) {
      best_sim[i] = std::max(best_sim[i], row_dot(m, nonempty[i], centroid));
      total += std::max(0.0, 1.0 - best_sim[i]);
    }
    if (total <= 1e-12) break;
    double target = uniform01(rng) * total;
    std::size_t pick = nonempty.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < nonempty.size(); ++i) {
      double d = std::max(0.0, 1.0 - best_sim[i]);
      acc += d;
      if (d > 0.0 && acc > target) {
        pick = i;
        break;
      }
    }
    while (pick > 0 && std::max(0.0, 1.0 - best_sim[pick]) <= 0.0) --pick;
    seeds.push_back(nonempty[pick]);
  }
  return seeds;
}

void fit_unit(TopicUnit& unit, const TopicModelConfig& config, std::vector<std::string>& warnings) {
  const CsrMatrix& docs = unit.matrix.weights;
  const std::size_t n = docs.rows();
  std::size_t k = config.k ? static_cast<std::size_t>(*config.k) : static_cast<std::size_t>(auto_topic_count(n));
  const std::size_t distinct = std::max<std::size_t>(1, distinct_nonempty_rows(docs));
  const std::string where = unit.community.empty() ? std::string("dataset") : "community " + unit.community;
  if (k > distinct) {
    warnings.push_back(where + ": k=" + std::to_string(k) + " clamped to " + std::to_string(distinct) +
                       " distinct documents");
    k = distinct;
  }

  std::mt19937_64 rng(config.seed);
  auto seeds = seed_centroids(docs, k, rng);
  if (seeds.empty()) seeds.push_back(0);
  if (seeds.size() < k) {
    warnings.push_back(where + ": only " + std::to_string(seeds.size()) + " separable seeds for k=" +
                       std::to_string(k));
    k = seeds.size();
  }
  unit.k = k;
  unit.centroids.assign(k * docs.cols, 0.0);
  for (std::size_t c = 0; c < k; ++c)
    set_centroid_to_row(docs, seeds[c], std::span<double>(unit.centroids).subspan(c * docs.cols, docs.cols));

  unit.cluster.assign(n, 0);
  unit.similarity.assign(n, 0.0);
  kernels::omp::nearest_centroid(docs, unit.centroids, k, unit.cluster, unit.similarity);
  std::vector<int> previous;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    auto counts = kernels::omp::update_centroids(docs, unit.cluster, k, unit.centroids);
    // Reseed empty clusters with the worst-fitting nonempty documents.
    std::vector<std::size_t> order;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      if (order.empty()) {
        for (std::size_t r = 0; r < n; ++r)
          if (docs.row_ptr[r + 1] > docs.row_ptr[r]) order.push_back(r);
        std::stable_sort(order.begin(), order.end(),
                         [&](auto a, auto b) { return unit.similarity[a] < unit.similarity[b]; });
        std::reverse(order.begin(), order.end());
      }
      if (order.empty()) break;
      std::size_t r = order.back();
      order.pop_back();
      set_centroid_to_row(docs, r, std::span<double>(unit.centroids).subspan(c * docs.cols, docs.cols));
    }
    previous = unit.cluster;
    kernels::omp::nearest_centroid(docs, unit.centroids, k, unit.cluster, unit.similarity);
    if (unit.cluster == previous) break;
  }

  unit.outlier.assign(n, false);
  if (k > 1)
    for (std::size_t r = 0; r < n; ++r) unit.outlier[r] = unit.similarity[r] < config.outlier_threshold;
}

// Clusters that keep at least one non-outlier member, ascending.
std::vector<std::size_t> live_clusters(const TopicUnit& unit) {
  std::vector<bool> live(unit.k, false);
  for (std::size_t r = 0; r < unit.cluster.size(); ++r)
    if (!unit.outlier[r]) live[static_cast<std::size_t>(unit.cluster[r])] = true;
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < unit.k; ++c)
    if (live[c]) out.push_back(c);
  return out;
}

// Emits global topic ids for `labels` (cluster index or -1), offsetting by the
// topics already used by earlier units.
void emit_unit(const TopicUnit& unit, const std::vector<int>& labels, int& offset,
               TopicAssignment& out) {
  std::vector<int> local(unit.k, -1);
  int next = 0;
  std::vector<bool> used(unit.k, false);
  for (int l : labels)
    if (l >= 0) used[static_cast<std::size_t>(l)] = true;
  for (std::size_t c = 0; c < unit.k; ++c)
    if (used[c]) local[c] = next++;
  for (std::size_t r = 0; r < labels.size(); ++r)
    out.post_topic[unit.post_ids[r]] =
        labels[r] >= 0 ? offset + local[static_cast<std::size_t>(labels[r])] : kOutlierTopic;
  offset += next;
}

}  // namespace

TopicFit fit_topics(std::span<const Post> posts, const TopicModelConfig& config) {
  if (posts.empty()) throw Error("fit_topics needs at least one post");
  if (config.k && *config.k < 1) throw Error("k must be >= 1");

  TopicFit fit;
  fit.config = config;
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::string> names;
  if (config.scope == TopicScope::global) {
    groups.emplace_back(posts.size());
    for (std::size_t i = 0; i < posts.size(); ++i) groups[0][i] = i;
    names.emplace_back();
  } else {
    std::map<std::string, std::vector<std::size_t>> by;
    for (std::size_t i = 0; i < posts.size(); ++i) by[posts[i].community].push_back(i);
    for (auto& [name, idx] : by) {
      names.push_back(name);
      groups.push_back(std::move(idx));
    }
  }

  fit.units.resize(groups.size());
  for (std::size_t u = 0; u < groups.size(); ++u) {
    TopicUnit& unit = fit.units[u];
    unit.community = names[u];
    std::vector<std::string> texts;
    for (auto i : groups[u]) {
      unit.post_ids.push_back(posts[i].id);
      texts.push_back(posts[i].text);
    }
    const bool has_terms = std::any_of(texts.begin(), texts.end(), [&](const std::string& t) {
      return !text::tokenize(t, config.vectorizer.remove_stopwords).empty();
    });
    if (!has_terms) {
      // Nothing to cluster (e.g. only deleted posts): one topic holds everything.
      fit.warnings.push_back((unit.community.empty() ? std::string("dataset") : "community " + unit.community) +
                             ": no vocabulary, all posts put in a single topic");
      for (std::size_t r = 0; r < texts.size(); ++r) {
        unit.matrix.weights.append_row({}, {});
        unit.matrix.counts.append_row({}, {});
      }
      unit.k = 1;
      unit.cluster.assign(texts.size(), 0);
      unit.similarity.assign(texts.size(), 0.0);
      unit.outlier.assign(texts.size(), false);
      continue;
    }
    unit.matrix = vectorize(texts, config.vectorizer);
    fit_unit(unit, config, fit.warnings);
  }
  return fit;
}

TopicAssignment TopicFit::assignment() const {
  TopicAssignment out;
  out.strategy = {config.scope, OutlierReduction::none};
  int offset = 0;
  for (const auto& unit : units) {
    std::vector<int> labels(unit.cluster.size());
    for (std::size_t r = 0; r < labels.size(); ++r) labels[r] = unit.outlier[r] ? -1 : unit.cluster[r];
    emit_unit(unit, labels, offset, out);
  }
  return out;
}

TopicAssignment reduce_outliers(const TopicFit& fit, OutlierReduction method) {
  if (method == OutlierReduction::none) return fit.assignment();

  TopicAssignment out;
  out.strategy = {fit.config.scope, method};
  int offset = 0;
  for (const auto& unit : fit.units) {
    const std::size_t n = unit.cluster.size();
    std::vector<int> labels(n);
    for (std::size_t r = 0; r < n; ++r) labels[r] = unit.outlier[r] ? -1 : unit.cluster[r];

    auto live = live_clusters(unit);
    if (live.empty())  // every document was an outlier: fall back to all clusters
      for (std::size_t c = 0; c < unit.k; ++c) live.push_back(c);

    const CsrMatrix& weights = unit.matrix.weights;
    const CsrMatrix& counts = unit.matrix.counts;
    const std::size_t vocab = counts.cols;

    // Pooled term counts of each live topic's non-outlier members.
    std::vector<std::vector<double>> pooled;
    std::vector<double> totals;
    if (method == OutlierReduction::distribution) {
      pooled.assign(live.size(), std::vector<double>(vocab, 0.0));
      totals.assign(live.size(), 0.0);
      std::vector<int> slot(unit.k, -1);
      for (std::size_t i = 0; i < live.size(); ++i) slot[live[i]] = static_cast<int>(i);
      for (std::size_t r = 0; r < n; ++r) {
        if (unit.outlier[r]) continue;
        int s = slot[static_cast<std::size_t>(unit.cluster[r])];
        if (s < 0) continue;
        auto c = counts.row_cols(r);
        auto v = counts.row_vals(r);
        for (std::size_t j = 0; j < c.size(); ++j) {
          pooled[static_cast<std::size_t>(s)][c[j]] += v[j];
          totals[static_cast<std::size_t>(s)] += v[j];
        }
      }
    }

    for (std::size_t r = 0; r < n; ++r) {
      if (labels[r] >= 0) continue;
      double best = -INFINITY;
      std::size_t pick = live.front();
      for (std::size_t i = 0; i < live.size(); ++i) {
        double score;
        if (method == OutlierReduction::centroid) {
          score = row_dot(weights, r, std::span<const double>(unit.centroids).subspan(live[i] * weights.cols, weights.cols));
        } else {
          score = 0.0;
          auto c = counts.row_cols(r);
          auto v = counts.row_vals(r);
          const double denom = totals[i] + static_cast<double>(vocab);
          for (std::size_t j = 0; j < c.size(); ++j)
            score += v[j] * std::log((pooled[i][c[j]] + 1.0) / denom);
        }
        if (score > best) {
          best = score;
          pick = live[i];
        }
      }
      labels[r] = static_cast<int>(pick);
    }
    emit_unit(unit, labels, offset, out);
  }
  return out;
}

// --- label interchange --------------------------------------------------------

TopicAssignment load_topic_labels(const std::string& path,
                                  const std::unordered_set<std::string>& known_ids) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row) || row != std::vector<std::string>{"post_id", "topic_id"})
    throw ParseError(path, 1, "expected header post_id,topic_id");

  TopicAssignment out;
  out.source = path;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 2) throw ParseError(path, reader.line(), "expected 2 fields");
    const auto& id = row[0];
    if (!known_ids.contains(id)) throw ParseError(path, reader.line(), "unknown post id '" + id + "'");
    int topic = 0;
    const auto& t = row[1];
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), topic);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
      throw ParseError(path, reader.line(), "topic id '" + t + "' is not an integer");
    if (topic < kOutlierTopic) throw ParseError(path, reader.line(), "topic id must be >= -1");
    if (!out.post_topic.emplace(id, topic).second)
      throw ParseError(path, reader.line(), "duplicate post id '" + id + "'");
  }
  out.compact();
  return out;
}

void write_topic_labels(std::ostream& out, const TopicAssignment& assignment) {
  std::vector<std::pair<std::string, int>> rows(assignment.post_topic.begin(), assignment.post_topic.end());
  std::sort(rows.begin(), rows.end());
  out << "post_id,topic_id\n";
  for (const auto& [id, t] : rows) csv::write_row(out, {id, std::to_string(t)});
}

std::optional<TopicHistogram> topic_histogram(const TopicAssignment& assignment,
                                              std::span<const std::string> post_ids,
                                              bool include_outliers) {
  std::unordered_map<int, std::int64_t> counts;
  for (const auto& id : post_ids) {
    auto it = assignment.post_topic.find(id);
    if (it == assignment.post_topic.end()) throw Error("post '" + id + "' has no topic label");
    if (it->second == kOutlierTopic && !include_outliers) continue;
    ++counts[it->second];
  }
  if (counts.empty()) return std::nullopt;
  std::vector<std::int64_t> x;
  x.reserve(counts.size());
  for (const auto& [_, c] : counts) x.push_back(c);
  return TopicHistogram::from_counts(std::move(x));
}

}  // namespace iol
