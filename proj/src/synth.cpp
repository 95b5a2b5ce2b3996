#include "iol/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "iol/csv.hpp"
#include "iol/error.hpp"
#include "iol/metrics.hpp"

namespace iol::synth {

namespace {

constexpr std::int64_t kSecondsPerWeek = 7 * 86400;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix(splitmix(seed ^ splitmix(stream)) + index);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Open interval, safe for logs.
double uniform_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

// Log of a Gamma(alpha, 1) draw; alpha < 1 uses Gamma(alpha + 1) * U^(1/alpha)
// so tiny shapes do not underflow.
double log_gamma_draw(double alpha, std::mt19937_64& rng) {
  if (alpha < 1.0) {
    std::gamma_distribution<double> g(alpha + 1.0, 1.0);
    return std::log(g(rng)) + std::log(uniform_open(rng)) / alpha;
  }
  std::gamma_distribution<double> g(alpha, 1.0);
  return std::log(g(rng));
}

std::string pad(int value, int width) {
  std::string s = std::to_string(value);
  if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  return s;
}

std::string class_word(Veracity v, std::size_t j) {
  static constexpr const char* kPrefix[] = {"vfk", "vtr", "vun"};
  return std::string(kPrefix[static_cast<int>(v)]) + std::to_string(j);
}

constexpr std::size_t kClassVocabulary = 8;
constexpr std::size_t kNoiseVocabulary = 200;

std::string topic_word(int global_topic, std::size_t j) {
  return "tp" + std::to_string(global_topic) + "x" + std::to_string(j);
}

}  // namespace

void SynthConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(std::string("invalid synth config: ") + what);
  };
  require(communities >= 1, "communities must be >= 1");
  require(weeks >= 1, "weeks must be >= 1");
  require(posts_per_week >= 1.0, "posts_per_week must be >= 1");
  require(topics_per_community >= 1, "topics_per_community must be >= 1");
  require(alpha > 0.0, "alpha must be > 0");
  require(std::fabs(target_rho) <= 1.0, "target_rho must lie in [-1, 1]");
  require(base_fake_rate >= 0.0 && base_fake_rate <= 1.0, "base_fake_rate must lie in [0, 1]");
  require(fake_spread >= 0.0, "fake_spread must be >= 0");
  require(true_share >= 0.0 && true_share <= 1.0, "true_share must lie in [0, 1]");
  require(vocabulary_per_topic >= 1, "vocabulary_per_topic must be >= 1");
  require(words_per_post >= 1, "words_per_post must be >= 1");
  require(veracity_words >= 0, "veracity_words must be >= 0");
  require(noise_fraction >= 0.0 && noise_fraction <= 1.0, "noise_fraction must lie in [0, 1]");
  require(training_rows >= 0, "training_rows must be >= 0");
  require(start_utc >= 0, "start_utc must be >= 0");
  require(start_utc % 86400 == 0 && (start_utc / 86400 + 3) % 7 == 0,
          "start_utc must be a Monday 00:00 UTC");
  require(!community_prefix.empty(), "community_prefix must be nonempty");
}

namespace {

struct Field {
  const char* key;
  std::function<void(SynthConfig&, const std::string&)> set;
  std::function<std::string(const SynthConfig&)> get;
};

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw Error("invalid value '" + text + "' for " + key);
  return value;
}

#define IOL_FIELD(name, type)                                                                     \
  Field {                                                                                          \
    #name, [](SynthConfig& c, const std::string& v) { c.name = parse_number<type>(#name, v); },    \
        [](const SynthConfig& c) {                                                                 \
          if constexpr (std::is_floating_point_v<type>) return csv::format_double(c.name);          \
          else return std::to_string(c.name);                                                      \
        }                                                                                          \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      IOL_FIELD(communities, int),
      IOL_FIELD(weeks, int),
      IOL_FIELD(posts_per_week, double),
      IOL_FIELD(topics_per_community, int),
      IOL_FIELD(alpha, double),
      IOL_FIELD(target_rho, double),
      IOL_FIELD(base_fake_rate, double),
      IOL_FIELD(fake_spread, double),
      IOL_FIELD(true_share, double),
      IOL_FIELD(vocabulary_per_topic, int),
      IOL_FIELD(words_per_post, int),
      IOL_FIELD(veracity_words, int),
      IOL_FIELD(noise_fraction, double),
      IOL_FIELD(training_rows, int),
      IOL_FIELD(start_utc, std::int64_t),
      IOL_FIELD(seed, std::uint64_t),
      Field{"emit_text",
            [](SynthConfig& c, const std::string& v) {
              if (v == "true" || v == "1") c.emit_text = true;
              else if (v == "false" || v == "0") c.emit_text = false;
              else throw Error("invalid value '" + v + "' for emit_text");
            },
            [](const SynthConfig& c) { return std::string(c.emit_text ? "true" : "false"); }},
      Field{"community_prefix", [](SynthConfig& c, const std::string& v) { c.community_prefix = v; },
            [](const SynthConfig& c) { return c.community_prefix; }},
  };
  return f;
}

#undef IOL_FIELD

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

SynthConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  SynthConfig config;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path, n, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto it = std::find_if(fields().begin(), fields().end(), [&](const Field& f) { return key == f.key; });
    if (it == fields().end()) throw ParseError(path, n, "unknown key '" + key + "'");
    try {
      it->set(config, value);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(path, n, e.what());
    }
  }
  config.validate();
  return config;
}

std::string to_config_text(const SynthConfig& config) {
  std::ostringstream out;
  for (const auto& f : fields()) out << f.key << " = " << f.get(config) << '\n';
  return out.str();
}

std::vector<std::int64_t> draw_topic_counts(int topic_count, std::int64_t post_count, double alpha,
                                            std::mt19937_64& rng) {
  const auto k = static_cast<std::size_t>(topic_count);
  std::vector<double> logw(k);
  for (auto& w : logw) w = log_gamma_draw(alpha, rng);
  const double mx = *std::max_element(logw.begin(), logw.end());
  std::vector<double> p(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) total += (p[i] = std::exp(logw[i] - mx));

  // Multinomial by sequential conditional binomials.
  std::vector<std::int64_t> counts(k, 0);
  std::int64_t remaining = post_count;
  double mass = total;
  for (std::size_t i = 0; i + 1 < k && remaining > 0; ++i) {
    double q = mass > 0.0 ? std::clamp(p[i] / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> binom(remaining, q);
    counts[i] = binom(rng);
    remaining -= counts[i];
    mass -= p[i];
  }
  counts[k - 1] += remaining;
  return counts;
}

TopicHistogram gen_topic_counts(int topic_count, std::int64_t post_count, double alpha,
                                std::uint64_t seed) {
  if (topic_count < 1) throw Error("topic count must be >= 1");
  if (topic_count > post_count) throw Error("topic count must not exceed post count");
  if (!(alpha > 0.0)) throw Error("alpha must be > 0");
  std::mt19937_64 rng(seed);
  return TopicHistogram::from_counts_dropping_zeros(draw_topic_counts(topic_count, post_count, alpha, rng));
}

PlantedSeries plant_correlation(std::span<const double> gini_series, double rho, double base_rate,
                                double spread, std::uint64_t seed) {
  if (!(std::fabs(rho) <= 1.0)) throw Error("target correlation must lie in [-1, 1]");
  if (gini_series.empty()) throw Error("empty Gini series");
  const auto n = static_cast<double>(gini_series.size());
  double mean = 0.0;
  for (double g : gini_series) mean += g;
  mean /= n;
  double var = 0.0;
  for (double g : gini_series) var += (g - mean) * (g - mean);
  var /= n;
  const bool constant = std::all_of(gini_series.begin(), gini_series.end(),
                                    [&](double g) { return g == gini_series.front(); });
  if (constant || !(var > 0.0)) throw Error("cannot plant a correlation on a constant Gini series");
  const double sd = std::sqrt(var);
  const double noise = std::sqrt(std::max(0.0, 1.0 - rho * rho));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PlantedSeries out;
  out.fake_fraction.reserve(gini_series.size());
  std::size_t clipped = 0;
  for (double g : gini_series) {
    double e = normal(rng);
    double f = base_rate + spread * (rho * (g - mean) / sd + noise * e);
    if (f < 0.0 || f > 1.0) ++clipped;
    out.fake_fraction.push_back(std::clamp(f, 0.0, 1.0));
  }
  out.clipped_fraction = static_cast<double>(clipped) / n;
  return out;
}

SynthDataset gen_stream(const SynthConfig& config) {
  config.validate();
  SynthDataset ds;
  ds.config = config;
  const auto n_comm = static_cast<std::size_t>(config.communities);
  const auto n_weeks = static_cast<std::size_t>(config.weeks);
  const int tc = config.topics_per_community;
  const int width = std::max(2, static_cast<int>(std::to_string(config.communities - 1).size()));

  ds.histograms.resize(n_comm);
  ds.gini.resize(n_comm);
  ds.planted_fake.resize(n_comm);
  ds.clipped_fraction.resize(n_comm);
  std::vector<std::vector<Post>> per_comm(n_comm);
  std::vector<std::vector<int>> truth_topic(n_comm);
  std::vector<std::vector<Veracity>> truth_class(n_comm);

  for (std::size_t c = 0; c < n_comm; ++c) {
    const std::string name = config.community_prefix + pad(static_cast<int>(c), width);
    ds.communities.push_back(name);
    std::mt19937_64 rng(derive_seed(config.seed, 1, c));

    // Weekly topic draws.
    std::vector<std::vector<std::int64_t>> week_counts(n_weeks);
    std::poisson_distribution<std::int64_t> volume(config.posts_per_week);
    for (std::size_t w = 0; w < n_weeks; ++w) {
      std::int64_t n = std::max<std::int64_t>(1, volume(rng));
      week_counts[w] = draw_topic_counts(tc, n, config.alpha, rng);
      ds.histograms[c].push_back(TopicHistogram::from_counts_dropping_zeros(week_counts[w]));
      ds.gini[c].push_back(gini(ds.histograms[c].back()).value);
    }

    try {
      auto planted = plant_correlation(ds.gini[c], config.target_rho, config.base_fake_rate,
                                       config.fake_spread, derive_seed(config.seed, 2, c));
      ds.planted_fake[c] = std::move(planted.fake_fraction);
      ds.clipped_fraction[c] = planted.clipped_fraction;
    } catch (const Error&) {
      // Constant Gini series (e.g. a single topic): nothing to correlate with.
      ds.planted_fake[c].assign(n_weeks, config.base_fake_rate);
    }

    // Posts.
    std::size_t serial = 0;
    for (std::size_t w = 0; w < n_weeks; ++w) {
      const std::int64_t week_start = config.start_utc + static_cast<std::int64_t>(w) * kSecondsPerWeek;
      for (int j = 0; j < tc; ++j) {
        const int topic = static_cast<int>(c) * tc + j;
        for (std::int64_t i = 0; i < week_counts[w][static_cast<std::size_t>(j)]; ++i) {
          Post p;
          p.id = "c" + pad(static_cast<int>(c), width) + "p" + std::to_string(serial++);
          p.community = name;
          p.created_utc = week_start + static_cast<std::int64_t>(pick(rng, kSecondsPerWeek));

          Veracity v;
          if (uniform01(rng) < ds.planted_fake[c][w]) v = Veracity::fake;
          else v = uniform01(rng) < config.true_share ? Veracity::truthful : Veracity::unverified;

          if (config.emit_text) {
            const bool noise = uniform01(rng) < config.noise_fraction;
            std::string text;
            for (int k = 0; k < config.words_per_post; ++k) {
              if (!text.empty()) text.push_back(' ');
              text += noise ? "nz" + std::to_string(pick(rng, kNoiseVocabulary))
                            : topic_word(topic, pick(rng, static_cast<std::size_t>(config.vocabulary_per_topic)));
            }
            for (int k = 0; k < config.veracity_words; ++k) text += " " + class_word(v, pick(rng, kClassVocabulary));
            p.text = std::move(text);
          }
          per_comm[c].push_back(std::move(p));
          truth_topic[c].push_back(topic);
          truth_class[c].push_back(v);
        }
      }
    }

    // Order by creation time within the community (stable on ties).
    std::vector<std::size_t> order(per_comm[c].size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return per_comm[c][a].created_utc < per_comm[c][b].created_utc;
    });
    for (auto i : order) {
      ds.topics.post_topic.emplace(per_comm[c][i].id, truth_topic[c][i]);
      ds.veracity.post_class.emplace(per_comm[c][i].id, truth_class[c][i]);
      ds.posts.push_back(std::move(per_comm[c][i]));
    }
    per_comm[c].clear();
  }
  ds.topics.strategy = {TopicScope::per_community, OutlierReduction::none};
  ds.topics.compact();

  // Rumor-style training set: class vocabulary plus topical filler words.
  std::mt19937_64 rng(derive_seed(config.seed, 3, 0));
  const int total_topics = config.communities * tc;
  for (int r = 0; r < config.training_rows; ++r) {
    auto v = static_cast<Veracity>(r % 3);
    std::string text;
    for (int k = 0; k < std::max(3, 3 * config.veracity_words); ++k) {
      if (!text.empty()) text.push_back(' ');
      text += class_word(v, pick(rng, kClassVocabulary));
    }
    for (int k = 0; k < 4; ++k)
      text += " " + topic_word(static_cast<int>(pick(rng, static_cast<std::size_t>(total_topics))),
                               pick(rng, static_cast<std::size_t>(config.vocabulary_per_topic)));
    ds.training.push_back({std::move(text), v});
  }
  return ds;
}

std::vector<std::string> write_dataset(const SynthDataset& ds, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> written;
  auto open = [&](const char* name) {
    std::string path = (fs::path(dir) / name).string();
    written.push_back(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    return out;
  };

  {
    auto out = open("posts.ndjson");
    for (const auto& p : ds.posts) out << format_post_line(p) << '\n';
  }
  {
    auto out = open("topics_truth.csv");
    write_topic_labels(out, ds.topics);
  }
  {
    auto out = open("veracity_truth.csv");
    write_veracity_labels(out, ds.veracity);
  }
  {
    auto out = open("train.csv");
    write_training_csv(out, ds.training);
  }
  {
    auto out = open("truth_histograms.csv");
    out << "community,iso_year,iso_week,counts\n";
    for (std::size_t c = 0; c < ds.communities.size(); ++c) {
      for (std::size_t w = 0; w < ds.histograms[c].size(); ++w) {
        WeekKey week = week_of(ds.config.start_utc + static_cast<std::int64_t>(w) * kSecondsPerWeek);
        std::string counts;
        for (auto x : ds.histograms[c][w].counts) counts += (counts.empty() ? "" : " ") + std::to_string(x);
        csv::write_row(out, {ds.communities[c], std::to_string(week.iso_year), std::to_string(week.iso_week), counts});
      }
    }
  }
  {
    auto out = open("planted.csv");
    out << "community,iso_year,iso_week,gini,planted_fake_fraction\n";
    for (std::size_t c = 0; c < ds.communities.size(); ++c) {
      for (std::size_t w = 0; w < ds.gini[c].size(); ++w) {
        WeekKey week = week_of(ds.config.start_utc + static_cast<std::int64_t>(w) * kSecondsPerWeek);
        csv::write_row(out, {ds.communities[c], std::to_string(week.iso_year), std::to_string(week.iso_week),
                             csv::format_double(ds.gini[c][w]), csv::format_double(ds.planted_fake[c][w])});
      }
    }
  }
  {
    auto out = open("synth.conf");
    out << to_config_text(ds.config);
  }
  return written;
}

}  // namespace iol::synth
