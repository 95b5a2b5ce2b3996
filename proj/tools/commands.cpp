#include "commands.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_set>

#include "CLI11.hpp"
#include "iol/correlate.hpp"
#include "iol/csv.hpp"
#include "iol/error.hpp"
#include "iol/ingest.hpp"
#include "iol/metrics.hpp"
#include "iol/run_manifest.hpp"
#include "iol/synth.hpp"
#include "iol/topic_model.hpp"
#include "iol/veracity.hpp"

namespace iol::cli {

namespace fs = std::filesystem;

namespace {

// Raised for problems the user must fix (bad flags, missing inputs).
struct FatalError : Error {
  using Error::Error;
};

struct EmptyResult : Error {
  using Error::Error;
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Applies a flat `key = value` file to `sub`. Keys are long option names
// (underscores or dashes); options given on the command line win.
void merge_config(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FatalError("cannot open config " + path);
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
    std::replace(key.begin(), key.end(), '_', '-');
    CLI::Option* opt = key == "config" ? nullptr : sub.get_option_no_throw("--" + key);
    if (!opt) throw ParseError(path, n, "unknown key '" + key + "' for " + sub.get_name());
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw FatalError(std::string("missing required option ") + flag);
}

template <class F>
void write_text(const std::string& path, F&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FatalError("cannot write " + path);
  body(out);
  if (!out) throw Error("write failed: " + path);
}

std::string join(const std::vector<std::string>& v, char sep = ',') {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : std::string(1, sep)) + x;
  return s;
}

std::string manifest_path(const std::string& output) {
  fs::path p(output);
  return (p.parent_path() / ("manifest_" + p.stem().string() + ".txt")).string();
}

std::vector<Post> load_work_posts(const std::string& work, IngestStats& stats) {
  std::string path = (fs::path(work) / "posts.ndjson").string();
  if (!fs::exists(path)) throw FatalError("no ingested posts at " + path + " (run `iol ingest` first)");
  std::vector<std::string> paths{path};
  return read_posts(paths, ParseOptions{}, nullptr, stats);
}

std::unordered_set<std::string> id_set(const std::vector<Post>& posts) {
  std::unordered_set<std::string> ids;
  ids.reserve(posts.size());
  for (const auto& p : posts) ids.insert(p.id);
  return ids;
}

std::string with_tag(const std::string& dir, const std::string& name, const std::string& tag) {
  return (fs::path(dir) / (tag.empty() ? name + ".csv" : name + "_" + tag + ".csv")).string();
}

// --- ingest -------------------------------------------------------------------

struct IngestArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> keywords{"covid", "coronavirus"};
  std::string out;
  bool drop_empty = false;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
  if (a.inputs.empty()) throw FatalError("missing required option --input");
  require(a.out, "--out");
  if (a.keywords.empty()) throw FatalError("--keywords must not be empty");
  fs::create_directories(a.out);

  CommunityFilter filter(a.keywords);
  IngestStats stats;
  ParseOptions options{a.drop_empty};
  auto posts = read_posts(a.inputs, options, &filter, stats);
  for (const auto& d : stats.diagnostics) err << "ingest: " << d << '\n';
  if (posts.empty()) throw EmptyResult("no posts matched keywords " + join(a.keywords));

  auto global = bin_weekly(posts, BinScope::global);
  auto communities = bin_weekly(posts, BinScope::per_community);
  auto census = community_census(posts);

  RunManifest manifest("ingest");
  manifest.set("keywords", join(a.keywords));
  manifest.set("drop_empty", a.drop_empty ? "true" : "false");
  for (const auto& in : a.inputs) manifest.add_input(in);

  std::vector<std::string> outputs;
  auto emit = [&](const char* name, auto&& body) {
    std::string path = (fs::path(a.out) / name).string();
    write_text(path, body);
    outputs.push_back(path);
  };
  emit("posts.ndjson", [&](std::ostream& o) {
    for (const auto& p : posts) o << format_post_line(p) << '\n';
  });
  emit("bins.csv", [&](std::ostream& o) {
    std::vector<BinSeries> all = global;
    all.insert(all.end(), communities.begin(), communities.end());
    write_bins_csv(o, all);
  });
  emit("post_index.csv", [&](std::ostream& o) { write_post_index_csv(o, posts); });
  emit("census.csv", [&](std::ostream& o) { write_census_csv(o, census); });
  emit("ingest_stats.txt", [&](std::ostream& o) {
    o << "lines = " << stats.lines << "\nparsed = " << stats.parsed << "\nmalformed = " << stats.malformed
      << "\ndropped_empty = " << stats.dropped_empty << "\nfiltered_out = " << stats.filtered_out
      << "\nduplicates = " << stats.duplicates << "\nposts = " << posts.size() << '\n';
  });
  for (const auto& p : outputs) manifest.add_output(p);
  manifest.write_file((fs::path(a.out) / "manifest_ingest.txt").string());

  out << "ingested " << posts.size() << " posts from " << census.size() << " communities over "
      << global[0].bins.size() << " weeks (" << stats.malformed << " malformed, " << stats.filtered_out
      << " filtered out)\n";
  return kExitOk;
}

// --- topics -------------------------------------------------------------------

struct TopicsArgs {
  std::string work;
  std::string scope = "F";
  std::string outlier = "none";
  std::string k = "auto";
  double threshold = 0.1;
  int max_iterations = 100;
  std::uint64_t seed = 1;
  bool keep_stopwords = false;
  std::string out;
};

int cmd_topics(const TopicsArgs& a, std::ostream& out, std::ostream& err) {
  require(a.work, "--work");
  TopicModelConfig config;
  config.scope = parse_topic_scope(a.scope);
  const auto reduction = parse_outlier_reduction(a.outlier);
  if (a.k != "auto") {
    try {
      std::size_t used = 0;
      config.k = std::stoi(a.k, &used);
      if (used != a.k.size()) throw std::invalid_argument(a.k);
    } catch (const std::exception&) {
      throw FatalError("--k must be 'auto' or an integer");
    }
  }
  config.outlier_threshold = a.threshold;
  config.max_iterations = a.max_iterations;
  config.seed = a.seed;
  config.vectorizer.remove_stopwords = !a.keep_stopwords;

  IngestStats stats;
  auto posts = load_work_posts(a.work, stats);
  auto fit = fit_topics(posts, config);
  for (const auto& w : fit.warnings) err << "topics: warning: " << w << '\n';
  auto assignment = reduce_outliers(fit, reduction);

  std::string path = a.out.empty() ? (fs::path(a.work) / ("topics_" + to_string(config.scope) + "_" +
                                                           to_string(reduction) + ".csv")).string()
                                   : a.out;
  write_text(path, [&](std::ostream& o) { write_topic_labels(o, assignment); });

  RunManifest manifest("topics");
  manifest.set("scope", to_string(config.scope));
  manifest.set("outlier", to_string(reduction));
  manifest.set("k", a.k);
  manifest.set("threshold", csv::format_double(a.threshold));
  manifest.set("max_iterations", std::to_string(a.max_iterations));
  manifest.set("seed", std::to_string(a.seed));
  manifest.set("keep_stopwords", a.keep_stopwords ? "true" : "false");
  manifest.add_input((fs::path(a.work) / "posts.ndjson").string());
  manifest.add_output(path);
  manifest.write_file(manifest_path(path));

  out << "topics " << to_string(config.scope) << "/" << to_string(reduction) << ": " << assignment.topic_count()
      << " topics, " << assignment.outlier_count() << " outliers over " << posts.size() << " posts -> " << path
      << '\n';
  return kExitOk;
}

// --- classify -----------------------------------------------------------------

struct ClassifyArgs {
  std::string work;
  std::string train;
  std::string model;
  std::string model_out;
  std::string gold;
  std::string out;
  std::string report;
  std::uint64_t seed = 1;
  int epochs = 300;
};

int cmd_classify(const ClassifyArgs& a, std::ostream& out, std::ostream&) {
  require(a.work, "--work");
  if (a.train.empty() == a.model.empty()) throw FatalError("give exactly one of --train or --model");

  RunManifest manifest("classify");
  VeracityModel model;
  if (!a.train.empty()) {
    TrainingConfig tc;
    tc.seed = a.seed;
    tc.epochs = a.epochs;
    model = train_baseline(load_training_csv(a.train), tc);
    manifest.set("seed", std::to_string(a.seed));
    manifest.set("epochs", std::to_string(a.epochs));
    manifest.add_input(a.train);
    if (!a.model_out.empty()) write_text(a.model_out, [&](std::ostream& o) { model.save(o); });
  } else {
    std::ifstream in(a.model);
    if (!in) throw FatalError("cannot open model " + a.model);
    model = VeracityModel::load(in);
    manifest.add_input(a.model);
  }

  IngestStats stats;
  auto posts = load_work_posts(a.work, stats);
  std::vector<std::string> texts;
  texts.reserve(posts.size());
  for (const auto& p : posts) texts.push_back(p.text);
  auto predicted = model.classify_batch(texts);
  VeracityAssignment assignment;
  for (std::size_t i = 0; i < posts.size(); ++i) assignment.post_class.emplace(posts[i].id, predicted[i]);

  std::string path = a.out.empty() ? (fs::path(a.work) / "veracity.csv").string() : a.out;
  write_text(path, [&](std::ostream& o) { write_veracity_labels(o, assignment); });
  manifest.add_input((fs::path(a.work) / "posts.ndjson").string());
  manifest.add_output(path);
  if (!a.model_out.empty()) manifest.add_output(a.model_out);

  std::array<std::size_t, kVeracityClasses> counts{};
  for (auto v : predicted) ++counts[static_cast<std::size_t>(v)];
  out << "classified " << posts.size() << " posts: F=" << counts[0] << " T=" << counts[1] << " U=" << counts[2]
      << " -> " << path << '\n';

  if (!a.gold.empty()) {
    auto gold = load_veracity_labels(a.gold, id_set(posts));
    std::vector<Veracity> p, g;
    for (const auto& [id, cls] : gold.post_class) {
      g.push_back(cls);
      p.push_back(assignment.post_class.at(id));
    }
    auto report = classification_report(p, g);
    std::string rpath = a.report.empty() ? (fs::path(a.work) / "classification_report.csv").string() : a.report;
    write_text(rpath, [&](std::ostream& o) { write_class_report_csv(o, report); });
    manifest.add_input(a.gold);
    manifest.add_output(rpath);
    out << "accuracy " << report.accuracy << " on " << report.total << " gold labels -> " << rpath << '\n';
  }
  manifest.write_file(manifest_path(path));
  return kExitOk;
}

// --- metrics ------------------------------------------------------------------

struct MetricsArgs {
  std::string work;
  std::string topics;
  std::string veracity;
  std::string out;
  std::string tag;
  bool include_outliers = false;
  std::string gini_variant = "exact";
};

void write_panel(std::ostream& o, const char* column, const std::vector<OverloadSeries>& series,
                 const std::function<std::string(const OverloadEntry&)>& value) {
  o << "scope,iso_year,iso_week," << column << '\n';
  for (const auto& s : series)
    for (const auto& e : s.entries)
      csv::write_row(o, {s.scope.label(), std::to_string(e.week.iso_year), std::to_string(e.week.iso_week), value(e)});
}

int cmd_metrics(const MetricsArgs& a, std::ostream& out, std::ostream&) {
  require(a.work, "--work");
  require(a.topics, "--topics");
  require(a.veracity, "--veracity");
  const std::string dir = a.out.empty() ? a.work : a.out;
  fs::create_directories(dir);

  IngestStats stats;
  auto posts = load_work_posts(a.work, stats);
  auto ids = id_set(posts);
  auto topics = load_topic_labels(a.topics, ids);
  auto veracity = load_veracity_labels(a.veracity, ids);

  std::vector<BinSeries> bins = bin_weekly(posts, BinScope::global);
  auto communities = bin_weekly(posts, BinScope::per_community);
  bins.insert(bins.end(), communities.begin(), communities.end());

  OverloadOptions options{a.include_outliers, parse_gini_variant(a.gini_variant)};
  std::vector<OverloadSeries> overload;
  std::vector<FakeFractionSeries> fractions;
  try {
    for (const auto& b : bins) {
      overload.push_back(overload_series(topics, b, options));
      fractions.push_back(fake_fraction(veracity, b));
    }
  } catch (const Error& e) {
    throw FatalError(std::string("incomplete labels: ") + e.what());
  }

  std::vector<std::string> outputs;
  auto emit = [&](const std::string& name, auto&& body) {
    std::string path = with_tag(dir, name, a.tag);
    write_text(path, body);
    outputs.push_back(path);
  };
  auto opt_int = [](const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : std::string(); };
  emit("overload", [&](std::ostream& o) { write_overload_csv(o, overload); });
  emit("panel_a_posts", [&](std::ostream& o) {
    write_panel(o, "post_count", overload, [](const OverloadEntry& e) { return std::to_string(e.post_count); });
  });
  emit("panel_b_topics", [&](std::ostream& o) {
    write_panel(o, "topic_count", overload, [&](const OverloadEntry& e) { return opt_int(e.topic_count); });
  });
  emit("panel_c_ratio", [&](std::ostream& o) {
    write_panel(o, "ratio", overload, [](const OverloadEntry& e) { return csv::format_optional(e.ratio); });
  });
  emit("panel_d_gini", [&](std::ostream& o) {
    write_panel(o, "gini", overload, [](const OverloadEntry& e) { return csv::format_optional(e.gini); });
  });
  emit("panel_e_veracity", [&](std::ostream& o) { write_fraction_csv(o, fractions); });
  emit("entropy", [&](std::ostream& o) {
    write_panel(o, "entropy", overload, [](const OverloadEntry& e) { return csv::format_optional(e.entropy); });
  });

  // Cross-community mean with 95% band per week (global series excluded).
  emit("panel_aggregate", [&](std::ostream& o) {
    o << "metric,iso_year,iso_week,n,mean,ci_low,ci_high\n";
    if (overload.size() < 2) return;
    const std::size_t weeks = overload[0].entries.size();
    using Getter = std::function<std::optional<double>(std::size_t, std::size_t)>;
    std::vector<std::pair<const char*, Getter>> metrics = {
        {"post_count", [&](std::size_t s, std::size_t w) { return std::optional<double>(static_cast<double>(overload[s].entries[w].post_count)); }},
        {"topic_count", [&](std::size_t s, std::size_t w) {
           auto v = overload[s].entries[w].topic_count;
           return v ? std::optional<double>(static_cast<double>(*v)) : std::nullopt;
         }},
        {"ratio", [&](std::size_t s, std::size_t w) { return overload[s].entries[w].ratio; }},
        {"gini", [&](std::size_t s, std::size_t w) { return overload[s].entries[w].gini; }},
        {"fake_fraction", [&](std::size_t s, std::size_t w) { return fractions[s].entries[w].fake_fraction; }},
        {"true_fraction", [&](std::size_t s, std::size_t w) { return fractions[s].entries[w].true_fraction; }},
        {"unverified_fraction", [&](std::size_t s, std::size_t w) { return fractions[s].entries[w].unverified_fraction; }},
    };
    for (const auto& [name, get] : metrics) {
      for (std::size_t w = 0; w < weeks; ++w) {
        std::vector<double> values;
        for (std::size_t s = 1; s < overload.size(); ++s)
          if (auto v = get(s, w)) values.push_back(*v);
        auto band = confidence_band(values);
        const auto& week = overload[0].entries[w].week;
        csv::write_row(o, {name, std::to_string(week.iso_year), std::to_string(week.iso_week),
                           std::to_string(band.n), csv::format_optional(band.mean),
                           csv::format_optional(band.low), csv::format_optional(band.high)});
      }
    }
  });

  RunManifest manifest("metrics");
  manifest.set("include_outliers", a.include_outliers ? "true" : "false");
  manifest.set("gini_variant", a.gini_variant);
  manifest.set("tag", a.tag);
  manifest.add_input((fs::path(a.work) / "posts.ndjson").string());
  manifest.add_input(a.topics);
  manifest.add_input(a.veracity);
  for (const auto& p : outputs) manifest.add_output(p);
  manifest.write_file(
      (fs::path(dir) / (a.tag.empty() ? "manifest_metrics.txt" : "manifest_metrics_" + a.tag + ".txt")).string());

  out << "metrics for " << bins.size() - 1 << " communities over " << bins[0].bins.size() << " weeks -> " << dir
      << '\n';
  return kExitOk;
}

// --- correlate ------------------------------------------------------------------

struct CorrelateArgs {
  std::string work;
  std::string topics_global;
  std::string topics_community;
  std::string veracity;
  std::string schemes = "abc";
  std::string out;
  bool include_outliers = false;
  std::string gini_variant = "exact";
};

int cmd_correlate(const CorrelateArgs& a, std::ostream& out, std::ostream&) {
  require(a.work, "--work");
  require(a.veracity, "--veracity");
  const std::string dir = a.out.empty() ? a.work : a.out;
  fs::create_directories(dir);

  std::vector<SchemeSpec> schemes;
  for (char c : a.schemes) {
    if (c == ',' || c == ' ') continue;
    schemes.push_back(scheme_spec(c));
  }
  if (schemes.empty()) throw FatalError("--schemes selects nothing");

  IngestStats stats;
  auto posts = load_work_posts(a.work, stats);
  auto ids = id_set(posts);
  std::optional<TopicAssignment> global_topics, community_topics;
  for (const auto& s : schemes) {
    if (s.topic_scope == TopicScope::global && !global_topics) {
      if (a.topics_global.empty())
        throw FatalError(std::string("scheme ") + s.name + " needs --topics-global (F-scope labels)");
      global_topics = load_topic_labels(a.topics_global, ids);
    }
    if (s.topic_scope == TopicScope::per_community && !community_topics) {
      if (a.topics_community.empty())
        throw FatalError(std::string("scheme ") + s.name + " needs --topics-community (Ds-scope labels)");
      community_topics = load_topic_labels(a.topics_community, ids);
    }
  }
  auto veracity = load_veracity_labels(a.veracity, ids);
  auto global_bins = bin_weekly(posts, BinScope::global);
  auto community_bins = bin_weekly(posts, BinScope::per_community);

  CorrelationInputs inputs;
  inputs.community_bins = community_bins;
  inputs.global_bins = &global_bins[0];
  inputs.global_topics = global_topics ? &*global_topics : nullptr;
  inputs.community_topics = community_topics ? &*community_topics : nullptr;
  inputs.veracity = &veracity;
  inputs.overload = {a.include_outliers, parse_gini_variant(a.gini_variant)};

  RunManifest manifest("correlate");
  manifest.set("schemes", a.schemes);
  manifest.set("include_outliers", a.include_outliers ? "true" : "false");
  manifest.set("gini_variant", a.gini_variant);
  manifest.add_input((fs::path(a.work) / "posts.ndjson").string());
  if (global_topics) manifest.add_input(a.topics_global);
  if (community_topics) manifest.add_input(a.topics_community);
  manifest.add_input(a.veracity);

  for (const auto& s : schemes) {
    std::vector<CorrelationResult> results;
    try {
      results = run_scheme(s, inputs);
    } catch (const Error& e) {
      throw FatalError(std::string("scheme ") + s.name + ": " + e.what());
    }
    std::string path = (fs::path(dir) / (std::string("correlation_") + s.name + ".csv")).string();
    write_text(path, [&](std::ostream& o) { write_correlation_csv(o, results); });
    manifest.add_output(path);
    std::size_t significant = 0, skipped = 0;
    for (const auto& r : results) {
      significant += r.significant;
      skipped += r.skipped();
    }
    out << "scheme " << s.name << ": " << results.size() << " communities, " << significant << " significant, "
        << skipped << " skipped -> " << path << '\n';
  }
  manifest.write_file((fs::path(dir) / "manifest_correlate.txt").string());
  return kExitOk;
}

// --- synth --------------------------------------------------------------------

int cmd_synth(const std::string& config_path, const std::string& dir, CLI::App& sub,
              const synth::SynthConfig& overrides, std::ostream& out) {
  require(dir, "--out");
  synth::SynthConfig config = config_path.empty() ? synth::SynthConfig{} : synth::load_config(config_path);
  if (sub.count("--seed")) config.seed = overrides.seed;
  if (sub.count("--weeks")) config.weeks = overrides.weeks;
  if (sub.count("--communities")) config.communities = overrides.communities;
  if (sub.count("--posts-per-week")) config.posts_per_week = overrides.posts_per_week;
  if (sub.count("--rho")) config.target_rho = overrides.target_rho;
  config.validate();

  auto ds = synth::gen_stream(config);
  auto written = synth::write_dataset(ds, dir);

  RunManifest manifest("synth");
  std::istringstream lines(synth::to_config_text(config));
  std::string line;
  while (std::getline(lines, line)) {
    auto eq = line.find(" = ");
    manifest.set(line.substr(0, eq), line.substr(eq + 3));
  }
  for (const auto& p : written) manifest.add_output(p);
  manifest.write_file((fs::path(dir) / "manifest_synth.txt").string());

  out << "synthesized " << ds.posts.size() << " posts in " << ds.communities.size() << " communities over "
      << config.weeks << " weeks -> " << dir << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Information-overload and fake-news analytics over weekly post streams", "iol"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string config;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Flat key = value file; keys are long option names");
  };

  IngestArgs ingest;
  auto* s_ingest = app.add_subcommand("ingest", "Parse, filter and bin post dumps");
  add_config(s_ingest);
  s_ingest->add_option("--input", ingest.inputs, "NDJSON post dump(s), optionally gzip-compressed")->delimiter(',');
  s_ingest->add_option("--keywords", ingest.keywords, "Community name keywords (case-insensitive)")
      ->delimiter(',')
      ->capture_default_str();
  s_ingest->add_option("--out", ingest.out, "Work directory");
  s_ingest->add_flag("--drop-empty", ingest.drop_empty, "Drop posts with empty or deleted text");

  TopicsArgs topics;
  auto* s_topics = app.add_subcommand("topics", "Fit the builtin topic model and export labels");
  add_config(s_topics);
  s_topics->add_option("--work", topics.work, "Work directory written by ingest");
  s_topics->add_option("--scope", topics.scope, "Ds (per community) or F (whole dataset)")->capture_default_str();
  s_topics->add_option("--outlier", topics.outlier, "none, distribution or centroid")->capture_default_str();
  s_topics->add_option("--k", topics.k, "Topics per fitted unit, or auto")->capture_default_str();
  s_topics->add_option("--threshold", topics.threshold, "Outlier cosine threshold")->capture_default_str();
  s_topics->add_option("--max-iterations", topics.max_iterations)->capture_default_str();
  s_topics->add_option("--seed", topics.seed)->capture_default_str();
  s_topics->add_flag("--keep-stopwords", topics.keep_stopwords);
  s_topics->add_option("--out", topics.out, "Label file (default <work>/topics_<scope>_<outlier>.csv)");

  ClassifyArgs classify;
  auto* s_classify = app.add_subcommand("classify", "Assign F/T/U veracity classes to every post");
  add_config(s_classify);
  s_classify->add_option("--work", classify.work, "Work directory written by ingest");
  s_classify->add_option("--train", classify.train, "Training CSV text,class");
  s_classify->add_option("--model", classify.model, "Previously saved model file");
  s_classify->add_option("--model-out", classify.model_out, "Save the trained model here");
  s_classify->add_option("--gold", classify.gold, "Gold post_id,class labels for a classification report");
  s_classify->add_option("--report", classify.report, "Report path (default <work>/classification_report.csv)");
  s_classify->add_option("--out", classify.out, "Label file (default <work>/veracity.csv)");
  s_classify->add_option("--seed", classify.seed)->capture_default_str();
  s_classify->add_option("--epochs", classify.epochs)->capture_default_str();

  MetricsArgs metrics;
  auto* s_metrics = app.add_subcommand("metrics", "Weekly PC, TC, TC/PC, Gini and veracity fractions");
  add_config(s_metrics);
  s_metrics->add_option("--work", metrics.work, "Work directory written by ingest");
  s_metrics->add_option("--topics", metrics.topics, "Topic labels post_id,topic_id");
  s_metrics->add_option("--veracity", metrics.veracity, "Veracity labels post_id,class");
  s_metrics->add_option("--out", metrics.out, "Output directory (default: work directory)");
  s_metrics->add_option("--tag", metrics.tag, "Suffix for output file names");
  s_metrics->add_flag("--include-outliers", metrics.include_outliers);
  s_metrics->add_option("--gini-variant", metrics.gini_variant, "exact, rewritten, degenerate_approx, bias_corrected")
      ->capture_default_str();

  CorrelateArgs correlate;
  auto* s_correlate = app.add_subcommand("correlate", "Per-community Pearson correlation of f_t and G_t");
  add_config(s_correlate);
  s_correlate->add_option("--work", correlate.work, "Work directory written by ingest");
  s_correlate->add_option("--topics-global", correlate.topics_global, "F-scope topic labels (schemes a, b)");
  s_correlate->add_option("--topics-community", correlate.topics_community, "Ds-scope topic labels (scheme c)");
  s_correlate->add_option("--veracity", correlate.veracity, "Veracity labels post_id,class");
  s_correlate->add_option("--schemes", correlate.schemes, "Any of a, b, c")->capture_default_str();
  s_correlate->add_option("--out", correlate.out, "Output directory (default: work directory)");
  s_correlate->add_flag("--include-outliers", correlate.include_outliers);
  s_correlate->add_option("--gini-variant", correlate.gini_variant)->capture_default_str();

  std::string synth_config, synth_out;
  synth::SynthConfig overrides;
  auto* s_synth = app.add_subcommand("synth", "Generate a synthetic dataset with ground truth");
  s_synth->add_option("--config", synth_config, "Synthetic dataset config (key = value)");
  s_synth->add_option("--out", synth_out, "Output directory");
  s_synth->add_option("--seed", overrides.seed);
  s_synth->add_option("--weeks", overrides.weeks);
  s_synth->add_option("--communities", overrides.communities);
  s_synth->add_option("--posts-per-week", overrides.posts_per_week);
  s_synth->add_option("--rho", overrides.target_rho);

  std::vector<std::string> argv;
  argv.reserve(args.size());
  for (auto it = args.rbegin(); it != args.rend(); ++it) argv.push_back(*it);

  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, eo;
    int code = app.exit(e, o, eo);
    out << o.str();
    err << eo.str();
    return code == 0 ? kExitOk : kExitFatal;
  }

  try {
    auto* sub = app.get_subcommands().front();
    if (sub != s_synth && !config.empty()) merge_config(*sub, config);
    if (sub == s_ingest) return cmd_ingest(ingest, out, err);
    if (sub == s_topics) return cmd_topics(topics, out, err);
    if (sub == s_classify) return cmd_classify(classify, out, err);
    if (sub == s_metrics) return cmd_metrics(metrics, out, err);
    if (sub == s_correlate) return cmd_correlate(correlate, out, err);
    if (sub == s_synth) return cmd_synth(synth_config, synth_out, *s_synth, overrides, out);
  } catch (const EmptyResult& e) {
    err << "iol: " << e.what() << '\n';
    return kExitEmpty;
  } catch (const std::exception& e) {
    err << "iol: " << e.what() << '\n';
    return kExitFatal;
  }
  return kExitFatal;
}

}  // namespace iol::cli
