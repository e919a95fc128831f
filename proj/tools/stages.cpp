#include "stages.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include <json.hpp>

#include "moocscope/characterize.hpp"
#include "moocscope/coherence.hpp"
#include "moocscope/corpus.hpp"
#include "moocscope/error.hpp"
#include "moocscope/io.hpp"
#include "moocscope/langid.hpp"
#include "moocscope/lda.hpp"
#include "moocscope/sentiment.hpp"
#include "moocscope/stats.hpp"
#include "moocscope/synth.hpp"
#include "moocscope/textprep.hpp"

namespace moocscope::cli {

namespace {

using ojson = nlohmann::ordered_json;

constexpr const char* kReviews = "corpus.reviews.jsonl";
constexpr const char* kCourses = "corpus.courses.jsonl";
constexpr const char* kScores = "sentiment.scores.jsonl";

std::string or_default(const std::string& value, const fs::path& fallback) {
  return value.empty() ? fallback.string() : value;
}

InputFormat format_for(const std::string& path, const std::string& format, const std::string& field) {
  if (format == "jsonl") return InputFormat::kJsonl;
  if (format == "csv") return InputFormat::kCsv;
  if (format != "auto") throw ConfigError(field + ": unknown format '" + format + "' (auto, jsonl, csv)");
  return fs::path(path).extension() == ".csv" ? InputFormat::kCsv : InputFormat::kJsonl;
}

// Corpus persisted by ingest (or given explicitly). Intermediates are
// expected to be clean, so any reject is an error.
Corpus stage_corpus(Run& run, const std::string& reviews, const std::string& courses, const std::string& stage) {
  const fs::path rpath = or_default(reviews, run.out(kReviews));
  std::optional<fs::path> cpath;
  if (!courses.empty())
    cpath = courses;
  else if (reviews.empty() && fs::exists(run.out(kCourses)))
    cpath = run.out(kCourses);
  run.input(rpath, stage + ".reviews");
  if (cpath) run.input(*cpath, stage + ".courses");
  auto res = load_corpus(rpath, format_for(rpath.string(), "auto", stage + ".reviews"), cpath);
  if (!res.rejects.empty())
    throw Error(rpath.string() + ": " + std::to_string(res.rejects.size()) + " invalid records (run ingest first)");
  return std::move(res.corpus);
}

std::vector<TokenDoc> stage_docs(Run& run, const fs::path& path, const std::string& field) {
  run.input(path, field);
  return token_docs_from_jsonl(read_text_file(path));
}

fs::path docs_for(Run& run, const std::string& input, const std::string& docs, const std::string& field) {
  if (!docs.empty()) return docs;
  if (input == "all") return run.out("tokens.jsonl");
  if (input == "qual" || input == "content") return run.out("tokens." + input + ".jsonl");
  throw ConfigError(field + ": unknown input '" + input + "' (all, qual, content)");
}

std::string model_name(const std::string& name, const std::string& input, const std::string& docs) {
  if (!name.empty()) return name;
  if (!docs.empty()) return fs::path(docs).stem().string();
  return input;
}

LdaConfig lda_config(std::size_t k, double alpha, double beta, std::size_t iterations, std::size_t burn_in,
                     std::uint64_t seed, const std::string& stage) {
  if (alpha < 0.0) throw ConfigError(stage + ".alpha: must be positive (0 selects 50/K)");
  if (beta <= 0.0) throw ConfigError(stage + ".beta: must be positive");
  if (iterations < 1) throw ConfigError(stage + ".iterations: must be at least 1");
  LdaConfig c;
  c.k = k;
  if (alpha > 0.0) c.alpha = alpha;
  c.beta = beta;
  c.iterations = iterations;
  c.burn_in = burn_in;
  c.seed = seed;
  return c;
}

ojson manova_json(const GroupedTopicMatrix& m, const StatsOptions& o) {
  ojson j;
  j["n_rows"] = m.rows.rows;
  std::map<std::string, std::size_t> sizes;
  for (const auto& g : m.groups) ++sizes[g];
  j["group_sizes"] = sizes;
  try {
    ManovaOptions mo;
    mo.fallback_permutations = o.permutations;
    mo.seed = o.seed;
    const auto r = manova_pillai(m, mo);
    j["pillai"] = r.pillai;
    j["f"] = std::isfinite(r.f) ? ojson(r.f) : ojson(nullptr);
    j["df1"] = r.df1;
    j["df2"] = r.df2;
    j["p_value"] = r.p_value;
    j["dims"] = r.dims;
    j["singular"] = r.singular;
    if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
    j["permutation_p"] = permutation_test(m, o.permutations, o.seed);
    j["permutations"] = o.permutations;
  } catch (const InvalidArgument& e) {
    j["error"] = e.what();
  }
  return j;
}

std::string label_lines(const std::vector<SentimentScore>& scores) {
  std::string out;
  for (const auto& s : scores) {
    ojson j;
    j["review_id"] = s.review_id;
    j["label"] = to_string(s.label);
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace

int run_ingest(const IngestOptions& o, Run& run) {
  if (o.reviews.empty()) throw ConfigError("ingest.reviews: required");
  run.input(o.reviews, "ingest.reviews");
  std::optional<fs::path> courses;
  if (!o.courses.empty()) courses = run.input(o.courses, "ingest.courses");
  if (o.min_reviews < 1) throw ConfigError("ingest.min_reviews: must be at least 1");
  auto loaded = load_corpus(o.reviews, format_for(o.reviews, o.format, "ingest.format"), courses);
  run.write("ingest.rejects.jsonl", rejects_to_jsonl(loaded.rejects));
  run.note("records_read", std::to_string(loaded.records_read));
  run.note("rejected", std::to_string(loaded.rejects.size()));
  run.note("duplicate_user_course", std::to_string(loaded.duplicate_user_course));
  if (loaded.corpus.reviews().empty()) {
    run.finish();
    std::cerr << "ingest: no valid reviews in " << o.reviews << " (" << loaded.rejects.size()
              << " rejects written to ingest.rejects.jsonl)\n";
    return 1;
  }
  Corpus corpus = std::move(loaded.corpus);
  if (o.language != "any") {
    auto lf = filter_language(corpus, o.language, LanguageDetector::bundled());
    run.note("language_detected", std::to_string(lf.detected));
    run.note("language_removed_reviews", std::to_string(lf.removed_reviews));
    corpus = std::move(lf.corpus);
  }
  auto mf = filter_min_reviews(corpus, o.min_reviews);
  run.note("min_reviews_removed_courses", std::to_string(mf.removed_courses));
  corpus = std::move(mf.corpus);
  run.note("reviews", std::to_string(corpus.reviews().size()));
  run.note("courses", std::to_string(corpus.courses().size()));
  run.write(kReviews, reviews_to_jsonl(corpus));
  run.write(kCourses, courses_to_jsonl(corpus));
  run.finish();
  std::cerr << "ingest: " << corpus.reviews().size() << " reviews, " << corpus.courses().size() << " courses, "
            << loaded.rejects.size() << " rejects\n";
  if (o.strict && !loaded.rejects.empty()) return 1;
  return corpus.reviews().empty() ? 1 : 0;
}

int run_preprocess(const PreprocessOptions& o, Run& run) {
  const Corpus corpus = stage_corpus(run, o.reviews, o.courses, "preprocess");
  const StopList stoplist =
      o.stopwords.empty() ? default_stoplist() : parse_stoplist(read_text_file(run.input(o.stopwords, "preprocess.stopwords")));
  const CategoryLexicon lexicon = o.lexicon.empty()
                                      ? CategoryLexicon::bundled()
                                      : CategoryLexicon::parse(read_text_file(run.input(o.lexicon, "preprocess.lexicon")));
  std::vector<TokenDoc> docs, qual, content;
  for (const auto& r : corpus.reviews()) docs.push_back(preprocess(r.review_id, r.text, stoplist));
  for (const auto& d : docs) {
    if (auto q = project_vocabulary(d, lexicon, VocabularyCategory::kQualitative); !q.empty) qual.push_back(q.doc);
    if (auto c = project_vocabulary(d, lexicon, VocabularyCategory::kContent); !c.empty) content.push_back(c.doc);
  }
  const auto freq = build_frequency_table(docs);
  std::string csv = "word,count,category\n";
  std::vector<std::pair<std::string, std::size_t>> by_count(freq.counts.begin(), freq.counts.end());
  std::stable_sort(by_count.begin(), by_count.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [w, n] : by_count) {
    const auto cat = lexicon.find(w);
    csv += csv_escape(w) + "," + std::to_string(n) + "," + (cat ? std::string(to_string(*cat)) : std::string()) + "\n";
  }
  std::string candidates;
  for (const auto& w : nominate_candidates(freq, o.min_count))
    if (!lexicon.find(w)) candidates += w + "\n";
  run.write("tokens.jsonl", token_docs_to_jsonl(docs));
  run.write("tokens.qual.jsonl", token_docs_to_jsonl(qual));
  run.write("tokens.content.jsonl", token_docs_to_jsonl(content));
  run.write("preprocess.frequency.csv", csv);
  run.write("preprocess.candidates.txt", candidates);
  run.note("docs", std::to_string(docs.size()));
  run.note("qual_docs", std::to_string(qual.size()));
  run.note("content_docs", std::to_string(content.size()));
  run.note("tokens", std::to_string(freq.total_tokens));
  run.finish();
  std::cerr << "preprocess: " << docs.size() << " docs (" << qual.size() << " qualitative, " << content.size()
            << " content non-empty)\n";
  return 0;
}

int run_sentiment(const SentimentStageOptions& o, Run& run) {
  if (o.neg > o.pos) throw ConfigError("sentiment.neg: must not exceed sentiment.pos");
  SentimentEngine engine;
  try {
    engine = parse_engine(o.engine);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("sentiment.engine: ") + e.what());
  }
  const Corpus corpus = stage_corpus(run, o.reviews, o.courses, "sentiment");
  std::vector<SentimentScore> scores;
  if (engine == SentimentEngine::kExternal) {
    if (o.labels.empty()) throw ConfigError("sentiment.labels: required for the external engine");
    run.input(o.labels, "sentiment.labels");
    auto imp = import_external_labels(read_text_file(o.labels), &corpus, o.labels);
    run.write("sentiment.rejects.jsonl", rejects_to_jsonl(imp.rejects));
    run.note("external_rejects", std::to_string(imp.rejects.size()));
    run.note("external_unknown_ids", std::to_string(imp.unknown_ids.size()));
    scores = std::move(imp.scores);
  } else {
    SentimentOptions so;
    so.engine = engine;
    so.valence.alpha = o.alpha;
    so.valence.negation_factor = o.negation;
    so.valence.lookback = o.lookback;
    so.pos_threshold = o.pos;
    so.neg_threshold = o.neg;
    so.raw_text = o.raw_text;
    scores = score_corpus(corpus, so);
  }
  const auto agg = aggregate_course_sentiment(scores, corpus);
  std::string csv = "course_id,mean_compound,n_positive,n_neutral,n_negative,majority_label,n_scored\n";
  for (const auto& c : agg.courses) {
    csv += csv_escape(c.course_id) + "," + (c.mean_compound ? format_double(*c.mean_compound) : std::string());
    for (auto l : {SentimentLabel::kPositive, SentimentLabel::kNeutral, SentimentLabel::kNegative})
      csv += "," + std::to_string(c.label_counts.count(l) ? c.label_counts.at(l) : 0);
    csv += "," + std::string(to_string(c.majority_label)) + "," + std::to_string(c.n_scored) + "\n";
  }
  ojson summary;
  summary["engine"] = to_string(engine);
  summary["n_scored"] = scores.size();
  std::map<std::string, std::size_t> dist;
  double sum = 0.0;
  std::size_t n_compound = 0;
  for (const auto& s : scores) {
    ++dist[std::string(to_string(s.label))];
    if (s.compound) {
      sum += *s.compound;
      ++n_compound;
    }
  }
  summary["label_counts"] = dist;
  summary["mean_compound"] = n_compound ? ojson(sum / static_cast<double>(n_compound)) : ojson(nullptr);
  for (auto [key, method] : {std::pair{"pearson", CorrelationMethod::kPearson},
                             std::pair{"spearman", CorrelationMethod::kSpearman}}) {
    try {
      summary["rating_correlation"][key] = correlate_sentiment_rating(scores, corpus, method);
    } catch (const Error& e) {
      summary["rating_correlation"][key] = nullptr;
      summary["rating_correlation"][std::string(key) + "_error"] = e.what();
    }
  }
  summary["excluded_courses"] = agg.excluded_courses;
  run.write(kScores, scores_to_jsonl(scores));
  run.write("sentiment.courses.csv", csv);
  run.write("sentiment.summary.json", summary.dump(2) + "\n");
  run.note("engine", std::string(to_string(engine)));
  run.finish();
  std::cerr << "sentiment: " << scores.size() << " reviews scored with " << to_string(engine) << "\n";
  return 0;
}

int run_lda_train(const LdaStageOptions& o, Run& run) {
  const auto path = docs_for(run, o.input, o.docs, "lda-train.input");
  const auto name = model_name(o.name, o.input, o.docs);
  if (o.k < 2) throw ConfigError("lda-train.k: must be at least 2");
  const auto cfg = lda_config(o.k, o.alpha, o.beta, o.iterations, o.burn_in, o.seed, "lda-train");
  const auto docs = stage_docs(run, path, "lda-train.docs");
  if (docs.empty()) throw Error(path.string() + ": no documents to train on");
  run.seed("lda", cfg.seed);
  const auto model = train_lda(docs, cfg);
  auto top = top_words(model, std::min(o.top_n, model.vocab_size()));
  if (!o.labels.empty()) {
    apply_topic_labels(top, parse_topic_labels(read_text_file(run.input(o.labels, "lda-train.labels"))));
  }
  const auto props = topic_proportions(model, docs);
  std::string csv = "topic_id,label,percent\n";
  for (std::size_t k = 0; k < model.k; ++k)
    csv += std::to_string(k) + "," + csv_escape(top[k].label.value_or("topic_" + std::to_string(k))) + "," +
           format_double(props.percent[k]) + "\n";
  run.write("lda." + name + ".model.json", model_to_json(model));
  run.write("lda." + name + ".topics.csv", topics_to_csv(top));
  run.write("lda." + name + ".proportions.csv", csv);
  run.note("docs", std::to_string(docs.size()));
  run.note("vocab", std::to_string(model.vocab_size()));
  run.note("alpha", format_double(model.alpha));
  run.finish();
  std::cerr << "lda-train: " << name << " K=" << model.k << " on " << docs.size() << " docs, V=" << model.vocab_size()
            << "\n";
  return 0;
}

int run_coherence_sweep(const SweepStageOptions& o, Run& run) {
  const auto path = docs_for(run, o.input, o.docs, "coherence-sweep.input");
  const auto name = model_name(o.name, o.input, o.docs);
  if (o.k_min < 2) throw ConfigError("coherence-sweep.k_min: must be at least 2");
  if (o.k_max < o.k_min) throw ConfigError("coherence-sweep.k_max: must not be below k_min");
  if (o.step < 1) throw ConfigError("coherence-sweep.step: must be positive");
  if (o.window < 2) throw ConfigError("coherence-sweep.window: must be at least 2");
  SweepConfig sc;
  sc.k_min = o.k_min;
  sc.k_max = o.k_max;
  sc.step = o.step;
  sc.lda = lda_config(o.k_min, o.alpha, o.beta, o.iterations, 0, o.seed, "coherence-sweep");
  sc.top_n = o.top_n;
  sc.window = o.window;
  sc.cv_tolerance = o.tolerance;
  const auto docs = stage_docs(run, path, "coherence-sweep.docs");
  run.seed("lda_base", o.seed);
  const auto report = sweep_topic_count(docs, sc);
  for (const auto& e : report.entries) {
    run.seed("k" + std::to_string(e.k), e.seed);
    if (e.error) std::cerr << "coherence-sweep: K=" << e.k << " failed: " << *e.error << "\n";
  }
  run.write("coherence." + name + ".csv", coherence_report_to_csv(report));
  run.note("recommended_k", std::to_string(report.recommended_k));
  run.note("parsimonious_k", std::to_string(report.parsimonious_k));
  run.finish();
  std::cerr << "coherence-sweep: recommended K=" << report.recommended_k << " (parsimonious K="
            << report.parsimonious_k << ")\n";
  return 0;
}

int run_characterize(const CharacterizeOptions& o, Run& run) {
  ProfileOrder order;
  if (o.order == "reviews")
    order = ProfileOrder::kReviewCount;
  else if (o.order == "rating")
    order = ProfileOrder::kRatingMean;
  else
    throw ConfigError("characterize.order: unknown order '" + o.order + "' (reviews, rating)");
  const Corpus corpus = stage_corpus(run, o.reviews, o.courses, "characterize");
  const fs::path scores_path = or_default(o.scores, run.out(kScores));
  run.input(scores_path, "characterize.scores");
  const auto scores = scores_from_jsonl(read_text_file(scores_path));
  if (scores.empty()) throw Error(scores_path.string() + ": no sentiment scores");
  const SentimentEngine engine = scores.front().engine;

  auto load = [&](const std::string& model, const std::string& docs, const std::string& labels,
                  const std::string& which) {
    const fs::path mpath = or_default(model, run.out("lda." + which + ".model.json"));
    run.input(mpath, "characterize." + which + "_model");
    auto m = load_model(mpath);
    auto d = stage_docs(run, or_default(docs, run.out("tokens." + which + ".jsonl")), "characterize." + which + "_docs");
    std::vector<std::string> names;
    if (!labels.empty()) {
      const auto parsed = parse_topic_labels(read_text_file(run.input(labels, "characterize." + which + "_labels")));
      for (std::size_t k = 0; k < m.k; ++k) {
        auto it = parsed.find(k);
        names.push_back(it == parsed.end() ? "topic_" + std::to_string(k) : it->second);
      }
    }
    return std::tuple{std::move(m), std::move(d), std::move(names)};
  };
  const auto [qm, qd, ql] = load(o.qual_model, o.qual_docs, o.qual_labels, "qual");
  const auto [cm, cd, cl] = load(o.content_model, o.content_docs, o.content_labels, "content");
  const ModelView qual{&qm, qd, ql};
  const ModelView content{&cm, cd, cl};
  ProfileOptions po;
  po.low_evidence_threshold = o.low_evidence;
  const auto agg = aggregate_course_sentiment(scores, corpus);
  const auto profiles = build_profiles(corpus, agg.courses, engine, qual, content, order, po);
  if (profiles.empty()) throw Error("no course has both reviews and sentiment scores");
  run.write("report.json", emit_report_json(profiles, run_timestamp()));
  run.write("report.csv", emit_report_csv(profiles));
  run.write("plot_data.csv", emit_plot_data(profiles));
  std::size_t low = 0;
  for (const auto& p : profiles) low += p.low_evidence;
  run.note("profiles", std::to_string(profiles.size()));
  run.note("low_evidence", std::to_string(low));
  run.finish();
  std::cerr << "characterize: " << profiles.size() << " course profiles (" << low << " low evidence)\n";
  return 0;
}

int run_stats(const StatsOptions& o, Run& run) {
  if (o.permutations < 100) throw ConfigError("stats.permutations: must be at least 100");
  const Corpus corpus = stage_corpus(run, o.reviews, o.courses, "stats");
  ojson j;
  const auto hist = rating_histogram(corpus);
  const auto pct = hist.percentages();
  std::string csv = "rating,count,percent\n";
  for (const auto& [bucket, n] : hist.buckets)
    csv += format_double(bucket) + "," + std::to_string(n) + "," + format_double(pct.at(bucket)) + "\n";
  j["n_reviews"] = hist.total;
  const std::vector<double> edges = {1.0, 2.0, 3.0, 4.0, 4.5, 5.0};
  const auto means = course_mean_distribution(corpus, edges);
  ojson cm;
  cm["edges"] = means.edges;
  cm["counts"] = means.counts;
  cm["percent"] = means.percentages();
  j["course_mean_rating"] = cm;

  const fs::path scores_path = or_default(o.scores, run.out(kScores));
  if (fs::exists(scores_path)) {
    run.input(scores_path, "stats.scores");
    const auto scores = scores_from_jsonl(read_text_file(scores_path));
    for (auto [key, method] : {std::pair{"pearson", CorrelationMethod::kPearson},
                               std::pair{"spearman", CorrelationMethod::kSpearman}}) {
      try {
        j["sentiment_rating_correlation"][key] = correlate_sentiment_rating(scores, corpus, method);
      } catch (const Error& e) {
        j["sentiment_rating_correlation"][key] = nullptr;
        j["sentiment_rating_correlation"][std::string(key) + "_error"] = e.what();
      }
    }
  }
  const fs::path report_path = or_default(o.report, run.out("report.json"));
  if (fs::exists(report_path)) {
    run.input(report_path, "stats.report");
    const auto profiles = parse_report_json(read_text_file(report_path));
    run.seed("permutation", o.seed);
    j["manova"]["qual"] = manova_json(grouped_topics(profiles, false, o.include_neutral), o);
    j["manova"]["content"] = manova_json(grouped_topics(profiles, true, o.include_neutral), o);
  }
  run.write("stats.ratings.csv", csv);
  run.write("stats.json", j.dump(2) + "\n");
  run.finish();
  std::cerr << "stats: " << hist.total << " reviews\n";
  return 0;
}

int run_synth(const SynthOptions& o, Run& run) {
  run.seed("synth", o.seed);
  if (o.kind == "fixture") {
    FixtureSpec fs;
    fs.n_reviews = o.n_reviews;
    fs.n_courses = o.n_courses;
    fs.n_spanish = o.n_spanish;
    fs.n_untagged = o.n_untagged;
    fs.seed = o.seed;
    ReviewFixture fx;
    try {
      fx = generate_review_fixture(fs);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("synth: ") + e.what());
    }
    run.write("synth.reviews.jsonl", reviews_to_jsonl(fx.corpus));
    run.write("synth.courses.jsonl", courses_to_jsonl(fx.corpus));
    run.write("synth.labels.jsonl", label_lines(fx.external_labels));
    run.note("reviews", std::to_string(fx.corpus.reviews().size()));
    run.finish();
    std::cerr << "synth: fixture with " << fx.corpus.reviews().size() << " reviews\n";
    return 0;
  }
  if (o.kind != "planted") throw ConfigError("synth.kind: unknown kind '" + o.kind + "' (planted, fixture)");
  PlantedSpec spec;
  spec.k = o.k;
  spec.v = o.v;
  spec.d = o.d;
  spec.doc_len = o.doc_len;
  spec.alpha = o.alpha;
  spec.beta = o.beta;
  spec.exact_ratings = o.exact_ratings;
  spec.n_courses = o.n_courses;
  spec.seed = o.seed;
  try {
    validate(spec);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("synth: ") + e.what());
  }
  const auto pc = generate_corpus(spec);
  ojson truth;
  truth["k"] = spec.k;
  truth["seed"] = spec.seed;
  truth["vocab"] = pc.vocab;
  auto rows = [](const Matrix& m) {
    auto arr = ojson::array();
    for (std::size_t r = 0; r < m.rows; ++r) arr.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
    return arr;
  };
  truth["phi"] = rows(pc.true_phi);
  truth["theta"] = rows(pc.true_theta);
  std::vector<SentimentScore> labels;
  for (std::size_t i = 0; i < pc.docs.size(); ++i)
    labels.push_back({pc.docs[i].review_id, SentimentEngine::kExternal, std::nullopt, pc.labels[i]});
  run.write("synth.reviews.jsonl", reviews_to_jsonl(pc.corpus));
  run.write("synth.courses.jsonl", courses_to_jsonl(pc.corpus));
  run.write("synth.tokens.jsonl", token_docs_to_jsonl(pc.docs));
  run.write("synth.labels.jsonl", label_lines(labels));
  run.write("synth.truth.json", truth.dump() + "\n");
  run.note("reviews", std::to_string(pc.docs.size()));
  run.finish();
  std::cerr << "synth: planted corpus K=" << spec.k << " V=" << spec.v << " D=" << spec.d << "\n";
  return 0;
}

}  // namespace moocscope::cli
