// moocscope: staged review analytics. Each subcommand reads the artifacts of
// earlier stages from the output directory and writes its own along with a
// manifest (config snapshot, seeds, input and output digests).

#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "moocscope/error.hpp"
#include "run.hpp"
#include "stages.hpp"

using namespace moocscope;
using namespace moocscope::cli;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string out = "moocscope-out";
  std::string verify;
  IngestOptions ingest;
  PreprocessOptions preprocess;
  SentimentStageOptions sentiment;
  LdaStageOptions lda;
  SweepStageOptions sweep;
  CharacterizeOptions characterize;
  StatsOptions stats;
  SynthOptions synth;
};

void add_ingest(CLI::App& app, IngestOptions& o) {
  auto* s = app.add_subcommand("ingest", "Load, validate and filter a review corpus");
  s->add_option("--reviews", o.reviews, "Reviews file (JSONL or CSV)");
  s->add_option("--courses", o.courses, "Course records (JSONL or CSV)");
  s->add_option("--format", o.format, "auto, jsonl or csv")->capture_default_str();
  s->add_option("--language", o.language, "Keep this language code; 'any' keeps all")->capture_default_str();
  s->add_option("--min-reviews", o.min_reviews, "Drop courses with fewer reviews")->capture_default_str();
  s->add_flag("--strict", o.strict, "Fail when any record is rejected");
}

void add_preprocess(CLI::App& app, PreprocessOptions& o) {
  auto* s = app.add_subcommand("preprocess", "Clean, lemmatize, remove stopwords and project vocabularies");
  s->add_option("--reviews", o.reviews, "Reviews (default: ingest output)");
  s->add_option("--courses", o.courses, "Courses");
  s->add_option("--stopwords", o.stopwords, "Stoplist file (default: bundled)");
  s->add_option("--lexicon", o.lexicon, "word<TAB>category file (default: bundled)");
  s->add_option("--min-count", o.min_count, "Nomination threshold for uncategorized words")->capture_default_str();
}

void add_sentiment(CLI::App& app, SentimentStageOptions& o) {
  auto* s = app.add_subcommand("sentiment", "Score reviews and aggregate per course");
  s->add_option("--reviews", o.reviews, "Reviews (default: ingest output)");
  s->add_option("--courses", o.courses, "Courses");
  s->add_option("--engine", o.engine, "valence, polarity or external")->capture_default_str();
  s->add_option("--labels", o.labels, "External labels JSONL");
  s->add_option("--pos", o.pos, "Positive threshold")->capture_default_str();
  s->add_option("--neg", o.neg, "Negative threshold")->capture_default_str();
  s->add_option("--alpha", o.alpha, "Compound normalization constant")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--negation", o.negation, "Negation factor")->capture_default_str();
  s->add_option("--lookback", o.lookback, "Tokens inspected before a hit")->capture_default_str()->check(CLI::Range(1, 10));
  s->add_flag("--raw-text", o.raw_text, "Score original text tokens instead of cleaned tokens");
}

void add_lda(CLI::App& app, LdaStageOptions& o) {
  auto* s = app.add_subcommand("lda-train", "Train a topic model by collapsed Gibbs sampling");
  s->add_option("--input", o.input, "all, qual or content token stream")->capture_default_str();
  s->add_option("--docs", o.docs, "Token JSONL (overrides --input)");
  s->add_option("--name", o.name, "Model name used in output file names");
  s->add_option("-k,--k", o.k, "Number of topics")->capture_default_str();
  s->add_option("--alpha", o.alpha, "Document prior (0 = 50/K)")->capture_default_str();
  s->add_option("--beta", o.beta, "Topic-word prior")->capture_default_str();
  s->add_option("--iterations", o.iterations, "Gibbs sweeps")->capture_default_str();
  s->add_option("--burn-in", o.burn_in, "Recorded burn-in")->capture_default_str();
  s->add_option("--seed", o.seed, "Sampler seed")->capture_default_str();
  s->add_option("--top-n", o.top_n, "Top words per topic")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--labels", o.labels, "topic_id<TAB>label file");
}

void add_sweep(CLI::App& app, SweepStageOptions& o) {
  auto* s = app.add_subcommand("coherence-sweep", "Train one model per K and score C_v and UMass");
  s->add_option("--input", o.input, "all, qual or content token stream")->capture_default_str();
  s->add_option("--docs", o.docs, "Token JSONL (overrides --input)");
  s->add_option("--name", o.name, "Name used in the output file name");
  s->add_option("--k-min", o.k_min, "Smallest K")->capture_default_str();
  s->add_option("--k-max", o.k_max, "Largest K")->capture_default_str();
  s->add_option("--step", o.step, "K increment")->capture_default_str();
  s->add_option("--alpha", o.alpha, "Document prior (0 = 50/K)")->capture_default_str();
  s->add_option("--beta", o.beta, "Topic-word prior")->capture_default_str();
  s->add_option("--iterations", o.iterations, "Gibbs sweeps per K")->capture_default_str();
  s->add_option("--seed", o.seed, "Base seed; K uses a derived seed")->capture_default_str();
  s->add_option("--top-n", o.top_n, "Top words scored per topic")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--window", o.window, "C_v sliding window")->capture_default_str();
  s->add_option("--tolerance", o.tolerance, "C_v slack for the parsimonious K")->capture_default_str();
}

void add_characterize(CLI::App& app, CharacterizeOptions& o) {
  auto* s = app.add_subcommand("characterize", "Build per-course profiles and reports");
  s->add_option("--reviews", o.reviews, "Reviews (default: ingest output)");
  s->add_option("--courses", o.courses, "Courses");
  s->add_option("--scores", o.scores, "Sentiment scores JSONL");
  s->add_option("--qual-model", o.qual_model, "Qualitative model JSON");
  s->add_option("--content-model", o.content_model, "Content model JSON");
  s->add_option("--qual-docs", o.qual_docs, "Qualitative token JSONL");
  s->add_option("--content-docs", o.content_docs, "Content token JSONL");
  s->add_option("--qual-labels", o.qual_labels, "topic_id<TAB>label file");
  s->add_option("--content-labels", o.content_labels, "topic_id<TAB>label file");
  s->add_option("--order", o.order, "reviews or rating")->capture_default_str();
  s->add_option("--low-evidence", o.low_evidence, "Flag profiles backed by fewer reviews")->capture_default_str();
}

void add_stats(CLI::App& app, StatsOptions& o) {
  auto* s = app.add_subcommand("stats", "Rating distributions, correlation and MANOVA");
  s->add_option("--reviews", o.reviews, "Reviews (default: ingest output)");
  s->add_option("--courses", o.courses, "Courses");
  s->add_option("--scores", o.scores, "Sentiment scores JSONL");
  s->add_option("--report", o.report, "Profile report JSON for the MANOVA");
  s->add_option("--permutations", o.permutations, "Permutation replicates")->capture_default_str();
  s->add_option("--seed", o.seed, "Permutation seed")->capture_default_str();
  s->add_flag("--include-neutral", o.include_neutral, "Keep Neutral courses as a third group");
}

void add_synth(CLI::App& app, SynthOptions& o) {
  auto* s = app.add_subcommand("synth", "Generate a synthetic corpus with known structure");
  s->add_option("--kind", o.kind, "planted or fixture")->capture_default_str();
  s->add_option("-k,--k", o.k, "Planted topics")->capture_default_str();
  s->add_option("--v", o.v, "Vocabulary size")->capture_default_str();
  s->add_option("--d", o.d, "Documents")->capture_default_str();
  s->add_option("--doc-len", o.doc_len, "Tokens per document")->capture_default_str();
  s->add_option("--alpha", o.alpha, "Theta prior")->capture_default_str();
  s->add_option("--beta", o.beta, "Phi prior")->capture_default_str();
  s->add_flag("--exact-ratings", o.exact_ratings, "Allocate ratings by quota instead of sampling");
  s->add_option("--n-courses", o.n_courses, "Courses")->capture_default_str();
  s->add_option("--n-reviews", o.n_reviews, "Fixture reviews")->capture_default_str();
  s->add_option("--n-spanish", o.n_spanish, "Fixture reviews in Spanish")->capture_default_str();
  s->add_option("--n-untagged", o.n_untagged, "Fixture reviews without a language tag")->capture_default_str();
  s->add_option("--seed", o.seed, "Generator seed")->capture_default_str();
}

int dispatch(const std::string& name, Options& o, Run& run) {
  if (name == "ingest") return run_ingest(o.ingest, run);
  if (name == "preprocess") return run_preprocess(o.preprocess, run);
  if (name == "sentiment") return run_sentiment(o.sentiment, run);
  if (name == "lda-train") return run_lda_train(o.lda, run);
  if (name == "coherence-sweep") return run_coherence_sweep(o.sweep, run);
  if (name == "characterize") return run_characterize(o.characterize, run);
  if (name == "stats") return run_stats(o.stats, run);
  return run_synth(o.synth, run);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moocscope: course review analytics"};
  app.set_version_flag("--version", MOOCSCOPE_VERSION);
  Options o;
  app.set_config("--config", "", "Config file (TOML/INI); default from MOOCSCOPE_CONFIG")->envname("MOOCSCOPE_CONFIG");
  app.add_option("-o,--out", o.out, "Output directory")->capture_default_str();
  app.add_option("--verify", o.verify, "Re-check the digests listed in a manifest and exit");
  add_ingest(app, o.ingest);
  add_preprocess(app, o.preprocess);
  add_sentiment(app, o.sentiment);
  add_lda(app, o.lda);
  add_sweep(app, o.sweep);
  add_characterize(app, o.characterize);
  add_stats(app, o.stats);
  add_synth(app, o.synth);
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (!o.verify.empty()) {
      const auto problems = verify_manifest(o.verify);
      for (const auto& p : problems) std::cerr << "verify: " << p << "\n";
      if (problems.empty()) std::cerr << "verify: all digests match\n";
      return problems.empty() ? 0 : kExitFailure;
    }
    const auto subs = app.get_subcommands();
    if (subs.empty()) {
      std::cerr << app.help();
      return kExitConfig;
    }
    const CLI::App* sub = subs.front();
    std::vector<std::string> command_line(argv + 1, argv + argc);
    std::string config_file;
    if (auto* cfg = app.get_config_ptr(); cfg != nullptr && cfg->count() > 0) config_file = cfg->as<std::string>();
    // Snapshot of effective values (config file merged with flags, which win).
    const std::string snapshot = "out=\"" + o.out + "\"\n[" + sub->get_name() + "]\n" + sub->config_to_str(true, false);
    DirectoryLock lock(o.out);
    Run run(sub->get_name(), o.out, snapshot, std::move(command_line), config_file);
    return dispatch(sub->get_name(), o, run);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
