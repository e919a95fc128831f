#pragma once

// Options and entry points of the pipeline stages. Paths left empty default
// to the artifact the previous stage leaves in the output directory.

#include <cstddef>
#include <cstdint>
#include <string>

#include "run.hpp"

namespace moocscope::cli {

struct IngestOptions {
  std::string reviews;
  std::string courses;
  std::string format = "auto";  // auto, jsonl, csv
  std::string language = "en";  // "any" disables the filter
  std::size_t min_reviews = 1;
  bool strict = false;          // any rejected record fails the stage
};

struct PreprocessOptions {
  std::string reviews;
  std::string courses;
  std::string stopwords;
  std::string lexicon;
  std::size_t min_count = 500;
};

struct SentimentStageOptions {
  std::string reviews;
  std::string courses;
  std::string engine = "valence";
  std::string labels;  // JSONL for the external engine
  double pos = 0.1;
  double neg = -0.1;
  double alpha = 15.0;
  double negation = -0.74;
  std::size_t lookback = 3;
  bool raw_text = false;
};

struct LdaStageOptions {
  std::string input = "qual";  // all, qual, content
  std::string docs;
  std::string name;
  std::size_t k = 14;
  double alpha = 0.0;  // 0 means 50 / K
  double beta = 0.01;
  std::size_t iterations = 1000;
  std::size_t burn_in = 100;
  std::uint64_t seed = 1;
  std::size_t top_n = 10;
  std::string labels;
};

struct SweepStageOptions {
  std::string input = "qual";
  std::string docs;
  std::string name;
  std::size_t k_min = 2;
  std::size_t k_max = 20;
  std::size_t step = 1;
  double alpha = 0.0;
  double beta = 0.01;
  std::size_t iterations = 1000;
  std::uint64_t seed = 1;
  std::size_t top_n = 10;
  std::size_t window = 110;
  double tolerance = 0.02;
};

struct CharacterizeOptions {
  std::string reviews;
  std::string courses;
  std::string scores;
  std::string qual_model;
  std::string content_model;
  std::string qual_docs;
  std::string content_docs;
  std::string qual_labels;
  std::string content_labels;
  std::string order = "reviews";  // reviews, rating
  std::size_t low_evidence = 5;
};

struct StatsOptions {
  std::string reviews;
  std::string courses;
  std::string scores;
  std::string report;
  std::size_t permutations = 999;
  std::uint64_t seed = 1;
  bool include_neutral = false;
};

struct SynthOptions {
  std::string kind = "planted";  // planted, fixture
  std::size_t k = 5;
  std::size_t v = 200;
  std::size_t d = 2000;
  std::size_t doc_len = 60;
  double alpha = 0.1;
  double beta = 0.01;
  bool exact_ratings = false;
  std::size_t n_courses = 10;
  std::size_t n_reviews = 100;
  std::size_t n_spanish = 10;
  std::size_t n_untagged = 20;
  std::uint64_t seed = 42;
};

int run_ingest(const IngestOptions& o, Run& run);
int run_preprocess(const PreprocessOptions& o, Run& run);
int run_sentiment(const SentimentStageOptions& o, Run& run);
int run_lda_train(const LdaStageOptions& o, Run& run);
int run_coherence_sweep(const SweepStageOptions& o, Run& run);
int run_characterize(const CharacterizeOptions& o, Run& run);
int run_stats(const StatsOptions& o, Run& run);
int run_synth(const SynthOptions& o, Run& run);

}  // namespace moocscope::cli
