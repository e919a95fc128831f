#pragma once

// Synthetic corpora with known structure: planted LDA corpora (true phi and
// theta) with controlled rating mixes, template-built English/Spanish review
// fixtures with planted sentiment, and topic matching against ground truth.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "moocscope/corpus.hpp"
#include "moocscope/lda.hpp"
#include "moocscope/matrix.hpp"
#include "moocscope/sentiment.hpp"
#include "moocscope/textprep.hpp"

namespace moocscope {

/// The nine half-star buckets 1.0, 1.5, ..., 5.0.
const std::vector<double>& rating_buckets();

/// Rating mix over rating_buckets(): 63% five stars, 21.5% in [4, 4.5],
/// 15.5% spread over the rest.
std::vector<double> skewed_rating_mix();

struct PlantedSpec {
  std::size_t k = 5;
  std::size_t v = 200;
  std::size_t d = 2000;
  std::size_t doc_len = 60;
  double alpha = 0.1;
  double beta = 0.01;
  std::vector<double> rating_mix = skewed_rating_mix();
  /// Allocate ratings by largest-remainder quotas (then shuffle) instead of
  /// independent draws, so bucket shares match the mix as closely as D allows.
  bool exact_ratings = false;
  std::size_t n_courses = 10;
  std::uint64_t seed = 42;
};

/// Throws InvalidArgument for an inconsistent spec.
void validate(const PlantedSpec& spec);

/// Word i of the synthetic vocabulary: "z" plus three consonants, in
/// alphabetical order. Such words are unchanged by preprocessing.
std::string synth_word(std::size_t i);
inline constexpr std::size_t kMaxSynthVocab = 19 * 19 * 19;

struct PlantedCorpus {
  Corpus corpus;
  Matrix true_phi;    // K x V over vocab
  Matrix true_theta;  // D x K
  std::vector<std::string> vocab;
  std::vector<TokenDoc> docs;  // token streams, identical to preprocessing the texts
  std::vector<SentimentLabel> labels;  // planted from rating
};

/// Phi rows ~ Dirichlet(beta), theta rows ~ Dirichlet(alpha), each token
/// topic-then-word; review i goes to course i mod n_courses.
PlantedCorpus generate_corpus(const PlantedSpec& spec);

/// Positive for ratings >= 4, Negative for <= 2.5, Neutral otherwise.
SentimentLabel planted_label(double rating);

/// Largest-remainder integer allocation of `total` items over `mix`.
std::vector<std::size_t> allocate_counts(const std::vector<double>& mix, std::size_t total);

/// Learned phi re-indexed onto `vocab` (missing words get 0).
Matrix align_phi(const TopicModel& model, const std::vector<std::string>& vocab);

struct TopicMatch {
  std::vector<std::size_t> assignment;  // true topic -> learned topic
  std::vector<double> cosines;          // per true topic
  double mean_cosine = 0.0;
};

/// Greedy maximum-cosine one-to-one matching of learned to true rows, or an
/// exhaustive search over permutations when `exhaustive` (K <= 8).
TopicMatch match_topics(const Matrix& learned_phi, const Matrix& true_phi, bool exhaustive = false);

/// Each row mixed with a Dirichlet(1) draw: (1 - scale) * row + scale * noise.
Matrix jitter_phi(const Matrix& phi, double scale, std::uint64_t seed);

struct FixtureSpec {
  std::size_t n_reviews = 100;
  std::size_t n_courses = 10;
  std::size_t n_spanish = 10;
  /// English reviews left without a language tag so detection runs on them.
  std::size_t n_untagged = 20;
  std::vector<double> rating_mix = skewed_rating_mix();
  std::uint64_t seed = 7;
};

struct ReviewFixture {
  Corpus corpus;
  std::vector<std::string> course_themes;  // per course, e.g. "health"
  std::vector<SentimentScore> external_labels;
};

/// Template reviews whose sentiment wording follows the rating and whose
/// content words follow the course theme (health, programming, design,
/// music, business, languages).
ReviewFixture generate_review_fixture(const FixtureSpec& spec);

}  // namespace moocscope
