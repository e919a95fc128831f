#pragma once

// Latent Dirichlet Allocation trained by collapsed Gibbs sampling, fold-in
// inference for new documents, top-word summaries, and corpus-level topic
// proportions (mean document-topic weight, as a percentage).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moocscope/matrix.hpp"
#include "moocscope/textprep.hpp"

namespace moocscope {

struct LdaConfig {
  std::size_t k = 10;
  /// Document prior; unset means 50 / K.
  std::optional<double> alpha;
  double beta = 0.01;
  std::size_t iterations = 1000;
  /// Recorded for reference; estimates always come from the final sample.
  std::size_t burn_in = 100;
  std::uint64_t seed = 1;

  double resolved_alpha() const { return alpha ? *alpha : 50.0 / static_cast<double>(k); }
};

struct TopicModel {
  static constexpr int kFormatVersion = 1;

  std::size_t k = 0;
  std::vector<std::string> vocab;  // sorted; index = word id
  Matrix phi;                      // K x V
  Matrix theta;                    // D x K, rows in training input order
  std::vector<std::string> doc_ids;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::size_t burn_in = 0;
  /// Final-sample counts; n_kw is K x V, n_dk is D x K (training input order).
  std::vector<std::uint32_t> topic_word_counts;
  std::vector<std::uint32_t> doc_topic_counts;

  std::size_t vocab_size() const { return vocab.size(); }
  /// Index of `word` in vocab, if present.
  std::optional<std::size_t> word_id(std::string_view word) const;

  bool operator==(const TopicModel&) const = default;
};

/// Collapsed Gibbs sampling. Documents are visited in review_id order so the
/// result does not depend on input order; theta rows follow the input order.
/// Throws InvalidArgument for an empty document, K < 2, K larger than the
/// number of distinct words, or zero iterations.
TopicModel train_lda(std::span<const TokenDoc> docs, const LdaConfig& config);

struct InferenceOptions {
  std::size_t sweeps = 50;
  std::size_t burn_in = 10;
};

struct DocTopics {
  std::vector<double> weights;  // length K, sums to 1
  bool out_of_vocabulary = false;  // no known words; weights are uniform
};

/// Fold-in Gibbs sampling with phi fixed; theta estimates are averaged over
/// the sweeps after burn-in. The random stream is keyed by the model seed
/// and the document's review_id.
DocTopics infer_doc_topics(const TopicModel& model, const TokenDoc& doc, const InferenceOptions& options = {});

struct TopicSummary {
  std::size_t topic_id = 0;
  std::vector<std::string> words;
  std::vector<double> probabilities;
  std::optional<std::string> label;

  bool operator==(const TopicSummary&) const = default;
};

/// Top n words per topic by descending phi, ties alphabetical.
std::vector<TopicSummary> top_words(const TopicModel& model, std::size_t n);

/// Percentage weight of each topic: 100 * mean over rows of `weights`.
std::vector<double> proportions_from_weights(const Matrix& weights);

struct TopicProportions {
  std::vector<double> percent;  // length K, sums to 100
  std::size_t n_docs = 0;       // N used as the divisor
  std::size_t n_empty = 0;      // documents with no known words
};

/// Infers each document and averages. Documents without any known word are
/// left out of N unless `include_empty` is set (they then count as uniform).
/// Throws InvalidArgument when N would be zero.
TopicProportions topic_proportions(const TopicModel& model, std::span<const TokenDoc> docs,
                                   bool include_empty = false, const InferenceOptions& options = {});

/// Per-document weights, one row per doc (uniform rows for empty docs).
Matrix infer_weights(const TopicModel& model, std::span<const TokenDoc> docs, std::vector<bool>* empty = nullptr,
                     const InferenceOptions& options = {});

std::string model_to_json(const TopicModel& model);
TopicModel model_from_json(std::string_view text);
void save_model(const TopicModel& model, const std::filesystem::path& path);
TopicModel load_model(const std::filesystem::path& path);

/// CSV with header `topic_id,rank,word,probability`; rank starts at 1.
std::string topics_to_csv(std::span<const TopicSummary> topics);

/// `topic_id<TAB>label` lines ('#' comments) applied onto summaries.
std::map<std::size_t, std::string> parse_topic_labels(std::string_view text);
void apply_topic_labels(std::vector<TopicSummary>& topics, const std::map<std::size_t, std::string>& labels);

}  // namespace moocscope
