#pragma once

// Topic coherence (UMass document co-occurrence and C_v sliding-window NPMI
// with cosine confirmation) and a sweep over topic counts.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "moocscope/lda.hpp"
#include "moocscope/textprep.hpp"

namespace moocscope {

using TopicWords = std::vector<std::vector<std::string>>;

struct CoherenceScore {
  double score = 0.0;              // mean over scored topics
  std::vector<double> per_topic;   // NaN for a topic left with fewer than two words
  std::vector<std::string> diagnostics;
};

/// Mean over topics of the mean over pairs i > j of
/// log((D(w_i, w_j) + eps) / D(w_j)), D counting documents.
/// Words that occur in no document are skipped and reported.
CoherenceScore coherence_umass(const TopicWords& topics, std::span<const TokenDoc> docs, double epsilon = 1e-12);

/// Boolean sliding windows of `window` tokens (a shorter document is one
/// window), NPMI context vectors over the topic's words, cosine of each
/// word's vector with the vector of the whole set, averaged.
CoherenceScore coherence_cv(const TopicWords& topics, std::span<const TokenDoc> docs, std::size_t window = 110,
                            double epsilon = 1e-12);

struct SweepConfig {
  std::size_t k_min = 2;
  std::size_t k_max = 20;
  std::size_t step = 1;
  LdaConfig lda;  // k is overwritten; the seed for K is derive_seed(lda.seed, K)
  std::size_t top_n = 10;
  std::size_t window = 110;
  double epsilon = 1e-12;
  /// Slack for parsimonious_k: smallest K whose C_v is within this of the best.
  double cv_tolerance = 0.02;
};

struct CoherenceEntry {
  std::size_t k = 0;
  double c_v = 0.0;
  double c_umass = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::string> error;  // training or scoring failure for this K
};

struct CoherenceReport {
  std::vector<CoherenceEntry> entries;  // ascending K
  std::size_t recommended_k = 0;        // highest C_v, smaller K on ties
  /// C_v tends to plateau past the best K; this is the smallest K on the plateau.
  std::size_t parsimonious_k = 0;

  bool operator==(const CoherenceReport& o) const;
};

/// Trains one model per K and scores both measures on `docs`. A K that fails
/// is recorded with its error; InvalidArgument if every K fails.
CoherenceReport sweep_topic_count(std::span<const TokenDoc> docs, const SweepConfig& config);

/// Header `k,c_v,c_umass,recommended,parsimonious`.
std::string coherence_report_to_csv(const CoherenceReport& report);

/// Top words of a model as plain lists.
TopicWords topic_word_lists(const TopicModel& model, std::size_t n);

}  // namespace moocscope
