#pragma once

// Per-course profiles joining rating mean, sentiment summary and the two
// topic distributions, plus JSON/CSV reports and long-format plot data.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moocscope/corpus.hpp"
#include "moocscope/lda.hpp"
#include "moocscope/matrix.hpp"
#include "moocscope/sentiment.hpp"
#include "moocscope/stats.hpp"

namespace moocscope {

struct CourseProfile {
  std::string course_id;
  std::string title;
  std::size_t n_reviews = 0;
  double mean_rating = 0.0;
  CourseSentiment sentiment;
  SentimentEngine sentiment_engine = SentimentEngine::kValenceRule;
  std::vector<double> qual_topics;     // percentages, sum 100
  std::vector<double> content_topics;  // percentages, sum 100
  std::vector<std::string> qual_labels;
  std::vector<std::string> content_labels;
  std::size_t qual_evidence = 0;     // reviews with a non-empty qualitative projection
  std::size_t content_evidence = 0;  // same for content
  bool low_evidence = false;

  bool operator==(const CourseProfile&) const = default;
};

/// A topic model with the projected documents it is applied to and display
/// labels for its topics (defaults to "topic_<id>").
struct ModelView {
  const TopicModel* model = nullptr;
  std::span<const TokenDoc> docs;
  std::vector<std::string> labels;
};

struct ProfileOptions {
  /// Flag a profile when fewer projected non-empty reviews back either vector.
  std::size_t low_evidence_threshold = 5;
  InferenceOptions inference;
};

/// `reviews` are the course's reviews; each model view's docs are looked up
/// by review_id. Throws InvalidArgument for a course without reviews.
CourseProfile build_course_profile(const Course& course, std::span<const Review* const> reviews,
                                   const CourseSentiment& sentiment, SentimentEngine engine,
                                   const ModelView& qual, const ModelView& content,
                                   const ProfileOptions& options = {});

enum class ProfileOrder { kReviewCount, kRatingMean };

/// Profiles for every course with reviews and a sentiment summary, ordered
/// by descending review count (or rating mean), course_id breaking ties.
std::vector<CourseProfile> build_profiles(const Corpus& corpus, std::span<const CourseSentiment> sentiments,
                                          SentimentEngine engine, const ModelView& qual, const ModelView& content,
                                          ProfileOrder order = ProfileOrder::kReviewCount,
                                          const ProfileOptions& options = {});

inline constexpr int kReportSchemaVersion = 1;

/// `{schema_version, generated_at, profiles: [...]}` with stable key order.
std::string emit_report_json(std::span<const CourseProfile> profiles, std::string_view generated_at);
std::vector<CourseProfile> parse_report_json(std::string_view text);

/// One row per course; topic vectors flattened into `qual_<label>` and
/// `content_<label>` columns. Profiles must share topic labels.
std::string emit_report_csv(std::span<const CourseProfile> profiles);

/// Long format `course_id,panel,label,value` with panels rating, sentiment,
/// qual_topic and content_topic.
std::string emit_plot_data(std::span<const CourseProfile> profiles);

/// Mean topic distribution per course majority label, renormalized to 100.
/// `content` selects the content vectors instead of the qualitative ones.
std::map<SentimentLabel, std::vector<double>> topic_distribution_by_sentiment(std::span<const CourseProfile> profiles,
                                                                              bool content = false);

/// Rows of topic vectors with majority labels, for the MANOVA test.
/// Neutral courses are left out unless `include_neutral` is set.
GroupedTopicMatrix grouped_topics(std::span<const CourseProfile> profiles, bool content = false,
                                  bool include_neutral = false);

}  // namespace moocscope
