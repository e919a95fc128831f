#pragma once

// Review/course data model, JSONL and CSV ingestion, persistence, and the
// language and minimum-review filters applied before analysis.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace moocscope {

enum class Platform { kUdemy, kCoursera, kDomestika, kPlatzi, kCrehana, kOther };

std::string_view to_string(Platform p);
/// Case-insensitive; unknown names map to kOther.
Platform parse_platform(std::string_view name);

struct Review {
  std::string review_id;
  std::string course_id;
  Platform platform = Platform::kOther;
  std::optional<std::string> username;
  std::optional<std::string> date;  // normalized YYYY-MM-DD or YYYY-MM-DDTHH:MM:SS
  double rating = 0.0;
  std::string text;
  std::optional<std::string> language;
  std::optional<std::string> url;

  bool operator==(const Review&) const = default;
};

struct Course {
  std::string course_id;
  std::optional<std::string> url;
  std::string title;
  Platform platform = Platform::kOther;
  std::optional<std::string> category;
  std::optional<std::string> teacher;
  /// Stub created for reviews whose course record was never seen.
  bool synthetic = false;

  bool operator==(const Course&) const = default;
};

/// True for the nine half-star values 1.0, 1.5, ..., 5.0.
bool is_valid_rating(double rating);

/// Lenient ISO-8601 normalization: accepts YYYY-MM-DD, YYYY/MM/DD and
/// datetimes with 'T' or ' ' separators (timezone suffixes are dropped).
std::optional<std::string> normalize_date(std::string_view raw);

/// Immutable review collection with a course_id -> review positions index.
class Corpus {
 public:
  Corpus() = default;
  /// Validates uniqueness and synthesizes stub courses for orphan reviews.
  Corpus(std::vector<Review> reviews, std::vector<Course> courses);

  const std::vector<Review>& reviews() const { return reviews_; }
  const std::vector<Course>& courses() const { return courses_; }

  const Course* find_course(std::string_view course_id) const;
  const Review* find_review(std::string_view review_id) const;
  /// Positions in reviews() for a course, in input order. Empty when unknown.
  const std::vector<std::size_t>& review_positions(std::string_view course_id) const;

  std::size_t orphan_count() const;

  bool operator==(const Corpus& other) const {
    return reviews_ == other.reviews_ && courses_ == other.courses_;
  }

 private:
  std::vector<Review> reviews_;
  std::vector<Course> courses_;
  std::map<std::string, std::size_t, std::less<>> course_pos_;
  std::map<std::string, std::size_t, std::less<>> review_pos_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> index_;
};

enum class InputFormat { kJsonl, kCsv };

/// One skipped record.
struct Reject {
  std::string source;  // file the record came from
  std::size_t line = 0;
  std::string reason;  // missing_field, invalid_rating, malformed_record, duplicate_id, ...
  std::string detail;
};

struct LoadResult {
  Corpus corpus;
  std::vector<Reject> rejects;
  std::size_t records_read = 0;
  /// Reviews sharing (username, course_id) with an earlier review; kept verbatim.
  std::size_t duplicate_user_course = 0;
};

/// Loads reviews (and optionally course records) from JSONL or CSV. An
/// unreadable file throws IoError; invalid records are skipped and reported.
LoadResult load_corpus(const std::filesystem::path& reviews_path, InputFormat format,
                       const std::optional<std::filesystem::path>& courses_path = std::nullopt);

/// Parses already-read text; `source` labels rejects.
LoadResult parse_corpus(std::string_view reviews_text, InputFormat format,
                        std::optional<std::string_view> courses_text = std::nullopt,
                        std::string_view source = "<memory>");

/// Writes reviews and courses as canonical JSONL.
void save_corpus(const Corpus& corpus, const std::filesystem::path& reviews_path,
                 const std::filesystem::path& courses_path);
std::string reviews_to_jsonl(const Corpus& corpus);
std::string courses_to_jsonl(const Corpus& corpus);

/// Rejects as JSONL lines: {"source","line","reason","detail"}.
std::string rejects_to_jsonl(const std::vector<Reject>& rejects);

class LanguageDetector;

struct LanguageFilterResult {
  Corpus corpus;
  std::size_t detected = 0;  // reviews without a language label that went through detection
  std::size_t removed_reviews = 0;
  std::size_t removed_courses = 0;
};

/// Keeps reviews whose language equals `code`. Reviews lacking a label are
/// classified with `detector`; courses left without reviews are pruned.
LanguageFilterResult filter_language(const Corpus& corpus, std::string_view code,
                                     const LanguageDetector& detector);

struct MinReviewFilterResult {
  Corpus corpus;
  std::size_t removed_courses = 0;
  std::size_t removed_reviews = 0;
  double removed_course_fraction = 0.0;
};

/// Drops courses with fewer than `min_reviews` reviews along with their reviews.
MinReviewFilterResult filter_min_reviews(const Corpus& corpus, std::size_t min_reviews);

}  // namespace moocscope
