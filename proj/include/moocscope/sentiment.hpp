#pragma once

// Review sentiment: two native lexicon scorers (valence rules with boosters
// and negation, and a mean-polarity scorer), import of labels produced by an
// external classifier, thresholding, and course-level aggregation.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace moocscope {

class Corpus;
struct Reject;

enum class SentimentEngine { kValenceRule, kPolarityAvg, kExternal };
enum class SentimentLabel { kPositive, kNeutral, kNegative };

std::string_view to_string(SentimentEngine e);
std::string_view to_string(SentimentLabel l);
/// "valence_rule"/"valence"/"vader", "polarity_avg"/"polarity"/"textblob", "external".
SentimentEngine parse_engine(std::string_view s);
/// Case-insensitive "Positive" / "Neutral" / "Negative"; anything else throws InvalidArgument.
SentimentLabel parse_label(std::string_view s);

struct SentimentScore {
  std::string review_id;
  SentimentEngine engine = SentimentEngine::kValenceRule;
  std::optional<double> compound;  // absent for external labels
  SentimentLabel label = SentimentLabel::kNeutral;

  bool operator==(const SentimentScore&) const = default;
};

struct ValenceLexicon {
  std::map<std::string, double, std::less<>> valences;  // [-4, 4]
  std::map<std::string, double, std::less<>> boosters;  // positive increments
  std::set<std::string, std::less<>> negators;

  static const ValenceLexicon& bundled();
  /// Tab-separated `word value` lines for valences and boosters, one word per
  /// line for negators; '#' starts a comment. Out-of-range values throw.
  static ValenceLexicon parse(std::string_view valence_text, std::string_view booster_text,
                              std::string_view negator_text);

  /// Copy with every valence multiplied by -1.
  ValenceLexicon negated() const;
};

struct ValenceParams {
  double alpha = 15.0;           // normalization constant
  double negation_factor = -0.74;
  std::size_t lookback = 3;      // tokens inspected before each hit
};

/// Sum of rule-adjusted valences s mapped to s / sqrt(s^2 + alpha), clamped
/// to [-1, 1]. Tokens are matched case-insensitively; booster words are
/// never scored as hits themselves.
double score_valence_rule(std::span<const std::string> tokens, const ValenceLexicon& lexicon,
                          const ValenceParams& params = {});

struct PolarityLexicon {
  std::map<std::string, double, std::less<>> polarity;  // [-1, 1]
  std::set<std::string, std::less<>> intensifiers;
  double intensifier_factor = 1.3;

  static const PolarityLexicon& bundled();
  static PolarityLexicon parse(std::string_view polarity_text, std::string_view intensifier_text);
};

/// Mean polarity over lexicon hits; an intensifier scales the polarity of
/// the hit immediately after it (clamped to [-1, 1]). No hits -> 0.
double score_polarity_avg(std::span<const std::string> tokens, const PolarityLexicon& lexicon);

/// Positive iff compound > pos; Negative iff compound < neg; Neutral otherwise.
SentimentLabel label_from_compound(double compound, double pos_threshold = 0.1, double neg_threshold = -0.1);

struct SentimentOptions {
  SentimentEngine engine = SentimentEngine::kValenceRule;
  ValenceParams valence;
  double pos_threshold = 0.1;
  double neg_threshold = -0.1;
  /// Score whitespace tokens of the original text instead of cleaned tokens.
  bool raw_text = false;
};

/// Tokens fed to the scorers: cleaned tokens, or whitespace-split original
/// text with surrounding punctuation stripped when `raw_text` is set.
std::vector<std::string> sentiment_tokens(std::string_view text, bool raw_text);

/// Scores every review with a native engine, in corpus order.
std::vector<SentimentScore> score_corpus(const Corpus& corpus, const SentimentOptions& options,
                                         const ValenceLexicon& valence = ValenceLexicon::bundled(),
                                         const PolarityLexicon& polarity = PolarityLexicon::bundled());

struct ExternalImport {
  std::vector<SentimentScore> scores;
  std::vector<Reject> rejects;
  std::vector<std::string> unknown_ids;  // ids absent from the corpus, when one was given
};

/// JSONL `{review_id, label}` lines produced by an external classifier.
ExternalImport import_external_labels(std::string_view jsonl_text, const Corpus* corpus = nullptr,
                                      std::string_view source = "<memory>");
ExternalImport load_external_labels(const std::filesystem::path& path, const Corpus* corpus = nullptr);

struct CourseSentiment {
  std::string course_id;
  std::optional<double> mean_compound;  // over scores that carry a compound
  std::map<SentimentLabel, std::size_t> label_counts;
  SentimentLabel majority_label = SentimentLabel::kNeutral;
  std::size_t n_scored = 0;

  bool operator==(const CourseSentiment&) const = default;
};

/// Strict plurality label; any tie for the top count gives Neutral.
SentimentLabel majority_label(const std::map<SentimentLabel, std::size_t>& counts);

struct CourseSentimentResult {
  std::vector<CourseSentiment> courses;      // corpus course order
  std::vector<std::string> excluded_courses;  // no scored reviews
};

/// Each score must name a review of `corpus`; otherwise InvalidArgument.
CourseSentimentResult aggregate_course_sentiment(std::span<const SentimentScore> scores, const Corpus& corpus);

enum class CorrelationMethod { kPearson, kSpearman };

/// Review-level correlation of compound against rating. Scores without a
/// compound are skipped.
double correlate_sentiment_rating(std::span<const SentimentScore> scores, const Corpus& corpus,
                                  CorrelationMethod method);

std::string scores_to_jsonl(std::span<const SentimentScore> scores);
std::vector<SentimentScore> scores_from_jsonl(std::string_view text);

}  // namespace moocscope
