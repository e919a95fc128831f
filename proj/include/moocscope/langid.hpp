#pragma once

// Character n-gram language identification using rank-order profiles
// (Cavnar & Trenkle): each language is summarized by its most frequent 1-3
// grams, and a text is assigned the language whose ranking it deviates from
// least.

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace moocscope {

struct LanguageGuess {
  std::string code;         // "und" when the text is too short to classify
  double confidence = 0.0;  // in [0, 1]
};

struct LanguageProfile {
  std::string code;
  /// Gram -> rank (0 = most frequent), at most profile_size entries.
  std::map<std::string, std::size_t, std::less<>> ranks;
};

/// Ranked list of the most frequent 1..3 character grams of a text. Words are
/// padded with '_' so grams at word boundaries are distinguished.
std::vector<std::string> ranked_ngrams(std::string_view text, std::size_t limit);

LanguageProfile build_profile(std::string code, std::string_view training_text,
                              std::size_t profile_size = 300);

class LanguageDetector {
 public:
  static constexpr std::size_t kProfileSize = 300;
  static constexpr std::size_t kMinChars = 20;

  /// Detector over the bundled en/es/fr/pt/de profiles.
  static const LanguageDetector& bundled();

  explicit LanguageDetector(std::vector<LanguageProfile> profiles);

  /// Throws InvalidArgument for text that is empty after trimming; texts
  /// shorter than kMinChars characters yield {"und", 0}.
  LanguageGuess detect(std::string_view text) const;

  /// Out-of-place distance from the text's profile to each language.
  std::map<std::string, std::size_t> distances(std::string_view text) const;

  const std::vector<LanguageProfile>& profiles() const { return profiles_; }

 private:
  std::vector<LanguageProfile> profiles_;
};

}  // namespace moocscope
