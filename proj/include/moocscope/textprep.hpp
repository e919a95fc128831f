#pragma once

// Review text -> lemma stream: cleaning, tokenization, rule-based
// lemmatization and stopword removal, plus the corpus frequency table used to
// nominate vocabulary candidates and the projection of documents onto the
// qualitative and content vocabularies.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace moocscope {

/// A review as a bag-of-lemmas document.
struct TokenDoc {
  std::string review_id;
  std::vector<std::string> lemmas;

  bool operator==(const TokenDoc&) const = default;
};

enum class VocabularyCategory { kQualitative, kContent };

std::string_view to_string(VocabularyCategory c);
/// Accepts "Q", "C", "qual", "content", "qualitative" (case-insensitive).
VocabularyCategory parse_category(std::string_view s);

/// Lowercases; drops URLs, digits, punctuation and control characters;
/// deletes apostrophes so contractions stay one token; collapses whitespace.
std::string clean_text(std::string_view raw);

/// Whitespace split of cleaned text; tokens shorter than two characters dropped.
std::vector<std::string> tokenize(std::string_view cleaned);

/// Base form of one lowercase token: exception table first, then suffix
/// rules chosen by a suffix-based part-of-speech guess.
std::string lemmatize_word(std::string_view token);
std::vector<std::string> lemmatize(std::span<const std::string> tokens);

using StopList = std::set<std::string, std::less<>>;

/// Bundled 180-word English stoplist.
const StopList& default_stoplist();
StopList parse_stoplist(std::string_view text);

std::vector<std::string> remove_stopwords(std::span<const std::string> lemmas, const StopList& stoplist);

/// clean -> tokenize -> lemmatize -> remove stopwords.
TokenDoc preprocess(std::string review_id, std::string_view raw_text, const StopList& stoplist);

class CategoryLexicon {
 public:
  CategoryLexicon() = default;

  /// Bundled starter lexicon.
  static const CategoryLexicon& bundled();

  /// `word<TAB>category` lines, '#' comments. A word listed under both
  /// categories throws InvalidArgument.
  static CategoryLexicon parse(std::string_view text);

  void add(std::string word, VocabularyCategory category);
  std::optional<VocabularyCategory> find(std::string_view word) const;
  std::size_t count(VocabularyCategory category) const;
  const std::map<std::string, VocabularyCategory, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, VocabularyCategory, std::less<>> entries_;
};

struct FrequencyTable {
  std::map<std::string, std::size_t, std::less<>> counts;
  std::size_t total_tokens = 0;
};

FrequencyTable build_frequency_table(std::span<const TokenDoc> docs);

/// Words occurring strictly more than min_count times, by descending count
/// then alphabetically.
std::vector<std::string> nominate_candidates(const FrequencyTable& table, std::size_t min_count = 500);

struct ProjectedDoc {
  TokenDoc doc;
  bool empty = false;
};

/// Keeps the lemmas belonging to `category`, preserving order and multiplicity.
ProjectedDoc project_vocabulary(const TokenDoc& doc, const CategoryLexicon& lexicon, VocabularyCategory category);

std::string token_docs_to_jsonl(std::span<const TokenDoc> docs);
std::vector<TokenDoc> token_docs_from_jsonl(std::string_view text);

}  // namespace moocscope
