#include "moocscope/textprep.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "moocscope/error.hpp"
#include "moocscope/io.hpp"
#include "moocscope/resources.hpp"
#include "utf8.hpp"

namespace moocscope {

namespace {

bool is_space_or_control(char32_t c) { return c <= 0x20 || c == 0x7F || (c >= 0x80 && c <= 0x9F) || c == 0xA0; }

bool is_apostrophe(char32_t c) { return c == U'\'' || c == 0x2018 || c == 0x2019 || c == 0x02BC; }

bool looks_like_url(std::u32string_view chunk) {
  std::string lowered;
  for (char32_t c : chunk) {
    if (c >= 0x80) {
      lowered += '?';
    } else {
      lowered += static_cast<char>(std::tolower(static_cast<int>(c)));
    }
  }
  return lowered.find("http://") != std::string::npos || lowered.find("https://") != std::string::npos ||
         lowered.rfind("www.", 0) == 0;
}

}  // namespace

std::string_view to_string(VocabularyCategory c) {
  return c == VocabularyCategory::kQualitative ? "qualitative" : "content";
}

VocabularyCategory parse_category(std::string_view s) {
  std::string lowered(s);
  for (auto& ch : lowered) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (lowered == "q" || lowered == "qual" || lowered == "qualitative") return VocabularyCategory::kQualitative;
  if (lowered == "c" || lowered == "content") return VocabularyCategory::kContent;
  throw InvalidArgument("unknown vocabulary category '" + std::string(s) + "'");
}

std::string clean_text(std::string_view raw) {
  const std::u32string cps = utf8::decode(raw);
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_space_or_control(cps[i])) {
      pending_space = true;
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < cps.size() && !is_space_or_control(cps[end])) ++end;
    const std::u32string_view chunk(cps.data() + i, end - i);
    i = end;
    if (looks_like_url(chunk)) {
      pending_space = true;
      continue;
    }
    for (char32_t c : chunk) {
      if (is_apostrophe(c)) continue;
      if (!utf8::is_letter(c)) {
        pending_space = true;
        continue;
      }
      if (pending_space && !out.empty()) out += ' ';
      pending_space = false;
      utf8::append(out, utf8::to_lower(c));
    }
    pending_space = true;
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view cleaned) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < cleaned.size()) {
    while (pos < cleaned.size() && std::isspace(static_cast<unsigned char>(cleaned[pos]))) ++pos;
    std::size_t end = pos;
    while (end < cleaned.size() && !std::isspace(static_cast<unsigned char>(cleaned[end]))) ++end;
    if (end > pos) {
      const std::string_view tok = cleaned.substr(pos, end - pos);
      if (utf8::decode(tok).size() >= 2) tokens.emplace_back(tok);
    }
    pos = end;
  }
  return tokens;
}

StopList parse_stoplist(std::string_view text) {
  StopList out;
  for (auto& w : content_lines(text)) out.insert(std::move(w));
  return out;
}

const StopList& default_stoplist() {
  static const StopList kList = parse_stoplist(bundled_resource("lexicon/stopwords.txt"));
  return kList;
}

std::vector<std::string> remove_stopwords(std::span<const std::string> lemmas, const StopList& stoplist) {
  std::vector<std::string> out;
  out.reserve(lemmas.size());
  for (const auto& l : lemmas)
    if (!stoplist.contains(l)) out.push_back(l);
  return out;
}

TokenDoc preprocess(std::string review_id, std::string_view raw_text, const StopList& stoplist) {
  const auto tokens = tokenize(clean_text(raw_text));
  return {std::move(review_id), remove_stopwords(lemmatize(tokens), stoplist)};
}

const CategoryLexicon& CategoryLexicon::bundled() {
  static const CategoryLexicon kLexicon = parse(bundled_resource("lexicon/categories.tsv"));
  return kLexicon;
}

CategoryLexicon CategoryLexicon::parse(std::string_view text) {
  CategoryLexicon lexicon;
  for (const auto& line : content_lines(text)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw InvalidArgument("lexicon line without a tab: '" + line + "'");
    std::string word = line.substr(0, tab);
    std::string cat = line.substr(tab + 1);
    cat.erase(cat.find_last_not_of(" \t") + 1);
    lexicon.add(std::move(word), parse_category(cat));
  }
  return lexicon;
}

void CategoryLexicon::add(std::string word, VocabularyCategory category) {
  auto [it, inserted] = entries_.emplace(word, category);
  if (!inserted && it->second != category)
    throw InvalidArgument("word '" + word + "' listed under both vocabulary categories");
}

std::optional<VocabularyCategory> CategoryLexicon::find(std::string_view word) const {
  auto it = entries_.find(word);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::size_t CategoryLexicon::count(VocabularyCategory category) const {
  return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(),
                                                [&](const auto& e) { return e.second == category; }));
}

FrequencyTable build_frequency_table(std::span<const TokenDoc> docs) {
  FrequencyTable table;
  for (const auto& doc : docs) {
    for (const auto& lemma : doc.lemmas) {
      auto it = table.counts.find(lemma);
      if (it == table.counts.end()) {
        table.counts.emplace(lemma, 1);
      } else {
        ++it->second;
      }
      ++table.total_tokens;
    }
  }
  return table;
}

std::vector<std::string> nominate_candidates(const FrequencyTable& table, std::size_t min_count) {
  std::vector<std::pair<std::string, std::size_t>> hits;
  for (const auto& [word, count] : table.counts)
    if (count > min_count) hits.emplace_back(word, count);
  // counts is ordered by word, so a stable sort leaves ties alphabetical.
  std::stable_sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  out.reserve(hits.size());
  for (auto& h : hits) out.push_back(std::move(h.first));
  return out;
}

ProjectedDoc project_vocabulary(const TokenDoc& doc, const CategoryLexicon& lexicon, VocabularyCategory category) {
  ProjectedDoc out;
  out.doc.review_id = doc.review_id;
  for (const auto& lemma : doc.lemmas)
    if (lexicon.find(lemma) == category) out.doc.lemmas.push_back(lemma);
  out.empty = out.doc.lemmas.empty();
  return out;
}

std::string token_docs_to_jsonl(std::span<const TokenDoc> docs) {
  std::string out;
  for (const auto& d : docs) {
    nlohmann::ordered_json j;
    j["review_id"] = d.review_id;
    j["lemmas"] = d.lemmas;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<TokenDoc> token_docs_from_jsonl(std::string_view text) {
  std::vector<TokenDoc> docs;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) return;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("review_id") || !j.contains("lemmas"))
      throw IoError("malformed token document on line " + std::to_string(line_no));
    try {
      docs.push_back({j.at("review_id").get<std::string>(), j.at("lemmas").get<std::vector<std::string>>()});
    } catch (const nlohmann::json::exception&) {
      throw IoError("malformed token document on line " + std::to_string(line_no));
    }
  });
  return docs;
}

}  // namespace moocscope
