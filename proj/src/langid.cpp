#include "moocscope/langid.hpp"

#include <algorithm>
#include <unordered_map>

#include "moocscope/error.hpp"
#include "moocscope/resources.hpp"
#include "utf8.hpp"

namespace moocscope {

namespace {

constexpr std::string_view kBundledLanguages[] = {"en", "es", "fr", "pt", "de"};

std::size_t trimmed_length(std::string_view text) {
  const auto cps = utf8::decode(text);
  std::size_t begin = 0, end = cps.size();
  auto space = [](char32_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == 0xA0; };
  while (begin < end && space(cps[begin])) ++begin;
  while (end > begin && space(cps[end - 1])) --end;
  return end - begin;
}

}  // namespace

std::vector<std::string> ranked_ngrams(std::string_view text, std::size_t limit) {
  std::unordered_map<std::u32string, std::size_t> counts;
  std::u32string word;
  auto flush = [&] {
    if (word.empty()) return;
    const std::u32string padded = U"_" + word + U"_";
    for (std::size_t n = 1; n <= 3; ++n) {
      for (std::size_t i = 0; i + n <= padded.size(); ++i) {
        auto gram = padded.substr(i, n);
        if (gram == U"_") continue;
        ++counts[gram];
      }
    }
    word.clear();
  };
  for (char32_t c : utf8::decode(text)) {
    if (utf8::is_letter(c)) {
      word.push_back(utf8::to_lower(c));
    } else {
      flush();
    }
  }
  flush();

  std::vector<std::pair<std::string, std::size_t>> grams;
  grams.reserve(counts.size());
  for (const auto& [g, n] : counts) grams.emplace_back(utf8::encode(g), n);
  std::sort(grams.begin(), grams.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (grams.size() > limit) grams.resize(limit);
  std::vector<std::string> out;
  out.reserve(grams.size());
  for (auto& g : grams) out.push_back(std::move(g.first));
  return out;
}

LanguageProfile build_profile(std::string code, std::string_view training_text, std::size_t profile_size) {
  LanguageProfile profile;
  profile.code = std::move(code);
  const auto grams = ranked_ngrams(training_text, profile_size);
  for (std::size_t i = 0; i < grams.size(); ++i) profile.ranks.emplace(grams[i], i);
  return profile;
}

const LanguageDetector& LanguageDetector::bundled() {
  static const LanguageDetector detector = [] {
    std::vector<LanguageProfile> profiles;
    for (auto code : kBundledLanguages) {
      const auto text = bundled_resource("langid/udhr_" + std::string(code) + ".txt");
      profiles.push_back(build_profile(std::string(code), text, kProfileSize));
    }
    return LanguageDetector(std::move(profiles));
  }();
  return detector;
}

LanguageDetector::LanguageDetector(std::vector<LanguageProfile> profiles) : profiles_(std::move(profiles)) {
  if (profiles_.empty()) throw InvalidArgument("language detector needs at least one profile");
}

std::map<std::string, std::size_t> LanguageDetector::distances(std::string_view text) const {
  const auto doc = ranked_ngrams(text, kProfileSize);
  std::map<std::string, std::size_t> out;
  for (const auto& profile : profiles_) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < doc.size(); ++i) {
      auto it = profile.ranks.find(doc[i]);
      if (it == profile.ranks.end()) {
        d += kProfileSize;
      } else {
        d += it->second > i ? it->second - i : i - it->second;
      }
    }
    out[profile.code] = d;
  }
  return out;
}

LanguageGuess LanguageDetector::detect(std::string_view text) const {
  const std::size_t length = trimmed_length(text);
  if (length == 0) throw InvalidArgument("cannot detect the language of empty text");
  if (length < kMinChars) return {"und", 0.0};
  const auto doc_size = ranked_ngrams(text, kProfileSize).size();
  if (doc_size == 0) return {"und", 0.0};

  const auto dist = distances(text);
  // Profiles are iterated in map order, so ties resolve alphabetically.
  auto best = std::min_element(dist.begin(), dist.end(),
                               [](const auto& a, const auto& b) { return a.second < b.second; });
  const double max_distance = static_cast<double>(doc_size * kProfileSize);
  return {best->first, 1.0 - static_cast<double>(best->second) / max_distance};
}

}  // namespace moocscope
