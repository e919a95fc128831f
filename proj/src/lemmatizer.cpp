// Rule-based English lemmatizer. Lookup order:
//   1. irregular forms (went -> go, children -> child, better -> good)
//   2. words that are already base forms despite an inflection-like suffix
//      (adjectival -ing/-ed, activity nouns in -ing, -s singulars)
//   3. a suffix-driven part-of-speech guess selecting one rule family:
//      -ing/-ed -> verb, -er/-est -> adjective, -s -> noun
// Verb stems are repaired Porter-style (undoubling, restoring a final 'e').

#include <algorithm>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "moocscope/textprep.hpp"

namespace moocscope {

namespace {

const std::unordered_map<std::string_view, std::string_view>& irregular_forms() {
  static const std::unordered_map<std::string_view, std::string_view> kTable = {
      // be / have / do
      {"am", "be"}, {"is", "be"}, {"are", "be"}, {"was", "be"}, {"were", "be"}, {"been", "be"},
      {"being", "be"}, {"has", "have"}, {"had", "have"}, {"having", "have"}, {"does", "do"},
      {"did", "do"}, {"done", "do"}, {"doing", "do"},
      // strong and irregular verbs
      {"went", "go"}, {"gone", "go"}, {"goes", "go"}, {"made", "make"}, {"took", "take"},
      {"taken", "take"}, {"gave", "give"}, {"given", "give"}, {"wrote", "write"}, {"written", "write"},
      {"bought", "buy"}, {"thought", "think"}, {"learnt", "learn"}, {"found", "find"}, {"got", "get"},
      {"gotten", "get"}, {"ran", "run"}, {"began", "begin"}, {"begun", "begin"}, {"knew", "know"},
      {"known", "know"}, {"spoke", "speak"}, {"spoken", "speak"}, {"felt", "feel"}, {"kept", "keep"},
      {"left", "leave"}, {"brought", "bring"}, {"saw", "see"}, {"seen", "see"}, {"taught", "teach"},
      {"understood", "understand"}, {"came", "come"}, {"said", "say"}, {"says", "say"}, {"told", "tell"},
      {"heard", "hear"}, {"meant", "mean"}, {"paid", "pay"}, {"sent", "send"}, {"spent", "spend"},
      {"built", "build"}, {"lost", "lose"}, {"held", "hold"}, {"stood", "stand"}, {"sat", "sit"},
      {"met", "meet"}, {"led", "lead"}, {"grew", "grow"}, {"grown", "grow"}, {"shown", "show"},
      {"chose", "choose"}, {"chosen", "choose"}, {"forgot", "forget"}, {"forgotten", "forget"},
      {"fell", "fall"}, {"fallen", "fall"}, {"broke", "break"}, {"broken", "break"}, {"drove", "drive"},
      {"driven", "drive"}, {"ate", "eat"}, {"eaten", "eat"}, {"flew", "fly"}, {"flown", "fly"},
      {"drew", "draw"}, {"drawn", "draw"}, {"threw", "throw"}, {"thrown", "throw"}, {"wore", "wear"},
      {"worn", "wear"}, {"won", "win"}, {"sold", "sell"}, {"caught", "catch"}, {"fought", "fight"},
      {"sought", "seek"}, {"slept", "sleep"}, {"became", "become"}, {"dying", "die"}, {"lying", "lie"},
      {"tying", "tie"}, {"using", "use"}, {"added", "add"}, {"adding", "add"}, {"created", "create"},
      {"creating", "create"}, {"creates", "create"},
      // nouns
      {"children", "child"}, {"men", "man"}, {"women", "woman"}, {"feet", "foot"}, {"teeth", "tooth"},
      {"mice", "mouse"}, {"geese", "goose"}, {"data", "datum"}, {"criteria", "criterion"},
      {"phenomena", "phenomenon"}, {"analyses", "analysis"}, {"quizzes", "quiz"}, {"lives", "life"},
      {"wives", "wife"}, {"knives", "knife"}, {"movies", "movie"}, {"cookies", "cookie"},
      {"calories", "calorie"}, {"headaches", "headache"}, {"caches", "cache"}, {"niches", "niche"},
      {"ties", "tie"}, {"lies", "lie"}, {"dies", "die"},
      // adjectives
      {"better", "good"}, {"best", "good"}, {"worse", "bad"}, {"worst", "bad"},
  };
  return kTable;
}

// Base forms whose spelling looks inflected.
const std::unordered_set<std::string_view>& base_forms() {
  static const std::unordered_set<std::string_view> kSet = {
      // nouns that look inflected
      "devops", "clustering", "wellbeing", "lighting", "logistics",
      // adjectives in -ing
      "interesting", "amazing", "boring", "engaging", "exciting", "confusing", "outstanding",
      "challenging", "inspiring", "entertaining", "rewarding", "motivating", "demanding",
      "overwhelming", "refreshing", "annoying", "frustrating", "disappointing", "misleading",
      "captivating", "promising", "charming", "stunning", "relaxing", "surprising",
      "fascinating", "satisfying", "encouraging", "convincing", "willing", "missing",
      // adjectives in -ed
      "detailed", "advanced", "outdated", "organized", "complicated", "experienced", "dedicated",
      "interested", "excited", "bored", "confused", "motivated", "qualified", "sophisticated",
      "talented", "skilled", "limited", "balanced", "structured", "updated", "satisfied",
      "unsatisfied", "disorganized", "graded", "ungraded", "polished", "prepared", "unprepared",
      "crowded", "rushed", "hundred", "sacred", "naked", "wicked", "exceed", "succeed", "proceed",
      "paced", "biased", "related", "varied", "tired",
      // activity and domain nouns in -ing
      "programming", "learning", "cooking", "marketing", "engineering", "trading", "accounting",
      "computing", "networking", "banking", "gaming", "modeling", "modelling", "painting", "drawing",
      "training", "building", "meeting", "evening", "morning", "thing", "nothing", "something",
      "anything", "everything", "during", "spring", "string", "ceiling", "wedding", "pudding",
      "clothing", "housing", "knitting", "sewing", "baking", "mixing", "editing", "rendering",
      "hacking", "singing", "budgeting", "bookkeeping", "investing", "advertising", "coaching",
      "counseling", "parenting", "gardening", "woodworking", "funding", "listening",
      "recording", "swimming", "boxing", "ring", "king", "wing", "sibling", "feeling",
      // -s words that are singular or invariant
      "always", "perhaps", "sometimes", "news", "physics", "mathematics", "economics", "politics",
      "ethics", "linguistics", "electronics", "robotics", "genetics", "analytics", "statistics",
      "series", "species", "bias", "canvas", "atlas", "lens", "towards", "whereas", "themselves",
      "ourselves", "yourselves", "afterwards", "besides", "alias", "chaos", "cosmos", "kubernetes",
      "diabetes", "ethos", "thanks", "christmas", "means", "aids",
      "tennis", "yes", "jeans", "pants", "scissors", "hers", "ours", "yours", "theirs",
      "overseas", "nowadays", "upwards", "downwards", "backwards", "forwards", "regardless",
  };
  return kSet;
}

// Adjectives whose comparative and superlative forms are recognized.
const std::unordered_set<std::string_view>& adjective_bases() {
  static const std::unordered_set<std::string_view> kSet = {
      "easy", "hard", "fast", "slow", "clear", "simple", "short", "long", "big", "small", "deep",
      "high", "low", "cheap", "quick", "nice", "great", "old", "new", "young", "strong", "weak",
      "smart", "late", "early", "large", "wide", "close", "fine", "safe", "true", "happy", "busy",
      "heavy", "funny", "tiny", "pretty", "dense", "rich", "poor", "tough", "broad", "cool", "warm",
      "hot", "cold", "fresh", "clean", "light", "dark", "loud", "quiet", "calm", "brief", "tight",
      "loose", "rough", "smooth", "sharp", "steep", "thin", "thick", "fat", "full", "bright", "dull",
      "wise", "brave", "gentle", "kind", "lucky", "silly", "crazy", "lazy", "healthy", "wealthy",
      "costly", "friendly", "lovely", "lively", "ugly", "dirty", "noisy", "tidy", "handy", "tricky",
      "messy", "fancy", "sweet", "sad", "mad", "bad", "wet", "fit", "flat", "plain", "proud", "pure",
      "rare", "ripe", "vague", "wild", "narrow", "shallow", "hollow", "clever", "humble", "subtle",
      "able", "near", "far", "low", "neat", "odd", "real", "solid", "stiff", "firm", "keen", "fair",
  };
  return kSet;
}

bool is_consonant_at(std::string_view w, std::size_t i) {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return false;
    case 'y':
      return i == 0 || !is_consonant_at(w, i - 1);
    default:
      return true;
  }
}

bool has_vowel(std::string_view w) {
  for (std::size_t i = 0; i < w.size(); ++i)
    if (!is_consonant_at(w, i)) return true;
  return false;
}

// Porter's measure: the number of vowel-consonant sequences.
int measure(std::string_view w) {
  int m = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool vowel = !is_consonant_at(w, i);
    if (prev_vowel && !vowel) ++m;
    prev_vowel = vowel;
  }
  return m;
}

// Ends consonant-vowel-consonant, the last not w, x or y.
bool ends_cvc(std::string_view w) {
  const std::size_t n = w.size();
  if (n < 3) return false;
  const char last = w[n - 1];
  return is_consonant_at(w, n - 3) && !is_consonant_at(w, n - 2) && is_consonant_at(w, n - 1) &&
         last != 'w' && last != 'x' && last != 'y';
}

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

bool is_vowel_char(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// Repairs a verb stem left after stripping -ing or -ed.
std::string restore_verb_stem(std::string stem) {
  const std::size_t n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && is_consonant_at(stem, n - 1) && stem[n - 1] != 'l' &&
      stem[n - 1] != 's' && stem[n - 1] != 'z') {
    stem.pop_back();
    return stem;
  }
  const char last = stem.back();
  const char prev = n >= 2 ? stem[n - 2] : '\0';
  const bool prev_consonant = n >= 2 && is_consonant_at(stem, n - 2);
  const bool add_e =
      last == 'v' || last == 'c' || (last == 'z' && prev != 'z') ||
      (last == 'l' && prev_consonant && std::string_view("bcdfgkpt").find(prev) != std::string_view::npos) ||
      ends_with(stem, "dg") || ends_with(stem, "ang") || ends_with(stem, "eng") ||
      (last == 's' && n >= 3 && is_vowel_char(stem[n - 2]) && is_vowel_char(stem[n - 3])) ||
      (last == 's' && std::string_view("nrlp").find(prev) != std::string_view::npos) ||
      ((ends_with(stem, "at") || ends_with(stem, "ur") || ends_with(stem, "ir")) && n >= 3 &&
       is_consonant_at(stem, n - 3)) ||
      (n == 2 && !is_consonant_at(stem, 0) && is_consonant_at(stem, 1)) ||
      (ends_cvc(stem) && measure(stem) == 1);
  if (add_e) stem += 'e';
  return stem;
}

std::string verb_lemma(std::string_view w) {
  if (ends_with(w, "ing") && w.size() >= 5) {
    std::string stem(w.substr(0, w.size() - 3));
    if (!has_vowel(stem)) return std::string(w);
    if (ends_with(stem, "y") || ends_with(stem, "ee")) return stem;
    return restore_verb_stem(std::move(stem));
  }
  // -ed
  if (ends_with(w, "ied")) {
    std::string stem(w.substr(0, w.size() - 3));
    return w.size() > 4 ? stem + "y" : stem + "ie";
  }
  if (ends_with(w, "eed")) {
    std::string_view before = w.substr(0, w.size() - 3);
    return has_vowel(before) ? std::string(w.substr(0, w.size() - 1)) : std::string(w);
  }
  std::string stem(w.substr(0, w.size() - 2));
  if (!has_vowel(stem)) return std::string(w);
  if (ends_with(stem, "e")) return stem;
  return restore_verb_stem(std::move(stem));
}

std::string adjective_lemma(std::string_view w) {
  const std::size_t cut = ends_with(w, "est") ? 3 : 2;
  std::string stem(w.substr(0, w.size() - cut));
  const auto& adjectives = adjective_bases();
  std::vector<std::string> candidates;
  if (ends_with(stem, "i")) candidates.push_back(stem.substr(0, stem.size() - 1) + "y");
  const std::size_t n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2]) candidates.push_back(stem.substr(0, n - 1));
  candidates.push_back(stem + "e");
  candidates.push_back(stem);
  for (const auto& c : candidates)
    if (adjectives.contains(c)) return c;
  return std::string(w);
}

std::string noun_lemma(std::string_view w) {
  if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) return std::string(w);
  if (ends_with(w, "ies") && w.size() > 4) return std::string(w.substr(0, w.size() - 3)) + "y";
  if (ends_with(w, "sses") || ends_with(w, "ches") || ends_with(w, "shes") || ends_with(w, "xes"))
    return std::string(w.substr(0, w.size() - 2));
  if (ends_with(w, "oes") && w.size() > 5) return std::string(w.substr(0, w.size() - 2));
  return std::string(w.substr(0, w.size() - 1));
}

}  // namespace

std::string lemmatize_word(std::string_view token) {
  if (auto it = irregular_forms().find(token); it != irregular_forms().end()) return std::string(it->second);
  if (token.size() <= 3 || base_forms().contains(token)) return std::string(token);
  if (ends_with(token, "ing") || ends_with(token, "ed")) return verb_lemma(token);
  if ((ends_with(token, "est") && token.size() >= 5) || ends_with(token, "er")) return adjective_lemma(token);
  if (ends_with(token, "s")) return noun_lemma(token);
  return std::string(token);
}

std::vector<std::string> lemmatize(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lemmatize_word(t));
  return out;
}

}  // namespace moocscope
