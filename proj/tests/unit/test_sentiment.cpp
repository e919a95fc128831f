#include <doctest.h>

#include <cmath>

#include "moocscope/corpus.hpp"
#include "moocscope/error.hpp"
#include "moocscope/rng.hpp"
#include "moocscope/sentiment.hpp"
#include "moocscope/stats.hpp"

using namespace moocscope;
using Tokens = std::vector<std::string>;

namespace {

const ValenceLexicon& lex() { return ValenceLexicon::bundled(); }

Corpus small_corpus() {
  std::vector<Review> reviews;
  const double ratings[] = {1, 2, 3, 5, 5, 4};
  const char* courses[] = {"c1", "c1", "c1", "c2", "c2", "c3"};
  for (int i = 0; i < 6; ++i)
    reviews.push_back({"r" + std::to_string(i + 1), courses[i], Platform::kOther, {}, {}, ratings[i], "t", {}, {}});
  return Corpus(std::move(reviews), {Course{"c1", {}, "one"}, Course{"c2", {}, "two"}, Course{"c3", {}, "three"},
                                     Course{"c4", {}, "four"}});
}

}  // namespace

TEST_CASE("bundled lexicons load with the expected entries") {
  CHECK(lex().valences.at("good") == doctest::Approx(1.9));
  CHECK(lex().valences.at("bad") == doctest::Approx(-2.5));
  CHECK(lex().boosters.at("very") == doctest::Approx(0.293));
  CHECK(lex().negators.contains("not"));
  CHECK(lex().negators.contains("dont"));
  for (const auto& [w, v] : lex().valences) CHECK((v >= -4.0 && v <= 4.0));
  CHECK(PolarityLexicon::bundled().polarity.at("good") == doctest::Approx(0.7));
}

TEST_CASE("valence rule hand traces") {
  CHECK(score_valence_rule(Tokens{}, lex()) == 0.0);
  CHECK(score_valence_rule(Tokens{"good"}, lex()) == doctest::Approx(0.44043357076016854).epsilon(1e-12));
  CHECK(score_valence_rule(Tokens{"very", "good"}, lex()) == doctest::Approx(0.4927250317396701).epsilon(1e-12));
  CHECK(score_valence_rule(Tokens{"very", "the", "good"}, lex()) ==
        doctest::Approx(0.4902265129795313).epsilon(1e-12));
  CHECK(score_valence_rule(Tokens{"not", "good"}, lex()) == doctest::Approx(-0.3412376512543242).epsilon(1e-12));
  CHECK(score_valence_rule(Tokens{"not", "very", "good"}, lex()) ==
        doctest::Approx(-0.38645643141214686).epsilon(1e-12));
  CHECK(score_valence_rule(Tokens{"good", "bad"}, lex()) == doctest::Approx(-0.15309310892394867).epsilon(1e-12));
  CHECK(score_valence_rule(Tokens{"GOOD"}, lex()) == score_valence_rule(Tokens{"good"}, lex()));
  // Boosters are not hits by themselves.
  CHECK(score_valence_rule(Tokens{"very"}, lex()) == 0.0);
}

TEST_CASE("booster monotonicity and negation flip") {
  const double good = score_valence_rule(Tokens{"good"}, lex());
  CHECK(score_valence_rule(Tokens{"very", "good"}, lex()) > good);
  CHECK(good > 0.0);
  CHECK(score_valence_rule(Tokens{"not", "good"}, lex()) < 0.0);
  CHECK(score_valence_rule(Tokens{"very", "bad"}, lex()) < score_valence_rule(Tokens{"bad"}, lex()));
}

TEST_CASE("fuzz: compound bounds, sign symmetry, booster monotonicity") {
  std::vector<std::string> pool = {"good", "bad", "great", "terrible", "very", "extremely", "not", "never",
                                   "course", "boring", "love", "hate", "really", "the", "fun", "awful"};
  std::vector<std::string> hits;
  for (const auto& w : pool)
    if (lex().valences.contains(w) && !lex().boosters.contains(w)) hits.push_back(w);
  const auto neg = lex().negated();
  Rng rng(2024);
  for (int i = 0; i < 3000; ++i) {
    Tokens t;
    const auto len = rng.below(25);
    for (std::uint64_t j = 0; j < len; ++j) t.push_back(pool[rng.below(pool.size())]);
    const double c = score_valence_rule(t, lex());
    CHECK((c >= -1.0 && c <= 1.0));
    CHECK(score_valence_rule(t, neg) == doctest::Approx(-c).epsilon(1e-12));

    // Single-hit lists without negators: a booster inserted right before the
    // hit moves the compound away from zero in the hit's direction.
    Tokens filler;
    for (const auto& w : t)
      if (!lex().negators.contains(w) && (!lex().valences.contains(w) || lex().boosters.contains(w)))
        filler.push_back(w);
    const std::string hit = hits[rng.below(hits.size())];
    Tokens plain = filler;
    const auto at = static_cast<std::ptrdiff_t>(rng.below(filler.size() + 1));
    plain.insert(plain.begin() + at, hit);
    Tokens boosted = plain;
    boosted.insert(boosted.begin() + at, "very");
    const double before = score_valence_rule(plain, lex());
    const double after = score_valence_rule(boosted, lex());
    if (lex().valences.at(hit) > 0)
      CHECK(after >= before - 1e-12);
    else
      CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("polarity average") {
  const auto& p = PolarityLexicon::bundled();
  CHECK(score_polarity_avg(Tokens{}, p) == 0.0);
  CHECK(score_polarity_avg(Tokens{"good"}, p) == doctest::Approx(0.7));
  CHECK(score_polarity_avg(Tokens{"good", "bad"}, p) == doctest::Approx(0.0));
  CHECK(score_polarity_avg(Tokens{"very", "good"}, p) == doctest::Approx(0.91));
  CHECK(score_polarity_avg(Tokens{"course"}, p) == 0.0);
  Rng rng(3);
  const Tokens pool = {"good", "bad", "very", "excellent", "awful", "not", "course", "perfect", "extremely"};
  for (int i = 0; i < 1000; ++i) {
    Tokens t;
    for (std::uint64_t j = 0, n = rng.below(12); j < n; ++j) t.push_back(pool[rng.below(pool.size())]);
    const double c = score_polarity_avg(t, p);
    CHECK((c >= -1.0 && c <= 1.0));
  }
}

TEST_CASE("label thresholds") {
  CHECK(label_from_compound(0.5) == SentimentLabel::kPositive);
  CHECK(label_from_compound(0.1) == SentimentLabel::kNeutral);
  CHECK(label_from_compound(-0.1) == SentimentLabel::kNeutral);
  CHECK(label_from_compound(std::nextafter(0.1, 1.0)) == SentimentLabel::kPositive);
  CHECK(label_from_compound(std::nextafter(-0.1, -1.0)) == SentimentLabel::kNegative);
  CHECK(label_from_compound(-0.3) == SentimentLabel::kNegative);
  CHECK_THROWS_AS(label_from_compound(0.0, -0.2, 0.2), InvalidArgument);
  // Monotone step function.
  SentimentLabel prev = SentimentLabel::kNegative;
  for (double c = -1.0; c <= 1.0; c += 0.001) {
    const auto l = label_from_compound(c);
    CHECK(static_cast<int>(l) <= static_cast<int>(prev));
    prev = l;
  }
}

TEST_CASE("labels and engines parse") {
  CHECK(parse_label("positive") == SentimentLabel::kPositive);
  CHECK_THROWS_AS(parse_label("Great"), InvalidArgument);
  CHECK(parse_engine("vader") == SentimentEngine::kValenceRule);
  CHECK(to_string(SentimentEngine::kPolarityAvg) == "polarity_avg");
}

TEST_CASE("external label import") {
  const auto corpus = small_corpus();
  const std::string text =
      R"({"review_id":"r1","label":"Positive"})"
      "\n"
      R"({"review_id":"r2","label":"Great"})"
      "\n"
      R"({"review_id":"zz","label":"Negative"})"
      "\n"
      R"({"label":"Negative"})"
      "\n";
  const auto imp = import_external_labels(text, &corpus);
  REQUIRE(imp.scores.size() == 1);
  CHECK(imp.scores[0].engine == SentimentEngine::kExternal);
  CHECK_FALSE(imp.scores[0].compound.has_value());
  REQUIRE(imp.rejects.size() == 2);
  CHECK(imp.rejects[0].reason == "invalid_label");
  CHECK(imp.rejects[1].reason == "missing_field");
  CHECK(imp.unknown_ids == std::vector<std::string>{"zz"});
}

TEST_CASE("course aggregation") {
  const auto corpus = small_corpus();
  std::vector<SentimentScore> scores = {
      {"r1", SentimentEngine::kValenceRule, 0.2, SentimentLabel::kPositive},
      {"r2", SentimentEngine::kValenceRule, 0.4, SentimentLabel::kPositive},
      {"r3", SentimentEngine::kValenceRule, -0.5, SentimentLabel::kNegative},
      {"r4", SentimentEngine::kValenceRule, 0.5, SentimentLabel::kPositive},
      {"r5", SentimentEngine::kValenceRule, -0.5, SentimentLabel::kNegative},
  };
  const auto res = aggregate_course_sentiment(scores, corpus);
  REQUIRE(res.courses.size() == 2);
  CHECK(res.courses[0].majority_label == SentimentLabel::kPositive);
  CHECK(*res.courses[0].mean_compound == doctest::Approx(0.1 / 3.0));
  CHECK(res.courses[1].majority_label == SentimentLabel::kNeutral);  // tie
  CHECK(res.excluded_courses == std::vector<std::string>{"c3", "c4"});

  scores.resize(2);
  const auto two = aggregate_course_sentiment(scores, corpus);
  CHECK(*two.courses[0].mean_compound == doctest::Approx(0.3));

  std::vector<SentimentScore> bad = {{"nope", SentimentEngine::kExternal, std::nullopt, SentimentLabel::kPositive}};
  CHECK_THROWS_AS(aggregate_course_sentiment(bad, corpus), InvalidArgument);
}

TEST_CASE("majority label equals a brute-force recount") {
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    std::map<SentimentLabel, std::size_t> counts;
    std::vector<SentimentLabel> labels;
    for (std::uint64_t j = 0, n = 1 + rng.below(7); j < n; ++j) {
      labels.push_back(static_cast<SentimentLabel>(rng.below(3)));
      ++counts[labels.back()];
    }
    std::size_t best = 0, winners = 0;
    SentimentLabel w = SentimentLabel::kNeutral;
    for (int l = 0; l < 3; ++l) {
      const auto n = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), static_cast<SentimentLabel>(l)));
      if (n > best) {
        best = n;
        winners = 1;
        w = static_cast<SentimentLabel>(l);
      } else if (n == best) {
        ++winners;
      }
    }
    CHECK(majority_label(counts) == (winners == 1 ? w : SentimentLabel::kNeutral));
  }
}

TEST_CASE("correlation against ratings") {
  const auto corpus = small_corpus();
  std::vector<SentimentScore> s = {{"r1", SentimentEngine::kValenceRule, 0.1, SentimentLabel::kNeutral},
                                   {"r2", SentimentEngine::kValenceRule, 0.2, SentimentLabel::kPositive},
                                   {"r3", SentimentEngine::kValenceRule, 0.3, SentimentLabel::kPositive},
                                   {"r4", SentimentEngine::kExternal, std::nullopt, SentimentLabel::kPositive}};
  CHECK(correlate_sentiment_rating(s, corpus, CorrelationMethod::kPearson) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(correlate_sentiment_rating(s, corpus, CorrelationMethod::kSpearman) == doctest::Approx(1.0).epsilon(1e-12));
  for (auto& x : s) x.compound = 0.5;
  s.pop_back();
  CHECK_THROWS_AS(correlate_sentiment_rating(s, corpus, CorrelationMethod::kPearson), UndefinedCorrelation);
}

TEST_CASE("score corpus and JSONL round trip") {
  std::vector<Review> reviews = {
      {"a", "c", Platform::kOther, {}, {}, 5.0, "I really loved this course, it was great!", {}, {}},
      {"b", "c", Platform::kOther, {}, {}, 1.0, "Terrible and boring, not good at all.", {}, {}},
      {"d", "c", Platform::kOther, {}, {}, 3.0, "It covers the syllabus.", {}, {}}};
  Corpus corpus(std::move(reviews), {});
  const auto scores = score_corpus(corpus, SentimentOptions{});
  REQUIRE(scores.size() == 3);
  CHECK(scores[0].label == SentimentLabel::kPositive);
  CHECK(scores[1].label == SentimentLabel::kNegative);
  CHECK(scores[2].label == SentimentLabel::kNeutral);
  SentimentOptions pol;
  pol.engine = SentimentEngine::kPolarityAvg;
  CHECK(score_corpus(corpus, pol)[0].label == SentimentLabel::kPositive);
  CHECK(scores_from_jsonl(scores_to_jsonl(scores)) == scores);
  std::vector<SentimentScore> ext = {{"a", SentimentEngine::kExternal, std::nullopt, SentimentLabel::kNegative}};
  CHECK(scores_from_jsonl(scores_to_jsonl(ext)) == ext);
}

TEST_CASE("raw text tokens keep case and strip edge punctuation") {
  CHECK(sentiment_tokens("GREAT course!!! (really)", true) == Tokens{"GREAT", "course", "really"});
  CHECK(sentiment_tokens("GREAT course!!!", false) == Tokens{"great", "course"});
}
