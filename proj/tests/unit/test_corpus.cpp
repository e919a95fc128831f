#include <doctest.h>

#include <filesystem>

#include "moocscope/corpus.hpp"
#include "moocscope/error.hpp"
#include "moocscope/io.hpp"
#include "moocscope/langid.hpp"

using namespace moocscope;

namespace {

const char* kTwo =
    R"({"review_id":"r1","course_id":"c1","rating":5,"text":"Great course"})"
    "\n"
    R"({"review_id":"r2","course_id":"c1","rating":7,"text":"Bad rating"})"
    "\n";

}  // namespace

TEST_CASE("valid ratings are the nine half-stars") {
  for (double r = 1.0; r <= 5.0; r += 0.5) CHECK(is_valid_rating(r));
  CHECK_FALSE(is_valid_rating(0.5));
  CHECK_FALSE(is_valid_rating(5.5));
  CHECK_FALSE(is_valid_rating(4.25));
  CHECK_FALSE(is_valid_rating(7));
}

TEST_CASE("invalid rating is skipped with a diagnostic") {
  const auto res = parse_corpus(kTwo, InputFormat::kJsonl);
  CHECK(res.corpus.reviews().size() == 1);
  REQUIRE(res.rejects.size() == 1);
  CHECK(res.rejects[0].reason == "invalid_rating");
  CHECK(res.rejects[0].line == 2);
  CHECK(res.records_read == 2);
}

TEST_CASE("missing fields, malformed lines and duplicate ids are rejected") {
  const std::string text =
      R"({"review_id":"r1","course_id":"c1","rating":4.5,"text":"ok"})"
      "\n"
      R"({"review_id":"r1","course_id":"c1","rating":4.5,"text":"again"})"
      "\n"
      R"({"review_id":"r3","rating":4.5,"text":"no course"})"
      "\n"
      "{not json\n"
      R"({"review_id":"r5","course_id":"c2","text":"no rating"})"
      "\n";
  const auto res = parse_corpus(text, InputFormat::kJsonl);
  CHECK(res.corpus.reviews().size() == 1);
  REQUIRE(res.rejects.size() == 4);
  CHECK(res.rejects[0].reason == "duplicate_id");
  CHECK(res.rejects[1].reason == "missing_field");
  CHECK(res.rejects[1].detail == "course_id");
  CHECK(res.rejects[2].reason == "malformed_record");
  CHECK(res.rejects[3].detail == "rating");
}

TEST_CASE("orphan reviews get stub courses") {
  const auto res = parse_corpus(kTwo, InputFormat::kJsonl);
  REQUIRE(res.corpus.courses().size() == 1);
  CHECK(res.corpus.courses()[0].synthetic);
  CHECK(res.corpus.orphan_count() == 1);
  CHECK(res.corpus.review_positions("c1").size() == 1);
}

TEST_CASE("CSV input with courses") {
  const std::string reviews =
      "review_id,course_id,rating,text,date,platform\n"
      "r1,c1,4.5,\"Nice, clear course\",2021/03/04,Udemy\n"
      "r2,c2,3,Fine,2021-03-05T10:00:00Z,coursera\n";
  const std::string courses = "course_id,title,teacher\nc1,Intro,Ann\nc2,Advanced,\n";
  const auto res = parse_corpus(reviews, InputFormat::kCsv, courses);
  REQUIRE(res.rejects.empty());
  REQUIRE(res.corpus.reviews().size() == 2);
  CHECK(res.corpus.reviews()[0].text == "Nice, clear course");
  CHECK(res.corpus.reviews()[0].date == "2021-03-04");
  CHECK(res.corpus.reviews()[1].date == "2021-03-05T10:00:00");
  CHECK(res.corpus.reviews()[0].platform == Platform::kUdemy);
  CHECK(res.corpus.find_course("c1")->teacher == "Ann");
  CHECK(res.corpus.orphan_count() == 0);
}

TEST_CASE("normalize_date") {
  CHECK(normalize_date("2020-01-31") == "2020-01-31");
  CHECK(normalize_date("2020/1/5") == std::nullopt);
  CHECK(normalize_date("2020-02-30") == std::nullopt);
  CHECK(normalize_date("2020-02-29 23:59:59+02:00") == "2020-02-29T23:59:59");
}

TEST_CASE("save then load is lossless") {
  const std::string text =
      R"({"review_id":"r1","course_id":"c1","rating":4.5,"text":"Clear \"quoted\"\nnew line","username":"u","date":"2020-05-01","language":"en","url":"https://x.org","platform":"platzi"})"
      "\n"
      R"({"review_id":"r2","course_id":"c9","rating":1,"text":"orphan"})"
      "\n";
  const std::string courses = R"({"course_id":"c1","title":"T","category":"health","teacher":"Bo","url":"u"})" "\n";
  const auto first = parse_corpus(text, InputFormat::kJsonl, courses).corpus;
  const auto dir = std::filesystem::temp_directory_path() / "moocscope_corpus_rt";
  std::filesystem::create_directories(dir);
  save_corpus(first, dir / "r.jsonl", dir / "c.jsonl");
  const auto second = load_corpus(dir / "r.jsonl", InputFormat::kJsonl, dir / "c.jsonl");
  CHECK(second.rejects.empty());
  CHECK(second.corpus == first);
  CHECK(reviews_to_jsonl(second.corpus) == reviews_to_jsonl(first));
  CHECK(courses_to_jsonl(second.corpus) == courses_to_jsonl(first));
  std::filesystem::remove_all(dir);
}

TEST_CASE("load of a missing file throws IoError") {
  CHECK_THROWS_AS(load_corpus("/nonexistent/reviews.jsonl", InputFormat::kJsonl), IoError);
}

TEST_CASE("fixture loads with 100 reviews and 10 courses") {
  const std::filesystem::path dir = MOOCSCOPE_FIXTURES;
  const auto res = load_corpus(dir / "sample_100.jsonl", InputFormat::kJsonl, dir / "sample_100.courses.jsonl");
  CHECK(res.rejects.empty());
  CHECK(res.corpus.reviews().size() == 100);
  CHECK(res.corpus.courses().size() == 10);
  CHECK(res.corpus.orphan_count() == 0);
}

TEST_CASE("language filter keeps exactly the requested language and is idempotent") {
  const std::string text =
      R"({"review_id":"r1","course_id":"c1","rating":5,"text":"x","language":"en"})"
      "\n"
      R"({"review_id":"r2","course_id":"c2","rating":5,"text":"y","language":"es"})"
      "\n"
      R"({"review_id":"r3","course_id":"c1","rating":4,"text":"This course was fantastic and very well explained"})"
      "\n"
      R"({"review_id":"r4","course_id":"c1","rating":4,"text":"El curso fue muy bueno y el profesor explica muy bien"})"
      "\n";
  const auto corpus = parse_corpus(text, InputFormat::kJsonl).corpus;
  const auto& det = LanguageDetector::bundled();
  const auto once = filter_language(corpus, "en", det);
  CHECK(once.detected == 2);
  REQUIRE(once.corpus.reviews().size() == 2);
  CHECK(once.corpus.reviews()[0].review_id == "r1");
  CHECK(once.corpus.reviews()[1].review_id == "r3");
  CHECK(once.removed_courses == 1);
  CHECK(once.corpus.courses().size() == 1);
  const auto twice = filter_language(once.corpus, "en", det);
  CHECK(twice.corpus == once.corpus);
}

TEST_CASE("minimum review filter") {
  std::string text;
  for (int i = 0; i < 5; ++i)
    text += R"({"review_id":"a)" + std::to_string(i) + R"(","course_id":"big","rating":5,"text":"t"})" "\n";
  text += R"({"review_id":"b0","course_id":"small","rating":3,"text":"t"})" "\n";
  const auto corpus = parse_corpus(text, InputFormat::kJsonl).corpus;
  const auto res = filter_min_reviews(corpus, 2);
  CHECK(res.corpus.reviews().size() == 5);
  CHECK(res.removed_courses == 1);
  CHECK(res.removed_reviews == 1);
  CHECK(res.removed_course_fraction == doctest::Approx(0.5));
  CHECK(filter_min_reviews(corpus, 1).corpus == corpus);
  CHECK_THROWS_AS(filter_min_reviews(corpus, 0), InvalidArgument);
}

TEST_CASE("corpus constructor rejects duplicates") {
  Review r{"r1", "c1", Platform::kOther, {}, {}, 5.0, "t", {}, {}};
  CHECK_THROWS_AS(Corpus({r, r}, {}), InvalidArgument);
}
