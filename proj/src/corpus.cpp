#include "moocscope/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include <json.hpp>

#include "moocscope/error.hpp"
#include "moocscope/io.hpp"
#include "moocscope/langid.hpp"

namespace moocscope {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::pair<Platform, std::string_view> kPlatformNames[] = {
    {Platform::kUdemy, "udemy"},         {Platform::kCoursera, "coursera"},
    {Platform::kDomestika, "domestika"}, {Platform::kPlatzi, "platzi"},
    {Platform::kCrehana, "crehana"},     {Platform::kOther, "other"},
};

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool parse_fixed_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

// Field accessors over the two record shapes (JSON object, CSV row).
struct RawRecord {
  std::map<std::string, std::string> strings;
  std::optional<double> rating;
  bool rating_present = false;
  std::string rating_raw;
  std::vector<std::string> malformed;  // keys present with unusable types
};

std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

RawRecord from_json(const json& obj) {
  RawRecord rec;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const auto& key = it.key();
    const auto& val = it.value();
    if (key == "rating") {
      if (val.is_null()) continue;
      rec.rating_present = true;
      if (val.is_number()) {
        rec.rating = val.get<double>();
        rec.rating_raw = val.dump();
      } else if (val.is_string()) {
        rec.rating_raw = val.get<std::string>();
        rec.rating = parse_number(rec.rating_raw);
      } else {
        rec.rating_raw = val.dump();
      }
      continue;
    }
    if (val.is_null()) continue;
    if (val.is_string()) {
      rec.strings[key] = val.get<std::string>();
    } else if (val.is_number_integer()) {
      // Identifiers are opaque; some exports write them as integers.
      rec.strings[key] = val.dump();
    } else if (val.is_boolean()) {
      rec.strings[key] = val.get<bool>() ? "true" : "false";
    } else {
      rec.malformed.push_back(key);
    }
  }
  return rec;
}

RawRecord from_csv(const std::vector<std::string>& header, const std::vector<std::string>& row) {
  RawRecord rec;
  for (std::size_t i = 0; i < header.size() && i < row.size(); ++i) {
    if (header[i] == "rating") {
      if (row[i].empty()) continue;
      rec.rating_present = true;
      rec.rating_raw = row[i];
      rec.rating = parse_number(row[i]);
    } else if (!row[i].empty()) {
      rec.strings[header[i]] = row[i];
    }
  }
  return rec;
}

std::optional<std::string> take(RawRecord& rec, const std::string& key) {
  auto it = rec.strings.find(key);
  if (it == rec.strings.end()) return std::nullopt;
  return it->second;
}

// Splits input into records; each record is handed to `fn` with its line.
template <typename Fn>
void for_each_record(std::string_view text, InputFormat format, std::string_view source,
                     std::vector<Reject>& rejects, Fn&& fn) {
  if (format == InputFormat::kJsonl) {
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
      if (line.find_first_not_of(" \t") == std::string_view::npos) return;
      json obj = json::parse(line, nullptr, false);
      if (obj.is_discarded() || !obj.is_object()) {
        rejects.push_back({std::string(source), line_no, "malformed_record", "not a JSON object"});
        return;
      }
      fn(line_no, from_json(obj));
    });
    return;
  }
  const auto rows = parse_csv(text);
  if (rows.empty()) return;
  std::vector<std::string> header;
  for (const auto& h : rows.front()) {
    std::string key = lower_ascii(h);
    key.erase(0, key.find_first_not_of(' '));
    key.erase(key.find_last_not_of(' ') + 1);
    header.push_back(key);
  }
  for (std::size_t r = 1; r < rows.size(); ++r) fn(r + 1, from_csv(header, rows[r]));
}

}  // namespace

std::string_view to_string(Platform p) {
  for (auto [value, name] : kPlatformNames)
    if (value == p) return name;
  return "other";
}

Platform parse_platform(std::string_view name) {
  const std::string lowered = lower_ascii(name);
  for (auto [value, n] : kPlatformNames)
    if (n == lowered) return value;
  return Platform::kOther;
}

bool is_valid_rating(double rating) {
  if (!(rating >= 1.0 && rating <= 5.0)) return false;
  const double twice = rating * 2.0;
  return twice == std::floor(twice);
}

std::optional<std::string> normalize_date(std::string_view raw) {
  while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.front()))) raw.remove_prefix(1);
  while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) raw.remove_suffix(1);
  if (raw.size() < 10) return std::nullopt;
  const char sep = raw[4];
  if ((sep != '-' && sep != '/') || raw[7] != sep) return std::nullopt;
  int y, m, d;
  if (!parse_fixed_int(raw.substr(0, 4), y) || !parse_fixed_int(raw.substr(5, 2), m) ||
      !parse_fixed_int(raw.substr(8, 2), d))
    return std::nullopt;
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12 || d < 1) return std::nullopt;
  const int max_day = kDays[m - 1] + ((m == 2 && is_leap(y)) ? 1 : 0);
  if (d > max_day) return std::nullopt;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  std::string out = buf;
  if (raw.size() == 10) return out;
  if (raw[10] != 'T' && raw[10] != ' ') return std::nullopt;
  std::string_view time = raw.substr(11);
  int hh, mm, ss = 0;
  if (time.size() < 5 || time[2] != ':' || !parse_fixed_int(time.substr(0, 2), hh) ||
      !parse_fixed_int(time.substr(3, 2), mm))
    return std::nullopt;
  std::size_t used = 5;
  if (time.size() >= 8 && time[5] == ':') {
    if (!parse_fixed_int(time.substr(6, 2), ss)) return std::nullopt;
    used = 8;
  }
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  // Fractional seconds and zone designators are accepted and dropped.
  std::string_view rest = time.substr(used);
  if (!rest.empty() && rest.front() != '.' && rest.front() != 'Z' && rest.front() != '+' &&
      rest.front() != '-')
    return std::nullopt;
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02d", hh, mm, ss);
  return out + buf;
}

Corpus::Corpus(std::vector<Review> reviews, std::vector<Course> courses)
    : reviews_(std::move(reviews)), courses_(std::move(courses)) {
  for (std::size_t i = 0; i < courses_.size(); ++i) {
    const auto& c = courses_[i];
    if (c.course_id.empty()) throw InvalidArgument("course with empty course_id");
    if (c.title.empty()) throw InvalidArgument("course '" + c.course_id + "' has an empty title");
    if (!course_pos_.emplace(c.course_id, i).second)
      throw InvalidArgument("duplicate course_id '" + c.course_id + "'");
  }
  for (std::size_t i = 0; i < reviews_.size(); ++i) {
    const auto& r = reviews_[i];
    if (r.course_id.empty()) throw InvalidArgument("review '" + r.review_id + "' has an empty course_id");
    if (!is_valid_rating(r.rating))
      throw InvalidArgument("review '" + r.review_id + "' has an invalid rating");
    if (!review_pos_.emplace(r.review_id, i).second)
      throw InvalidArgument("duplicate review_id '" + r.review_id + "'");
    if (!course_pos_.contains(r.course_id)) {
      Course stub;
      stub.course_id = r.course_id;
      stub.title = r.course_id;
      stub.platform = r.platform;
      stub.synthetic = true;
      course_pos_.emplace(stub.course_id, courses_.size());
      courses_.push_back(std::move(stub));
    }
    index_[r.course_id].push_back(i);
  }
}

const Course* Corpus::find_course(std::string_view course_id) const {
  auto it = course_pos_.find(course_id);
  return it == course_pos_.end() ? nullptr : &courses_[it->second];
}

const Review* Corpus::find_review(std::string_view review_id) const {
  auto it = review_pos_.find(review_id);
  return it == review_pos_.end() ? nullptr : &reviews_[it->second];
}

const std::vector<std::size_t>& Corpus::review_positions(std::string_view course_id) const {
  static const std::vector<std::size_t> kEmpty;
  auto it = index_.find(course_id);
  return it == index_.end() ? kEmpty : it->second;
}

std::size_t Corpus::orphan_count() const {
  return static_cast<std::size_t>(
      std::count_if(courses_.begin(), courses_.end(), [](const Course& c) { return c.synthetic; }));
}

LoadResult parse_corpus(std::string_view reviews_text, InputFormat format,
                        std::optional<std::string_view> courses_text, std::string_view source) {
  LoadResult result;
  std::vector<Course> courses;
  if (courses_text) {
    std::set<std::string, std::less<>> seen;
    const std::string course_source = std::string(source) + ":courses";
    for_each_record(*courses_text, format, course_source, result.rejects,
                    [&](std::size_t line, RawRecord rec) {
                      Course c;
                      auto id = take(rec, "course_id");
                      auto title = take(rec, "title");
                      if (!id || id->empty() || !title || title->empty()) {
                        result.rejects.push_back({course_source, line, "missing_field",
                                                  !id || id->empty() ? "course_id" : "title"});
                        return;
                      }
                      if (!seen.insert(*id).second) {
                        result.rejects.push_back({course_source, line, "duplicate_id", *id});
                        return;
                      }
                      c.course_id = *id;
                      c.title = *title;
                      c.url = take(rec, "url");
                      if (auto p = take(rec, "platform")) c.platform = parse_platform(*p);
                      c.category = take(rec, "category");
                      c.teacher = take(rec, "teacher");
                      c.synthetic = take(rec, "synthetic") == std::optional<std::string>("true");
                      courses.push_back(std::move(c));
                    });
  }

  std::vector<Review> reviews;
  std::set<std::string, std::less<>> seen_ids;
  std::set<std::pair<std::string, std::string>> seen_user_course;
  for_each_record(reviews_text, format, source, result.rejects, [&](std::size_t line, RawRecord rec) {
    ++result.records_read;
    auto reject = [&](std::string reason, std::string detail) {
      result.rejects.push_back({std::string(source), line, std::move(reason), std::move(detail)});
    };
    if (!rec.malformed.empty()) return reject("malformed_record", "unusable value for '" + rec.malformed.front() + "'");
    for (const char* key : {"review_id", "course_id", "text"}) {
      if (!rec.strings.contains(key)) return reject("missing_field", key);
    }
    if (!rec.rating_present) return reject("missing_field", "rating");
    if (!rec.rating || !is_valid_rating(*rec.rating)) return reject("invalid_rating", rec.rating_raw);
    Review r;
    r.review_id = *take(rec, "review_id");
    r.course_id = *take(rec, "course_id");
    if (r.review_id.empty()) return reject("missing_field", "review_id");
    if (r.course_id.empty()) return reject("missing_field", "course_id");
    if (!seen_ids.insert(r.review_id).second) return reject("duplicate_id", r.review_id);
    r.rating = *rec.rating;
    r.text = *take(rec, "text");
    if (auto p = take(rec, "platform")) r.platform = parse_platform(*p);
    r.username = take(rec, "username");
    if (auto d = take(rec, "date")) r.date = normalize_date(*d);
    r.language = take(rec, "language");
    r.url = take(rec, "url");
    if (r.username && !seen_user_course.emplace(*r.username, r.course_id).second)
      ++result.duplicate_user_course;
    reviews.push_back(std::move(r));
  });
  result.corpus = Corpus(std::move(reviews), std::move(courses));
  return result;
}

LoadResult load_corpus(const std::filesystem::path& reviews_path, InputFormat format,
                       const std::optional<std::filesystem::path>& courses_path) {
  const std::string reviews_text = read_text_file(reviews_path);
  std::optional<std::string> courses_text;
  if (courses_path) courses_text = read_text_file(*courses_path);
  return parse_corpus(reviews_text, format,
                      courses_text ? std::optional<std::string_view>(*courses_text) : std::nullopt,
                      reviews_path.filename().string());
}

std::string reviews_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& r : corpus.reviews()) {
    ordered_json j;
    j["review_id"] = r.review_id;
    j["course_id"] = r.course_id;
    j["platform"] = to_string(r.platform);
    if (r.username) j["username"] = *r.username;
    if (r.date) j["date"] = *r.date;
    j["rating"] = r.rating;
    j["text"] = r.text;
    if (r.language) j["language"] = *r.language;
    if (r.url) j["url"] = *r.url;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string courses_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& c : corpus.courses()) {
    ordered_json j;
    j["course_id"] = c.course_id;
    j["title"] = c.title;
    if (c.url) j["url"] = *c.url;
    j["platform"] = to_string(c.platform);
    if (c.category) j["category"] = *c.category;
    if (c.teacher) j["teacher"] = *c.teacher;
    if (c.synthetic) j["synthetic"] = true;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& reviews_path,
                 const std::filesystem::path& courses_path) {
  write_text_file(reviews_path, reviews_to_jsonl(corpus));
  write_text_file(courses_path, courses_to_jsonl(corpus));
}

std::string rejects_to_jsonl(const std::vector<Reject>& rejects) {
  std::string out;
  for (const auto& r : rejects) {
    ordered_json j;
    j["source"] = r.source;
    j["line"] = r.line;
    j["reason"] = r.reason;
    j["detail"] = r.detail;
    out += j.dump();
    out += '\n';
  }
  return out;
}

namespace {

Corpus rebuild(const Corpus& corpus, std::vector<Review> kept, bool prune_courses,
               std::size_t& removed_courses) {
  std::vector<Course> courses;
  std::set<std::string, std::less<>> used;
  for (const auto& r : kept) used.insert(r.course_id);
  for (const auto& c : corpus.courses()) {
    if (prune_courses && !used.contains(c.course_id)) {
      ++removed_courses;
      continue;
    }
    courses.push_back(c);
  }
  return Corpus(std::move(kept), std::move(courses));
}

}  // namespace

LanguageFilterResult filter_language(const Corpus& corpus, std::string_view code,
                                     const LanguageDetector& detector) {
  LanguageFilterResult result;
  std::vector<Review> kept;
  for (const auto& r : corpus.reviews()) {
    std::string lang;
    if (r.language) {
      lang = lower_ascii(*r.language);
    } else {
      ++result.detected;
      lang = detector.detect(r.text).code;
    }
    if (lang == lower_ascii(code)) {
      kept.push_back(r);
    } else {
      ++result.removed_reviews;
    }
  }
  result.corpus = rebuild(corpus, std::move(kept), true, result.removed_courses);
  return result;
}

MinReviewFilterResult filter_min_reviews(const Corpus& corpus, std::size_t min_reviews) {
  if (min_reviews < 1) throw InvalidArgument("min_reviews must be at least 1");
  MinReviewFilterResult result;
  std::vector<Review> kept;
  for (const auto& r : corpus.reviews()) {
    if (corpus.review_positions(r.course_id).size() >= min_reviews) {
      kept.push_back(r);
    } else {
      ++result.removed_reviews;
    }
  }
  std::vector<Course> courses;
  for (const auto& c : corpus.courses()) {
    if (corpus.review_positions(c.course_id).size() >= min_reviews) {
      courses.push_back(c);
    } else {
      ++result.removed_courses;
    }
  }
  if (!corpus.courses().empty())
    result.removed_course_fraction =
        static_cast<double>(result.removed_courses) / static_cast<double>(corpus.courses().size());
  result.corpus = Corpus(std::move(kept), std::move(courses));
  return result;
}

}  // namespace moocscope
