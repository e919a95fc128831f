#include "moocscope/characterize.hpp"

#include <algorithm>
#include <unordered_map>

#include <json.hpp>

#include "moocscope/error.hpp"
#include "moocscope/io.hpp"

namespace moocscope {

namespace {

constexpr SentimentLabel kLabels[] = {SentimentLabel::kPositive, SentimentLabel::kNeutral, SentimentLabel::kNegative};

using DocIndex = std::unordered_map<std::string_view, std::size_t>;

DocIndex index_docs(std::span<const TokenDoc> docs) {
  DocIndex idx;
  for (std::size_t i = 0; i < docs.size(); ++i) idx.emplace(docs[i].review_id, i);
  return idx;
}

std::vector<std::string> resolved_labels(const ModelView& view) {
  std::vector<std::string> out = view.labels;
  for (std::size_t k = out.size(); k < view.model->k; ++k) out.push_back("topic_" + std::to_string(k));
  out.resize(view.model->k);
  return out;
}

struct TopicVector {
  std::vector<double> percent;
  std::size_t evidence = 0;
};

// Mean inferred topic weight over the course's documents, visited in the order they
// appear in the view so that a single-course corpus sums identically.
TopicVector course_topics(const ModelView& view, const DocIndex& index, std::span<const Review* const> reviews,
                          const InferenceOptions& options) {
  std::vector<std::size_t> positions;
  for (const Review* r : reviews)
    if (auto it = index.find(r->review_id); it != index.end()) positions.push_back(it->second);
  std::sort(positions.begin(), positions.end());

  const std::size_t K = view.model->k;
  Matrix weights(0, K);
  for (auto p : positions) {
    const auto t = infer_doc_topics(*view.model, view.docs[p], options);
    if (t.out_of_vocabulary) continue;
    weights.data.insert(weights.data.end(), t.weights.begin(), t.weights.end());
    ++weights.rows;
  }
  TopicVector out;
  out.evidence = weights.rows;
  if (weights.rows == 0)
    out.percent.assign(K, 100.0 / static_cast<double>(K));
  else
    out.percent = proportions_from_weights(weights);
  return out;
}

CourseProfile assemble(const Course& course, std::span<const Review* const> reviews, const CourseSentiment& sentiment,
                       SentimentEngine engine, const ModelView& qual, const DocIndex& qual_index,
                       const ModelView& content, const DocIndex& content_index, const ProfileOptions& options) {
  if (reviews.empty()) throw InvalidArgument("course '" + course.course_id + "' has no reviews");
  if (qual.model == nullptr || content.model == nullptr) throw InvalidArgument("both topic models are required");
  CourseProfile p;
  p.course_id = course.course_id;
  p.title = course.title;
  p.n_reviews = reviews.size();
  double sum = 0.0;
  for (const Review* r : reviews) sum += r->rating;
  p.mean_rating = sum / static_cast<double>(reviews.size());
  p.sentiment = sentiment;
  p.sentiment_engine = engine;
  auto q = course_topics(qual, qual_index, reviews, options.inference);
  auto c = course_topics(content, content_index, reviews, options.inference);
  p.qual_topics = std::move(q.percent);
  p.content_topics = std::move(c.percent);
  p.qual_evidence = q.evidence;
  p.content_evidence = c.evidence;
  p.qual_labels = resolved_labels(qual);
  p.content_labels = resolved_labels(content);
  p.low_evidence = std::min(q.evidence, c.evidence) < options.low_evidence_threshold;
  return p;
}

double label_percent(const CourseSentiment& s, SentimentLabel l) {
  if (s.n_scored == 0) return 0.0;
  auto it = s.label_counts.find(l);
  const double n = it == s.label_counts.end() ? 0.0 : static_cast<double>(it->second);
  return 100.0 * n / static_cast<double>(s.n_scored);
}

nlohmann::ordered_json topics_json(const std::vector<std::string>& labels, const std::vector<double>& pct) {
  auto arr = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < pct.size(); ++i) {
    nlohmann::ordered_json t;
    t["label"] = i < labels.size() ? labels[i] : "topic_" + std::to_string(i);
    t["percent"] = pct[i];
    arr.push_back(std::move(t));
  }
  return arr;
}

void topics_from_json(const nlohmann::json& arr, std::vector<std::string>& labels, std::vector<double>& pct) {
  for (const auto& t : arr) {
    labels.push_back(t.at("label").get<std::string>());
    pct.push_back(t.at("percent").get<double>());
  }
}

}  // namespace

CourseProfile build_course_profile(const Course& course, std::span<const Review* const> reviews,
                                   const CourseSentiment& sentiment, SentimentEngine engine, const ModelView& qual,
                                   const ModelView& content, const ProfileOptions& options) {
  return assemble(course, reviews, sentiment, engine, qual, index_docs(qual.docs), content, index_docs(content.docs),
                  options);
}

std::vector<CourseProfile> build_profiles(const Corpus& corpus, std::span<const CourseSentiment> sentiments,
                                          SentimentEngine engine, const ModelView& qual, const ModelView& content,
                                          ProfileOrder order, const ProfileOptions& options) {
  const auto qual_index = index_docs(qual.docs);
  const auto content_index = index_docs(content.docs);
  std::vector<CourseProfile> out;
  for (const auto& cs : sentiments) {
    const Course* course = corpus.find_course(cs.course_id);
    if (course == nullptr) throw InvalidArgument("sentiment for unknown course '" + cs.course_id + "'");
    std::vector<const Review*> reviews;
    for (auto pos : corpus.review_positions(course->course_id)) reviews.push_back(&corpus.reviews()[pos]);
    if (reviews.empty()) continue;
    out.push_back(assemble(*course, reviews, cs, engine, qual, qual_index, content, content_index, options));
  }
  std::stable_sort(out.begin(), out.end(), [&](const CourseProfile& a, const CourseProfile& b) {
    if (order == ProfileOrder::kReviewCount) {
      if (a.n_reviews != b.n_reviews) return a.n_reviews > b.n_reviews;
    } else if (a.mean_rating != b.mean_rating) {
      return a.mean_rating > b.mean_rating;
    }
    return a.course_id < b.course_id;
  });
  return out;
}

std::string emit_report_json(std::span<const CourseProfile> profiles, std::string_view generated_at) {
  nlohmann::ordered_json root;
  root["schema_version"] = kReportSchemaVersion;
  root["generated_at"] = generated_at;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : profiles) {
    nlohmann::ordered_json j;
    j["course_id"] = p.course_id;
    j["title"] = p.title;
    j["n_reviews"] = p.n_reviews;
    j["mean_rating"] = p.mean_rating;
    nlohmann::ordered_json s;
    s["engine"] = to_string(p.sentiment_engine);
    if (p.sentiment.mean_compound)
      s["mean_compound"] = *p.sentiment.mean_compound;
    else
      s["mean_compound"] = nullptr;
    nlohmann::ordered_json counts;
    for (auto l : kLabels) {
      auto it = p.sentiment.label_counts.find(l);
      counts[std::string(to_string(l))] = it == p.sentiment.label_counts.end() ? 0 : it->second;
    }
    s["label_counts"] = counts;
    s["majority_label"] = to_string(p.sentiment.majority_label);
    s["n_scored"] = p.sentiment.n_scored;
    j["sentiment"] = s;
    j["qual_topics"] = topics_json(p.qual_labels, p.qual_topics);
    j["content_topics"] = topics_json(p.content_labels, p.content_topics);
    j["qual_evidence"] = p.qual_evidence;
    j["content_evidence"] = p.content_evidence;
    j["low_evidence"] = p.low_evidence;
    arr.push_back(std::move(j));
  }
  root["profiles"] = std::move(arr);
  return root.dump(2) + "\n";
}

std::vector<CourseProfile> parse_report_json(std::string_view text) {
  auto root = nlohmann::json::parse(text, nullptr, false);
  if (root.is_discarded() || !root.is_object()) throw IoError("report is not a JSON object");
  try {
    if (root.at("schema_version").get<int>() != kReportSchemaVersion) throw IoError("unsupported report schema_version");
    std::vector<CourseProfile> out;
    for (const auto& j : root.at("profiles")) {
      CourseProfile p;
      p.course_id = j.at("course_id").get<std::string>();
      p.title = j.at("title").get<std::string>();
      p.n_reviews = j.at("n_reviews").get<std::size_t>();
      p.mean_rating = j.at("mean_rating").get<double>();
      const auto& s = j.at("sentiment");
      p.sentiment_engine = parse_engine(s.at("engine").get<std::string>());
      p.sentiment.course_id = p.course_id;
      if (!s.at("mean_compound").is_null()) p.sentiment.mean_compound = s.at("mean_compound").get<double>();
      for (const auto& [label, n] : s.at("label_counts").items()) p.sentiment.label_counts[parse_label(label)] = n.get<std::size_t>();
      p.sentiment.majority_label = parse_label(s.at("majority_label").get<std::string>());
      p.sentiment.n_scored = s.at("n_scored").get<std::size_t>();
      topics_from_json(j.at("qual_topics"), p.qual_labels, p.qual_topics);
      topics_from_json(j.at("content_topics"), p.content_labels, p.content_topics);
      p.qual_evidence = j.at("qual_evidence").get<std::size_t>();
      p.content_evidence = j.at("content_evidence").get<std::size_t>();
      p.low_evidence = j.at("low_evidence").get<bool>();
      out.push_back(std::move(p));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed report: ") + e.what());
  }
}

std::string emit_report_csv(std::span<const CourseProfile> profiles) {
  std::string out =
      "course_id,title,n_reviews,mean_rating,sentiment_engine,mean_compound,pct_positive,pct_neutral,pct_negative,"
      "majority_label,low_evidence";
  if (!profiles.empty()) {
    for (const auto& l : profiles.front().qual_labels) out += "," + csv_escape("qual_" + l);
    for (const auto& l : profiles.front().content_labels) out += "," + csv_escape("content_" + l);
  }
  out += '\n';
  for (const auto& p : profiles) {
    if (!profiles.empty() && (p.qual_labels != profiles.front().qual_labels ||
                              p.content_labels != profiles.front().content_labels))
      throw InvalidArgument("profiles disagree on topic labels");
    out += csv_escape(p.course_id) + "," + csv_escape(p.title) + "," + std::to_string(p.n_reviews) + "," +
           format_double(p.mean_rating) + "," + std::string(to_string(p.sentiment_engine)) + ",";
    out += p.sentiment.mean_compound ? format_double(*p.sentiment.mean_compound) : std::string();
    for (auto l : kLabels) out += "," + format_double(label_percent(p.sentiment, l));
    out += "," + std::string(to_string(p.sentiment.majority_label)) + (p.low_evidence ? ",1" : ",0");
    for (double v : p.qual_topics) out += "," + format_double(v);
    for (double v : p.content_topics) out += "," + format_double(v);
    out += '\n';
  }
  return out;
}

std::string emit_plot_data(std::span<const CourseProfile> profiles) {
  std::string out = "course_id,panel,label,value\n";
  for (const auto& p : profiles) {
    const auto id = csv_escape(p.course_id);
    out += id + ",rating,mean_rating," + format_double(p.mean_rating) + "\n";
    for (auto l : kLabels)
      out += id + ",sentiment," + std::string(to_string(l)) + "," + format_double(label_percent(p.sentiment, l)) + "\n";
    for (std::size_t k = 0; k < p.qual_topics.size(); ++k)
      out += id + ",qual_topic," + csv_escape(p.qual_labels[k]) + "," + format_double(p.qual_topics[k]) + "\n";
    for (std::size_t k = 0; k < p.content_topics.size(); ++k)
      out += id + ",content_topic," + csv_escape(p.content_labels[k]) + "," + format_double(p.content_topics[k]) + "\n";
  }
  return out;
}

std::map<SentimentLabel, std::vector<double>> topic_distribution_by_sentiment(std::span<const CourseProfile> profiles,
                                                                              bool content) {
  if (profiles.empty()) return {};
  const std::size_t K = content ? profiles.front().content_topics.size() : profiles.front().qual_topics.size();
  Matrix rows(0, K);
  std::vector<std::string> groups;
  for (const auto& p : profiles) {
    const auto& v = content ? p.content_topics : p.qual_topics;
    if (v.size() != K) throw InvalidArgument("profiles disagree on topic count");
    rows.data.insert(rows.data.end(), v.begin(), v.end());
    ++rows.rows;
    groups.emplace_back(to_string(p.sentiment.majority_label));
  }
  std::map<SentimentLabel, std::vector<double>> out;
  for (auto& [label, mean] : mean_distribution_by_group(rows, groups)) out[parse_label(label)] = std::move(mean);
  return out;
}

GroupedTopicMatrix grouped_topics(std::span<const CourseProfile> profiles, bool content, bool include_neutral) {
  GroupedTopicMatrix m;
  for (const auto& p : profiles) {
    if (!include_neutral && p.sentiment.majority_label == SentimentLabel::kNeutral) continue;
    const auto& v = content ? p.content_topics : p.qual_topics;
    if (m.rows.rows == 0) m.rows.cols = v.size();
    if (v.size() != m.rows.cols) throw InvalidArgument("profiles disagree on topic count");
    m.rows.data.insert(m.rows.data.end(), v.begin(), v.end());
    ++m.rows.rows;
    m.groups.emplace_back(to_string(p.sentiment.majority_label));
  }
  return m;
}

}  // namespace moocscope
