#include "moocscope/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include <json.hpp>

#include "moocscope/corpus.hpp"
#include "moocscope/error.hpp"
#include "moocscope/io.hpp"
#include "moocscope/resources.hpp"
#include "moocscope/stats.hpp"
#include "moocscope/textprep.hpp"
#include "utf8.hpp"

namespace moocscope {

namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string lower(std::string_view s) {
  bool ascii = std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
  if (ascii) return ascii_lower(s);
  std::u32string cps = utf8::decode(s);
  for (auto& c : cps) c = utf8::to_lower(c);
  return utf8::encode(cps);
}

double parse_number(std::string_view field, std::string_view line) {
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw InvalidArgument("bad numeric value in lexicon line '" + std::string(line) + "'");
  return v;
}

std::map<std::string, double, std::less<>> parse_weighted(std::string_view text, double lo, double hi,
                                                         std::string_view what) {
  std::map<std::string, double, std::less<>> out;
  for (const auto& line : content_lines(text)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw InvalidArgument(std::string(what) + " line without a tab: '" + line + "'");
    const double v = parse_number(std::string_view(line).substr(tab + 1), line);
    if (v < lo || v > hi)
      throw InvalidArgument(std::string(what) + " value out of range in line '" + line + "'");
    out[lower(line.substr(0, tab))] = v;
  }
  return out;
}

}  // namespace

std::string_view to_string(SentimentEngine e) {
  switch (e) {
    case SentimentEngine::kValenceRule: return "valence_rule";
    case SentimentEngine::kPolarityAvg: return "polarity_avg";
    case SentimentEngine::kExternal: return "external";
  }
  return "valence_rule";
}

std::string_view to_string(SentimentLabel l) {
  switch (l) {
    case SentimentLabel::kPositive: return "Positive";
    case SentimentLabel::kNeutral: return "Neutral";
    case SentimentLabel::kNegative: return "Negative";
  }
  return "Neutral";
}

SentimentEngine parse_engine(std::string_view s) {
  const auto v = ascii_lower(s);
  if (v == "valence_rule" || v == "valence" || v == "vader") return SentimentEngine::kValenceRule;
  if (v == "polarity_avg" || v == "polarity" || v == "textblob") return SentimentEngine::kPolarityAvg;
  if (v == "external") return SentimentEngine::kExternal;
  throw InvalidArgument("unknown sentiment engine '" + std::string(s) + "'");
}

SentimentLabel parse_label(std::string_view s) {
  const auto v = ascii_lower(s);
  if (v == "positive") return SentimentLabel::kPositive;
  if (v == "neutral") return SentimentLabel::kNeutral;
  if (v == "negative") return SentimentLabel::kNegative;
  throw InvalidArgument("unknown sentiment label '" + std::string(s) + "'");
}

const ValenceLexicon& ValenceLexicon::bundled() {
  static const ValenceLexicon kLexicon =
      parse(bundled_resource("sentiment/valence.tsv"), bundled_resource("sentiment/boosters.tsv"),
            bundled_resource("sentiment/negators.txt"));
  return kLexicon;
}

ValenceLexicon ValenceLexicon::parse(std::string_view valence_text, std::string_view booster_text,
                                     std::string_view negator_text) {
  ValenceLexicon lex;
  lex.valences = parse_weighted(valence_text, -4.0, 4.0, "valence");
  lex.boosters = parse_weighted(booster_text, 0.0, 4.0, "booster");
  for (const auto& [w, b] : lex.boosters)
    if (b <= 0.0) throw InvalidArgument("booster '" + w + "' must have a positive magnitude");
  for (const auto& w : content_lines(negator_text)) lex.negators.insert(lower(w));
  return lex;
}

ValenceLexicon ValenceLexicon::negated() const {
  ValenceLexicon out = *this;
  for (auto& [w, v] : out.valences) v = -v;
  return out;
}

double score_valence_rule(std::span<const std::string> tokens, const ValenceLexicon& lexicon,
                          const ValenceParams& params) {
  if (tokens.empty()) return 0.0;
  std::vector<std::string> words;
  words.reserve(tokens.size());
  for (const auto& t : tokens) words.push_back(lower(t));

  static constexpr double kDecay[] = {1.0, 0.95, 0.9};
  double sum = 0.0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (lexicon.boosters.contains(words[i])) continue;
    auto it = lexicon.valences.find(words[i]);
    if (it == lexicon.valences.end() || it->second == 0.0) continue;
    double v = it->second;
    bool negated = false;
    for (std::size_t d = 1; d <= params.lookback && d <= i; ++d) {
      const auto& prev = words[i - d];
      if (auto b = lexicon.boosters.find(prev); b != lexicon.boosters.end()) {
        const double decay = d <= 3 ? kDecay[d - 1] : kDecay[2];
        // The increment pushes away from zero in the direction of the hit.
        v += (it->second > 0.0 ? b->second : -b->second) * decay;
      }
      if (lexicon.negators.contains(prev)) negated = true;
    }
    if (negated) v *= params.negation_factor;
    sum += v;
  }
  const double compound = sum / std::sqrt(sum * sum + params.alpha);
  return std::clamp(compound, -1.0, 1.0);
}

const PolarityLexicon& PolarityLexicon::bundled() {
  static const PolarityLexicon kLexicon =
      parse(bundled_resource("sentiment/polarity.tsv"), bundled_resource("sentiment/boosters.tsv"));
  return kLexicon;
}

PolarityLexicon PolarityLexicon::parse(std::string_view polarity_text, std::string_view intensifier_text) {
  PolarityLexicon lex;
  lex.polarity = parse_weighted(polarity_text, -1.0, 1.0, "polarity");
  for (const auto& line : content_lines(intensifier_text)) lex.intensifiers.insert(lower(line.substr(0, line.find('\t'))));
  return lex;
}

double score_polarity_avg(std::span<const std::string> tokens, const PolarityLexicon& lexicon) {
  double sum = 0.0;
  std::size_t hits = 0;
  bool boost = false;
  for (const auto& t : tokens) {
    const auto w = lower(t);
    if (lexicon.intensifiers.contains(w)) {
      boost = true;
      continue;
    }
    auto it = lexicon.polarity.find(w);
    if (it != lexicon.polarity.end()) {
      double p = it->second;
      if (boost) p = std::clamp(p * lexicon.intensifier_factor, -1.0, 1.0);
      sum += p;
      ++hits;
    }
    boost = false;
  }
  return hits == 0 ? 0.0 : sum / static_cast<double>(hits);
}

SentimentLabel label_from_compound(double compound, double pos_threshold, double neg_threshold) {
  if (neg_threshold > pos_threshold) throw InvalidArgument("negative threshold exceeds positive threshold");
  if (compound > pos_threshold) return SentimentLabel::kPositive;
  if (compound < neg_threshold) return SentimentLabel::kNegative;
  return SentimentLabel::kNeutral;
}

std::vector<std::string> sentiment_tokens(std::string_view text, bool raw_text) {
  if (!raw_text) return tokenize(clean_text(text));
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::string_view chunk = text.substr(i, j - i);
    while (!chunk.empty() && std::ispunct(static_cast<unsigned char>(chunk.front()))) chunk.remove_prefix(1);
    while (!chunk.empty() && std::ispunct(static_cast<unsigned char>(chunk.back()))) chunk.remove_suffix(1);
    if (!chunk.empty()) out.emplace_back(chunk);
    i = j;
  }
  return out;
}

std::vector<SentimentScore> score_corpus(const Corpus& corpus, const SentimentOptions& options,
                                         const ValenceLexicon& valence, const PolarityLexicon& polarity) {
  if (options.engine == SentimentEngine::kExternal)
    throw InvalidArgument("external labels are imported, not computed");
  std::vector<SentimentScore> out;
  out.reserve(corpus.reviews().size());
  for (const auto& r : corpus.reviews()) {
    const auto tokens = sentiment_tokens(r.text, options.raw_text);
    const double c = options.engine == SentimentEngine::kValenceRule
                         ? score_valence_rule(tokens, valence, options.valence)
                         : score_polarity_avg(tokens, polarity);
    out.push_back({r.review_id, options.engine, c,
                   label_from_compound(c, options.pos_threshold, options.neg_threshold)});
  }
  return out;
}

ExternalImport import_external_labels(std::string_view jsonl_text, const Corpus* corpus, std::string_view source) {
  ExternalImport out;
  for_each_line(jsonl_text, [&](std::size_t line_no, std::string_view line) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) return;
    auto reject = [&](std::string reason, std::string detail) {
      out.rejects.push_back({std::string(source), line_no, std::move(reason), std::move(detail)});
    };
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return reject("malformed_record", "not a JSON object");
    if (!j.contains("review_id") || !j["review_id"].is_string()) return reject("missing_field", "review_id");
    if (!j.contains("label") || !j["label"].is_string()) return reject("missing_field", "label");
    SentimentScore s;
    s.review_id = j["review_id"].get<std::string>();
    s.engine = SentimentEngine::kExternal;
    try {
      s.label = parse_label(j["label"].get<std::string>());
    } catch (const InvalidArgument&) {
      return reject("invalid_label", j["label"].get<std::string>());
    }
    if (corpus != nullptr && corpus->find_review(s.review_id) == nullptr) {
      out.unknown_ids.push_back(s.review_id);
      return;
    }
    out.scores.push_back(std::move(s));
  });
  return out;
}

ExternalImport load_external_labels(const std::filesystem::path& path, const Corpus* corpus) {
  return import_external_labels(read_text_file(path), corpus, path.string());
}

SentimentLabel majority_label(const std::map<SentimentLabel, std::size_t>& counts) {
  std::size_t best = 0;
  std::optional<SentimentLabel> winner;
  bool tie = false;
  for (const auto& [label, n] : counts) {
    if (n > best) {
      best = n;
      winner = label;
      tie = false;
    } else if (n == best && n > 0) {
      tie = true;
    }
  }
  if (!winner || tie) return SentimentLabel::kNeutral;
  return *winner;
}

CourseSentimentResult aggregate_course_sentiment(std::span<const SentimentScore> scores, const Corpus& corpus) {
  std::map<std::string, std::vector<const SentimentScore*>, std::less<>> by_course;
  for (const auto& s : scores) {
    const Review* r = corpus.find_review(s.review_id);
    if (r == nullptr) throw InvalidArgument("score for unknown review '" + s.review_id + "'");
    by_course[r->course_id].push_back(&s);
  }
  CourseSentimentResult out;
  for (const auto& course : corpus.courses()) {
    auto it = by_course.find(course.course_id);
    if (it == by_course.end()) {
      out.excluded_courses.push_back(course.course_id);
      continue;
    }
    CourseSentiment cs;
    cs.course_id = course.course_id;
    double sum = 0.0;
    std::size_t with_compound = 0;
    for (auto label : {SentimentLabel::kPositive, SentimentLabel::kNeutral, SentimentLabel::kNegative})
      cs.label_counts[label] = 0;
    for (const auto* s : it->second) {
      ++cs.label_counts[s->label];
      if (s->compound) {
        sum += *s->compound;
        ++with_compound;
      }
    }
    cs.n_scored = it->second.size();
    if (with_compound > 0) cs.mean_compound = sum / static_cast<double>(with_compound);
    cs.majority_label = majority_label(cs.label_counts);
    out.courses.push_back(std::move(cs));
  }
  return out;
}

double correlate_sentiment_rating(std::span<const SentimentScore> scores, const Corpus& corpus,
                                  CorrelationMethod method) {
  std::vector<double> x, y;
  for (const auto& s : scores) {
    if (!s.compound) continue;
    const Review* r = corpus.find_review(s.review_id);
    if (r == nullptr) throw InvalidArgument("score for unknown review '" + s.review_id + "'");
    x.push_back(*s.compound);
    y.push_back(r->rating);
  }
  return method == CorrelationMethod::kPearson ? pearson(x, y) : spearman(x, y);
}

std::string scores_to_jsonl(std::span<const SentimentScore> scores) {
  std::string out;
  for (const auto& s : scores) {
    nlohmann::ordered_json j;
    j["review_id"] = s.review_id;
    j["engine"] = to_string(s.engine);
    if (s.compound)
      j["compound"] = *s.compound;
    else
      j["compound"] = nullptr;
    j["label"] = to_string(s.label);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<SentimentScore> scores_from_jsonl(std::string_view text) {
  std::vector<SentimentScore> out;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) return;
    auto j = nlohmann::json::parse(line, nullptr, false);
    try {
      if (j.is_discarded()) throw IoError("");
      SentimentScore s;
      s.review_id = j.at("review_id").get<std::string>();
      s.engine = parse_engine(j.at("engine").get<std::string>());
      if (!j.at("compound").is_null()) s.compound = j.at("compound").get<double>();
      s.label = parse_label(j.at("label").get<std::string>());
      out.push_back(std::move(s));
    } catch (const std::exception&) {
      throw IoError("malformed sentiment score on line " + std::to_string(line_no));
    }
  });
  return out;
}

}  // namespace moocscope
