#include "moocscope/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "moocscope/error.hpp"
#include "moocscope/io.hpp"
#include "moocscope/rng.hpp"

namespace moocscope {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Maps every word named by some topic to a dense id.
struct RelevantWords {
  std::map<std::string, std::size_t, std::less<>> ids;

  explicit RelevantWords(const TopicWords& topics) {
    for (const auto& t : topics)
      for (const auto& w : t) ids.emplace(w, 0);
    std::size_t next = 0;
    for (auto& [w, id] : ids) id = next++;
  }
  std::size_t size() const { return ids.size(); }
  std::size_t id(std::string_view w) const { return ids.find(w)->second; }
};

// Occurrence and co-occurrence counts over "contexts" (documents or windows).
struct Cooccurrence {
  std::size_t n = 0;
  std::size_t contexts = 0;
  std::vector<std::size_t> single;
  std::vector<std::size_t> joint;  // n x n, diagonal = single

  explicit Cooccurrence(std::size_t words) : n(words), single(words, 0), joint(words * words, 0) {}

  void add_context(const std::vector<std::size_t>& present) {
    ++contexts;
    for (std::size_t a = 0; a < present.size(); ++a) {
      ++single[present[a]];
      for (std::size_t b = 0; b < present.size(); ++b) ++joint[present[a] * n + present[b]];
    }
  }
  std::size_t pair(std::size_t a, std::size_t b) const { return joint[a * n + b]; }
};

std::vector<long> relevant_sequence(const TokenDoc& doc, const RelevantWords& rel) {
  std::vector<long> seq;
  seq.reserve(doc.lemmas.size());
  for (const auto& l : doc.lemmas) {
    auto it = rel.ids.find(l);
    seq.push_back(it == rel.ids.end() ? -1 : static_cast<long>(it->second));
  }
  return seq;
}

std::vector<std::size_t> present_ids(const std::vector<std::size_t>& counts) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i] > 0) out.push_back(i);
  return out;
}

// Drops words that never occur, recording a diagnostic for each.
std::vector<std::size_t> usable_words(const std::vector<std::string>& topic, std::size_t topic_id,
                                      const RelevantWords& rel, const Cooccurrence& co,
                                      std::vector<std::string>& diagnostics, std::string_view where) {
  std::vector<std::size_t> out;
  for (const auto& w : topic) {
    const auto id = rel.id(w);
    if (co.single[id] == 0) {
      diagnostics.push_back("topic " + std::to_string(topic_id) + ": word '" + w + "' occurs in no " +
                            std::string(where) + "; skipped");
      continue;
    }
    out.push_back(id);
  }
  return out;
}

double mean_of_finite(const std::vector<double>& values, std::vector<std::string>& diagnostics) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values)
    if (!std::isnan(v)) {
      sum += v;
      ++n;
    }
  if (n == 0) {
    diagnostics.push_back("no topic had two scorable words");
    return kNaN;
  }
  return sum / static_cast<double>(n);
}

}  // namespace

CoherenceScore coherence_umass(const TopicWords& topics, std::span<const TokenDoc> docs, double epsilon) {
  RelevantWords rel(topics);
  Cooccurrence co(rel.size());
  std::vector<std::size_t> seen(rel.size());
  for (const auto& doc : docs) {
    std::fill(seen.begin(), seen.end(), 0);
    for (long id : relevant_sequence(doc, rel))
      if (id >= 0) seen[static_cast<std::size_t>(id)] = 1;
    co.add_context(present_ids(seen));
  }

  CoherenceScore out;
  for (std::size_t t = 0; t < topics.size(); ++t) {
    const auto words = usable_words(topics[t], t, rel, co, out.diagnostics, "document");
    if (words.size() < 2) {
      out.per_topic.push_back(kNaN);
      continue;
    }
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 1; i < words.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) {
        const double joint = static_cast<double>(co.pair(words[i], words[j]));
        sum += std::log((joint + epsilon) / static_cast<double>(co.single[words[j]]));
        ++pairs;
      }
    out.per_topic.push_back(sum / static_cast<double>(pairs));
  }
  out.score = mean_of_finite(out.per_topic, out.diagnostics);
  return out;
}

CoherenceScore coherence_cv(const TopicWords& topics, std::span<const TokenDoc> docs, std::size_t window,
                            double epsilon) {
  if (window < 2) throw InvalidArgument("C_v window must be at least 2");
  RelevantWords rel(topics);
  Cooccurrence co(rel.size());
  std::vector<std::size_t> counts(rel.size());
  for (const auto& doc : docs) {
    const auto seq = relevant_sequence(doc, rel);
    std::fill(counts.begin(), counts.end(), 0);
    if (seq.size() <= window) {
      for (long id : seq)
        if (id >= 0) ++counts[static_cast<std::size_t>(id)];
      co.add_context(present_ids(counts));
      continue;
    }
    for (std::size_t i = 0; i < window; ++i)
      if (seq[i] >= 0) ++counts[static_cast<std::size_t>(seq[i])];
    co.add_context(present_ids(counts));
    for (std::size_t start = 1; start + window <= seq.size(); ++start) {
      if (seq[start - 1] >= 0) --counts[static_cast<std::size_t>(seq[start - 1])];
      if (seq[start + window - 1] >= 0) ++counts[static_cast<std::size_t>(seq[start + window - 1])];
      co.add_context(present_ids(counts));
    }
  }

  CoherenceScore out;
  const double nw = static_cast<double>(co.contexts);
  auto npmi = [&](std::size_t a, std::size_t b) {
    const double pab = static_cast<double>(co.pair(a, b)) / nw;
    const double pa = static_cast<double>(co.single[a]) / nw;
    const double pb = static_cast<double>(co.single[b]) / nw;
    return std::log((pab + epsilon) / (pa * pb)) / -std::log(pab + epsilon);
  };

  for (std::size_t t = 0; t < topics.size(); ++t) {
    const auto words = usable_words(topics[t], t, rel, co, out.diagnostics, "window");
    const std::size_t n = words.size();
    if (n < 2) {
      out.per_topic.push_back(kNaN);
      continue;
    }
    std::vector<double> vec(n * n);
    std::vector<double> total(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        vec[i * n + j] = npmi(words[i], words[j]);
        total[j] += vec[i * n + j];
      }
    double total_norm = 0.0;
    for (double v : total) total_norm += v * v;
    total_norm = std::sqrt(total_norm);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0, norm = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        dot += vec[i * n + j] * total[j];
        norm += vec[i * n + j] * vec[i * n + j];
      }
      norm = std::sqrt(norm);
      if (norm == 0.0 || total_norm == 0.0) {
        out.diagnostics.push_back("topic " + std::to_string(t) + ": zero context vector; cosine taken as 0");
        continue;
      }
      sum += std::clamp(dot / (norm * total_norm), -1.0, 1.0);
    }
    out.per_topic.push_back(sum / static_cast<double>(n));
  }
  out.score = mean_of_finite(out.per_topic, out.diagnostics);
  return out;
}

TopicWords topic_word_lists(const TopicModel& model, std::size_t n) {
  TopicWords out;
  for (auto& t : top_words(model, std::min(n, model.vocab_size()))) out.push_back(std::move(t.words));
  return out;
}

bool CoherenceReport::operator==(const CoherenceReport& o) const {
  auto same = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
  if (recommended_k != o.recommended_k || parsimonious_k != o.parsimonious_k || entries.size() != o.entries.size()) return false;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto &a = entries[i], &b = o.entries[i];
    if (a.k != b.k || a.seed != b.seed || a.error != b.error || !same(a.c_v, b.c_v) || !same(a.c_umass, b.c_umass))
      return false;
  }
  return true;
}

CoherenceReport sweep_topic_count(std::span<const TokenDoc> docs, const SweepConfig& config) {
  if (config.k_min < 2) throw InvalidArgument("k_min must be at least 2");
  if (config.k_max < config.k_min) throw InvalidArgument("k_max must not be below k_min");
  if (config.step < 1) throw InvalidArgument("sweep step must be positive");
  CoherenceReport report;
  std::optional<double> best;
  for (std::size_t k = config.k_min; k <= config.k_max; k += config.step) {
    CoherenceEntry e;
    e.k = k;
    e.seed = derive_seed(config.lda.seed, k);
    try {
      LdaConfig lc = config.lda;
      lc.k = k;
      lc.seed = e.seed;
      const auto model = train_lda(docs, lc);
      const auto words = topic_word_lists(model, config.top_n);
      e.c_v = coherence_cv(words, docs, config.window, config.epsilon).score;
      e.c_umass = coherence_umass(words, docs, config.epsilon).score;
      if (std::isnan(e.c_v)) e.error = "C_v undefined (no topic with two scorable words)";
    } catch (const Error& ex) {
      e.c_v = e.c_umass = kNaN;
      e.error = ex.what();
    }
    if (!e.error && (!best || e.c_v > *best)) {
      best = e.c_v;
      report.recommended_k = k;
    }
    report.entries.push_back(std::move(e));
  }
  if (!best) throw InvalidArgument("every topic count in the sweep failed");
  for (const auto& e : report.entries)
    if (!e.error && e.c_v >= *best - config.cv_tolerance) {
      report.parsimonious_k = e.k;
      break;
    }
  return report;
}

std::string coherence_report_to_csv(const CoherenceReport& report) {
  std::string out = "k,c_v,c_umass,recommended,parsimonious\n";
  for (const auto& e : report.entries) {
    out += std::to_string(e.k) + ",";
    out += e.error ? std::string() : format_double(e.c_v);
    out += ",";
    out += e.error ? std::string() : format_double(e.c_umass);
    out += e.k == report.recommended_k ? ",1" : ",0";
    out += e.k == report.parsimonious_k ? ",1\n" : ",0\n";
  }
  return out;
}

}  // namespace moocscope
