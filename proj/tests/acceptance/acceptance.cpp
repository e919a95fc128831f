// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "moocscope/characterize.hpp"
#include "moocscope/coherence.hpp"
#include "moocscope/corpus.hpp"
#include "moocscope/error.hpp"
#include "moocscope/io.hpp"
#include "moocscope/lda.hpp"
#include "moocscope/rng.hpp"
#include "moocscope/sentiment.hpp"
#include "moocscope/stats.hpp"
#include "moocscope/synth.hpp"
#include "moocscope/textprep.hpp"

using namespace moocscope;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Collects failed checks for one criterion.
struct Check {
  std::vector<std::string> failures;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (!(std::fabs(got - want) <= tol)) {
      std::ostringstream s;
      s.precision(17);
      s << what << ": got " << got << ", want " << want << " +- " << tol;
      failures.push_back(s.str());
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failed = 0;

void criterion(int id, const std::string& name, const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = Clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const double secs = seconds_since(t0);
  const bool ok = c.failures.empty();
  if (!ok) ++g_failed;
  std::printf("%s C%d %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", id, name.c_str(), secs,
              c.detail.str().empty() ? "" : " ", c.detail.str().c_str());
  for (const auto& f : c.failures) std::printf("     - %s\n", f.c_str());
  std::fflush(stdout);
}

// The planted corpus shared by the recovery and sweep criteria.
PlantedSpec recovery_spec() {
  PlantedSpec spec;
  spec.k = 5;
  spec.v = 200;
  spec.d = 2000;
  spec.doc_len = 60;
  spec.alpha = 0.1;
  spec.beta = 0.01;
  spec.seed = 42;
  return spec;
}

LdaConfig recovery_lda() {
  LdaConfig cfg;
  cfg.k = 5;
  cfg.alpha = 0.1;
  cfg.beta = 0.01;
  cfg.iterations = 1000;
  cfg.seed = 42;
  return cfg;
}

const PlantedCorpus& planted() {
  static const PlantedCorpus pc = generate_corpus(recovery_spec());
  return pc;
}

// Straight-from-the-definition coherence, for comparison.
double naive_umass(const std::vector<std::string>& words, const std::vector<TokenDoc>& docs) {
  auto df = [&](const std::string& a, const std::string* b) {
    double n = 0;
    for (const auto& d : docs) {
      const std::set<std::string> s(d.lemmas.begin(), d.lemmas.end());
      n += s.contains(a) && (b == nullptr || s.contains(*b));
    }
    return n;
  };
  double sum = 0;
  int pairs = 0;
  for (std::size_t i = 1; i < words.size(); ++i)
    for (std::size_t j = 0; j < i; ++j, ++pairs) sum += std::log((df(words[i], &words[j]) + 1e-12) / df(words[j], nullptr));
  return sum / pairs;
}

double naive_cv(const std::vector<std::string>& words, const std::vector<TokenDoc>& docs, std::size_t w) {
  std::vector<std::set<std::string>> windows;
  for (const auto& d : docs) {
    if (d.lemmas.size() <= w) {
      windows.emplace_back(d.lemmas.begin(), d.lemmas.end());
      continue;
    }
    for (std::size_t s = 0; s + w <= d.lemmas.size(); ++s)
      windows.emplace_back(d.lemmas.begin() + s, d.lemmas.begin() + s + w);
  }
  auto p = [&](const std::string& a, const std::string& b) {
    double c = 0;
    for (const auto& s : windows) c += s.contains(a) && s.contains(b);
    return c / static_cast<double>(windows.size());
  };
  const std::size_t k = words.size();
  std::vector<std::vector<double>> v(k, std::vector<double>(k));
  std::vector<double> total(k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const double pij = p(words[i], words[j]) + 1e-12;
      v[i][j] = std::log(pij / (p(words[i], words[i]) * p(words[j], words[j]))) / -std::log(pij);
      total[j] += v[i][j];
    }
  double sum = 0;
  for (const auto& row : v) {
    double dot = 0, a = 0, b = 0;
    for (std::size_t j = 0; j < k; ++j) {
      dot += row[j] * total[j];
      a += row[j] * row[j];
      b += total[j] * total[j];
    }
    sum += dot / std::sqrt(a * b);
  }
  return sum / static_cast<double>(k);
}

std::vector<std::vector<double>> compositional(Rng& rng, std::size_t n, const std::vector<double>& centre) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row;
    double total = 0.0;
    for (double c : centre) total += row.emplace_back(rng.gamma(c));
    for (auto& v : row) v *= 100.0 / total;
    out.push_back(row);
  }
  return out;
}

GroupedTopicMatrix two_groups(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  GroupedTopicMatrix m;
  m.rows = Matrix(0, a.front().size());
  for (const auto& row : a) {
    m.rows.data.insert(m.rows.data.end(), row.begin(), row.end());
    ++m.rows.rows;
    m.groups.push_back("Positive");
  }
  for (const auto& row : b) {
    m.rows.data.insert(m.rows.data.end(), row.begin(), row.end());
    ++m.rows.rows;
    m.groups.push_back("Negative");
  }
  return m;
}

// Every in-library stage output for the fixture, concatenated.
std::string fixture_outputs(const Corpus& corpus) {
  std::string out = reviews_to_jsonl(corpus) + courses_to_jsonl(corpus);
  std::vector<TokenDoc> qual, content;
  for (const auto& r : corpus.reviews()) {
    const auto d = preprocess(r.review_id, r.text, default_stoplist());
    out += token_docs_to_jsonl(std::vector<TokenDoc>{d});
    if (auto q = project_vocabulary(d, CategoryLexicon::bundled(), VocabularyCategory::kQualitative); !q.empty)
      qual.push_back(q.doc);
    if (auto c = project_vocabulary(d, CategoryLexicon::bundled(), VocabularyCategory::kContent); !c.empty)
      content.push_back(c.doc);
  }
  const auto scores = score_corpus(corpus, {});
  out += scores_to_jsonl(scores);
  LdaConfig cfg;
  cfg.k = 4;
  cfg.alpha = 0.1;
  cfg.iterations = 200;
  const auto qm = train_lda(qual, cfg);
  cfg.k = 6;
  const auto cm = train_lda(content, cfg);
  out += model_to_json(qm) + model_to_json(cm);
  SweepConfig sc;
  sc.k_min = 2;
  sc.k_max = 4;
  sc.lda.iterations = 100;
  out += coherence_report_to_csv(sweep_topic_count(content, sc));
  const auto agg = aggregate_course_sentiment(scores, corpus);
  const auto profiles = build_profiles(corpus, agg.courses, SentimentEngine::kValenceRule, {&qm, qual, {}},
                                       {&cm, content, {}});
  out += emit_report_json(profiles, "2024-01-01T00:00:00Z") + emit_report_csv(profiles) + emit_plot_data(profiles);
  const auto g = grouped_topics(profiles, true, true);
  out += format_double(pillai_trace(g.rows, g.groups));
  return out;
}

Corpus load_fixture() {
  const fs::path dir = MOOCSCOPE_FIXTURES;
  auto res = load_corpus(dir / "sample_100.jsonl", InputFormat::kJsonl, dir / "sample_100.courses.jsonl");
  if (!res.rejects.empty()) throw Error("fixture has rejects");
  return std::move(res.corpus);
}

}  // namespace

int main() {
  std::printf("moocscope acceptance\n");

  criterion(1, "rating histogram reproduces the constructed skew", [](Check& c) {
    const auto t0 = Clock::now();
    PlantedSpec spec;
    spec.exact_ratings = true;
    spec.seed = 42;
    const auto pc = generate_corpus(spec);
    const auto pct = rating_histogram(pc.corpus).percentages();
    const double secs = seconds_since(t0);
    double five = 0, four = 0, rest = 0;
    for (const auto& [bucket, p] : pct) {
      if (bucket == 5.0)
        five += p;
      else if (bucket >= 4.0)
        four += p;
      else
        rest += p;
    }
    c.expect(five == 63.0, "5-star share " + format_double(five));
    c.expect(four == 21.5, "4-4.5 share " + format_double(four));
    c.expect(rest == 15.5, "remaining share " + format_double(rest));
    c.expect(secs < 1.0, "took " + format_double(secs) + " s");
    c.detail << "5*=" << five << "% 4-4.5*=" << four << "% rest=" << rest << "% D=" << spec.d;
  });

  criterion(2, "topic proportions sum to 100 and match brute force", [](Check& c) {
    Rng rng(2);
    double worst = 0.0, worst_sum = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      PlantedSpec spec;
      spec.k = 2 + rng.below(5);
      spec.v = 30 + rng.below(50);
      spec.d = 5 + rng.below(46);
      spec.doc_len = 5 + rng.below(30);
      spec.seed = rng.next();
      const auto pc = generate_corpus(spec);
      LdaConfig cfg;
      cfg.k = spec.k;
      cfg.iterations = 50;
      cfg.seed = rng.next();
      const auto model = train_lda(pc.docs, cfg);
      const auto tp = topic_proportions(model, pc.docs);
      const double total = std::accumulate(tp.percent.begin(), tp.percent.end(), 0.0);
      worst_sum = std::max(worst_sum, std::fabs(total - 100.0));
      c.expect(std::fabs(total - 100.0) <= 1e-6, "sum " + format_double(total));
      // Independent summation: per-document inference, long double, reverse order.
      std::vector<long double> acc(spec.k, 0.0L);
      for (std::size_t d = pc.docs.size(); d-- > 0;) {
        const auto w = infer_doc_topics(model, pc.docs[d]).weights;
        for (std::size_t k = 0; k < spec.k; ++k) acc[k] += w[k];
      }
      for (std::size_t k = 0; k < spec.k; ++k) {
        const double brute = static_cast<double>(100.0L * acc[k] / static_cast<long double>(pc.docs.size()));
        worst = std::max(worst, std::fabs(brute - tp.percent[k]));
        c.near(tp.percent[k], brute, 1e-9, "topic " + std::to_string(k));
      }
    }
    c.detail << "20 corpora, max |sum-100|=" << worst_sum << " max |diff|=" << worst;
  });

  criterion(3, "LDA recovers planted topics", [](Check& c) {
    const auto t0 = Clock::now();
    const auto& pc = planted();
    const auto model = train_lda(pc.docs, recovery_lda());
    const double secs = seconds_since(t0);
    const auto match = match_topics(align_phi(model, pc.vocab), pc.true_phi);
    c.expect(match.mean_cosine >= 0.85, "mean cosine " + format_double(match.mean_cosine));
    c.expect(secs < 120.0, "took " + format_double(secs) + " s");
    c.detail << "mean matched cosine=" << match.mean_cosine << " train=" << secs << "s";
  });

  criterion(4, "coherence equals brute force; sweep finds the planted K", [](Check& c) {
    // Reference values computed with gensim's CoherenceModel on a toy corpus.
    const std::vector<TokenDoc> toy = {
        {"d1", {"apple", "banana", "cherry", "apple", "date"}},
        {"d2", {"banana", "cherry", "egg", "fig"}},
        {"d3", {"apple", "cherry", "fig", "grape", "banana", "apple"}},
        {"d4", {"date", "egg", "fig", "grape"}},
        {"d5", {"apple", "banana", "grape", "cherry", "egg", "date", "fig"}},
        {"d6", {"cherry", "date", "egg"}},
    };
    const TopicWords topics = {{"apple", "banana", "cherry", "date"}, {"egg", "fig", "grape", "apple"}};
    c.near(coherence_cv(topics, toy, 3).score, 0.325614466248732, 1e-9, "gensim C_v window 3");
    c.near(coherence_cv(topics, toy, 110).score, 0.6200531899789352, 1e-9, "gensim C_v window 110");
    c.near(coherence_umass(topics, toy).score, -0.44690465730442563, 1e-9, "gensim UMass");

    Rng rng(4);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<TokenDoc> docs;
      const std::size_t n = 2 + rng.below(19);
      for (std::size_t d = 0; d < n; ++d) {
        TokenDoc doc{"d" + std::to_string(d), {}};
        const auto len = 1 + rng.below(30);
        for (std::size_t i = 0; i < len; ++i) doc.lemmas.push_back("w" + std::to_string(rng.below(15)));
        docs.push_back(doc);
      }
      std::set<std::string> present;
      for (const auto& d : docs) present.insert(d.lemmas.begin(), d.lemmas.end());
      std::vector<std::string> pool(present.begin(), present.end());
      rng.shuffle(pool);
      if (pool.size() < 2) continue;
      const std::size_t k = std::min<std::size_t>(pool.size(), 2 + rng.below(9));
      const TopicWords t = {std::vector<std::string>(pool.begin(), pool.begin() + k)};
      const std::size_t window = 2 + rng.below(20);
      const double cv = coherence_cv(t, docs, window).score, ncv = naive_cv(t[0], docs, window);
      const double um = coherence_umass(t, docs).score, num = naive_umass(t[0], docs);
      worst = std::max({worst, std::fabs(cv - ncv), std::fabs(um - num)});
      c.near(cv, ncv, 1e-9, "C_v trial " + std::to_string(trial));
      c.near(um, num, 1e-9, "UMass trial " + std::to_string(trial));
    }

    SweepConfig sc;
    sc.k_min = 2;
    sc.k_max = 10;
    sc.lda = recovery_lda();
    const auto report = sweep_topic_count(planted().docs, sc);
    const long diff = static_cast<long>(report.recommended_k) - 5;
    c.expect(diff >= -1 && diff <= 1, "recommended K " + std::to_string(report.recommended_k));
    c.detail << "max |diff| vs naive=" << worst << " sweep recommended K=" << report.recommended_k
             << " (parsimonious K=" << report.parsimonious_k << ")";
  });

  criterion(5, "sentiment contract", [](Check& c) {
    const auto& lex = ValenceLexicon::bundled();
    std::vector<std::string> words;
    for (const auto& [w, v] : lex.valences) words.push_back(w);
    for (const auto& [w, v] : lex.boosters) words.push_back(w);
    for (const auto& w : lex.negators) words.push_back(w);
    for (const char* filler : {"course", "the", "was", "it", "and"}) words.emplace_back(filler);
    std::vector<std::string> hits;
    for (const auto& [w, v] : lex.valences)
      if (v != 0.0 && !lex.boosters.contains(w) && !lex.negators.contains(w)) hits.push_back(w);

    Rng rng(5);
    std::size_t out_of_range = 0, monotone_fail = 0, flip_fail = 0;
    for (int i = 0; i < 10000; ++i) {
      std::vector<std::string> t(rng.below(40));
      for (auto& w : t) w = words[rng.below(words.size())];
      const double s = score_valence_rule(t, lex);
      if (!(s >= -1.0 && s <= 1.0)) ++out_of_range;
      const double p = score_polarity_avg(t, PolarityLexicon::bundled());
      if (!(p >= -1.0 && p <= 1.0)) ++out_of_range;

      // A booster right before the only hit pushes the score further from 0.
      std::vector<std::string> filler;
      for (const auto& w : t)
        if (!lex.negators.contains(w) && (!lex.valences.contains(w) || lex.boosters.contains(w))) filler.push_back(w);
      const auto& hit = hits[rng.below(hits.size())];
      const auto at = static_cast<std::ptrdiff_t>(rng.below(filler.size() + 1));
      auto plain = filler;
      plain.insert(plain.begin() + at, hit);
      auto boosted = plain;
      boosted.insert(boosted.begin() + at, "very");
      const double before = score_valence_rule(plain, lex), after = score_valence_rule(boosted, lex);
      if (lex.valences.at(hit) > 0 ? after < before - 1e-12 : after > before + 1e-12) ++monotone_fail;
    }
    // Negation flips the sign of every single-word hit.
    for (const auto& w : hits) {
      const std::vector<std::string> one = {w}, neg = {"not", w};
      const double a = score_valence_rule(one, lex), b = score_valence_rule(neg, lex);
      if (!(a * b < 0.0)) ++flip_fail;
    }
    c.expect(out_of_range == 0, std::to_string(out_of_range) + " scores outside [-1, 1]");
    c.expect(monotone_fail == 0, std::to_string(monotone_fail) + " booster monotonicity failures");
    c.expect(flip_fail == 0, std::to_string(flip_fail) + " negation flip failures");
    c.expect(score_valence_rule(std::vector<std::string>{}, lex) == 0.0, "empty input is not 0.0");
    c.expect(score_valence_rule(sentiment_tokens("", false), lex) == 0.0, "empty text is not 0.0");
    c.expect(label_from_compound(0.1) == SentimentLabel::kNeutral, "0.1 is not Neutral");
    c.expect(label_from_compound(-0.1) == SentimentLabel::kNeutral, "-0.1 is not Neutral");
    c.expect(label_from_compound(std::nextafter(0.1, 1.0)) == SentimentLabel::kPositive, "0.1+ulp is not Positive");
    c.expect(label_from_compound(std::nextafter(-0.1, -1.0)) == SentimentLabel::kNegative, "-0.1-ulp is not Negative");
    c.expect(label_from_compound(0.0) == SentimentLabel::kNeutral, "0 is not Neutral");
    c.detail << "10000 fuzz cases, " << hits.size() << " lexicon words negated";
  });

  criterion(6, "pearson and spearman match closed forms", [](Check& c) {
    struct Case {
      std::vector<double> x, y;
      double r, rho;
    };
    // Exact values computed with 50-digit arithmetic.
    const std::vector<Case> cases = {
        {{1, 2, 3}, {2, 4, 7}, 0.9933992677987828549, 1.0},
        {{1, 2, 2, 3}, {1, 3, 2, 4}, 0.9486832980505137996, 0.9486832980505137996},
        {{2.5, 3.1, 4.7, 1.2, 5.5, 3.3}, {1, 2, 2, 0.5, 4, 3}, 0.84247648563393816548, 0.89864510526129503512},
        {{5, 4, 5, 3, 1, 4, 5, 2}, {0.8, 0.4, 0.6, 0.1, -0.5, 0.3, 0.9, -0.2}, 0.97992133507270380312,
         0.96978151687696671434},
        {{10, 20, 30, 40, 50}, {12, 18, 35, 38, 60}, 0.97235538047936019357, 1.0},
    };
    for (std::size_t i = 0; i < cases.size(); ++i) {
      c.near(pearson(cases[i].x, cases[i].y), cases[i].r, 1e-12, "pearson case " + std::to_string(i));
      c.near(spearman(cases[i].x, cases[i].y), cases[i].rho, 1e-12, "spearman case " + std::to_string(i));
    }
    const std::vector<double> x = {1, 2, 3, 4, 5, 6}, up = {1, 4, 9, 16, 25, 36}, down = {6, 5, 4, 3, 2, 1};
    c.expect(spearman(x, up) == 1.0, "monotone spearman != 1");
    c.expect(spearman(x, down) == -1.0, "antitone spearman != -1");
    c.near(pearson(x, down), -1.0, 1e-15, "linear pearson");
    c.detail << cases.size() << " fixed vectors (2 with ties)";
  });

  criterion(7, "MANOVA separates groups and not identical ones", [](Check& c) {
    Rng rng(7);
    const std::vector<double> centre = {3, 3, 3, 3, 3};
    const auto a = compositional(rng, 25, centre), b = compositional(rng, 25, centre);
    const double p_same = permutation_test(two_groups(a, b), 999, 11);
    const double p_dup = permutation_test(two_groups(a, a), 999, 11);
    c.expect(p_same > 0.05, "same-distribution permutation p " + format_double(p_same));
    c.expect(p_dup > 0.05, "duplicated-rows permutation p " + format_double(p_dup));

    const auto d1 = compositional(rng, 25, {15, 1, 1, 1, 1}), d2 = compositional(rng, 25, {1, 1, 15, 1, 1});
    const auto sep = two_groups(d1, d2);
    const auto res = manova_pillai(sep);
    const double p_perm = permutation_test(sep, 999, 11);
    c.expect(!res.singular, "H+E singular");
    c.expect(res.p_value < 0.01, "Pillai F p " + format_double(res.p_value));
    c.expect(p_perm < 0.01, "permutation p " + format_double(p_perm));
    c.expect(std::fabs(res.p_value - p_perm) <= 0.05, "p-values disagree");
    c.detail << "identical: perm p=" << p_same << " (dup " << p_dup << "); disjoint: V=" << res.pillai
             << " F=" << res.f << " p=" << res.p_value << " perm p=" << p_perm;
  });

  criterion(8, "stage outputs are deterministic; fixture pipeline is fast", [](Check& c) {
    const auto t0 = Clock::now();
    const Corpus corpus = load_fixture();
    const auto first = fixture_outputs(corpus);
    const double secs = seconds_since(t0);
    const auto second = fixture_outputs(load_fixture());
    c.expect(first == second, "library stage outputs differ between runs");
    c.expect(secs < 10.0, "library pipeline took " + format_double(secs) + " s");
    c.detail << "library pipeline " << secs << "s";
#ifdef MOOCSCOPE_CLI
    // The same through the command line tool, twice into fresh directories.
    setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
    unsetenv("MOOCSCOPE_CONFIG");
    const fs::path base = fs::temp_directory_path() / ("moocscope-acceptance-" + std::to_string(getpid()));
    fs::remove_all(base);
    const std::string cli = MOOCSCOPE_CLI;
    const fs::path fixtures = MOOCSCOPE_FIXTURES;
    auto pipeline = [&](const fs::path& out) {
      const std::string o = " -o '" + out.string() + "' ";
      const std::vector<std::string> steps = {
          "ingest --reviews '" + (fixtures / "sample_100.jsonl").string() + "' --courses '" +
              (fixtures / "sample_100.courses.jsonl").string() + "'",
          "preprocess",
          "sentiment",
          "lda-train --input qual -k 4 --alpha 0.1 --iterations 500",
          "lda-train --input content -k 6 --alpha 0.1 --iterations 500",
          "coherence-sweep --input content --k-min 2 --k-max 8 --iterations 200",
          "characterize",
          "stats",
      };
      for (const auto& s : steps) {
        const std::string cmd = "'" + cli + "'" + o + s + " 2>/dev/null";
        if (std::system(cmd.c_str()) != 0) return "failed: " + s;
      }
      return std::string();
    };
    const auto t1 = Clock::now();
    const auto err_a = pipeline(base / "a");
    const double cli_secs = seconds_since(t1);
    const auto err_b = pipeline(base / "b");
    c.expect(err_a.empty() && err_b.empty(), "cli " + err_a + err_b);
    c.expect(cli_secs < 10.0, "cli pipeline took " + format_double(cli_secs) + " s");
    std::size_t compared = 0;
    if (err_a.empty() && err_b.empty()) {
      for (const auto& e : fs::directory_iterator(base / "a")) {
        const auto name = e.path().filename().string();
        if (name.ends_with(".manifest.json")) continue;
        ++compared;
        c.expect(read_text_file(e.path()) == read_text_file(base / "b" / name), "cli rerun changed " + name);
      }
    }
    fs::remove_all(base);
    c.detail << ", cli pipeline " << cli_secs << "s, " << compared << " artifacts byte-identical";
#endif
  });

  criterion(9, "corpus and profile round trips are lossless", [](Check& c) {
    const Corpus corpus = load_fixture();
    const fs::path dir = fs::temp_directory_path() / ("moocscope-roundtrip-" + std::to_string(getpid()));
    fs::create_directories(dir);
    save_corpus(corpus, dir / "r.jsonl", dir / "c.jsonl");
    const auto back = load_corpus(dir / "r.jsonl", InputFormat::kJsonl, dir / "c.jsonl");
    c.expect(back.rejects.empty(), "rejects on reload");
    c.expect(back.corpus == corpus, "corpus changed on save/load");
    const auto planted_back = parse_corpus(reviews_to_jsonl(planted().corpus), InputFormat::kJsonl,
                                           courses_to_jsonl(planted().corpus));
    c.expect(planted_back.corpus == planted().corpus, "planted corpus changed on save/load");
    fs::remove_all(dir);

    std::vector<TokenDoc> docs;
    for (const auto& r : corpus.reviews()) docs.push_back(preprocess(r.review_id, r.text, default_stoplist()));
    LdaConfig cfg;
    cfg.k = 3;
    cfg.iterations = 50;
    const auto model = train_lda(docs, cfg);
    c.expect(model_from_json(model_to_json(model)) == model, "model changed on save/load");
    const auto agg = aggregate_course_sentiment(score_corpus(corpus, {}), corpus);
    const auto profiles =
        build_profiles(corpus, agg.courses, SentimentEngine::kValenceRule, {&model, docs, {"a", "b"}}, {&model, docs, {}});
    const auto text = emit_report_json(profiles, "2024-01-01T00:00:00Z");
    const auto parsed = parse_report_json(text);
    bool same = parsed.size() == profiles.size();
    for (std::size_t i = 0; same && i < parsed.size(); ++i) {
      auto expect = profiles[i];
      for (auto l : {SentimentLabel::kPositive, SentimentLabel::kNeutral, SentimentLabel::kNegative})
        expect.sentiment.label_counts.try_emplace(l, 0);
      same = parsed[i] == expect;
    }
    c.expect(same, "profiles changed on emit/parse");
    c.expect(emit_report_json(parsed, "2024-01-01T00:00:00Z") == text, "re-emitted report differs");
    c.detail << corpus.reviews().size() << " reviews, " << profiles.size() << " profiles";
  });

  std::printf("%s: %d criteria failed\n", g_failed == 0 ? "ALL PASS" : "FAILURES", g_failed);
  return g_failed == 0 ? 0 : 1;
}
