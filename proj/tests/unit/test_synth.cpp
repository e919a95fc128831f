#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "moocscope/error.hpp"
#include "moocscope/rng.hpp"
#include "moocscope/synth.hpp"
#include "moocscope/textprep.hpp"

using namespace moocscope;

namespace {

Matrix random_phi(std::size_t k, std::size_t v, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(k, v);
  for (std::size_t r = 0; r < k; ++r) {
    const auto row = rng.dirichlet(v, 0.1);
    std::copy(row.begin(), row.end(), m.row(r).begin());
  }
  return m;
}

Matrix permute_rows(const Matrix& m, const std::vector<std::size_t>& perm) {
  Matrix out(m.rows, m.cols);
  for (std::size_t r = 0; r < m.rows; ++r) std::copy(m.row(perm[r]).begin(), m.row(perm[r]).end(), out.row(r).begin());
  return out;
}

}  // namespace

TEST_CASE("rating mix and buckets") {
  const auto& b = rating_buckets();
  REQUIRE(b.size() == 9);
  CHECK(b.front() == 1.0);
  CHECK(b.back() == 5.0);
  const auto mix = skewed_rating_mix();
  CHECK(std::accumulate(mix.begin(), mix.end(), 0.0) == doctest::Approx(1.0));
  CHECK(mix[8] == doctest::Approx(0.63));
  CHECK(mix[6] + mix[7] == doctest::Approx(0.215));
}

TEST_CASE("largest-remainder allocation") {
  CHECK(allocate_counts(skewed_rating_mix(), 2000) ==
        std::vector<std::size_t>{30, 20, 50, 40, 90, 80, 230, 200, 1260});
  CHECK(allocate_counts({0.5, 0.5}, 3) == std::vector<std::size_t>{2, 1});
  CHECK(allocate_counts({0.2, 0.3, 0.5}, 0) == std::vector<std::size_t>{0, 0, 0});
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const auto mix = rng.dirichlet(1 + rng.below(9), 1.0);
    const std::size_t total = rng.below(500);
    const auto c = allocate_counts(mix, total);
    CHECK(std::accumulate(c.begin(), c.end(), std::size_t{0}) == total);
    for (std::size_t i = 0; i < mix.size(); ++i) CHECK(std::fabs(static_cast<double>(c[i]) - mix[i] * total) < 1.0 + 1e-9);
  }
}

TEST_CASE("synthetic words survive preprocessing") {
  CHECK(synth_word(0) == "zbbb");
  CHECK(synth_word(1) == "zbbc");
  CHECK(synth_word(kMaxSynthVocab - 1) == "zzzz");
  CHECK_THROWS_AS(synth_word(kMaxSynthVocab), InvalidArgument);
  for (std::size_t i = 0; i < kMaxSynthVocab; i += 97) {
    const auto w = synth_word(i);
    CHECK(synth_word(i + 1 < kMaxSynthVocab ? i + 1 : i) >= w);
    CHECK(preprocess("x", w, default_stoplist()).lemmas == std::vector<std::string>{w});
  }
}

TEST_CASE("planted labels") {
  CHECK(planted_label(5.0) == SentimentLabel::kPositive);
  CHECK(planted_label(4.0) == SentimentLabel::kPositive);
  CHECK(planted_label(3.5) == SentimentLabel::kNeutral);
  CHECK(planted_label(3.0) == SentimentLabel::kNeutral);
  CHECK(planted_label(2.5) == SentimentLabel::kNegative);
  CHECK(planted_label(1.0) == SentimentLabel::kNegative);
}

TEST_CASE("planted corpus invariants") {
  PlantedSpec spec;
  spec.k = 3;
  spec.v = 50;
  spec.d = 400;
  spec.doc_len = 30;
  spec.exact_ratings = true;
  const auto pc = generate_corpus(spec);
  CHECK(pc.corpus.reviews().size() == 400);
  CHECK(pc.corpus.courses().size() == 10);
  CHECK(pc.docs.size() == 400);
  CHECK(pc.true_phi.rows == 3);
  CHECK(pc.true_theta.rows == 400);
  std::map<double, std::size_t> hist;
  for (std::size_t d = 0; d < 400; ++d) {
    const auto& r = pc.corpus.reviews()[d];
    CHECK(r.review_id == pc.docs[d].review_id);
    CHECK(pc.docs[d].lemmas.size() == 30);
    CHECK(preprocess(r.review_id, r.text, default_stoplist()) == pc.docs[d]);
    CHECK(r.course_id == pc.corpus.courses()[d % 10].course_id);
    CHECK(pc.labels[d] == planted_label(r.rating));
    ++hist[r.rating];
  }
  const auto expect = allocate_counts(skewed_rating_mix(), 400);
  for (std::size_t i = 0; i < 9; ++i) CHECK(hist[rating_buckets()[i]] == expect[i]);
  for (const auto* m : {&pc.true_phi, &pc.true_theta})
    for (std::size_t r = 0; r < m->rows; ++r) {
      const auto row = m->row(r);
      CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0));
    }

  const auto again = generate_corpus(spec);
  CHECK(again.corpus == pc.corpus);
  CHECK(again.true_phi == pc.true_phi);
  spec.seed = 43;
  CHECK_FALSE(generate_corpus(spec).corpus == pc.corpus);

  spec.d = 0;
  CHECK(generate_corpus(spec).corpus.reviews().empty());
  spec.v = kMaxSynthVocab + 1;
  CHECK_THROWS_AS(generate_corpus(spec), InvalidArgument);
  spec = PlantedSpec{};
  spec.rating_mix = {1.0};
  CHECK_THROWS_AS(generate_corpus(spec), InvalidArgument);
}

TEST_CASE("token frequencies follow theta * phi") {
  PlantedSpec spec;
  spec.k = 3;
  spec.v = 30;
  spec.d = 300;
  spec.doc_len = 100;
  spec.alpha = 0.5;
  spec.beta = 0.5;
  spec.seed = 17;
  const auto pc = generate_corpus(spec);
  std::vector<double> expected(spec.v, 0.0), observed(spec.v, 0.0);
  for (std::size_t d = 0; d < spec.d; ++d) {
    for (std::size_t w = 0; w < spec.v; ++w)
      for (std::size_t k = 0; k < spec.k; ++k)
        expected[w] += spec.doc_len * pc.true_theta(d, k) * pc.true_phi(k, w);
    for (const auto& l : pc.docs[d].lemmas)
      ++observed[static_cast<std::size_t>(std::find(pc.vocab.begin(), pc.vocab.end(), l) - pc.vocab.begin())];
  }
  for (std::size_t w = 0; w < spec.v; ++w) {
    // Sum of independent Bernoulli draws: variance below the mean.
    const double sd = std::sqrt(std::max(expected[w], 1.0));
    CHECK(std::fabs(observed[w] - expected[w]) <= 4.0 * sd);
  }
}

TEST_CASE("topic matching") {
  const auto truth = random_phi(5, 80, 1);
  SUBCASE("identity") {
    const auto m = match_topics(truth, truth);
    CHECK(m.mean_cosine == doctest::Approx(1.0));
    CHECK(m.assignment == std::vector<std::size_t>{0, 1, 2, 3, 4});
  }
  SUBCASE("row permutation is undone") {
    const std::vector<std::size_t> perm = {3, 0, 4, 1, 2};
    const auto learned = permute_rows(truth, perm);
    for (bool exhaustive : {false, true}) {
      const auto m = match_topics(learned, truth, exhaustive);
      CHECK(m.mean_cosine == doctest::Approx(1.0));
      for (std::size_t t = 0; t < 5; ++t) CHECK(perm[m.assignment[t]] == t);
    }
  }
  SUBCASE("more jitter never raises the score on average") {
    double prev = 1.0 + 1e-12;
    for (double s : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
      double mean = 0.0;
      for (std::uint64_t seed = 0; seed < 10; ++seed) mean += match_topics(jitter_phi(truth, s, seed), truth).mean_cosine;
      mean /= 10.0;
      CHECK(mean <= prev + 1e-9);
      prev = mean;
    }
    CHECK_THROWS_AS(jitter_phi(truth, 1.5, 1), InvalidArgument);
  }
  SUBCASE("exhaustive matching is optimal and never below greedy") {
    Rng rng(5);
    for (int t = 0; t < 30; ++t) {
      const auto a = random_phi(4, 10, rng.next());
      const auto b = random_phi(4, 10, rng.next());
      const auto ex = match_topics(a, b, true);
      const auto gr = match_topics(a, b, false);
      CHECK(ex.mean_cosine >= gr.mean_cosine - 1e-12);
      std::vector<std::size_t> perm = {0, 1, 2, 3};
      double best = -1.0;
      do {
        double s = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
          const auto x = b.row(i), y = a.row(perm[i]);
          double dot = 0, nx = 0, ny = 0;
          for (std::size_t j = 0; j < 10; ++j) {
            dot += x[j] * y[j];
            nx += x[j] * x[j];
            ny += y[j] * y[j];
          }
          s += dot / std::sqrt(nx * ny);
        }
        best = std::max(best, s / 4.0);
      } while (std::next_permutation(perm.begin(), perm.end()));
      CHECK(ex.mean_cosine == doctest::Approx(best).epsilon(1e-12));
    }
    CHECK_THROWS_AS(match_topics(random_phi(9, 5, 1), random_phi(9, 5, 2), true), InvalidArgument);
    CHECK_THROWS_AS(match_topics(random_phi(3, 5, 1), random_phi(4, 5, 2)), InvalidArgument);
  }
}

TEST_CASE("align_phi reindexes onto the true vocabulary") {
  TopicModel m;
  m.k = 2;
  m.vocab = {"b", "c"};
  m.phi = Matrix(2, 2);
  m.phi.data = {0.3, 0.7, 0.6, 0.4};
  const auto a = align_phi(m, {"a", "b", "c"});
  CHECK(a.data == std::vector<double>{0.0, 0.3, 0.7, 0.0, 0.6, 0.4});
}

TEST_CASE("review fixture layout") {
  const auto fx = generate_review_fixture({});
  const auto& reviews = fx.corpus.reviews();
  REQUIRE(reviews.size() == 100);
  CHECK(fx.corpus.courses().size() == 10);
  CHECK(fx.course_themes[0] == "health");
  CHECK(fx.course_themes[6] == "health");
  CHECK(reviews[0].review_id == "r0001");
  CHECK(reviews[0].course_id == "c001");
  std::size_t es = 0, untagged = 0, five = 0, four = 0;
  std::set<std::string> es_courses;
  for (std::size_t i = 0; i < reviews.size(); ++i) {
    const auto& r = reviews[i];
    es += r.language == "es";
    if (r.language == "es") es_courses.insert(r.course_id);
    untagged += !r.language.has_value();
    five += r.rating == 5.0;
    four += r.rating == 4.0 || r.rating == 4.5;
    CHECK(fx.external_labels[i].review_id == r.review_id);
    CHECK(fx.external_labels[i].label == planted_label(r.rating));
  }
  CHECK(es == 10);
  // Spread over courses so the language filter does not empty one.
  CHECK(es_courses.size() == 10);
  CHECK(untagged == 20);
  // Largest remainder gives 63 / 21 or 22 / rest for 100 reviews.
  CHECK(five == 63);
  CHECK((four == 21 || four == 22));
  CHECK(generate_review_fixture({}).corpus == fx.corpus);
  FixtureSpec bad;
  bad.n_spanish = 90;
  CHECK_THROWS_AS(generate_review_fixture(bad), InvalidArgument);
}
