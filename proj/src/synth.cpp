#include "moocscope/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "moocscope/error.hpp"
#include "moocscope/rng.hpp"

namespace moocscope {

namespace {

constexpr char kConsonants[] = "bcdfghjklmnpqrtvwxz";  // no vowels, no 's', no 'y'

std::string padded(std::string_view prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, i);
  return std::string(prefix) + buf;
}

void check_mix(const std::vector<double>& mix) {
  if (mix.size() != rating_buckets().size()) throw InvalidArgument("rating_mix needs one weight per half-star bucket");
  double total = 0.0;
  for (double w : mix) {
    if (w < 0.0) throw InvalidArgument("rating_mix weights must be non-negative");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw InvalidArgument("rating_mix must sum to 1");
}

std::vector<double> draw_ratings(const std::vector<double>& mix, std::size_t n, bool exact, Rng& rng) {
  const auto& buckets = rating_buckets();
  std::vector<double> out;
  out.reserve(n);
  if (exact) {
    const auto counts = allocate_counts(mix, n);
    for (std::size_t b = 0; b < counts.size(); ++b) out.insert(out.end(), counts[b], buckets[b]);
    rng.shuffle(out);
  } else {
    for (std::size_t i = 0; i < n; ++i) out.push_back(buckets[rng.categorical(mix)]);
  }
  return out;
}

constexpr Platform kPlatforms[] = {Platform::kUdemy, Platform::kCoursera, Platform::kDomestika, Platform::kPlatzi,
                                   Platform::kCrehana};

std::string synth_date(Rng& rng) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "20%02d-%02d-%02d", 18 + static_cast<int>(rng.below(5)),
                1 + static_cast<int>(rng.below(12)), 1 + static_cast<int>(rng.below(28)));
  return buf;
}

}  // namespace

const std::vector<double>& rating_buckets() {
  static const std::vector<double> kBuckets = {1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
  return kBuckets;
}

std::vector<double> skewed_rating_mix() {
  return {0.015, 0.01, 0.025, 0.02, 0.045, 0.04, 0.115, 0.10, 0.63};
}

void validate(const PlantedSpec& spec) {
  if (spec.k < 1) throw InvalidArgument("k must be positive");
  if (spec.v < 1 || spec.v > kMaxSynthVocab) throw InvalidArgument("v must be in [1, 6859]");
  if (spec.doc_len < 1) throw InvalidArgument("doc_len must be positive");
  if (spec.alpha <= 0.0 || spec.beta <= 0.0) throw InvalidArgument("Dirichlet parameters must be positive");
  if (spec.n_courses < 1) throw InvalidArgument("n_courses must be positive");
  check_mix(spec.rating_mix);
}

std::string synth_word(std::size_t i) {
  if (i >= kMaxSynthVocab) throw InvalidArgument("synthetic vocabulary index out of range");
  std::string w = "z";
  w += kConsonants[i / (19 * 19)];
  w += kConsonants[(i / 19) % 19];
  w += kConsonants[i % 19];
  return w;
}

SentimentLabel planted_label(double rating) {
  if (rating >= 4.0) return SentimentLabel::kPositive;
  if (rating <= 2.5) return SentimentLabel::kNegative;
  return SentimentLabel::kNeutral;
}

std::vector<std::size_t> allocate_counts(const std::vector<double>& mix, std::size_t total) {
  std::vector<std::size_t> counts(mix.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    // Round before flooring so that shares like 0.63 * 2000 are not lost to
    // representation error.
    const double exact = std::round(mix[i] * static_cast<double>(total) * 1e9) / 1e9;
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < total && r < remainders.size(); ++r, ++assigned) ++counts[remainders[r].second];
  return counts;
}

PlantedCorpus generate_corpus(const PlantedSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  PlantedCorpus out;
  for (std::size_t i = 0; i < spec.v; ++i) out.vocab.push_back(synth_word(i));

  out.true_phi = Matrix(spec.k, spec.v);
  for (std::size_t k = 0; k < spec.k; ++k) {
    const auto row = rng.dirichlet(spec.v, spec.beta);
    std::copy(row.begin(), row.end(), out.true_phi.row(k).begin());
  }
  out.true_theta = Matrix(spec.d, spec.k);
  const auto ratings = draw_ratings(spec.rating_mix, spec.d, spec.exact_ratings, rng);

  std::vector<Course> courses;
  for (std::size_t c = 0; c < spec.n_courses; ++c) {
    Course course;
    course.course_id = padded("c", c + 1, 3);
    course.title = "Synthetic course " + std::to_string(c + 1);
    course.platform = kPlatforms[c % 5];
    courses.push_back(std::move(course));
  }

  std::vector<Review> reviews;
  reviews.reserve(spec.d);
  const int width = spec.d >= 1000000 ? 7 : 6;
  for (std::size_t d = 0; d < spec.d; ++d) {
    const auto theta = rng.dirichlet(spec.k, spec.alpha);
    std::copy(theta.begin(), theta.end(), out.true_theta.row(d).begin());
    TokenDoc doc;
    doc.review_id = padded("r", d + 1, width);
    std::string text;
    for (std::size_t t = 0; t < spec.doc_len; ++t) {
      const std::size_t z = rng.categorical(theta);
      const std::size_t w = rng.categorical(out.true_phi.row(z));
      doc.lemmas.push_back(out.vocab[w]);
      if (!text.empty()) text += ' ';
      text += out.vocab[w];
    }
    Review r;
    r.review_id = doc.review_id;
    r.course_id = courses[d % spec.n_courses].course_id;
    r.platform = courses[d % spec.n_courses].platform;
    r.rating = ratings[d];
    r.text = std::move(text);
    r.language = "en";
    reviews.push_back(std::move(r));
    out.labels.push_back(planted_label(ratings[d]));
    out.docs.push_back(std::move(doc));
  }
  out.corpus = Corpus(std::move(reviews), std::move(courses));
  return out;
}

Matrix align_phi(const TopicModel& model, const std::vector<std::string>& vocab) {
  Matrix out(model.k, vocab.size());
  for (std::size_t v = 0; v < vocab.size(); ++v)
    if (auto id = model.word_id(vocab[v]))
      for (std::size_t k = 0; k < model.k; ++k) out(k, v) = model.phi(k, *id);
  return out;
}

namespace {

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

}  // namespace

TopicMatch match_topics(const Matrix& learned_phi, const Matrix& true_phi, bool exhaustive) {
  if (learned_phi.rows != true_phi.rows || learned_phi.cols != true_phi.cols)
    throw InvalidArgument("topic matching needs matrices of equal shape");
  const std::size_t K = true_phi.rows;
  Matrix cos(K, K);
  for (std::size_t t = 0; t < K; ++t)
    for (std::size_t l = 0; l < K; ++l) cos(t, l) = cosine(true_phi.row(t), learned_phi.row(l));

  TopicMatch out;
  out.assignment.assign(K, 0);
  if (exhaustive) {
    if (K > 8) throw InvalidArgument("exhaustive topic matching is limited to K <= 8");
    std::vector<std::size_t> perm(K);
    std::iota(perm.begin(), perm.end(), 0);
    double best = -1.0;
    do {
      double s = 0.0;
      for (std::size_t t = 0; t < K; ++t) s += cos(t, perm[t]);
      if (s > best) {
        best = s;
        out.assignment = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    std::vector<bool> used_t(K, false), used_l(K, false);
    for (std::size_t step = 0; step < K; ++step) {
      double best = -2.0;
      std::size_t bt = 0, bl = 0;
      for (std::size_t t = 0; t < K; ++t) {
        if (used_t[t]) continue;
        for (std::size_t l = 0; l < K; ++l)
          if (!used_l[l] && cos(t, l) > best) {
            best = cos(t, l);
            bt = t;
            bl = l;
          }
      }
      used_t[bt] = used_l[bl] = true;
      out.assignment[bt] = bl;
    }
  }
  for (std::size_t t = 0; t < K; ++t) out.cosines.push_back(cos(t, out.assignment[t]));
  out.mean_cosine = K == 0 ? 0.0 : std::accumulate(out.cosines.begin(), out.cosines.end(), 0.0) / static_cast<double>(K);
  return out;
}

Matrix jitter_phi(const Matrix& phi, double scale, std::uint64_t seed) {
  if (scale < 0.0 || scale > 1.0) throw InvalidArgument("jitter scale must be in [0, 1]");
  Rng rng(seed);
  Matrix out = phi;
  for (std::size_t k = 0; k < phi.rows; ++k) {
    const auto noise = rng.dirichlet(phi.cols, 1.0);
    for (std::size_t v = 0; v < phi.cols; ++v) out(k, v) = (1.0 - scale) * phi(k, v) + scale * noise[v];
  }
  return out;
}

namespace {

struct Theme {
  const char* name;
  const char* title;
  std::vector<const char*> words;
};

const std::vector<Theme>& themes() {
  static const std::vector<Theme> kThemes = {
      {"health", "Health and Wellness Fundamentals",
       {"health", "nutrition", "diet", "fitness", "yoga", "meditation", "sleep", "body", "mind", "stress",
        "exercise", "workout", "mindfulness"}},
      {"programming", "Python Programming Bootcamp",
       {"python", "programming", "code", "java", "javascript", "algorithm", "database", "sql", "web", "software",
        "framework", "api"}},
      {"design", "Graphic Design and Illustration",
       {"design", "graphic", "illustration", "drawing", "painting", "photography", "typography", "animation", "art",
        "sketch", "watercolor"}},
      {"music", "Music Production and Guitar",
       {"music", "guitar", "piano", "song", "singing", "vocal", "rhythm", "harmony", "audio", "composition",
        "mixing"}},
      {"business", "Business and Marketing Strategy",
       {"business", "marketing", "finance", "investing", "strategy", "startup", "sale", "brand", "customer",
        "management", "negotiation"}},
      {"languages", "Spoken English for Professionals",
       {"english", "grammar", "vocabulary", "pronunciation", "conversation", "spanish", "accent", "speak",
        "language", "french"}},
  };
  return kThemes;
}

const std::vector<const char*> kPositive = {"excellent", "great",   "amazing", "fantastic", "wonderful",
                                            "useful",    "helpful", "clear",   "engaging",  "brilliant"};
const std::vector<const char*> kNegative = {"boring", "confusing", "terrible", "disappointing", "awful",
                                            "useless", "poor",     "frustrating"};
const std::vector<const char*> kAspects = {"explanation", "material", "pace",     "feedback",
                                           "presentation", "instructor", "example", "quiz"};

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[rng.below(v.size())];
}

std::string english_review(SentimentLabel label, const Theme& theme, Rng& rng) {
  auto c = [&] { return std::string(pick(theme.words, rng)); };
  auto pos = [&] { return std::string(pick(kPositive, rng)); };
  auto neg = [&] { return std::string(pick(kNegative, rng)); };
  auto asp = [&] { return std::string(pick(kAspects, rng)); };
  std::string s;
  switch (label) {
    case SentimentLabel::kPositive:
      s = "This was a really " + pos() + " course about " + c() + " and " + c() + ". ";
      s += "The " + asp() + " was " + pos() + " and the " + c() + " lessons were " + pos() + ". ";
      s += "I learned a lot about " + c() + " and I would recommend it to anyone interested in " + c() + ".";
      break;
    case SentimentLabel::kNeutral:
      s = "The course covers " + c() + " and " + c() + " in a standard way. ";
      s += "Some parts about " + c() + " were " + pos() + " but the " + asp() + " was " + neg() + ". ";
      s += "It is an average introduction to " + c() + ".";
      break;
    case SentimentLabel::kNegative:
      s = "This course about " + c() + " was " + neg() + " and " + neg() + ". ";
      s += "The " + asp() + " was " + neg() + " and the " + c() + " section was not helpful at all. ";
      s += "I expected much more about " + c() + " and I would not recommend it.";
      break;
  }
  return s;
}

std::string spanish_review(SentimentLabel label, const Theme& theme, Rng& rng) {
  const std::string c = pick(theme.words, rng);
  switch (label) {
    case SentimentLabel::kPositive:
      return "El curso de " + c + " fue excelente, el profesor explica muy bien todos los temas y los ejemplos "
             "son muy claros. Lo recomiendo a todos.";
    case SentimentLabel::kNeutral:
      return "El curso de " + c + " está bien para empezar, pero le faltan más ejemplos prácticos y algunas "
             "explicaciones son lentas.";
    case SentimentLabel::kNegative:
      return "El curso de " + c + " fue aburrido, las explicaciones no son claras y el material está "
             "desactualizado. No lo recomiendo.";
  }
  return {};
}

}  // namespace

ReviewFixture generate_review_fixture(const FixtureSpec& spec) {
  if (spec.n_courses < 1) throw InvalidArgument("n_courses must be positive");
  if (spec.n_spanish + spec.n_untagged > spec.n_reviews)
    throw InvalidArgument("more Spanish or untagged reviews than reviews");
  check_mix(spec.rating_mix);
  Rng rng(spec.seed);
  ReviewFixture out;

  std::vector<Course> courses;
  for (std::size_t c = 0; c < spec.n_courses; ++c) {
    const Theme& theme = themes()[c % themes().size()];
    Course course;
    course.course_id = padded("c", c + 1, 3);
    course.title = theme.title;
    if (c >= themes().size()) course.title += " " + std::to_string(c / themes().size() + 1);
    course.platform = kPlatforms[c % 5];
    course.category = theme.name;
    course.teacher = "Teacher " + std::to_string(c + 1);
    course.url = "https://example.org/courses/" + course.course_id;
    courses.push_back(std::move(course));
    out.course_themes.emplace_back(theme.name);
  }

  const auto ratings = draw_ratings(spec.rating_mix, spec.n_reviews, true, rng);
  // Spanish and untagged positions spread evenly through the corpus.
  std::vector<int> kind(spec.n_reviews, 0);  // 0 tagged en, 1 untagged en, 2 es
  // Offsetting within each block keeps the Spanish reviews from all landing
  // on the same course.
  if (spec.n_spanish > 0) {
    const std::size_t block = spec.n_reviews / spec.n_spanish;
    for (std::size_t i = 0; i < spec.n_spanish; ++i) kind[i * block + i % block] = 2;
  }
  for (std::size_t i = 0, placed = 0; placed < spec.n_untagged && i < spec.n_reviews; ++i)
    if (kind[i] == 0 && i % 4 == 1) {
      kind[i] = 1;
      ++placed;
    }

  std::vector<Review> reviews;
  for (std::size_t i = 0; i < spec.n_reviews; ++i) {
    const std::size_t c = i % spec.n_courses;
    const Theme& theme = themes()[c % themes().size()];
    const SentimentLabel label = planted_label(ratings[i]);
    Review r;
    r.review_id = padded("r", i + 1, 4);
    r.course_id = courses[c].course_id;
    r.platform = courses[c].platform;
    r.username = padded("user_", rng.below(spec.n_reviews * 3) + 1, 4);
    r.date = synth_date(rng);
    r.rating = ratings[i];
    if (kind[i] == 2) {
      r.text = spanish_review(label, theme, rng);
      r.language = "es";
    } else {
      r.text = english_review(label, theme, rng);
      if (kind[i] == 0) r.language = "en";
    }
    out.external_labels.push_back({r.review_id, SentimentEngine::kExternal, std::nullopt, label});
    reviews.push_back(std::move(r));
  }
  out.corpus = Corpus(std::move(reviews), std::move(courses));
  return out;
}

}  // namespace moocscope
