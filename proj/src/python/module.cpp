// Python bindings. Matrices cross as nested lists to keep numpy optional.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "moocscope/coherence.hpp"
#include "moocscope/corpus.hpp"
#include "moocscope/error.hpp"
#include "moocscope/lda.hpp"
#include "moocscope/sentiment.hpp"
#include "moocscope/stats.hpp"
#include "moocscope/textprep.hpp"

namespace py = pybind11;
using namespace moocscope;

namespace {

std::vector<TokenDoc> as_docs(const std::vector<std::vector<std::string>>& docs) {
  std::vector<TokenDoc> out;
  out.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) out.push_back({"doc" + std::to_string(i), docs[i]});
  return out;
}

std::vector<std::vector<double>> as_lists(const Matrix& m) {
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < m.rows; ++r) out.emplace_back(m.row(r).begin(), m.row(r).end());
  return out;
}

Matrix as_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InvalidArgument("matrix has no rows");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols) throw InvalidArgument("ragged matrix");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

py::dict review_dict(const Review& r) {
  py::dict d;
  d["review_id"] = r.review_id;
  d["course_id"] = r.course_id;
  d["platform"] = std::string(to_string(r.platform));
  d["username"] = r.username;
  d["date"] = r.date;
  d["rating"] = r.rating;
  d["text"] = r.text;
  d["language"] = r.language;
  d["url"] = r.url;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Review corpus analysis: preprocessing, sentiment, topic models and statistics";
  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::class_<Corpus>(m, "Corpus")
      .def("__len__", [](const Corpus& c) { return c.reviews().size(); })
      .def_property_readonly("reviews",
                             [](const Corpus& c) {
                               py::list out;
                               for (const auto& r : c.reviews()) out.append(review_dict(r));
                               return out;
                             })
      .def_property_readonly("course_ids",
                             [](const Corpus& c) {
                               std::vector<std::string> ids;
                               for (const auto& course : c.courses()) ids.push_back(course.course_id);
                               return ids;
                             })
      .def("reviews_jsonl", &reviews_to_jsonl)
      .def("courses_jsonl", &courses_to_jsonl);

  m.def(
      "load_corpus",
      [](const std::filesystem::path& reviews, std::optional<std::filesystem::path> courses, const std::string& format) {
        const auto fmt = format == "csv" ? InputFormat::kCsv : InputFormat::kJsonl;
        auto res = load_corpus(reviews, fmt, courses);
        return py::make_tuple(std::move(res.corpus), res.rejects.size());
      },
      py::arg("reviews"), py::arg("courses") = py::none(), py::arg("format") = "jsonl",
      "Returns (corpus, number of rejected records).");

  m.def(
      "preprocess", [](const std::string& text) { return preprocess("", text, default_stoplist()).lemmas; },
      py::arg("text"));

  m.def(
      "valence_score",
      [](const std::string& text) { return score_valence_rule(sentiment_tokens(text, false), ValenceLexicon::bundled()); },
      py::arg("text"));
  m.def(
      "label_from_compound",
      [](double c, double pos, double neg) { return std::string(to_string(label_from_compound(c, pos, neg))); },
      py::arg("compound"), py::arg("pos_threshold") = 0.1, py::arg("neg_threshold") = -0.1);
  m.def(
      "score_corpus",
      [](const Corpus& corpus, const std::string& engine) {
        SentimentOptions opt;
        opt.engine = parse_engine(engine);
        std::vector<py::tuple> out;
        for (const auto& s : score_corpus(corpus, opt))
          out.push_back(py::make_tuple(s.review_id, s.compound, std::string(to_string(s.label))));
        return out;
      },
      py::arg("corpus"), py::arg("engine") = "valence");

  py::class_<TopicModel>(m, "TopicModel")
      .def_readonly("k", &TopicModel::k)
      .def_readonly("vocab", &TopicModel::vocab)
      .def_readonly("alpha", &TopicModel::alpha)
      .def_readonly("beta", &TopicModel::beta)
      .def_property_readonly("phi", [](const TopicModel& t) { return as_lists(t.phi); })
      .def_property_readonly("theta", [](const TopicModel& t) { return as_lists(t.theta); })
      .def(
          "top_words",
          [](const TopicModel& t, std::size_t n) {
            std::vector<std::vector<std::string>> out;
            for (const auto& s : top_words(t, n)) out.push_back(s.words);
            return out;
          },
          py::arg("n") = 10)
      .def(
          "infer", [](const TopicModel& t, const std::vector<std::string>& words) {
            return infer_doc_topics(t, {"doc", words}).weights;
          },
          py::arg("lemmas"))
      .def(
          "proportions",
          [](const TopicModel& t, const std::vector<std::vector<std::string>>& docs) {
            return topic_proportions(t, as_docs(docs)).percent;
          },
          py::arg("docs"))
      .def("to_json", &model_to_json)
      .def_static("from_json", [](const std::string& s) { return model_from_json(s); });

  m.def(
      "train_lda",
      [](const std::vector<std::vector<std::string>>& docs, std::size_t k, std::optional<double> alpha, double beta,
         std::size_t iterations, std::uint64_t seed) {
        LdaConfig cfg;
        cfg.k = k;
        cfg.alpha = alpha;
        cfg.beta = beta;
        cfg.iterations = iterations;
        cfg.seed = seed;
        py::gil_scoped_release release;
        return train_lda(as_docs(docs), cfg);
      },
      py::arg("docs"), py::arg("k"), py::arg("alpha") = py::none(), py::arg("beta") = 0.01,
      py::arg("iterations") = 1000, py::arg("seed") = 1);

  m.def(
      "coherence_cv",
      [](const TopicWords& topics, const std::vector<std::vector<std::string>>& docs, std::size_t window) {
        return coherence_cv(topics, as_docs(docs), window).per_topic;
      },
      py::arg("topics"), py::arg("docs"), py::arg("window") = 110);
  m.def(
      "coherence_umass",
      [](const TopicWords& topics, const std::vector<std::vector<std::string>>& docs) {
        return coherence_umass(topics, as_docs(docs)).per_topic;
      },
      py::arg("topics"), py::arg("docs"));

  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); });
  m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) { return spearman(x, y); });
  m.def(
      "manova",
      [](const std::vector<std::vector<double>>& rows, const std::vector<std::string>& groups) {
        const auto r = manova_pillai({as_matrix(rows), groups});
        py::dict d;
        d["pillai"] = r.pillai;
        d["f"] = r.f;
        d["df1"] = r.df1;
        d["df2"] = r.df2;
        d["p_value"] = r.p_value;
        d["singular"] = r.singular;
        return d;
      },
      py::arg("rows"), py::arg("groups"));
  m.def(
      "permutation_test",
      [](const std::vector<std::vector<double>>& rows, const std::vector<std::string>& groups, std::size_t n_perm,
         std::uint64_t seed) { return permutation_test({as_matrix(rows), groups}, n_perm, seed); },
      py::arg("rows"), py::arg("groups"), py::arg("n_perm") = 999, py::arg("seed") = 1);
}
