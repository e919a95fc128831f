#include "moocscope/lda.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <json.hpp>

#include "moocscope/error.hpp"
#include "moocscope/io.hpp"
#include "moocscope/rng.hpp"

namespace moocscope {

std::optional<std::size_t> TopicModel::word_id(std::string_view word) const {
  auto it = std::lower_bound(vocab.begin(), vocab.end(), word);
  if (it == vocab.end() || *it != word) return std::nullopt;
  return static_cast<std::size_t>(it - vocab.begin());
}

TopicModel train_lda(std::span<const TokenDoc> docs, const LdaConfig& config) {
  const std::size_t K = config.k;
  if (K < 2) throw InvalidArgument("LDA needs at least two topics");
  if (config.iterations < 1) throw InvalidArgument("LDA needs at least one iteration");
  if (config.beta <= 0.0) throw InvalidArgument("beta must be positive");
  const double alpha = config.resolved_alpha();
  if (alpha <= 0.0) throw InvalidArgument("alpha must be positive");

  std::set<std::string_view> words;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (docs[d].lemmas.empty())
      throw InvalidArgument("empty document '" + docs[d].review_id + "' (filter empty projections first)");
    words.insert(docs[d].lemmas.begin(), docs[d].lemmas.end());
  }
  if (K > words.size())
    throw InvalidArgument("K = " + std::to_string(K) + " exceeds the " + std::to_string(words.size()) +
                          " distinct words");

  TopicModel m;
  m.k = K;
  m.vocab.assign(words.begin(), words.end());
  m.alpha = alpha;
  m.beta = config.beta;
  m.seed = config.seed;
  m.iterations = config.iterations;
  m.burn_in = config.burn_in;
  const std::size_t V = m.vocab.size();
  const std::size_t D = docs.size();

  std::vector<std::size_t> order(D);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return docs[a].review_id < docs[b].review_id; });

  // Tokens laid out in canonical document order.
  std::vector<std::uint32_t> w_of, z_of;
  std::vector<std::size_t> start(D + 1, 0);
  for (std::size_t c = 0; c < D; ++c) {
    start[c] = w_of.size();
    for (const auto& lemma : docs[order[c]].lemmas) w_of.push_back(static_cast<std::uint32_t>(*m.word_id(lemma)));
  }
  start[D] = w_of.size();

  std::vector<std::uint32_t> nkw(K * V, 0), ndk(D * K, 0), nk(K, 0);
  Rng rng(config.seed);
  z_of.resize(w_of.size());
  for (std::size_t c = 0; c < D; ++c)
    for (std::size_t i = start[c]; i < start[c + 1]; ++i) {
      const auto z = static_cast<std::uint32_t>(rng.below(K));
      z_of[i] = z;
      ++nkw[z * V + w_of[i]];
      ++ndk[c * K + z];
      ++nk[z];
    }

  const double vbeta = static_cast<double>(V) * config.beta;
  std::vector<double> cum(K);
  for (std::size_t it = 0; it < config.iterations; ++it) {
    for (std::size_t c = 0; c < D; ++c) {
      std::uint32_t* nd = &ndk[c * K];
      for (std::size_t i = start[c]; i < start[c + 1]; ++i) {
        const std::uint32_t w = w_of[i];
        std::uint32_t z = z_of[i];
        --nkw[z * V + w];
        --nd[z];
        --nk[z];
        double total = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          total += (nd[k] + alpha) * (nkw[k * V + w] + config.beta) / (nk[k] + vbeta);
          cum[k] = total;
        }
        const double u = rng.uniform() * total;
        z = static_cast<std::uint32_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
        if (z >= K) z = static_cast<std::uint32_t>(K - 1);
        z_of[i] = z;
        ++nkw[z * V + w];
        ++nd[z];
        ++nk[z];
      }
    }
  }

  m.phi = Matrix(K, V);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t v = 0; v < V; ++v) m.phi(k, v) = (nkw[k * V + v] + config.beta) / (nk[k] + vbeta);

  m.theta = Matrix(D, K);
  m.doc_ids.resize(D);
  m.doc_topic_counts.assign(D * K, 0);
  const double kalpha = static_cast<double>(K) * alpha;
  for (std::size_t c = 0; c < D; ++c) {
    const std::size_t d = order[c];
    m.doc_ids[d] = docs[d].review_id;
    const double n = static_cast<double>(start[c + 1] - start[c]);
    for (std::size_t k = 0; k < K; ++k) {
      m.doc_topic_counts[d * K + k] = ndk[c * K + k];
      m.theta(d, k) = (ndk[c * K + k] + alpha) / (n + kalpha);
    }
  }
  m.topic_word_counts = std::move(nkw);
  return m;
}

DocTopics infer_doc_topics(const TopicModel& model, const TokenDoc& doc, const InferenceOptions& options) {
  const std::size_t K = model.k;
  if (K == 0) throw InvalidArgument("model is not trained");
  if (options.sweeps <= options.burn_in) throw InvalidArgument("inference sweeps must exceed burn-in");
  DocTopics out;
  std::vector<std::size_t> ids;
  for (const auto& lemma : doc.lemmas)
    if (auto id = model.word_id(lemma)) ids.push_back(*id);
  if (ids.empty()) {
    out.weights.assign(K, 1.0 / static_cast<double>(K));
    out.out_of_vocabulary = true;
    return out;
  }

  Rng rng(derive_seed(model.seed, fnv1a64(doc.review_id)));
  std::vector<std::uint32_t> z(ids.size());
  std::vector<double> nd(K, 0.0), p(K), acc(K, 0.0);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t k = 0; k < K; ++k) p[k] = model.phi(k, ids[i]);
    z[i] = static_cast<std::uint32_t>(rng.categorical(p));
    nd[z[i]] += 1.0;
  }
  const double denom = static_cast<double>(ids.size()) + static_cast<double>(K) * model.alpha;
  for (std::size_t s = 0; s < options.sweeps; ++s) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      nd[z[i]] -= 1.0;
      for (std::size_t k = 0; k < K; ++k) p[k] = (nd[k] + model.alpha) * model.phi(k, ids[i]);
      z[i] = static_cast<std::uint32_t>(rng.categorical(p));
      nd[z[i]] += 1.0;
    }
    if (s >= options.burn_in)
      for (std::size_t k = 0; k < K; ++k) acc[k] += (nd[k] + model.alpha) / denom;
  }
  double total = 0.0;
  for (double a : acc) total += a;
  out.weights.resize(K);
  for (std::size_t k = 0; k < K; ++k) out.weights[k] = acc[k] / total;
  return out;
}

std::vector<TopicSummary> top_words(const TopicModel& model, std::size_t n) {
  const std::size_t V = model.vocab_size();
  if (n > V) throw InvalidArgument("asked for more top words than the vocabulary holds");
  std::vector<TopicSummary> out;
  std::vector<std::size_t> idx(V);
  for (std::size_t k = 0; k < model.k; ++k) {
    std::iota(idx.begin(), idx.end(), 0);
    // vocab is sorted, so index order breaks ties alphabetically.
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double pa = model.phi(k, a), pb = model.phi(k, b);
                        return pa != pb ? pa > pb : a < b;
                      });
    TopicSummary t;
    t.topic_id = k;
    for (std::size_t r = 0; r < n; ++r) {
      t.words.push_back(model.vocab[idx[r]]);
      t.probabilities.push_back(model.phi(k, idx[r]));
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<double> proportions_from_weights(const Matrix& weights) {
  if (weights.rows == 0) throw InvalidArgument("topic proportions over zero documents");
  std::vector<double> out(weights.cols, 0.0);
  for (std::size_t r = 0; r < weights.rows; ++r)
    for (std::size_t c = 0; c < weights.cols; ++c) out[c] += weights(r, c);
  for (auto& v : out) v = v / static_cast<double>(weights.rows) * 100.0;
  return out;
}

Matrix infer_weights(const TopicModel& model, std::span<const TokenDoc> docs, std::vector<bool>* empty,
                     const InferenceOptions& options) {
  Matrix w(docs.size(), model.k);
  if (empty) empty->assign(docs.size(), false);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    auto t = infer_doc_topics(model, docs[d], options);
    std::copy(t.weights.begin(), t.weights.end(), w.row(d).begin());
    if (empty) (*empty)[d] = t.out_of_vocabulary;
  }
  return w;
}

TopicProportions topic_proportions(const TopicModel& model, std::span<const TokenDoc> docs, bool include_empty,
                                   const InferenceOptions& options) {
  std::vector<bool> empty;
  const Matrix all = infer_weights(model, docs, &empty, options);
  TopicProportions out;
  out.n_empty = static_cast<std::size_t>(std::count(empty.begin(), empty.end(), true));
  Matrix used(0, model.k);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (empty[d] && !include_empty) continue;
    used.data.insert(used.data.end(), all.row(d).begin(), all.row(d).end());
    ++used.rows;
  }
  out.n_docs = used.rows;
  if (out.n_docs == 0) throw InvalidArgument("no documents with known words for topic proportions");
  out.percent = proportions_from_weights(used);
  return out;
}

namespace {

nlohmann::ordered_json matrix_json(const Matrix& m) {
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < m.rows; ++r) rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, std::size_t cols) {
  Matrix m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto row = j[r].get<std::vector<double>>();
    if (row.size() != cols) throw IoError("model matrix row has the wrong length");
    std::copy(row.begin(), row.end(), m.row(r).begin());
  }
  return m;
}

}  // namespace

std::string model_to_json(const TopicModel& m) {
  nlohmann::ordered_json j;
  j["format_version"] = TopicModel::kFormatVersion;
  j["k"] = m.k;
  j["alpha"] = m.alpha;
  j["beta"] = m.beta;
  j["seed"] = m.seed;
  j["iterations"] = m.iterations;
  j["burn_in"] = m.burn_in;
  j["vocab"] = m.vocab;
  j["doc_ids"] = m.doc_ids;
  j["phi"] = matrix_json(m.phi);
  j["theta"] = matrix_json(m.theta);
  j["topic_word_counts"] = m.topic_word_counts;
  j["doc_topic_counts"] = m.doc_topic_counts;
  return j.dump() + "\n";
}

TopicModel model_from_json(std::string_view text) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw IoError("model file is not a JSON object");
  try {
    const int version = j.at("format_version").get<int>();
    if (version != TopicModel::kFormatVersion)
      throw IoError("unsupported model format_version " + std::to_string(version));
    TopicModel m;
    m.k = j.at("k").get<std::size_t>();
    m.alpha = j.at("alpha").get<double>();
    m.beta = j.at("beta").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.iterations = j.at("iterations").get<std::size_t>();
    m.burn_in = j.at("burn_in").get<std::size_t>();
    m.vocab = j.at("vocab").get<std::vector<std::string>>();
    m.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
    m.phi = matrix_from_json(j.at("phi"), m.vocab.size());
    m.theta = matrix_from_json(j.at("theta"), m.k);
    m.topic_word_counts = j.at("topic_word_counts").get<std::vector<std::uint32_t>>();
    m.doc_topic_counts = j.at("doc_topic_counts").get<std::vector<std::uint32_t>>();
    if (m.phi.rows != m.k || !std::is_sorted(m.vocab.begin(), m.vocab.end()))
      throw IoError("model file is inconsistent");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const TopicModel& model, const std::filesystem::path& path) {
  write_text_file(path, model_to_json(model));
}

TopicModel load_model(const std::filesystem::path& path) { return model_from_json(read_text_file(path)); }

std::string topics_to_csv(std::span<const TopicSummary> topics) {
  std::string out = "topic_id,rank,word,probability\n";
  for (const auto& t : topics)
    for (std::size_t r = 0; r < t.words.size(); ++r)
      out += std::to_string(t.topic_id) + "," + std::to_string(r + 1) + "," + csv_escape(t.words[r]) + "," +
             format_double(t.probabilities[r]) + "\n";
  return out;
}

std::map<std::size_t, std::string> parse_topic_labels(std::string_view text) {
  std::map<std::size_t, std::string> out;
  for (const auto& line : content_lines(text)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw InvalidArgument("topic label line without a tab: '" + line + "'");
    std::size_t id = 0;
    try {
      id = std::stoul(line.substr(0, tab));
    } catch (const std::exception&) {
      throw InvalidArgument("bad topic id in '" + line + "'");
    }
    out[id] = line.substr(tab + 1);
  }
  return out;
}

void apply_topic_labels(std::vector<TopicSummary>& topics, const std::map<std::size_t, std::string>& labels) {
  for (auto& t : topics)
    if (auto it = labels.find(t.topic_id); it != labels.end()) t.label = it->second;
}

}  // namespace moocscope
