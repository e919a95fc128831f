#include "moocscope/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "moocscope/corpus.hpp"
#include "moocscope/error.hpp"
#include "moocscope/rng.hpp"

namespace moocscope {

std::map<double, double> RatingHistogram::percentages() const {
  std::map<double, double> out;
  for (const auto& [bucket, count] : buckets)
    out[bucket] = total == 0 ? 0.0 : 100.0 * static_cast<double>(count) / static_cast<double>(total);
  return out;
}

RatingHistogram rating_histogram(const Corpus& corpus) {
  if (corpus.reviews().empty()) throw InvalidArgument("rating histogram of an empty corpus");
  RatingHistogram h;
  for (const auto& r : corpus.reviews()) {
    ++h.buckets[r.rating];
    ++h.total;
  }
  return h;
}

std::vector<double> BinnedCounts::percentages() const {
  std::vector<double> out(counts.size(), 0.0);
  if (total == 0) return out;
  for (std::size_t i = 0; i < counts.size(); ++i)
    out[i] = 100.0 * static_cast<double>(counts[i]) / static_cast<double>(total);
  return out;
}

std::map<std::string, double> course_mean_ratings(const Corpus& corpus) {
  std::map<std::string, double> out;
  for (const auto& course : corpus.courses()) {
    const auto& pos = corpus.review_positions(course.course_id);
    if (pos.empty()) continue;
    double sum = 0.0;
    for (auto p : pos) sum += corpus.reviews()[p].rating;
    out[course.course_id] = sum / static_cast<double>(pos.size());
  }
  return out;
}

BinnedCounts bin_values(std::span<const double> values, std::span<const double> edges) {
  if (edges.size() < 2) throw InvalidArgument("at least two bin edges are required");
  if (!std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw InvalidArgument("bin edges must be strictly increasing");
  BinnedCounts out;
  out.edges.assign(edges.begin(), edges.end());
  out.counts.assign(edges.size() - 1, 0);
  for (double v : values) {
    if (v < edges.front() || v > edges.back()) {
      ++out.out_of_range;
      continue;
    }
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    std::size_t bin = static_cast<std::size_t>(it - edges.begin()) - 1;
    if (bin >= out.counts.size()) bin = out.counts.size() - 1;  // v == last edge
    ++out.counts[bin];
    ++out.total;
  }
  return out;
}

BinnedCounts course_mean_distribution(const Corpus& corpus, std::span<const double> edges) {
  std::vector<double> means;
  for (const auto& [id, mean] : course_mean_ratings(corpus)) means.push_back(mean);
  return bin_values(means, edges);
}

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("correlation inputs differ in length");
  if (x.size() < 2) throw InvalidArgument("correlation needs at least two observations");
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("correlation of a constant series is undefined");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw InvalidArgument("incomplete beta needs positive parameters");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_survival(double f, double d1, double d2) {
  if (d1 <= 0.0 || d2 <= 0.0) throw InvalidArgument("F distribution needs positive degrees of freedom");
  if (std::isinf(f)) return 0.0;
  if (f <= 0.0) return 1.0;
  return incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

namespace {

struct Scatter {
  Eigen::MatrixXd h;
  Eigen::MatrixXd e;
  std::size_t n_groups = 0;
};

Eigen::MatrixXd to_eigen(const Matrix& m, std::size_t cols) {
  Eigen::MatrixXd out(m.rows, cols);
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = m(r, c);
  return out;
}

Scatter scatter(const Eigen::MatrixXd& x, std::span<const std::string> groups) {
  std::map<std::string, std::vector<Eigen::Index>> members;
  for (Eigen::Index i = 0; i < x.rows(); ++i) members[groups[i]].push_back(i);
  const Eigen::RowVectorXd grand = x.colwise().mean();
  Scatter s;
  s.h = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  s.e = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  s.n_groups = members.size();
  for (const auto& [label, idx] : members) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(x.cols());
    for (auto i : idx) mean += x.row(i);
    mean /= static_cast<double>(idx.size());
    const Eigen::RowVectorXd d = mean - grand;
    s.h += static_cast<double>(idx.size()) * d.transpose() * d;
    for (auto i : idx) {
      const Eigen::RowVectorXd r = x.row(i) - mean;
      s.e += r.transpose() * r;
    }
  }
  return s;
}

struct TraceResult {
  double value = 0.0;
  bool singular = false;
};

TraceResult pillai_from_scatter(const Scatter& s) {
  const Eigen::MatrixXd total = s.h + s.e;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(total);
  // Relative threshold so that rank is judged on the scale of the data.
  lu.setThreshold(1e-10);
  TraceResult out;
  if (lu.isInvertible()) {
    out.value = (s.h * lu.inverse()).trace();
  } else {
    out.singular = true;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(total);
    cod.setThreshold(1e-10);
    out.value = (s.h * cod.pseudoInverse()).trace();
  }
  return out;
}

void check_grouped(const GroupedTopicMatrix& m) {
  if (m.groups.size() != m.rows.rows) throw InvalidArgument("one group label per row is required");
  if (m.rows.cols < 1) throw InvalidArgument("matrix has no columns");
}

std::size_t reduced_cols(const GroupedTopicMatrix& m, bool drop_last) {
  if (!drop_last) return m.rows.cols;
  if (m.rows.cols < 2) throw InvalidArgument("dropping the last column leaves no dimensions");
  return m.rows.cols - 1;
}

}  // namespace

double pillai_trace(const Matrix& rows, std::span<const std::string> groups) {
  if (groups.size() != rows.rows) throw InvalidArgument("one group label per row is required");
  return pillai_from_scatter(scatter(to_eigen(rows, rows.cols), groups)).value;
}

ManovaResult manova_pillai(const GroupedTopicMatrix& matrix, const ManovaOptions& options) {
  check_grouped(matrix);
  const std::size_t p = reduced_cols(matrix, options.drop_last_column);
  const Eigen::MatrixXd x = to_eigen(matrix.rows, p);
  const Scatter sc = scatter(x, matrix.groups);
  if (sc.n_groups < 2) throw InvalidArgument("MANOVA needs at least two groups");

  std::map<std::string, std::size_t> sizes;
  for (const auto& g : matrix.groups) ++sizes[g];
  for (const auto& [label, n] : sizes)
    if (n < p + 1)
      throw InvalidArgument("group '" + label + "' has " + std::to_string(n) + " rows; at least " +
                            std::to_string(p + 1) + " are required");

  ManovaResult out;
  out.dims = p;
  out.n_groups = sc.n_groups;
  const auto tr = pillai_from_scatter(sc);
  out.pillai = tr.value;

  const double N = static_cast<double>(matrix.rows.rows);
  const double g = static_cast<double>(sc.n_groups);
  const double pd = static_cast<double>(p);
  const double s = std::min(pd, g - 1.0);
  const double m = (std::fabs(pd - (g - 1.0)) - 1.0) / 2.0;
  const double n = (N - g - pd - 1.0) / 2.0;
  out.df1 = s * (2.0 * m + s + 1.0);
  out.df2 = s * (2.0 * n + s + 1.0);

  if (tr.singular) {
    out.singular = true;
    out.diagnostic = "H+E is singular after reduction; p-value from " +
                     std::to_string(options.fallback_permutations) + " label permutations";
    out.f = std::numeric_limits<double>::quiet_NaN();
    out.p_value = permutation_test(matrix, options.fallback_permutations, options.seed,
                                   options.drop_last_column);
    return out;
  }
  if (out.df2 <= 0.0) throw InvalidArgument("too few rows for the Pillai F approximation");
  if (s - out.pillai <= 1e-12) {
    out.f = std::numeric_limits<double>::infinity();
    out.p_value = 0.0;
  } else {
    out.f = ((2.0 * n + s + 1.0) / (2.0 * m + s + 1.0)) * out.pillai / (s - out.pillai);
    out.p_value = f_survival(out.f, out.df1, out.df2);
  }
  return out;
}

double permutation_test(const GroupedTopicMatrix& matrix, std::size_t n_perm, std::uint64_t seed,
                        bool drop_last_column) {
  check_grouped(matrix);
  if (n_perm < 100) throw InvalidArgument("permutation test needs at least 100 permutations");
  const std::size_t p = reduced_cols(matrix, drop_last_column);
  const Eigen::MatrixXd x = to_eigen(matrix.rows, p);
  const double observed = pillai_from_scatter(scatter(x, matrix.groups)).value;
  // Statistics that tie the observed value up to rounding count as exceeding it.
  const double tol = 1e-10 * std::max(1.0, std::fabs(observed));
  std::size_t exceed = 0;
  for (std::size_t r = 0; r < n_perm; ++r) {
    Rng rng(derive_seed(seed, r));
    std::vector<std::string> labels = matrix.groups;
    rng.shuffle(labels);
    if (pillai_from_scatter(scatter(x, labels)).value >= observed - tol) ++exceed;
  }
  return (1.0 + static_cast<double>(exceed)) / (1.0 + static_cast<double>(n_perm));
}

std::map<std::string, std::vector<double>> mean_distribution_by_group(const Matrix& rows,
                                                                      std::span<const std::string> groups) {
  if (groups.size() != rows.rows) throw InvalidArgument("one group label per row is required");
  std::map<std::string, std::vector<double>> sums;
  std::map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i < rows.rows; ++i) {
    auto& acc = sums[groups[i]];
    acc.resize(rows.cols, 0.0);
    for (std::size_t c = 0; c < rows.cols; ++c) acc[c] += rows(i, c);
    ++counts[groups[i]];
  }
  for (auto& [label, acc] : sums) {
    double total = 0.0;
    for (auto& v : acc) total += (v /= static_cast<double>(counts[label]));
    if (total > 0.0)
      for (auto& v : acc) v *= 100.0 / total;
  }
  return sums;
}

}  // namespace moocscope
