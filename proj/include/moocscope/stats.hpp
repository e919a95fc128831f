#pragma once

// Rating distributions, correlation coefficients, and the one-way MANOVA
// (Pillai's trace) used to compare topic distributions between sentiment
// groups, with a permutation fallback.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "moocscope/matrix.hpp"

namespace moocscope {

class Corpus;

struct RatingHistogram {
  std::map<double, std::size_t> buckets;  // half-star value -> count
  std::size_t total = 0;

  /// bucket -> 100 * count / total.
  std::map<double, double> percentages() const;
};

/// Throws InvalidArgument on an empty corpus.
RatingHistogram rating_histogram(const Corpus& corpus);

struct BinnedCounts {
  std::vector<double> edges;
  std::vector<std::size_t> counts;  // edges.size() - 1 bins
  std::size_t total = 0;
  std::size_t out_of_range = 0;

  std::vector<double> percentages() const;
};

/// Arithmetic mean rating per course, keyed by course_id. Courses without
/// reviews are absent.
std::map<std::string, double> course_mean_ratings(const Corpus& corpus);

/// Bins values into [e_i, e_{i+1}); the last bin is closed on the right.
BinnedCounts bin_values(std::span<const double> values, std::span<const double> edges);

BinnedCounts course_mean_distribution(const Corpus& corpus, std::span<const double> edges);

/// Throws InvalidArgument on length mismatch or fewer than two points and
/// UndefinedCorrelation when either series is constant.
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

/// 1-based ranks, ties receiving the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Upper tail P(F > f) of the F(d1, d2) distribution.
double f_survival(double f, double d1, double d2);

/// Rows of compositional vectors with a group label per row.
struct GroupedTopicMatrix {
  Matrix rows;
  std::vector<std::string> groups;
};

struct ManovaResult {
  double pillai = 0.0;
  double f = 0.0;
  double df1 = 0.0;
  double df2 = 0.0;
  double p_value = 1.0;
  std::size_t dims = 0;      // columns used after reduction
  std::size_t n_groups = 0;
  bool singular = false;     // H+E was singular; p_value is the permutation p
  std::string diagnostic;
};

struct ManovaOptions {
  bool drop_last_column = true;
  std::size_t fallback_permutations = 999;
  std::uint64_t seed = 1;
};

/// One-way MANOVA with Pillai's trace. The last column is dropped first so
/// that rows summing to a constant do not make H+E singular.
ManovaResult manova_pillai(const GroupedTopicMatrix& matrix, const ManovaOptions& options = {});

/// Pillai's trace on the matrix as given (no column dropped); a
/// pseudo-inverse is used when H+E is singular.
double pillai_trace(const Matrix& rows, std::span<const std::string> groups);

/// Label-permutation p-value of Pillai's trace:
/// (1 + #{permuted >= observed}) / (1 + n_perm). Replicate r shuffles the
/// labels with a generator seeded from derive_seed(seed, r).
double permutation_test(const GroupedTopicMatrix& matrix, std::size_t n_perm, std::uint64_t seed,
                        bool drop_last_column = true);

/// Mean row per group, renormalized to sum to 100. Groups are the distinct
/// labels present.
std::map<std::string, std::vector<double>> mean_distribution_by_group(const Matrix& rows,
                                                                      std::span<const std::string> groups);

}  // namespace moocscope
