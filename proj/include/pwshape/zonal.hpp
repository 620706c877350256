#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "pwshape/partition.hpp"
#include "pwshape/signed_log.hpp"

namespace pwshape {

/// Coefficient table for zonal polynomials C_kappa in `n_vars` variables, all
/// partitions of weight <= max_degree and length <= n_vars.
///
/// Values come from the Jack-function recursion over variables at alpha = 2,
///   J_kappa(x_1..x_j) = sum_mu J_mu(x_1..x_{j-1}) x_j^{|kappa|-|mu|} beta_{kappa mu},
/// summed over mu such that kappa/mu is a horizontal strip. Every J is carried
/// relative to its value at the all-ones point, which turns each recursion
/// step into a convex combination; the weights are independent of x and are
/// built once. Immutable after construction, so one table may be shared by
/// concurrent readers.
class ZonalTable {
 public:
  ZonalTable(int n_vars, int max_degree);

  int n_vars() const noexcept { return n_vars_; }
  int max_degree() const noexcept { return max_degree_; }
  std::size_t size() const noexcept { return parts_.size(); }
  const Partition& partition(std::size_t i) const { return parts_[i]; }
  /// Index range [begin, end) of the partitions of weight t.
  std::size_t degree_begin(int t) const { return degree_offset_[t]; }
  std::size_t degree_end(int t) const { return degree_offset_[t + 1]; }
  /// Index of kappa, or -1 when it is not in the table.
  long index_of(const Partition& kappa) const;

  /// log(C_kappa(I_n) / t!) for the table's n = n_vars.
  double log_unit_coefficient(std::size_t i) const { return log_unit_coef_[i]; }

  /// Normalized values J_kappa(x/s)/J_kappa(1,...,1) for every partition, where
  /// s = max|x_i|; returns log s (or -inf when x = 0). Values are bounded by 1
  /// in magnitude. Extra trailing variables are treated as zero.
  double normalized_jack(std::span<const double> x, std::vector<double>& out) const;

 private:
  struct Entry {
    std::int32_t child;
    std::int32_t power;
    double weight;
  };

  int n_vars_;
  int max_degree_;
  std::vector<Partition> parts_;
  std::vector<std::size_t> degree_offset_;
  std::map<std::vector<int>, std::size_t> index_;
  std::vector<double> log_unit_coef_;
  // level j (1-based) -> CSR over partitions of entries
  std::vector<std::vector<std::size_t>> level_offset_;
  std::vector<std::vector<Entry>> level_entries_;
};

/// Outcome of a truncated zonal series.
struct SeriesResult {
  SignedLogValue value;
  int max_degree = 0;
  /// |term(t_max)| / |partial sum through t_max|.
  double last_increment = 0.0;
  /// Smallest degree from which every relative increment stays below tolerance
  /// (max_degree + 1 when the last increment is above it).
  int settled_degree = 0;
  bool converged = false;
};

/// Per-degree weight f(t, tr X).
using DegreeWeight = std::function<SignedLogValue(int degree, double trace)>;

/// Evaluator of sum_t f(t, tr X)/t! sum_{kappa |- t} C_kappa(X)/(a)_kappa for a
/// fixed variable count, maximal degree and denominator parameter a.
class ZonalSeries {
 public:
  /// `denominator` is the a of (a)_kappa; std::nullopt drops that factor.
  ZonalSeries(int n_vars, int max_degree, std::optional<double> denominator);

  int n_vars() const noexcept { return table_->n_vars(); }
  int max_degree() const noexcept { return table_->max_degree(); }
  std::optional<double> denominator() const noexcept { return denominator_; }
  const ZonalTable& table() const noexcept { return *table_; }

  /// sum_{kappa |- t} C_kappa(x) / (t! (a)_kappa) for t = 0..max_degree.
  std::vector<SignedLogValue> degree_sums(std::span<const double> eigenvalues, int max_degree) const;

  SeriesResult sum(std::span<const double> eigenvalues, const DegreeWeight& weight, int max_degree,
                   double tolerance) const;
  /// Same with weights already evaluated for t = 0..max_degree.
  SeriesResult sum(std::span<const double> eigenvalues, std::span<const SignedLogValue> weights,
                   double tolerance) const;

 private:
  std::shared_ptr<const ZonalTable> table_;
  std::optional<double> denominator_;
  std::vector<double> degree_shift_;  // per degree
  std::vector<double> coefficient_;   // per partition, relative to degree_shift_
};

/// Combines per-degree terms into a SeriesResult with increment diagnostics.
SeriesResult accumulate_series(std::span<const SignedLogValue> terms, double tolerance);

struct SeriesSpec {
  std::optional<double> denominator;
  std::vector<double> eigenvalues;
  DegreeWeight weight;
  int max_degree = 160;
  double tolerance = 1e-12;
};

/// One-shot evaluation; builds its own table.
SeriesResult weighted_zonal_series(const SeriesSpec& spec);

/// Zonal polynomial C_kappa at a symmetric matrix with the given eigenvalues,
/// normalized so that sum_{kappa |- t} C_kappa(X) = (tr X)^t.
double zonal(const Partition& kappa, std::span<const double> eigenvalues);
SignedLogValue log_zonal(const Partition& kappa, std::span<const double> eigenvalues);

}  // namespace pwshape
