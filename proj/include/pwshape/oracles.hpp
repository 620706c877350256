#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pwshape/densities.hpp"

namespace pwshape {

struct OracleReport {
  std::string name;
  double computed = 0.0;
  double reference = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  /// Sample count (Monte Carlo) or node count (quadrature); 0 when not applicable.
  long long samples = 0;
  double std_error = 0.0;
  bool pass = false;
  std::string note;
  /// Candidate runs whose failure is an expected outcome (one radial
  /// convention is supposed to fail); they do not affect the exit status.
  bool informational = false;
};

/// Fills rel_error and pass from computed/reference/tolerance.
OracleReport make_report(std::string name, double computed, double reference, double tolerance,
                         std::string note = {});

/// int_0^inf r^e h^{(2t)}(rA + B) dr by adaptive quadrature (sign/log form).
SignedLogValue radial_quadrature(double e, const Generator& gen, int M, double A, double B, int t);

enum class McProposal {
  uniform,
  /// Half uniform on the chart sphere, half the projected standard Wishart
  /// law (full-rank V only), combined with the balance heuristic.
  defensive_mixture
};

struct McOptions {
  long long samples = 1'000'000;
  std::uint64_t seed = 20100101;
  int shards = 8;
  McProposal proposal = McProposal::defensive_mixture;
  double tolerance = 0.02;
};

/// Monte Carlo estimate of the integral over the shape chart of a density
/// given in chart coordinates (log f including log J(u)). Shapes are built
/// with shape_from_chart; points outside the PSD support count as zero.
/// The report's `note` carries the acceptance rate and the uniform-only
/// estimate. Throws DomainError if the acceptance rate is below 1e-4.
OracleReport mc_normalization(const std::function<double(const PseudoWishartShape&)>& log_density, int N, int K,
                              const McOptions& opts = {});

struct FiniteDifference {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/// k-th derivative by central differences with Richardson extrapolation over
/// a shrinking step ladder; returns the entry with the smallest error
/// estimate. Throws NonConvergenceError if no plateau is found.
FiniteDifference finite_difference(const std::function<double(double)>& f, double y, int k, double h0 = 0.0,
                                   int levels = 12);

struct TruncationRow {
  int t_max = 0;
  double value = 0.0;
  double increment = 0.0;  // |value - previous value|, 0 for the first row
};

struct TruncationStudy {
  std::vector<TruncationRow> rows;
  /// First t_max after which every increment stays below the threshold (-1 if never).
  int stabilized_at = -1;
};

TruncationStudy truncation_study(const std::function<double(int)>& log_density_at, const std::vector<int>& t_grid,
                                 double threshold = 1e-6);

/// Quick run of the library's oracles (zonal identities, derivatives, mass
/// identity, radial weights, normalization of the N = 3, K = 2 central case).
std::vector<OracleReport> self_check(long long mc_samples = 200'000, std::uint64_t seed = 20100101);

}  // namespace pwshape
