#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pwshape/densities.hpp"
#include "pwshape/optimize.hpp"

namespace pwshape {

struct Specimen {
  std::string id;
  std::string group;
  MatrixXd Y;  // preshape
  PseudoWishartShape shape;
};

using Sample = std::vector<Specimen>;

Sample make_sample(const std::vector<LandmarkConfig>& configs, const MatrixXd& theta = MatrixXd(),
                   VStarMode mode = VStarMode::cholesky);

using DensityFn =
    std::function<SignedLogValue(const PseudoWishartShape&, const ModelSpec&, DensityDiagnostics*)>;

/// Closed form used for fitting a generator: the T = 2 / T = 3 displays for
/// isotropic R = 1/2 Kotz models, the T = 1 form for Gaussian-type models,
/// the double series for other integer T and the general theorem otherwise.
DensityFn density_for(const ModelSpec& model);

struct LikelihoodDiagnostics {
  bool series_converged = true;
  double worst_increment = 0.0;
  std::string worst_specimen;
  /// Set when some specimen density came out nonpositive (log-likelihood is then -inf).
  bool infeasible = false;
};

/// Sum of log-densities in specimen order.
double log_likelihood(const Sample& sample, const ModelSpec& model, const DensityFn& density,
                      LikelihoodDiagnostics* diag = nullptr);

struct FitResult {
  MatrixXd mu_hat;
  double logL = 0.0;
  double bic_star = 0.0;
  int iterations = 0;
  int evaluations = 0;
  double wall_time_s = 0.0;
  /// (iteration, best logL so far)
  std::vector<std::pair<int, double>> trace;
  int truncation = 0;
  int n = 0;
  int n_params = 0;
  bool optimizer_converged = false;
  bool restarted = false;
  LikelihoodDiagnostics at_optimum;
};

/// Maximizes the log-likelihood over mu, starting from the mean preshape.
FitResult fit_mle(const Sample& sample, const ModelSpec& model, const DensityFn& density,
                  const NelderMeadOptions& opts = {});

/// BIC* = -2 logL + n_p (log(n + 2) - log 24).
double modified_bic(double logL, int n, int n_params);

enum class EvidenceGrade { weak, positive, strong, very_strong };
/// 0-2 weak, 2-6 positive, 6-10 strong, above 10 very strong; boundaries go to the lower band.
EvidenceGrade evidence_grade(double delta_bic);
std::string to_string(EvidenceGrade g);

/// Upper tail probability of a chi-square with k degrees of freedom.
double chi2_sf(double x, int k);

struct LrtResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  double logL_h0 = 0.0;
  double logL_h1 = 0.0;
  /// True when a small negative statistic from optimizer noise was set to 0.
  bool clamped = false;
  double raw_statistic = 0.0;
  FitResult fit_group1, fit_group2, fit_pooled;
};

/// Wilks test of a common mean shape for two groups.
LrtResult lrt_mean_shape(const Sample& group1, const Sample& group2, const ModelSpec& model, const DensityFn& density,
                         const NelderMeadOptions& opts = {});

}  // namespace pwshape
