#include "pwshape/inference.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <chrono>
#include <cmath>
#include <limits>
#include <tuple>

#include "pwshape/errors.hpp"

namespace pwshape {

Sample make_sample(const std::vector<LandmarkConfig>& configs, const MatrixXd& theta, VStarMode mode) {
  Sample s;
  s.reserve(configs.size());
  for (const auto& c : configs) {
    Specimen sp;
    sp.id = c.id;
    sp.group = c.group;
    sp.Y = preshape(c, theta);
    try {
      sp.shape = pw_coordinates(sp.Y, mode);
    } catch (const Error& e) {
      throw DataError(std::string(e.what()) + " (specimen " + c.id + ")");
    }
    s.push_back(std::move(sp));
  }
  return s;
}

DensityFn density_for(const ModelSpec& model) {
  const bool iso = std::holds_alternative<double>(model.sigma) &&
                   (model.theta.size() == 0 || model.theta.isIdentity(1e-14));
  if (std::holds_alternative<GaussianFamily>(model.generator)) return kotz_t1_shape_logdensity;
  if (const auto* kz = std::get_if<KotzFamily>(&model.generator)) {
    if (kz->T == 1.0) return kotz_t1_shape_logdensity;
    if (iso && kz->R == 0.5 && kz->T == 2.0) return kotz_t2_shape_logdensity;
    if (iso && kz->R == 0.5 && kz->T == 3.0) return kotz_t3_shape_logdensity;
    return kotz_general_shape_logdensity;
  }
  return shape_logdensity;
}

double log_likelihood(const Sample& sample, const ModelSpec& model, const DensityFn& density,
                      LikelihoodDiagnostics* diag) {
  LikelihoodDiagnostics local;
  double total = 0.0;
  for (const auto& sp : sample) {
    DensityDiagnostics dd;
    SignedLogValue v;
    try {
      v = density(sp.shape, model, &dd);
    } catch (const Error& e) {
      throw NonConvergenceError(std::string(e.what()) + " (specimen " + sp.id + ")");
    }
    if (!dd.series.converged) {
      local.series_converged = false;
      if (dd.series.last_increment > local.worst_increment) {
        local.worst_increment = dd.series.last_increment;
        local.worst_specimen = sp.id;
      }
    }
    if (v.sign() <= 0 || !std::isfinite(v.log_magnitude())) {
      local.infeasible = true;
      total = -std::numeric_limits<double>::infinity();
      continue;
    }
    total += v.log_magnitude();
  }
  if (diag) *diag = local;
  return total;
}

namespace {

VectorXd flatten(const MatrixXd& mu) {
  VectorXd x(mu.size());
  for (Eigen::Index i = 0; i < mu.rows(); ++i)
    for (Eigen::Index j = 0; j < mu.cols(); ++j) x(i * mu.cols() + j) = mu(i, j);
  return x;
}

MatrixXd unflatten(const VectorXd& x, Eigen::Index rows, Eigen::Index cols) {
  MatrixXd mu(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) mu(i, j) = x(i * cols + j);
  return mu;
}

}  // namespace

FitResult fit_mle(const Sample& sample, const ModelSpec& model, const DensityFn& density,
                  const NelderMeadOptions& opts) {
  if (sample.empty()) throw DataError("fit_mle: empty sample");
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index rows = sample[0].Y.rows(), cols = sample[0].Y.cols();
  MatrixXd start = MatrixXd::Zero(rows, cols);
  for (const auto& sp : sample) {
    if (sp.Y.rows() != rows || sp.Y.cols() != cols) throw DataError("fit_mle: specimens differ in N or K");
    start += sp.Y;
  }
  start /= static_cast<double>(sample.size());

  ModelSpec work = model;
  if (!work.engine || work.engine->n_vars() != cols || work.engine->max_degree() < work.truncation)
    prepare(work, static_cast<int>(cols));

  auto objective = [&](const VectorXd& x) {
    work.mu = unflatten(x, rows, cols);
    LikelihoodDiagnostics d;
    const double ll = log_likelihood(sample, work, density, &d);
    if (d.infeasible || !std::isfinite(ll)) return std::numeric_limits<double>::infinity();
    return -ll;
  };
  const NelderMeadResult nm = nelder_mead(objective, flatten(start), opts);

  FitResult fr;
  fr.mu_hat = unflatten(nm.x, rows, cols);
  work.mu = fr.mu_hat;
  fr.logL = log_likelihood(sample, work, density, &fr.at_optimum);
  fr.n = static_cast<int>(sample.size());
  fr.n_params = static_cast<int>(rows * cols);
  fr.bic_star = modified_bic(fr.logL, fr.n, fr.n_params);
  fr.iterations = nm.iterations;
  fr.evaluations = nm.evaluations;
  fr.truncation = model.truncation;
  fr.optimizer_converged = nm.converged;
  fr.restarted = nm.restarted;
  for (std::size_t i = 0; i < nm.trace.size(); ++i) fr.trace.emplace_back(static_cast<int>(i), -nm.trace[i]);
  fr.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return fr;
}

double modified_bic(double logL, int n, int n_params) {
  if (n < 1) throw DomainError("modified_bic: sample size must be positive");
  return -2.0 * logL + n_params * (std::log(n + 2.0) - std::log(24.0));
}

EvidenceGrade evidence_grade(double delta_bic) {
  if (!(delta_bic >= 0.0)) throw DomainError("evidence_grade: difference must be nonnegative");
  if (delta_bic <= 2.0) return EvidenceGrade::weak;
  if (delta_bic <= 6.0) return EvidenceGrade::positive;
  if (delta_bic <= 10.0) return EvidenceGrade::strong;
  return EvidenceGrade::very_strong;
}

std::string to_string(EvidenceGrade g) {
  switch (g) {
    case EvidenceGrade::weak: return "weak";
    case EvidenceGrade::positive: return "positive";
    case EvidenceGrade::strong: return "strong";
    case EvidenceGrade::very_strong: return "very strong";
  }
  return "";
}

double chi2_sf(double x, int k) {
  if (k < 1) throw DomainError("chi2_sf: degrees of freedom must be positive");
  if (!(x >= 0.0)) throw DomainError("chi2_sf: x must be nonnegative");
  if (x == 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * k, 0.5 * x);
}

namespace {

// Pooled sample in a fixed order (by group label, then specimen order) so the
// result does not depend on which group is called first.
Sample pooled(const Sample& a, const Sample& b, bool a_first) {
  Sample out = a_first ? a : b;
  const Sample& rest = a_first ? b : a;
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

}  // namespace

LrtResult lrt_mean_shape(const Sample& group1, const Sample& group2, const ModelSpec& model, const DensityFn& density,
                         const NelderMeadOptions& opts) {
  if (group1.empty() || group2.empty()) throw DataError("lrt_mean_shape: empty group");
  if (group1[0].Y.rows() != group2[0].Y.rows() || group1[0].Y.cols() != group2[0].Y.cols())
    throw DataError("lrt_mean_shape: groups differ in N or K");
  ModelSpec work = model;
  prepare(work, static_cast<int>(group1[0].Y.cols()));
  LrtResult r;
  r.fit_group1 = fit_mle(group1, work, density, opts);
  r.fit_group2 = fit_mle(group2, work, density, opts);
  const bool g1_first = std::tie(group1.front().group, group1.front().id) <= std::tie(group2.front().group, group2.front().id);
  r.fit_pooled = fit_mle(pooled(group1, group2, g1_first), work, density, opts);
  r.logL_h1 = r.fit_group1.logL + r.fit_group2.logL;
  r.logL_h0 = r.fit_pooled.logL;
  r.raw_statistic = 2.0 * r.logL_h1 - 2.0 * r.logL_h0;
  r.statistic = std::max(0.0, r.raw_statistic);
  r.clamped = r.raw_statistic < 0.0;
  r.df = static_cast<int>(group1[0].Y.size());
  r.p_value = chi2_sf(r.statistic, r.df);
  return r;
}

}  // namespace pwshape
