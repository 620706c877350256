#include "pwshape/densities.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "pwshape/errors.hpp"
#include "pwshape/partition.hpp"
#include "pwshape/quadrature.hpp"

namespace pwshape {

namespace {

const double kLogPi = std::log(std::numbers::pi);

double log_binomial(int k, int m) { return std::lgamma(k + 1.0) - std::lgamma(m + 1.0) - std::lgamma(k - m + 1.0); }

// Quantities shared by all density forms for one shape and one model.
struct Reduced {
  double A = 0.0;  // tr Sigma^{-1} W
  double B = 0.0;  // tr Omega
  double log_det_sigma = 0.0;
  std::vector<double> eig;  // spectrum of Theta^{-1/2} mu' Sigma^{-1} W Sigma^{-1} mu Theta^{-1/2}
  bool central = true;
};

std::vector<double> sym_eigenvalues(const MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  double top = 0.0;
  for (double v : out) top = std::max(top, std::abs(v));
  // the argument is positive semidefinite; rounding can leave tiny negatives
  for (double& v : out)
    if (v < 0.0 && v > -1e-10 * top) v = 0.0;
  return out;
}

bool is_identity(const MatrixXd& theta) { return theta.size() == 0 || theta.isIdentity(1e-14); }

Reduced reduce(const MatrixXd& W, int K, const ModelSpec& model) {
  const int p = static_cast<int>(W.rows());
  Reduced red;
  MatrixXd sinv_w, sinv_mu;
  MatrixXd mu = model.mu.size() ? model.mu : MatrixXd::Zero(p, K);
  if (mu.rows() != p || mu.cols() != K) throw DimensionError("density: mu must be (N-1) x K");
  if (const double* s2 = std::get_if<double>(&model.sigma)) {
    if (!(*s2 > 0.0)) throw DomainError("density: sigma^2 must be positive");
    red.log_det_sigma = p * std::log(*s2);
    sinv_w = W / *s2;
    sinv_mu = mu / *s2;
  } else {
    const MatrixXd& S = std::get<MatrixXd>(model.sigma);
    if (S.rows() != p || S.cols() != p) throw DimensionError("density: Sigma must be (N-1) x (N-1)");
    Eigen::LLT<MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) throw NotPositiveDefiniteError("density: Sigma is not positive definite");
    red.log_det_sigma = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    sinv_w = llt.solve(W);
    sinv_mu = llt.solve(mu);
  }
  red.A = sinv_w.trace();
  if (!(red.A > 0.0)) throw DomainError("density: tr Sigma^{-1} W must be positive");
  MatrixXd theta_isqrt = MatrixXd::Identity(K, K);
  if (model.theta.size()) {
    if (model.theta.rows() != K || model.theta.cols() != K) throw DimensionError("density: Theta must be K x K");
    theta_isqrt = inv_sqrt_pd(model.theta);
  }
  const MatrixXd mt = sinv_mu * theta_isqrt;   // Sigma^{-1} mu Theta^{-1/2}
  red.B = (theta_isqrt * mu.transpose() * mt).trace();
  red.central = mu.isZero(0.0);
  if (red.central) {
    red.eig.assign(K, 0.0);
  } else {
    red.eig = sym_eigenvalues(mt.transpose() * W * mt);
  }
  return red;
}

const ZonalSeries& engine_for(const ModelSpec& model, int K, std::unique_ptr<ZonalSeries>& local) {
  if (model.truncation < 0) throw DomainError("density: negative truncation");
  const auto& e = model.engine;
  if (e && e->n_vars() == K && e->max_degree() >= model.truncation && e->denominator() &&
      *e->denominator() == 0.5 * K)
    return *e;
  local = std::make_unique<ZonalSeries>(K, model.truncation, 0.5 * K);
  return *local;
}

// Sum over t of weight(t) * sum_kappa C_kappa(X)/(t! (K/2)_kappa). Weights are
// only requested for degrees that can contribute.
template <typename WeightFn>
SeriesResult run_series(const ModelSpec& model, int K, const std::vector<double>& eig, bool central, WeightFn&& weight,
                        DensityDiagnostics* diag) {
  std::unique_ptr<ZonalSeries> local;
  const ZonalSeries& engine = engine_for(model, K, local);
  const int tmax = central ? 0 : model.truncation;
  std::vector<SignedLogValue> w(tmax + 1);
  for (int t = 0; t <= tmax; ++t) w[t] = weight(t);
  SeriesResult res = engine.sum(eig, w, model.tolerance);
  if (central) {
    res.max_degree = model.truncation;
    res.converged = true;
  }
  if (diag) diag->series = res;
  return res;
}

std::function<SignedLogValue(int, double)> derivative_of(const Generator& gen, int M) {
  if (std::holds_alternative<GaussianFamily>(gen)) return [M](int k, double y) { return log_gaussian_h_deriv(M, k, y); };
  if (const auto* kz = std::get_if<KotzFamily>(&gen)) {
    KotzGenerator g{kz->T, kz->R, M};
    validate(g);
    return [g](int k, double y) { return log_kotz_h_deriv(g, k, y); };
  }
  const auto& c = std::get<CustomFamily>(gen);
  if (!c.log_deriv) throw DomainError("density: custom generator has no derivative function");
  return c.log_deriv;
}

double shape_prefactor(const PseudoWishartShape& s, const Reduced& red) {
  return 0.5 * s.n * s.K * kLogPi + 0.5 * (s.K - s.N) * s.log_wstar + s.log_jacobian - log_mv_gamma(s.n, 0.5 * s.K) -
         0.5 * s.K * red.log_det_sigma;
}

void require_isotropic(const ModelSpec& model, const char* who) {
  if (!std::holds_alternative<double>(model.sigma))
    throw DomainError(std::string(who) + ": needs an isotropic Sigma = sigma^2 I");
  if (!is_identity(model.theta)) throw DomainError(std::string(who) + ": needs Theta = I");
}

void require_kotz(const ModelSpec& model, double T, double R, const char* who) {
  bool ok = false;
  if (std::holds_alternative<GaussianFamily>(model.generator)) ok = T == 1.0 && (R == 0.0 || R == 0.5);
  if (const auto* kz = std::get_if<KotzFamily>(&model.generator)) ok = kz->T == T && (R == 0.0 || kz->R == R);
  if (!ok) throw DomainError(std::string(who) + ": generator does not match this closed form");
}

// Inputs of the isotropic displays: trW, B' = tr mu'mu/(2 sigma^2), spectrum of mu'W mu/(2 sigma^2).
struct IsoReduced {
  double trace_w = 0.0, b = 0.0, sigma2 = 1.0;
  std::vector<double> eig;
  bool central = true;
};

IsoReduced iso_reduce(const PseudoWishartShape& s, const ModelSpec& model) {
  IsoReduced r;
  r.sigma2 = std::get<double>(model.sigma);
  if (!(r.sigma2 > 0.0)) throw DomainError("density: sigma^2 must be positive");
  const int p = s.N - 1;
  const MatrixXd mu = model.mu.size() ? model.mu : MatrixXd::Zero(p, s.K);
  if (mu.rows() != p || mu.cols() != s.K) throw DimensionError("density: mu must be (N-1) x K");
  r.trace_w = s.W.trace();
  r.b = mu.squaredNorm() / (2.0 * r.sigma2);
  r.central = mu.isZero(0.0);
  r.eig = r.central ? std::vector<double>(s.K, 0.0) : sym_eigenvalues(mu.transpose() * s.W * mu / (2.0 * r.sigma2));
  return r;
}

// Common constant of the isotropic displays without the power of 2 and the M factors.
double iso_constant(const PseudoWishartShape& s, const IsoReduced& r, double e0) {
  const int M = (s.N - 1) * s.K;
  return 0.5 * (s.n * s.K - M) * kLogPi + 0.5 * (s.K - s.N) * s.log_wstar + s.log_jacobian - r.b -
         log_mv_gamma(s.n, 0.5 * s.K) - 0.5 * (M - 2.0 - 2.0 * e0) * std::log(r.sigma2);
}

SignedLogValue finish(const SeriesResult& res, double constant) { return res.value.scaled_by_log(constant); }

}  // namespace

void prepare(ModelSpec& model, int K) {
  model.engine = std::make_shared<const ZonalSeries>(K, model.truncation, 0.5 * K);
}

KotzGenerator kotz_parameters(const Generator& gen, int M) {
  if (std::holds_alternative<GaussianFamily>(gen)) return {1.0, 0.5, M};
  if (const auto* kz = std::get_if<KotzFamily>(&gen)) return {kz->T, kz->R, M};
  throw DomainError("kotz_parameters: custom generator");
}

std::string generator_name(const Generator& gen) {
  if (std::holds_alternative<GaussianFamily>(gen)) return "gaussian";
  if (std::holds_alternative<KotzFamily>(gen)) return "kotz";
  return std::get<CustomFamily>(gen).name;
}

double radial_exponent(const PseudoWishartShape& s, RadialConvention convention) {
  const double shift = 0.5 * s.n * (s.K - s.N);
  return convention == RadialConvention::printed ? s.m - shift : s.m + shift;
}

SignedLogValue radial_integral_kotz(const KotzGenerator& gen, double e, int t, double A, double B) {
  validate(gen);
  if (!has_integer_shape(gen)) throw DomainError("radial_integral_kotz: T must be a positive integer");
  if (!(A > 0.0) || B < 0.0) throw DomainError("radial_integral_kotz: need A > 0 and B >= 0");
  const int T = static_cast<int>(gen.T), k = 2 * t, q = T - 1;
  const double R = gen.R;
  const long double alpha = static_cast<long double>(e) + 1.0L;
  if (!(alpha > 0.0L)) throw DomainError("radial integral diverges at r = 0");
  // With z = RAr and s = Ry = z + RB,
  //   h^{(k)}(y) = c e^{-Ry} R^{k-q} Q(s),  Q(s) = sum_v C(k,v) (T-1)_v (-1)^v s^{q-v},
  // so the integral is c e^{-RB} R^{k-q} Gamma(e+1) (RA)^{-(e+1)} E[Q(Z + RB)]
  // with Z ~ Gamma(e+1). Q is re-expanded around s = k (integer coefficients)
  // and the expectation taken through central moments of Z; the expanded
  // binomial form loses several digits near s = k.
  std::vector<long double> c(q + 1, 0.0L);  // Q in powers of s
  long double falling = 1.0L, binom = 1.0L;
  for (int v = 0; v <= std::min(k, q); ++v) {
    if (v > 0) {
      falling *= T - v;
      binom = binom * (k - v + 1) / v;
    }
    c[q - v] = (v % 2 ? -1.0L : 1.0L) * binom * falling;
  }
  std::vector<long double> a(q + 1, 0.0L);  // Q in powers of u = s - k
  for (int p = 0; p <= q; ++p) {
    long double bc = 1.0L;  // C(p, j)
    for (int j = 0; j <= p; ++j) {
      a[j] += c[p] * bc * std::pow(static_cast<long double>(k), p - j);
      bc = bc * (p - j) / (j + 1);
    }
  }
  // central moments of Gamma(alpha): m_{n+1} = n (m_n + alpha m_{n-1})
  std::vector<long double> m(q + 1, 0.0L);
  m[0] = 1.0L;
  for (int n = 1; n < q; ++n) m[n + 1] = n * (m[n] + alpha * m[n - 1]);
  const long double d = (alpha - k) + static_cast<long double>(R) * B;  // E[Z + RB] - k
  long double expect = 0.0L;
  for (int j = 0; j <= q; ++j) {
    long double ej = 0.0L, bc = 1.0L;  // E[(W + d)^j], W = Z - alpha
    for (int i = 0; i <= j; ++i) {
      ej += bc * std::pow(d, j - i) * m[i];
      bc = bc * (j - i) / (i + 1);
    }
    expect += a[j] * ej;
  }
  if (expect == 0.0L) return SignedLogValue::zero();
  const double log_mag = kotz_log_constant(gen) - R * B + (k - q) * std::log(R) + std::lgamma(e + 1.0) -
                         (e + 1.0) * std::log(R * A) + static_cast<double>(std::log(std::fabs(expect)));
  return SignedLogValue::from_log(log_mag, expect > 0 ? 1 : -1);
}

SignedLogValue radial_integral_quadrature(const Generator& gen, int M, double e, int t, double A, double B,
                                          bool* converged) {
  if (!(e > -1.0)) throw DomainError("radial integral diverges at r = 0");
  if (!(A > 0.0) || B < 0.0) throw DomainError("radial_integral_quadrature: need A > 0 and B >= 0");
  auto h = derivative_of(gen, M);
  double scale = std::max(e, 1.0) / A;
  if (std::holds_alternative<GaussianFamily>(gen)) scale = std::max(e, 1.0) / (0.5 * A);
  if (const auto* kz = std::get_if<KotzFamily>(&gen)) scale = std::max(e + kz->T - 1.0, 1.0) / (kz->R * A);
  auto integrand = [&](double r) {
    if (r <= 0.0) return SignedLogValue::zero();
    return h(2 * t, r * A + B).scaled_by_log(e * std::log(r));
  };
  const LogQuadratureResult q = integrate_half_line(integrand, scale, 1e-12);
  if (converged) *converged = q.converged;
  if (!q.converged && !converged) throw NonConvergenceError("radial integral quadrature did not converge");
  return q.value;
}

SignedLogValue size_shape_logdensity(const MatrixXd& V, int K, const ModelSpec& model, VStarMode mode,
                                     DensityDiagnostics* diag) {
  const int p = static_cast<int>(V.rows());
  const int N = p + 1, n = shape_rank(N, K), M = p * K;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(V, Eigen::EigenvaluesOnly);
  const VectorXd d = es.eigenvalues().reverse();
  if (!(d(n - 1) > 1e-10 * d(0))) throw RankDeficientError("size_shape_logdensity: V has rank below n");
  double log_vstar = 0.0;
  if (mode == VStarMode::cholesky) {
    Eigen::LLT<MatrixXd> llt(V.topLeftCorner(n, n));
    if (llt.info() != Eigen::Success) throw SingularBlockError("size_shape_logdensity: V11 is singular");
    log_vstar = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  } else {
    log_vstar = d.head(n).array().log().sum();
  }
  const Reduced red = reduce(V, K, model);
  auto h = derivative_of(model.generator, M);
  const double y = red.A + red.B;
  const SeriesResult res = run_series(
      model, K, red.eig, red.central, [&](int t) { return h(2 * t, y); }, diag);
  const double constant = 0.5 * n * K * kLogPi + 0.5 * (K - N) * log_vstar - log_mv_gamma(n, 0.5 * K) -
                          0.5 * K * red.log_det_sigma;
  return finish(res, constant);
}

namespace {

SignedLogValue theorem_density(const PseudoWishartShape& s, const ModelSpec& model, const Reduced& red,
                               DensityDiagnostics* diag) {
  const int M = (s.N - 1) * s.K;
  const double e0 = radial_exponent(s, model.convention);
  bool closed = model.radial != RadialMethod::quadrature && !std::holds_alternative<CustomFamily>(model.generator) &&
                has_integer_shape(kotz_parameters(model.generator, M));
  if (model.radial == RadialMethod::closed_form && !closed)
    throw DomainError("shape_logdensity: no closed form for this generator");
  KotzGenerator kg;
  if (closed) kg = kotz_parameters(model.generator, M);
  bool used_quad = false;
  const SeriesResult res = run_series(
      model, s.K, red.eig, red.central,
      [&](int t) {
        if (closed) return radial_integral_kotz(kg, e0 + t, t, red.A, red.B);
        used_quad = true;
        return radial_integral_quadrature(model.generator, M, e0 + t, t, red.A, red.B);
      },
      diag);
  if (diag) diag->used_quadrature = used_quad;
  return finish(res, shape_prefactor(s, red));
}

}  // namespace

SignedLogValue shape_logdensity(const PseudoWishartShape& shape, const ModelSpec& model, DensityDiagnostics* diag) {
  const Reduced red = reduce(shape.W, shape.K, model);
  return theorem_density(shape, model, red, diag);
}

SignedLogValue isotropic_shape_logdensity(const PseudoWishartShape& s, const ModelSpec& model,
                                          DensityDiagnostics* diag) {
  const double* s2 = std::get_if<double>(&model.sigma);
  if (!s2) throw DomainError("isotropic_shape_logdensity: needs an isotropic Sigma = sigma^2 I");
  if (!(*s2 > 0.0)) throw DomainError("density: sigma^2 must be positive");
  const int p = s.N - 1, K = s.K;
  const MatrixXd mu = model.mu.size() ? model.mu : MatrixXd::Zero(p, K);
  if (mu.rows() != p || mu.cols() != K) throw DimensionError("density: mu must be (N-1) x K");
  Reduced red;
  red.log_det_sigma = p * std::log(*s2);
  red.A = s.W.trace() / *s2;
  const MatrixXd theta_inv = model.theta.size() ? MatrixXd(model.theta.inverse()) : MatrixXd::Identity(K, K);
  // Omega = mu Theta^{-1} mu' / sigma^2 and C_kappa(Omega W / sigma^2)
  const MatrixXd omega = mu * theta_inv * mu.transpose() / *s2;
  red.B = omega.trace();
  red.central = mu.isZero(0.0);
  if (red.central) {
    red.eig.assign(K, 0.0);
  } else {
    const MatrixXd ti = model.theta.size() ? inv_sqrt_pd(model.theta) : MatrixXd::Identity(K, K);
    red.eig = sym_eigenvalues(ti * mu.transpose() * s.W * mu * ti / (*s2 * *s2));
  }
  return theorem_density(s, model, red, diag);
}

double central_invariant_logdensity(const PseudoWishartShape& s, const std::variant<double, MatrixXd>& sigma,
                                    RadialConvention convention) {
  ModelSpec model;
  model.sigma = sigma;
  model.convention = convention;
  return central_invariant_logdensity(s, model);
}

double central_invariant_logdensity(const PseudoWishartShape& s, const ModelSpec& model) {
  ModelSpec central = model;
  central.mu.resize(0, 0);
  const Reduced red = reduce(s.W, s.K, central);
  const double e0 = radial_exponent(s, model.convention);
  return (0.5 * s.n * s.K - e0 - 1.0) * kLogPi + std::lgamma(e0 + 1.0) - log_mv_gamma(s.n, 0.5 * s.K) -
         0.5 * s.K * red.log_det_sigma + 0.5 * (s.K - s.N) * s.log_wstar + s.log_jacobian - (e0 + 1.0) * std::log(red.A);
}

SignedLogValue kotz_t1_shape_logdensity(const PseudoWishartShape& s, const ModelSpec& model,
                                        DensityDiagnostics* diag) {
  require_kotz(model, 1.0, 0.0, "kotz_t1_shape_logdensity");
  const double R = kotz_parameters(model.generator, 1).R;
  Reduced red = reduce(s.W, s.K, model);
  for (double& v : red.eig) v *= R;
  const int M = (s.N - 1) * s.K;
  const double e0 = radial_exponent(s, model.convention);
  const double la = std::log(red.A);
  const SeriesResult res = run_series(
      model, s.K, red.eig, red.central,
      [&](int t) { return SignedLogValue::from_log(std::lgamma(e0 + t + 1.0) - (e0 + t + 1.0) * la); }, diag);
  const double constant = 0.5 * (s.n * s.K - M) * kLogPi + 0.5 * (s.K - s.N) * s.log_wstar + s.log_jacobian -
                          R * red.B - (e0 + 1.0 - 0.5 * M) * std::log(R) - log_mv_gamma(s.n, 0.5 * s.K) -
                          0.5 * s.K * red.log_det_sigma;
  return finish(res, constant);
}

SignedLogValue gaussian_isotropic_shape_logdensity(const PseudoWishartShape& s, const ModelSpec& model,
                                                   DensityDiagnostics* diag) {
  require_kotz(model, 1.0, 0.5, "gaussian_isotropic_shape_logdensity");
  require_isotropic(model, "gaussian_isotropic_shape_logdensity");
  const IsoReduced r = iso_reduce(s, model);
  const int M = (s.N - 1) * s.K;
  const double e0 = radial_exponent(s, model.convention);
  const double lt = std::log(r.trace_w);
  const SeriesResult res = run_series(
      model, s.K, r.eig, r.central,
      [&](int t) { return SignedLogValue::from_log(std::lgamma(e0 + t + 1.0) - (e0 + t + 1.0) * lt); }, diag);
  return finish(res, iso_constant(s, r, e0) - (0.5 * M - 1.0 - e0) * std::numbers::ln2);
}

SignedLogValue kotz_t2_shape_logdensity(const PseudoWishartShape& s, const ModelSpec& model,
                                        DensityDiagnostics* diag) {
  require_kotz(model, 2.0, 0.5, "kotz_t2_shape_logdensity");
  require_isotropic(model, "kotz_t2_shape_logdensity");
  const IsoReduced r = iso_reduce(s, model);
  const int M = (s.N - 1) * s.K;
  const double e0 = radial_exponent(s, model.convention);
  const double lt = std::log(r.trace_w);
  const SeriesResult res = run_series(
      model, s.K, r.eig, r.central,
      [&](int t) {
        const double a = e0 + t + 1.0;
        // (B - 2t) Gamma(a) + Gamma(a+1)
        const std::vector<SignedLogValue> parts = {
            SignedLogValue::from_value(r.b - 2.0 * t).scaled_by_log(std::lgamma(a)),
            SignedLogValue::from_log(std::lgamma(a + 1.0))};
        return signed_log_sum(parts).scaled_by_log(-a * lt);
      },
      diag);
  return finish(res, iso_constant(s, r, e0) - (0.5 * M - 2.0 - e0) * std::numbers::ln2 - std::log(M));
}

SignedLogValue kotz_t3_shape_logdensity(const PseudoWishartShape& s, const ModelSpec& model,
                                        DensityDiagnostics* diag) {
  require_kotz(model, 3.0, 0.5, "kotz_t3_shape_logdensity");
  require_isotropic(model, "kotz_t3_shape_logdensity");
  const IsoReduced r = iso_reduce(s, model);
  const int M = (s.N - 1) * s.K;
  const double e0 = radial_exponent(s, model.convention);
  const double lt = std::log(r.trace_w);
  const SeriesResult res = run_series(
      model, s.K, r.eig, r.central,
      [&](int t) {
        const double a = e0 + t + 1.0, d = r.b - 2.0 * t;
        // [(B - 2t)^2 - 2t] Gamma(a) + 2 (B - 2t) Gamma(a+1) + Gamma(a+2)
        const std::vector<SignedLogValue> parts = {
            SignedLogValue::from_value(d * d - 2.0 * t).scaled_by_log(std::lgamma(a)),
            SignedLogValue::from_value(2.0 * d).scaled_by_log(std::lgamma(a + 1.0)),
            SignedLogValue::from_log(std::lgamma(a + 2.0))};
        return signed_log_sum(parts).scaled_by_log(-a * lt);
      },
      diag);
  return finish(res, iso_constant(s, r, e0) - (0.5 * M - 3.0 - e0) * std::numbers::ln2 - std::log(M * (M + 2.0)));
}

SignedLogValue kotz_general_shape_logdensity(const PseudoWishartShape& s, const ModelSpec& model,
                                             DensityDiagnostics* diag) {
  if (std::holds_alternative<CustomFamily>(model.generator))
    throw DomainError("kotz_general_shape_logdensity: needs a Kotz generator");
  const int M = (s.N - 1) * s.K;
  const KotzGenerator g = kotz_parameters(model.generator, M);
  validate(g);
  const Reduced red = reduce(s.W, s.K, model);
  const double e0 = radial_exponent(s, model.convention);
  const bool integer_t = has_integer_shape(g);
  const int T = integer_t ? static_cast<int>(g.T) : 0;
  const double R = g.R, lr = std::log(R), A = red.A, B = red.B;
  const double lb = B > 0.0 ? std::log(B) : 0.0;
  const double front = kotz_log_constant(g) - R * B;
  bool used_quad = false;

  auto weight = [&](int t) -> SignedLogValue {
    if (integer_t) {
      const double a = e0 + t;
      std::vector<SignedLogValue> terms;
      double log_pv = 0.0;
      for (int v = 0; v <= std::min(2 * t, T - 1); ++v) {
        if (v > 0) log_pv += std::log(T - v);
        double log_pu = 0.0;  // log prod_{s<u} (T-1-v-s)
        for (int u = 0; u <= T - 1 - v; ++u) {
          if (u > 0) log_pu += std::log(T - v - u);
          const int bpow = T - 1 - u - v;
          if (bpow > 0 && B == 0.0) continue;
          const double lm = log_binomial(2 * t, v) + log_pv + log_pu - std::lgamma(u + 1.0) +
                            (2 * t - 1 - a - u - v) * lr + bpow * lb + std::lgamma(1.0 + a + u);
          terms.push_back(SignedLogValue::from_log(lm, v % 2 ? -1 : 1));
        }
      }
      const SignedLogValue sum = signed_log_sum(terms);
      double biggest = -std::numeric_limits<double>::infinity();
      for (const auto& x : terms) biggest = std::max(biggest, x.log_magnitude());
      if (!sum.is_zero() && sum.log_magnitude() > biggest + std::log(1e-10))
        return sum.scaled_by_log(front - (a + 1.0) * std::log(A));
    }
    used_quad = true;
    return radial_integral_quadrature(model.generator, M, e0 + t, t, A, B);
  };
  const SeriesResult res = run_series(model, s.K, red.eig, red.central, weight, diag);
  if (diag) diag->used_quadrature = used_quad;
  return finish(res, shape_prefactor(s, red));
}

}  // namespace pwshape
