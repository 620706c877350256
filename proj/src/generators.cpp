#include "pwshape/generators.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "pwshape/errors.hpp"
#include "pwshape/quadrature.hpp"

namespace pwshape {

namespace {

double log_binomial(int k, int m) { return std::lgamma(k + 1.0) - std::lgamma(m + 1.0) - std::lgamma(k - m + 1.0); }

}  // namespace

void validate(const KotzGenerator& gen) {
  if (!(gen.R > 0.0)) throw DomainError("Kotz generator: R must be positive");
  if (gen.M < 1) throw DomainError("Kotz generator: M must be positive");
  if (!(gen.T - 1.0 + 0.5 * gen.M > 0.0)) throw DomainError("Kotz generator: T - 1 + M/2 must be positive");
}

bool has_integer_shape(const KotzGenerator& gen) { return gen.T >= 1.0 && gen.T == std::floor(gen.T); }

double kotz_log_constant(const KotzGenerator& gen) {
  validate(gen);
  const double half_m = 0.5 * gen.M;
  return (gen.T - 1.0 + half_m) * std::log(gen.R) + std::lgamma(half_m) - half_m * std::log(std::numbers::pi) -
         std::lgamma(gen.T - 1.0 + half_m);
}

SignedLogValue log_kotz_h(const KotzGenerator& gen, double y) { return log_kotz_h_deriv(gen, 0, y); }

double kotz_h(const KotzGenerator& gen, double y) { return log_kotz_h(gen, y).value(); }

SignedLogValue log_kotz_h_deriv(const KotzGenerator& gen, int k, double y, bool full_sum) {
  if (k < 0) throw DomainError("kotz_h_deriv: negative order");
  if (y < 0.0 || std::isnan(y)) throw DomainError("kotz_h_deriv: y must be nonnegative");
  const double logc = kotz_log_constant(gen);
  const bool integer_t = has_integer_shape(gen);
  const int last = (integer_t && !full_sum) ? std::min<int>(k, static_cast<int>(gen.T) - 1) : k;

  if (y == 0.0) {
    if (!integer_t) {
      if (k == 0 && gen.T > 1.0) return SignedLogValue::zero();
      throw DomainError("kotz_h_deriv: y = 0 needs integer T >= 1");
    }
    const int q = static_cast<int>(gen.T) - 1;  // only v = T-1 leaves y^0
    if (q > k) return SignedLogValue::zero();
    // C(k,q) q! (-R)^{k-q}
    const double lm = logc + log_binomial(k, q) + std::lgamma(q + 1.0) + (k - q) * std::log(gen.R);
    return SignedLogValue::from_log(lm, (k - q) % 2 ? -1 : 1);
  }

  // term v: C(k,v) [prod_{i<v} (T-1-i)] (-R)^{k-v} y^{T-1-v}, times c e^{-Ry}
  std::vector<SignedLogValue> terms;
  terms.reserve(last + 1);
  SignedLogValue falling = SignedLogValue::one();
  const double ly = std::log(y), lr = std::log(gen.R);
  for (int v = 0; v <= last; ++v) {
    if (v > 0) falling *= SignedLogValue::from_value(gen.T - v);
    if (falling.is_zero()) {
      terms.push_back(SignedLogValue::zero());
      continue;
    }
    SignedLogValue term = falling.scaled_by_log(log_binomial(k, v) + (k - v) * lr + (gen.T - 1.0 - v) * ly);
    if ((k - v) % 2) term = -term;
    terms.push_back(term);
  }
  return signed_log_sum(terms).scaled_by_log(logc - gen.R * y);
}

double kotz_h_deriv(const KotzGenerator& gen, int k, double y, bool full_sum) {
  return log_kotz_h_deriv(gen, k, y, full_sum).value();
}

SignedLogValue log_gaussian_h_deriv(int M, int k, double y) {
  if (M < 1 || k < 0) throw DomainError("gaussian_h_deriv: invalid M or k");
  constexpr double R = 0.5;
  const double lm = 0.5 * M * std::log(R / std::numbers::pi) + k * std::log(R) - R * y;
  return SignedLogValue::from_log(lm, k % 2 ? -1 : 1);
}

double gaussian_h_deriv(int M, int k, double y) { return log_gaussian_h_deriv(M, k, y).value(); }

double generator_mass_check(const KotzGenerator& gen) {
  validate(gen);
  const double half_m = 0.5 * gen.M;
  auto integrand = [&](double s) {
    if (s <= 0.0) return SignedLogValue::zero();
    return log_kotz_h(gen, s).scaled_by_log((half_m - 1.0) * std::log(s));
  };
  // the integrand peaks near (T - 2 + M/2)/R
  const double peak = std::max(gen.T - 2.0 + half_m, 0.5) / gen.R;
  const LogQuadratureResult q = integrate_half_line(integrand, peak, 1e-12);
  if (!q.converged) throw NonConvergenceError("generator_mass_check: quadrature did not converge");
  const double log_ref = std::lgamma(half_m) - half_m * std::log(std::numbers::pi);
  return std::exp(q.value.log_magnitude() - log_ref) * q.value.sign();
}

}  // namespace pwshape
