#pragma once

#include "pwshape/signed_log.hpp"

namespace pwshape {

/// Kotz type-I generator h(y) = c y^{T-1} exp(-R y) for an M-dimensional
/// elliptical law, c = R^{T-1+M/2} Gamma(M/2) / (pi^{M/2} Gamma(T-1+M/2)).
/// T = 1, R = 1/2 is the Gaussian.
struct KotzGenerator {
  double T = 1.0;
  double R = 0.5;
  int M = 2;
};

/// Throws DomainError unless R > 0, M >= 1 and T - 1 + M/2 > 0.
void validate(const KotzGenerator& gen);

/// log c.
double kotz_log_constant(const KotzGenerator& gen);

double kotz_h(const KotzGenerator& gen, double y);
SignedLogValue log_kotz_h(const KotzGenerator& gen, double y);

/// k-th derivative of h. For integer T the inner sum stops at min(k, T-1);
/// `full_sum` keeps all k+1 binomial terms (the extra ones are exact zeros).
/// y = 0 is accepted for integer T (only the y^0 term survives).
SignedLogValue log_kotz_h_deriv(const KotzGenerator& gen, int k, double y, bool full_sum = false);
double kotz_h_deriv(const KotzGenerator& gen, int k, double y, bool full_sum = false);

/// Derivative of the Gaussian generator, h^{(k)}(y) = (R/pi)^{M/2} (-R)^k e^{-R y}, R = 1/2.
SignedLogValue log_gaussian_h_deriv(int M, int k, double y);
double gaussian_h_deriv(int M, int k, double y);

/// Ratio of the quadrature value of int_0^inf s^{M/2-1} h(s) ds to Gamma(M/2)/pi^{M/2}.
double generator_mass_check(const KotzGenerator& gen);

/// True when T is a positive integer (closed forms apply).
bool has_integer_shape(const KotzGenerator& gen);

}  // namespace pwshape
