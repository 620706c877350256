#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace pwshape {

/// A real number stored as sign and log-magnitude.
///
/// Zero is represented by sign 0 and log-magnitude -inf. Products are exact in
/// sign; sums combine the two operands relative to the larger magnitude so that
/// values spanning hundreds of orders of magnitude can be accumulated.
class SignedLogValue {
 public:
  constexpr SignedLogValue() = default;

  static SignedLogValue from_log(double log_magnitude, int sign = 1);
  static SignedLogValue from_value(double value);
  static constexpr SignedLogValue zero() { return {}; }
  static SignedLogValue one() { return from_log(0.0, 1); }

  double log_magnitude() const noexcept { return log_magnitude_; }
  int sign() const noexcept { return sign_; }
  bool is_zero() const noexcept { return sign_ == 0; }
  /// exp(log_magnitude) with sign; may overflow to +-inf or underflow to 0.
  double value() const noexcept;

  SignedLogValue operator-() const noexcept;
  SignedLogValue& operator+=(const SignedLogValue& rhs);
  SignedLogValue& operator-=(const SignedLogValue& rhs) { return *this += -rhs; }
  SignedLogValue& operator*=(const SignedLogValue& rhs) noexcept;
  SignedLogValue& operator/=(const SignedLogValue& rhs);

  friend SignedLogValue operator+(SignedLogValue a, const SignedLogValue& b) { return a += b; }
  friend SignedLogValue operator-(SignedLogValue a, const SignedLogValue& b) { return a -= b; }
  friend SignedLogValue operator*(SignedLogValue a, const SignedLogValue& b) { return a *= b; }
  friend SignedLogValue operator/(SignedLogValue a, const SignedLogValue& b) { return a /= b; }

  /// Multiplies by exp(log_factor) (factor assumed positive).
  SignedLogValue scaled_by_log(double log_factor) const noexcept;

 private:
  double log_magnitude_ = -std::numeric_limits<double>::infinity();
  int sign_ = 0;
};

/// Sum of many terms in a fixed order with a single shift by the largest
/// magnitude. More accurate than repeated pairwise addition for long series.
SignedLogValue signed_log_sum(std::span<const SignedLogValue> terms);

}  // namespace pwshape
