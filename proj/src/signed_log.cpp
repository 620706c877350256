#include "pwshape/signed_log.hpp"

#include <algorithm>

#include "pwshape/errors.hpp"

namespace pwshape {

SignedLogValue SignedLogValue::from_log(double log_magnitude, int sign) {
  SignedLogValue v;
  if (sign == 0 || log_magnitude == -std::numeric_limits<double>::infinity()) return v;
  if (std::isnan(log_magnitude)) throw DomainError("SignedLogValue: NaN log-magnitude");
  v.log_magnitude_ = log_magnitude;
  v.sign_ = sign > 0 ? 1 : -1;
  return v;
}

SignedLogValue SignedLogValue::from_value(double value) {
  if (std::isnan(value)) throw DomainError("SignedLogValue: NaN value");
  if (value == 0.0) return {};
  return from_log(std::log(std::abs(value)), value > 0 ? 1 : -1);
}

double SignedLogValue::value() const noexcept {
  if (sign_ == 0) return 0.0;
  return sign_ * std::exp(log_magnitude_);
}

SignedLogValue SignedLogValue::operator-() const noexcept {
  SignedLogValue v = *this;
  v.sign_ = -v.sign_;
  return v;
}

SignedLogValue& SignedLogValue::operator+=(const SignedLogValue& rhs) {
  if (rhs.sign_ == 0) return *this;
  if (sign_ == 0) return *this = rhs;
  const bool this_larger = log_magnitude_ >= rhs.log_magnitude_;
  const SignedLogValue& big = this_larger ? *this : rhs;
  const SignedLogValue& small = this_larger ? rhs : *this;
  const double ratio = std::exp(small.log_magnitude_ - big.log_magnitude_);
  SignedLogValue out;
  if (big.sign_ == small.sign_) {
    out.log_magnitude_ = big.log_magnitude_ + std::log1p(ratio);
    out.sign_ = big.sign_;
  } else if (ratio < 1.0) {
    out.log_magnitude_ = big.log_magnitude_ + std::log1p(-ratio);
    out.sign_ = big.sign_;
  }
  return *this = out;
}

SignedLogValue& SignedLogValue::operator*=(const SignedLogValue& rhs) noexcept {
  if (sign_ == 0 || rhs.sign_ == 0) return *this = SignedLogValue{};
  log_magnitude_ += rhs.log_magnitude_;
  sign_ *= rhs.sign_;
  return *this;
}

SignedLogValue& SignedLogValue::operator/=(const SignedLogValue& rhs) {
  if (rhs.sign_ == 0) throw DomainError("SignedLogValue: division by zero");
  if (sign_ == 0) return *this;
  log_magnitude_ -= rhs.log_magnitude_;
  sign_ *= rhs.sign_;
  return *this;
}

SignedLogValue SignedLogValue::scaled_by_log(double log_factor) const noexcept {
  SignedLogValue v = *this;
  if (v.sign_ != 0) v.log_magnitude_ += log_factor;
  return v;
}

SignedLogValue signed_log_sum(std::span<const SignedLogValue> terms) {
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms)
    if (!t.is_zero()) shift = std::max(shift, t.log_magnitude());
  if (shift == -std::numeric_limits<double>::infinity()) return {};
  double acc = 0.0;
  for (const auto& t : terms)
    if (!t.is_zero()) acc += t.sign() * std::exp(t.log_magnitude() - shift);
  return SignedLogValue::from_value(acc).scaled_by_log(shift);
}

}  // namespace pwshape
