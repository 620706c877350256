#include "pwshape/partition.hpp"

#include <cmath>
#include <numbers>

#include "pwshape/errors.hpp"

namespace pwshape {

namespace {

void check_parts(const std::vector<int>& parts) {
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] < 1) throw DomainError("Partition parts must be positive");
    if (i > 0 && parts[i] > parts[i - 1]) throw DomainError("Partition parts must be weakly decreasing");
  }
}

void enumerate(int remaining, int max_part, int slots, std::vector<int>& prefix,
               std::vector<Partition>& out) {
  if (remaining == 0) {
    out.emplace_back(prefix);
    return;
  }
  if (slots == 0) return;
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    // the remaining slots must be able to hold what is left
    if (static_cast<long>(p) * slots < remaining) break;
    prefix.push_back(p);
    enumerate(remaining - p, p, slots - 1, prefix, out);
    prefix.pop_back();
  }
}

bool is_gamma_pole(double x) { return x <= 0.0 && x == std::floor(x); }

}  // namespace

Partition::Partition(std::initializer_list<int> parts) : parts_(parts) { check_parts(parts_); }

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) { check_parts(parts_); }

int Partition::weight() const noexcept {
  int w = 0;
  for (int p : parts_) w += p;
  return w;
}

Partition Partition::conjugate() const {
  std::vector<int> conj(parts_.empty() ? 0 : parts_.front(), 0);
  for (int p : parts_)
    for (int j = 0; j < p; ++j) ++conj[j];
  return Partition(std::move(conj));
}

std::string Partition::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(parts_[i]);
  }
  return s + ")";
}

std::vector<Partition> partitions(int weight, int max_len) {
  if (weight < 0) throw DomainError("partitions: negative weight");
  if (max_len < 1) throw DomainError("partitions: max_len must be positive");
  std::vector<Partition> out;
  std::vector<int> prefix;
  enumerate(weight, weight, max_len, prefix, out);
  return out;
}

double rising_factorial(double a, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= a + i;
  return r;
}

double gen_pochhammer(double a, const Partition& kappa) {
  double r = 1.0;
  for (int j = 0; j < kappa.length(); ++j) r *= rising_factorial(a - 0.5 * j, kappa[j]);
  return r;
}

SignedLogValue log_gen_pochhammer(double a, const Partition& kappa) {
  SignedLogValue r = SignedLogValue::one();
  for (int j = 0; j < kappa.length(); ++j)
    for (int i = 0; i < kappa[j]; ++i) r *= SignedLogValue::from_value(a - 0.5 * j + i);
  return r;
}

double mv_gamma(int s, double a) {
  if (s < 1) throw DomainError("mv_gamma: dimension must be positive");
  double r = std::pow(std::numbers::pi, s * (s - 1) / 4.0);
  for (int j = 0; j < s; ++j) {
    const double x = a - 0.5 * j;
    if (is_gamma_pole(x)) throw PoleError("mv_gamma: Gamma pole at " + std::to_string(x));
    r *= std::tgamma(x);
  }
  return r;
}

double log_mv_gamma(int s, double a) {
  if (s < 1) throw DomainError("log_mv_gamma: dimension must be positive");
  double r = s * (s - 1) / 4.0 * std::log(std::numbers::pi);
  int sign = 1;
  for (int j = 0; j < s; ++j) {
    const double x = a - 0.5 * j;
    if (is_gamma_pole(x)) throw PoleError("log_mv_gamma: Gamma pole at " + std::to_string(x));
    int sg = 1;
    r += lgamma_r(x, &sg);
    sign *= sg;
  }
  if (sign < 0) throw DomainError("log_mv_gamma: Gamma_s(a) is negative");
  return r;
}

}  // namespace pwshape
