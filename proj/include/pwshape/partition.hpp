#pragma once

#include <compare>
#include <initializer_list>
#include <string>
#include <vector>

#include "pwshape/signed_log.hpp"

namespace pwshape {

/// Integer partition: weakly decreasing positive parts. The empty partition has weight 0.
class Partition {
 public:
  Partition() = default;
  Partition(std::initializer_list<int> parts);
  explicit Partition(std::vector<int> parts);

  const std::vector<int>& parts() const noexcept { return parts_; }
  int weight() const noexcept;
  int length() const noexcept { return static_cast<int>(parts_.size()); }
  /// Part i (0-based); 0 beyond the length.
  int operator[](int i) const noexcept { return i < length() ? parts_[i] : 0; }
  /// Conjugate partition (column lengths).
  Partition conjugate() const;
  std::string to_string() const;

  friend auto operator<=>(const Partition&, const Partition&) = default;

 private:
  std::vector<int> parts_;
};

/// All partitions of `weight` with at most `max_len` parts, reverse-lexicographic order.
std::vector<Partition> partitions(int weight, int max_len);

/// Rising factorial (a)_k.
double rising_factorial(double a, int k);

/// Generalized Pochhammer symbol (a)_kappa = prod_j (a - (j-1)/2)_{kappa_j}.
double gen_pochhammer(double a, const Partition& kappa);
SignedLogValue log_gen_pochhammer(double a, const Partition& kappa);

/// Multivariate gamma Gamma_s(a) = pi^{s(s-1)/4} prod_{j=1}^s Gamma(a - (j-1)/2).
/// Throws PoleError when a factor sits on a pole of Gamma.
double mv_gamma(int s, double a);
/// log Gamma_s(a); requires Gamma_s(a) > 0.
double log_mv_gamma(int s, double a);

}  // namespace pwshape
