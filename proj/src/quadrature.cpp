#include "pwshape/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "pwshape/errors.hpp"

namespace pwshape {

namespace {

// Kronrod 15 nodes (positive half) and weights, Gauss 7 weights on the odd nodes.
constexpr std::array<double, 8> kXk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                       0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                       0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b, value, error, abs_value;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * kWk[7], g = fc * kWg[3], ak = std::abs(fc) * kWk[7];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXk[j];
    const double f1 = f(c - x), f2 = f(c + x);
    k += kWk[j] * (f1 + f2);
    ak += kWk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) g += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, k * h, std::abs((k - g) * h), ak * std::abs(h)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                           double abs_tol, int max_intervals) {
  QuadratureResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  std::priority_queue<Piece> heap;
  Piece first = gk15(f, a, b);
  res.evaluations = 15;
  double value = first.value, error = first.error, absval = first.abs_value;
  heap.push(first);
  int intervals = 1;
  while (error > std::max(abs_tol, rel_tol * absval) && intervals < max_intervals) {
    Piece p = heap.top();
    heap.pop();
    const double mid = 0.5 * (p.a + p.b);
    if (mid <= p.a || mid >= p.b) {  // interval can no longer be split
      heap.push(p);
      break;
    }
    Piece l = gk15(f, p.a, mid), r = gk15(f, mid, p.b);
    res.evaluations += 30;
    value += l.value + r.value - p.value;
    error += l.error + r.error - p.error;
    absval += l.abs_value + r.abs_value - p.abs_value;
    heap.push(l);
    heap.push(r);
    ++intervals;
  }
  // recompute from the pieces to shed accumulated rounding in the running totals
  value = error = absval = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    absval += heap.top().abs_value;
    heap.pop();
  }
  res.value = value;
  res.abs_error = error;
  res.abs_integral = absval;
  res.converged = error <= std::max(abs_tol, rel_tol * absval) || error == 0.0;
  if (!std::isfinite(value)) res.converged = false;
  return res;
}

LogQuadratureResult integrate_half_line(const std::function<SignedLogValue(double)>& log_f, double scale,
                                        double rel_tol) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("integrate_half_line: scale must be positive");
  constexpr int kLow = -40, kHigh = 60;

  // scan for the largest log-magnitude
  double shift = -std::numeric_limits<double>::infinity();
  for (int k = kLow; k <= kHigh; ++k)
    for (double frac : {1.0, 1.25, 1.5, 1.75}) {
      const SignedLogValue v = log_f(std::ldexp(scale * frac, k));
      if (!v.is_zero() && std::isfinite(v.log_magnitude())) shift = std::max(shift, v.log_magnitude());
    }
  LogQuadratureResult out;
  if (shift == -std::numeric_limits<double>::infinity()) {
    out.value = SignedLogValue::zero();
    out.converged = true;
    return out;
  }

  auto g = [&](double x) {
    const SignedLogValue v = log_f(x);
    if (v.is_zero()) return 0.0;
    return v.sign() * std::exp(v.log_magnitude() - shift);
  };

  // dyadic pieces; a single rule per piece gives the scale of the whole integral
  std::vector<std::pair<double, double>> pieces = {{0.0, std::ldexp(scale, kLow)}};
  double crude = std::abs(gk15(g, pieces[0].first, pieces[0].second).abs_value);
  int quiet = 0;
  for (int k = kLow; k < 1100 && quiet < 4; ++k) {
    const double a = std::ldexp(scale, k), b = std::ldexp(scale, k + 1);
    if (!std::isfinite(b)) break;
    const double piece_abs = gk15(g, a, b).abs_value;
    crude += piece_abs;
    pieces.emplace_back(a, b);
    quiet = (k > 0 && piece_abs <= 1e-3 * rel_tol * crude) ? quiet + 1 : 0;
  }
  out.evaluations = 15 * static_cast<int>(pieces.size());

  double total = 0.0, total_abs = 0.0, total_err = 0.0;
  // pieces that hit the interval cap are fine as long as the summed error
  // estimate meets the tolerance
  bool ok = quiet >= 4;
  const double abs_tol = 0.1 * rel_tol * crude / static_cast<double>(pieces.size());
  for (const auto& [a, b] : pieces) {
    const QuadratureResult q = integrate(g, a, b, 0.1 * rel_tol, abs_tol, 4000);
    total += q.value;
    total_abs += q.abs_integral;
    total_err += q.abs_error;
    out.evaluations += q.evaluations;
  }
  out.value = SignedLogValue::from_value(total).scaled_by_log(shift);
  out.rel_error = total_abs > 0 ? total_err / total_abs : 0.0;
  out.converged = ok && std::isfinite(total) && total_err <= rel_tol * total_abs;
  return out;
}

}  // namespace pwshape
