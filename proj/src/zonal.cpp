#include "pwshape/zonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pwshape/errors.hpp"

namespace pwshape {

namespace {

constexpr double kAlpha = 2.0;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Guard against tables that would not fit in memory (e.g. 4+ variables at degree 160).
constexpr std::size_t kMaxEntries = 60'000'000;

// Column-wise log sums of the upper and lower hook lengths of a partition.
struct HookColumns {
  std::vector<int> conj;
  std::vector<double> upper;  // sum_i log h^*(i,c)
  std::vector<double> lower;  // sum_i log h_*(i,c)
};

HookColumns hook_columns(const Partition& p) {
  HookColumns h;
  h.conj = p.conjugate().parts();
  const int cols = p.length() ? p[0] : 0;
  h.upper.assign(cols, 0.0);
  h.lower.assign(cols, 0.0);
  for (int c = 0; c < cols; ++c) {
    for (int i = 0; i < h.conj[c]; ++i) {
      const double arm = p[i] - c - 1;  // boxes to the right
      const double leg = h.conj[c] - i - 1;  // boxes below
      h.upper[c] += std::log(leg + kAlpha * (arm + 1));
      h.lower[c] += std::log(leg + 1 + kAlpha * arm);
    }
  }
  return h;
}

// log J_kappa(1^j).
double log_jack_at_ones(const Partition& p, int j) {
  double s = 0.0;
  for (int i = 0; i < p.length(); ++i)
    for (int c = 0; c < p[i]; ++c) s += std::log(j - i + kAlpha * c);
  return s;
}

int conj_at(const std::vector<int>& conj, int c) { return c < static_cast<int>(conj.size()) ? conj[c] : 0; }

// log beta_{kappa mu} for a horizontal strip kappa/mu.
double log_beta(const HookColumns& hk, const Partition& kappa, const HookColumns& hm, const Partition& mu) {
  double s = 0.0;
  const int kc = kappa.length() ? kappa[0] : 0;
  for (int c = 0; c < kc; ++c)
    s += conj_at(hk.conj, c) == conj_at(hm.conj, c) ? hk.upper[c] : hk.lower[c];
  const int mc = mu.length() ? mu[0] : 0;
  for (int c = 0; c < mc; ++c)
    s -= conj_at(hk.conj, c) == conj_at(hm.conj, c) ? hm.upper[c] : hm.lower[c];
  return s;
}

// All mu with length <= max_len such that kappa/mu is a horizontal strip.
void strips(const Partition& kappa, int max_len, std::vector<int>& cur, int i,
            std::vector<std::vector<int>>& out) {
  if (i == max_len) {
    std::vector<int> parts = cur;
    while (!parts.empty() && parts.back() == 0) parts.pop_back();
    out.push_back(std::move(parts));
    return;
  }
  for (int v = kappa[i]; v >= kappa[i + 1]; --v) {
    cur[i] = v;
    strips(kappa, max_len, cur, i + 1, out);
  }
}

}  // namespace

ZonalTable::ZonalTable(int n_vars, int max_degree) : n_vars_(n_vars), max_degree_(max_degree) {
  if (n_vars < 1) throw DomainError("ZonalTable: need at least one variable");
  if (max_degree < 0) throw DomainError("ZonalTable: negative degree");

  degree_offset_.push_back(0);
  for (int t = 0; t <= max_degree; ++t) {
    for (auto& p : partitions(t, n_vars)) {
      index_.emplace(p.parts(), parts_.size());
      parts_.push_back(std::move(p));
    }
    degree_offset_.push_back(parts_.size());
  }

  std::vector<HookColumns> hooks;
  hooks.reserve(parts_.size());
  for (const auto& p : parts_) hooks.push_back(hook_columns(p));

  log_unit_coef_.resize(parts_.size());
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const auto& h = hooks[i];
    double log_j = 0.0;
    for (std::size_t c = 0; c < h.upper.size(); ++c) log_j += h.upper[c] + h.lower[c];
    const int t = parts_[i].weight();
    log_unit_coef_[i] = t * std::log(kAlpha) - log_j + log_jack_at_ones(parts_[i], n_vars);
  }

  level_offset_.resize(n_vars + 1);
  level_entries_.resize(n_vars + 1);
  std::vector<double> log_ones_prev(parts_.size(), kNegInf), log_ones_cur(parts_.size());
  log_ones_prev[0] = 0.0;  // J_empty = 1 with zero variables
  std::size_t total = 0;
  std::vector<std::vector<int>> mus;
  std::vector<int> cur;
  for (int j = 1; j <= n_vars; ++j) {
    auto& offs = level_offset_[j];
    auto& ents = level_entries_[j];
    offs.assign(parts_.size() + 1, 0);
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      offs[i] = ents.size();
      const Partition& kappa = parts_[i];
      if (kappa.length() > j) {
        log_ones_cur[i] = kNegInf;
        continue;
      }
      log_ones_cur[i] = log_jack_at_ones(kappa, j);
      mus.clear();
      cur.assign(j - 1, 0);
      strips(kappa, j - 1, cur, 0, mus);
      for (const auto& mp : mus) {
        const std::size_t m = index_.at(mp);
        const Partition& mu = parts_[m];
        const double lw = log_beta(hooks[i], kappa, hooks[m], mu) + log_ones_prev[m] - log_ones_cur[i];
        ents.push_back({static_cast<std::int32_t>(m), kappa.weight() - mu.weight(), std::exp(lw)});
      }
      if (total + ents.size() > kMaxEntries)
        throw DomainError("ZonalTable: coefficient table too large for " + std::to_string(n_vars) +
                          " variables at degree " + std::to_string(max_degree));
    }
    offs[parts_.size()] = ents.size();
    total += ents.size();
    std::swap(log_ones_prev, log_ones_cur);
  }
}

long ZonalTable::index_of(const Partition& kappa) const {
  auto it = index_.find(kappa.parts());
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

double ZonalTable::normalized_jack(std::span<const double> x, std::vector<double>& out) const {
  std::vector<double> xs(x.begin(), x.end());
  std::sort(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
  for (std::size_t k = n_vars_; k < xs.size(); ++k)
    if (xs[k] != 0.0) throw DimensionError("ZonalTable: more nonzero eigenvalues than table variables");
  xs.resize(n_vars_, 0.0);

  out.assign(parts_.size(), 0.0);
  const double scale = std::abs(xs[0]);
  if (scale == 0.0) {
    out[0] = 1.0;
    return kNegInf;
  }
  for (auto& v : xs) v /= scale;

  std::vector<double> prev(parts_.size(), 0.0), pw(max_degree_ + 1);
  prev[0] = 1.0;
  for (int j = 1; j <= n_vars_; ++j) {
    const double xj = xs[j - 1];
    pw[0] = 1.0;
    for (int d = 1; d <= max_degree_; ++d) pw[d] = pw[d - 1] * xj;
    const auto& offs = level_offset_[j];
    const auto& ents = level_entries_[j];
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      double acc = 0.0;
      for (std::size_t e = offs[i]; e < offs[i + 1]; ++e) {
        const Entry& en = ents[e];
        acc += en.weight * prev[en.child] * pw[en.power];
      }
      out[i] = acc;
    }
    std::swap(prev, out);
  }
  std::swap(prev, out);
  return std::log(scale);
}

ZonalSeries::ZonalSeries(int n_vars, int max_degree, std::optional<double> denominator)
    : table_(std::make_shared<const ZonalTable>(n_vars, max_degree)), denominator_(denominator) {
  const auto& tab = *table_;
  coefficient_.resize(tab.size());
  degree_shift_.resize(max_degree + 1);
  std::vector<SignedLogValue> logc(tab.size());
  for (std::size_t i = 0; i < tab.size(); ++i) {
    SignedLogValue c = SignedLogValue::from_log(tab.log_unit_coefficient(i));
    if (denominator_) {
      const SignedLogValue den = log_gen_pochhammer(*denominator_, tab.partition(i));
      if (den.is_zero())
        throw PoleError("ZonalSeries: (a)_kappa vanishes for kappa = " + tab.partition(i).to_string());
      c /= den;
    }
    logc[i] = c;
  }
  for (int t = 0; t <= max_degree; ++t) {
    double shift = kNegInf;
    for (std::size_t i = tab.degree_begin(t); i < tab.degree_end(t); ++i)
      shift = std::max(shift, logc[i].log_magnitude());
    degree_shift_[t] = shift;
    for (std::size_t i = tab.degree_begin(t); i < tab.degree_end(t); ++i)
      coefficient_[i] = logc[i].sign() * std::exp(logc[i].log_magnitude() - shift);
  }
}

std::vector<SignedLogValue> ZonalSeries::degree_sums(std::span<const double> eigenvalues, int max_degree) const {
  if (max_degree < 0 || max_degree > table_->max_degree())
    throw DomainError("ZonalSeries: requested degree exceeds table");
  std::vector<double> jack;
  const double log_scale = table_->normalized_jack(eigenvalues, jack);
  std::vector<SignedLogValue> out(max_degree + 1);
  out[0] = SignedLogValue::from_value(coefficient_[0]).scaled_by_log(degree_shift_[0]);
  for (int t = 1; t <= max_degree; ++t) {
    if (log_scale == kNegInf) break;
    double acc = 0.0;
    for (std::size_t i = table_->degree_begin(t); i < table_->degree_end(t); ++i) acc += coefficient_[i] * jack[i];
    out[t] = SignedLogValue::from_value(acc).scaled_by_log(degree_shift_[t] + t * log_scale);
  }
  return out;
}

SeriesResult accumulate_series(std::span<const SignedLogValue> terms, double tolerance) {
  SeriesResult res;
  res.max_degree = static_cast<int>(terms.size()) - 1;
  double shift = kNegInf;
  for (const auto& t : terms)
    if (!t.is_zero()) shift = std::max(shift, t.log_magnitude());
  if (shift == kNegInf) {
    res.value = SignedLogValue::zero();
    res.converged = true;
    res.settled_degree = 0;
    return res;
  }
  std::vector<double> increments(terms.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const double term = terms[t].is_zero() ? 0.0 : terms[t].sign() * std::exp(terms[t].log_magnitude() - shift);
    acc += term;
    increments[t] = term == 0.0 ? 0.0 : (acc == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(term / acc));
  }
  res.value = SignedLogValue::from_value(acc).scaled_by_log(shift);
  res.last_increment = increments.back();
  res.converged = res.last_increment <= tolerance;
  int settled = static_cast<int>(terms.size());
  for (int t = static_cast<int>(terms.size()) - 1; t >= 0 && increments[t] <= tolerance; --t) settled = t;
  res.settled_degree = settled;
  return res;
}

SeriesResult ZonalSeries::sum(std::span<const double> eigenvalues, const DegreeWeight& weight, int max_degree,
                              double tolerance) const {
  const double trace = std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0);
  std::vector<SignedLogValue> w(max_degree + 1);
  for (int t = 0; t <= max_degree; ++t) w[t] = weight(t, trace);
  return sum(eigenvalues, w, tolerance);
}

SeriesResult ZonalSeries::sum(std::span<const double> eigenvalues, std::span<const SignedLogValue> weights,
                              double tolerance) const {
  const int max_degree = static_cast<int>(weights.size()) - 1;
  auto terms = degree_sums(eigenvalues, max_degree);
  for (int t = 0; t <= max_degree; ++t) terms[t] *= weights[t];
  return accumulate_series(terms, tolerance);
}

SeriesResult weighted_zonal_series(const SeriesSpec& spec) {
  if (spec.max_degree < 0) throw DomainError("weighted_zonal_series: negative max degree");
  if (!spec.weight) throw DomainError("weighted_zonal_series: missing weight");
  const int n_vars = std::max<int>(1, static_cast<int>(spec.eigenvalues.size()));
  ZonalSeries series(n_vars, spec.max_degree, spec.denominator);
  return series.sum(spec.eigenvalues, spec.weight, spec.max_degree, spec.tolerance);
}

SignedLogValue log_zonal(const Partition& kappa, std::span<const double> eigenvalues) {
  const int n_vars = std::max<int>(1, static_cast<int>(eigenvalues.size()));
  if (kappa.length() > n_vars) return SignedLogValue::zero();
  const int t = kappa.weight();
  ZonalTable table(n_vars, t);
  std::vector<double> jack;
  const double log_scale = table.normalized_jack(eigenvalues, jack);
  const auto i = static_cast<std::size_t>(table.index_of(kappa));
  if (t == 0) return SignedLogValue::one();
  if (log_scale == kNegInf) return SignedLogValue::zero();
  return SignedLogValue::from_value(jack[i])
      .scaled_by_log(table.log_unit_coefficient(i) + std::lgamma(t + 1.0) + t * log_scale);
}

double zonal(const Partition& kappa, std::span<const double> eigenvalues) {
  return log_zonal(kappa, eigenvalues).value();
}

}  // namespace pwshape
