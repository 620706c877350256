#include "pwshape/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pwshape/errors.hpp"

namespace pwshape {

namespace {

using Eigen::VectorXd;

struct Run {
  VectorXd x;
  double f;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

Run simplex_search(const std::function<double(const VectorXd&)>& f, std::vector<VectorXd> pts,
                   const NelderMeadOptions& opts, std::vector<double>& trace) {
  const int n = static_cast<int>(pts.size()) - 1;
  std::vector<double> fv(n + 1);
  Run run;
  for (int i = 0; i <= n; ++i) fv[i] = f(pts[i]);
  run.evaluations = n + 1;
  std::vector<int> order(n + 1);

  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    std::vector<VectorXd> p2(n + 1);
    std::vector<double> f2(n + 1);
    for (int i = 0; i <= n; ++i) {
      p2[i] = pts[order[i]];
      f2[i] = fv[order[i]];
    }
    pts.swap(p2);
    fv.swap(f2);
  };
  sort_simplex();
  trace.push_back(fv[0]);

  while (true) {
    double fspread = 0.0, xspread = 0.0;
    for (int i = 1; i <= n; ++i) {
      fspread = std::max(fspread, std::abs(fv[i] - fv[0]));
      xspread = std::max(xspread, (pts[i] - pts[0]).cwiseAbs().maxCoeff());
    }
    if (fspread <= opts.f_tol && xspread <= opts.x_tol) {
      run.converged = true;
      break;
    }
    if (run.iterations >= opts.max_iterations) break;
    ++run.iterations;

    VectorXd centroid = VectorXd::Zero(pts[0].size());
    for (int i = 0; i < n; ++i) centroid += pts[i];
    centroid /= n;

    const VectorXd xr = 2.0 * centroid - pts[n];
    const double fr = f(xr);
    ++run.evaluations;
    bool shrink = false;
    if (fr < fv[0]) {
      const VectorXd xe = 3.0 * centroid - 2.0 * pts[n];
      const double fe = f(xe);
      ++run.evaluations;
      if (fe < fr) {
        pts[n] = xe;
        fv[n] = fe;
      } else {
        pts[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      pts[n] = xr;
      fv[n] = fr;
    } else if (fr < fv[n]) {
      const VectorXd xc = 1.5 * centroid - 0.5 * pts[n];  // outside contraction
      const double fc = f(xc);
      ++run.evaluations;
      if (fc <= fr) {
        pts[n] = xc;
        fv[n] = fc;
      } else {
        shrink = true;
      }
    } else {
      const VectorXd xcc = 0.5 * (centroid + pts[n]);  // inside contraction
      const double fcc = f(xcc);
      ++run.evaluations;
      if (fcc < fv[n]) {
        pts[n] = xcc;
        fv[n] = fcc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (int i = 1; i <= n; ++i) {
        pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
        fv[i] = f(pts[i]);
      }
      run.evaluations += n;
    }
    sort_simplex();
    trace.push_back(fv[0]);
  }
  run.x = pts[0];
  run.f = fv[0];
  return run;
}

std::vector<VectorXd> initial_simplex(const VectorXd& x0, double rel, double zero_step) {
  std::vector<VectorXd> pts(x0.size() + 1, x0);
  for (Eigen::Index i = 0; i < x0.size(); ++i) pts[i + 1](i) = x0(i) != 0.0 ? (1.0 + rel) * x0(i) : zero_step;
  return pts;
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const VectorXd&)>& f, const VectorXd& x0,
                             const NelderMeadOptions& opts) {
  if (x0.size() == 0) throw DimensionError("nelder_mead: empty start point");
  if (!std::isfinite(f(x0))) throw DomainError("nelder_mead: objective not finite at the start point");
  NelderMeadResult out;
  Run run = simplex_search(f, initial_simplex(x0, 0.05, 0.00025), opts, out.trace);
  int iterations = run.iterations, evaluations = run.evaluations + 1;
  if (!run.converged && opts.restart) {
    out.restarted = true;
    const double step = 1e-2 * std::max(x0.norm(), 1e-8);
    std::vector<VectorXd> pts(x0.size() + 1, run.x);
    for (Eigen::Index i = 0; i < x0.size(); ++i) pts[i + 1](i) += step;
    std::vector<double> trace2;
    Run again = simplex_search(f, pts, opts, trace2);
    // continue the trace where the first run stopped
    for (std::size_t k = 1; k < trace2.size(); ++k) out.trace.push_back(std::min(trace2[k], out.trace.back()));
    iterations += again.iterations;
    evaluations += again.evaluations;
    if (again.f <= run.f) {
      run.x = again.x;
      run.f = again.f;
    }
    run.converged = again.converged;
  }
  out.x = run.x;
  out.f = run.f;
  out.iterations = iterations;
  out.evaluations = evaluations;
  out.converged = run.converged;
  return out;
}

}  // namespace pwshape
