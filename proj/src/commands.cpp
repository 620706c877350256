#include "pwshape/commands.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "pwshape/errors.hpp"
#include "pwshape/oracles.hpp"

namespace pwshape {

using nlohmann::json;

ModelSpec model_from_config(const RunConfig& cfg) {
  ModelSpec m;
  if (cfg.model == "gaussian") {
    m.generator = GaussianFamily{};
  } else if (cfg.model == "kotz") {
    m.generator = KotzFamily{cfg.T, cfg.R};
  } else {
    throw DataError("unknown model '" + cfg.model + "' (expected gaussian or kotz)");
  }
  if (!(cfg.sigma2 > 0.0)) throw DataError("sigma2 must be positive");
  if (cfg.truncation < 0) throw DataError("truncation must be nonnegative");
  m.sigma = cfg.sigma2;
  m.truncation = cfg.truncation;
  m.convention = cfg.convention;
  return m;
}

std::string to_string(RadialConvention c) { return c == RadialConvention::printed ? "printed" : "derived"; }
std::string to_string(VStarMode m) { return m == VStarMode::cholesky ? "cholesky" : "spectral"; }

RadialConvention parse_convention(const std::string& s) {
  if (s == "printed") return RadialConvention::printed;
  if (s == "derived") return RadialConvention::derived;
  throw DataError("unknown radial convention '" + s + "'");
}

VStarMode parse_vstar(const std::string& s) {
  if (s == "cholesky") return VStarMode::cholesky;
  if (s == "spectral") return VStarMode::spectral;
  throw DataError("unknown vstar mode '" + s + "'");
}

namespace {

json mu_row_major(const MatrixXd& mu) {
  json a = json::array();
  for (Eigen::Index i = 0; i < mu.rows(); ++i)
    for (Eigen::Index j = 0; j < mu.cols(); ++j) a.push_back(mu(i, j));
  return a;
}

json model_fields(const RunConfig& cfg) {
  json j;
  j["model"] = cfg.model;
  j["T"] = cfg.model == "gaussian" ? 1.0 : cfg.T;
  j["R"] = cfg.model == "gaussian" ? 0.5 : cfg.R;
  j["sigma2"] = cfg.sigma2;
  j["truncation"] = cfg.truncation;
  j["radial_convention"] = to_string(cfg.convention);
  j["vstar"] = to_string(cfg.vstar);
  return j;
}

json fit_json(const RunConfig& cfg, const std::string& group, const FitResult& f) {
  json j = model_fields(cfg);
  j["group"] = group;
  j["n"] = f.n;
  j["n_params"] = f.n_params;
  j["mu_hat"] = mu_row_major(f.mu_hat);
  j["logL"] = f.logL;
  j["bic_star"] = f.bic_star;
  j["iterations"] = f.iterations;
  j["evaluations"] = f.evaluations;
  j["optimizer_converged"] = f.optimizer_converged;
  j["restarted"] = f.restarted;
  j["series_converged"] = f.at_optimum.series_converged;
  j["worst_series_increment"] = f.at_optimum.worst_increment;
  j["seed"] = cfg.seed;
  j["wall_time_s"] = f.wall_time_s;
  return j;
}

Sample sample_of(const RunConfig& cfg, const Dataset& data, const std::string& group) {
  return make_sample(data.group(group), MatrixXd(), cfg.vstar);
}

}  // namespace

FitOutput cmd_fit(const RunConfig& cfg, const Dataset& data, const std::string& group) {
  const Sample sample = sample_of(cfg, data, group);
  ModelSpec model = model_from_config(cfg);
  prepare(model, data.K);
  FitOutput out;
  out.fit = fit_mle(sample, model, density_for(model));
  out.json = fit_json(cfg, group, out.fit);
  std::ostringstream csv;
  csv.precision(17);
  csv << "iteration,logL\n";
  for (const auto& [it, ll] : out.fit.trace) csv << it << ',' << ll << '\n';
  out.trace_csv = csv.str();
  return out;
}

json cmd_compare(const std::vector<RunConfig>& configs, const Dataset& data) {
  if (configs.empty()) throw DataError("compare: no models given");
  json groups = json::object();
  for (const auto& [label, specs] : data.groups) {
    struct Row {
      RunConfig cfg;
      FitResult fit;
    };
    std::vector<Row> rows;
    for (const auto& cfg : configs) {
      const Sample sample = sample_of(cfg, data, label);
      ModelSpec model = model_from_config(cfg);
      prepare(model, data.K);
      rows.push_back({cfg, fit_mle(sample, model, density_for(model))});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.fit.bic_star < b.fit.bic_star; });
    json table = json::array();
    const double best = rows.front().fit.bic_star;
    for (const auto& r : rows) {
      json j = model_fields(r.cfg);
      j["logL"] = r.fit.logL;
      j["bic_star"] = r.fit.bic_star;
      j["delta_bic"] = r.fit.bic_star - best;
      j["grade"] = to_string(evidence_grade(r.fit.bic_star - best));
      j["optimizer_converged"] = r.fit.optimizer_converged;
      j["wall_time_s"] = r.fit.wall_time_s;
      table.push_back(j);
    }
    groups[label] = table;
  }
  return json{{"groups", groups}};
}

json cmd_lrt(const RunConfig& cfg, const Dataset& data, const std::string& group1, const std::string& group2) {
  const Sample s1 = sample_of(cfg, data, group1), s2 = sample_of(cfg, data, group2);
  const ModelSpec model = model_from_config(cfg);
  const LrtResult r = lrt_mean_shape(s1, s2, model, density_for(model));
  json j = model_fields(cfg);
  j["statistic"] = r.statistic;
  j["df"] = r.df;
  j["p_value"] = r.p_value;
  j["logL_h0"] = r.logL_h0;
  j["logL_h1"] = r.logL_h1;
  j["clamped"] = r.clamped;
  j["optimizer_converged"] =
      r.fit_group1.optimizer_converged && r.fit_group2.optimizer_converged && r.fit_pooled.optimizer_converged;
  return j;
}

namespace {

json density_rows(const RunConfig& cfg, const std::vector<std::pair<std::string, PseudoWishartShape>>& shapes,
                  const DensityRequest& req) {
  if (shapes.empty()) throw DataError("density: no specimens");
  const int N = shapes.front().second.N, K = shapes.front().second.K;
  ModelSpec model = model_from_config(cfg);
  if (!req.mu.empty()) {
    if (static_cast<int>(req.mu.size()) != (N - 1) * K)
      throw DataError("density: mu needs " + std::to_string((N - 1) * K) + " values");
    model.mu.resize(N - 1, K);
    for (int i = 0; i < N - 1; ++i)
      for (int j = 0; j < K; ++j) model.mu(i, j) = req.mu[i * K + j];
  }
  const DensityFn density = density_for(model);
  int max_t = model.truncation;
  for (int t : req.sweep) max_t = std::max(max_t, t);
  ModelSpec prepared = model;
  prepared.truncation = max_t;
  prepare(prepared, K);
  json rows = json::array();
  for (const auto& [id, s] : shapes) {
    json row;
    row["id"] = id;
    row["r"] = s.r;
    row["u"] = std::vector<double>(s.u.data(), s.u.data() + s.u.size());
    row["logJ"] = s.log_jacobian;
    DensityDiagnostics dd;
    ModelSpec m = prepared;
    m.truncation = model.truncation;
    const SignedLogValue v = density(s, m, &dd);
    row["log_density"] = v.sign() > 0 ? json(v.log_magnitude()) : json(nullptr);
    row["series_converged"] = dd.series.converged;
    if (!req.sweep.empty()) {
      std::vector<int> grid = req.sweep;
      std::sort(grid.begin(), grid.end());
      grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
      const TruncationStudy st = truncation_study(
          [&](int t) {
            ModelSpec mt = prepared;
            mt.truncation = t;
            const SignedLogValue x = density(s, mt, nullptr);
            return x.sign() > 0 ? x.log_magnitude() : std::numeric_limits<double>::quiet_NaN();
          },
          grid);
      json sweep = json::array();
      for (const auto& r : st.rows) sweep.push_back({{"truncation", r.t_max}, {"log_density", r.value}, {"increment", r.increment}});
      row["sweep"] = sweep;
      row["stabilized_at"] = st.stabilized_at;
    }
    rows.push_back(row);
  }
  json out = model_fields(cfg);
  out["specimens"] = rows;
  return out;
}

}  // namespace

json cmd_density(const RunConfig& cfg, const Dataset& data, const DensityRequest& req) {
  std::vector<std::pair<std::string, PseudoWishartShape>> shapes;
  for (const auto& [label, specs] : data.groups)
    for (const auto& sp : make_sample(specs, MatrixXd(), cfg.vstar)) shapes.emplace_back(sp.id, sp.shape);
  return density_rows(cfg, shapes, req);
}

json cmd_density_angles(const RunConfig& cfg, int N, int K, const std::vector<double>& angles,
                        const DensityRequest& req) {
  VectorXd u = Eigen::Map<const VectorXd>(angles.data(), static_cast<Eigen::Index>(angles.size()));
  if (u.size() != shape_angle_count(N, K))
    throw DataError("density: expected " + std::to_string(shape_angle_count(N, K)) + " angles");
  PseudoWishartShape s;
  try {
    s = shape_from_chart(N, K, u, cfg.vstar);
  } catch (const Error& e) {
    throw DataError(std::string("density: angles outside the shape support: ") + e.what());
  }
  return density_rows(cfg, {{"angles", s}}, req);
}

json to_json(const OracleReport& r) {
  return json{{"name", r.name},           {"computed", r.computed}, {"reference", r.reference},
              {"rel_error", r.rel_error}, {"tolerance", r.tolerance}, {"samples", r.samples},
              {"std_error", r.std_error}, {"verdict", r.pass ? "pass" : "fail"}, {"informational", r.informational},
              {"note", r.note}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace pwshape
