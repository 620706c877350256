#include <sstream>

#include "doctest.h"
#include "pwshape/commands.hpp"
#include "pwshape/errors.hpp"

using namespace pwshape;

namespace {

const Dataset& fixture() {
  static const Dataset d = read_landmarks(std::string(PWSHAPE_FIXTURE));
  return d;
}

RunConfig quick(const std::string& model = "gaussian", double T = 1.0) {
  RunConfig c;
  c.model = model;
  c.T = T;
  c.truncation = 40;
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  CHECK(parse_convention("printed") == RadialConvention::printed);
  CHECK(parse_convention("derived") == RadialConvention::derived);
  CHECK(parse_vstar("spectral") == VStarMode::spectral);
  CHECK_THROWS_AS(parse_convention("other"), DataError);
  RunConfig c;
  CHECK(c.R == 0.5);
  CHECK(c.sigma2 == 50.0);
  CHECK(c.truncation == 120);
  CHECK(c.convention == RadialConvention::printed);
  CHECK(c.vstar == VStarMode::cholesky);
  c.model = "student";
  CHECK_THROWS_AS(model_from_config(c), DataError);
}

TEST_CASE("fit output") {
  const FitOutput f = cmd_fit(quick(), fixture(), "small");
  const auto& j = f.json;
  for (const char* key : {"model", "T", "R", "sigma2", "truncation", "mu_hat", "logL", "bic_star", "iterations",
                          "wall_time_s"})
    CHECK(j.contains(key));
  CHECK(j["mu_hat"].size() == 10);
  CHECK(f.trace_csv.rfind("iteration,logL\n", 0) == 0);
  std::istringstream csv(f.trace_csv);
  std::string line;
  std::getline(csv, line);
  double prev = -1e300;
  while (std::getline(csv, line)) {
    const double ll = std::stod(line.substr(line.find(',') + 1));
    CHECK(ll >= prev);
    prev = ll;
  }
  CHECK_THROWS_AS(cmd_fit(quick(), fixture(), "missing"), DataError);
}

TEST_CASE("compare") {
  const nlohmann::json one = cmd_compare({quick()}, fixture());
  for (const auto& [label, rows] : one["groups"].items()) {
    REQUIRE(rows.size() == 1);
    CHECK(rows[0]["delta_bic"] == 0.0);
    CHECK(rows[0]["grade"] == "weak");
  }
  const nlohmann::json three = cmd_compare({quick(), quick("kotz", 2.0), quick("kotz", 3.0)}, fixture());
  for (const auto& [label, rows] : three["groups"].items()) {
    REQUIRE(rows.size() == 3);
    CHECK(rows[0]["bic_star"] <= rows[1]["bic_star"]);
    CHECK(rows[1]["bic_star"] <= rows[2]["bic_star"]);
  }
}

TEST_CASE("lrt symmetry") {
  const nlohmann::json self = cmd_lrt(quick(), fixture(), "small", "small");
  CHECK(self["p_value"].get<double>() > 0.99);
  CHECK(self["df"] == 10);
  nlohmann::json ab = cmd_lrt(quick(), fixture(), "small", "large");
  nlohmann::json ba = cmd_lrt(quick(), fixture(), "large", "small");
  CHECK(dump(ab) == dump(ba));
}

TEST_CASE("density command") {
  DensityRequest req;
  RunConfig gc = quick(), kc = quick("kotz", 3.0);
  gc.convention = kc.convention = RadialConvention::derived;
  const nlohmann::json g = cmd_density(gc, fixture(), req);
  const nlohmann::json k = cmd_density(kc, fixture(), req);
  REQUIRE(g["specimens"].size() == 46);
  for (std::size_t i = 0; i < 46; ++i)
    CHECK(g["specimens"][i]["log_density"].get<double>() ==
          doctest::Approx(k["specimens"][i]["log_density"].get<double>()).epsilon(1e-9));

  // rotated copy of the data
  Dataset rotated = fixture();
  for (auto& [label, specs] : rotated.groups)
    for (auto& s : specs) {
      Eigen::Matrix2d H;
      H << 0.6, -0.8, 0.8, 0.6;
      s.X = s.X * H;
    }
  req.mu = std::vector<double>(10, 0.0);
  req.mu[0] = 20.0;
  req.mu[3] = -15.0;
  const nlohmann::json a = cmd_density(quick(), fixture(), req), b = cmd_density(quick(), rotated, req);
  for (std::size_t i = 0; i < 46; ++i)
    CHECK(a["specimens"][i]["log_density"].get<double>() ==
          doctest::Approx(b["specimens"][i]["log_density"].get<double>()).epsilon(1e-10));

  req.sweep = {20, 40, 60, 80, 100, 120, 140, 160};
  const nlohmann::json s = cmd_density(quick(), fixture(), req);
  const auto& row = s["specimens"][0];
  CHECK(row["sweep"].size() == 8);
  const int at = row["stabilized_at"];
  CHECK(at > 0);
  for (const auto& r : row["sweep"])
    if (r["truncation"].get<int>() > at) CHECK(r["increment"].get<double>() < 1e-6);

  CHECK_THROWS_AS(cmd_density_angles(quick(), 3, 2, {0.3}, {}), DataError);
  const nlohmann::json ang = cmd_density_angles(quick(), 3, 2, {0.9, 1.5}, {});
  CHECK(ang["specimens"][0]["r"] == 1.0);
}
