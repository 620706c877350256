// Command-line front end: fit, compare, lrt, density, self-check.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pwshape/commands.hpp"
#include "pwshape/errors.hpp"
#include "pwshape/oracles.hpp"

namespace {

using namespace pwshape;

struct Flags {
  RunConfig cfg;
  std::string convention = "printed";
  std::string vstar = "cholesky";
};

void add_model_flags(CLI::App* app, Flags& f) {
  app->add_option("--model", f.cfg.model, "gaussian or kotz")->capture_default_str();
  app->add_option("--T", f.cfg.T, "Kotz shape exponent")->capture_default_str();
  app->add_option("--R", f.cfg.R, "Kotz rate")->capture_default_str();
  app->add_option("--sigma2", f.cfg.sigma2, "isotropic variance")->capture_default_str();
  app->add_option("--truncation", f.cfg.truncation, "highest zonal degree")->capture_default_str();
  app->add_option("--radial-convention", f.convention, "printed or derived")->capture_default_str();
  app->add_option("--vstar", f.vstar, "cholesky or spectral")->capture_default_str();
  app->add_option("--seed", f.cfg.seed, "seed for randomized steps")->capture_default_str();
  app->add_option("--out", f.cfg.out, "output file (stdout when empty)");
}

void finalize(Flags& f) {
  f.cfg.convention = parse_convention(f.convention);
  f.cfg.vstar = parse_vstar(f.vstar);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << text;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw DataError("bad number '" + item + "' in list");
    }
  }
  return v;
}

int run_self_check(long long samples, std::uint64_t seed, const std::string& out) {
  nlohmann::json arr = nlohmann::json::array();
  bool ok = true;
  for (const auto& r : self_check(samples, seed)) {
    arr.push_back(to_json(r));
    ok = ok && (r.pass || r.informational);
  }
  emit(out, dump(arr));
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pwshape: elliptical shape densities, fitting and model comparison"};
  app.require_subcommand(0, 1);
  bool self_check_flag = false;
  app.add_flag("--self-check", self_check_flag, "run the built-in oracles and print their reports as JSON");

  Flags fit_f, cmp_f, lrt_f, den_f;
  std::string data_path, group, trace_path, group2, mu_list, angle_list, sweep_list;
  std::vector<std::string> models;
  int angle_N = 3, angle_K = 2;
  long long mc_samples = 200000;
  std::uint64_t check_seed = 20100101;
  std::string check_out;

  auto* fit = app.add_subcommand("fit", "maximum likelihood fit of the mean shape of one group");
  fit->add_option("data", data_path, "landmark TSV file")->required();
  fit->add_option("--group", group, "group label")->required();
  fit->add_option("--trace", trace_path, "iteration trace CSV (default: <out>.trace.csv when --out is set)");
  add_model_flags(fit, fit_f);

  auto* cmp = app.add_subcommand("compare", "fit several models on every group and rank them by BIC*");
  cmp->add_option("data", data_path, "landmark TSV file")->required();
  cmp->add_option("--models", models, "model list such as gaussian kotz:2 kotz:3 (kotz:T or kotz:T:R)")
      ->required();
  add_model_flags(cmp, cmp_f);

  auto* lrt = app.add_subcommand("lrt", "likelihood ratio test of equal mean shapes for two groups");
  lrt->add_option("data", data_path, "landmark TSV file")->required();
  lrt->add_option("--group", group, "first group")->required();
  lrt->add_option("--group2", group2, "second group")->required();
  add_model_flags(lrt, lrt_f);

  auto* den = app.add_subcommand("density", "log-density of each specimen (or of explicit chart angles)");
  den->add_option("data", data_path, "landmark TSV file");
  den->add_option("--mu", mu_list, "row-major mean, comma separated (default 0)");
  den->add_option("--angles", angle_list, "chart angles, comma separated, instead of a data file");
  den->add_option("--N", angle_N, "landmarks for --angles")->capture_default_str();
  den->add_option("--K", angle_K, "dimensions for --angles")->capture_default_str();
  den->add_option("--sweep", sweep_list, "truncations to sweep, comma separated");
  add_model_flags(den, den_f);

  auto* chk = app.add_subcommand("self-check", "run the built-in oracles");
  chk->add_option("--samples", mc_samples, "Monte Carlo samples for the normalization check")->capture_default_str();
  chk->add_option("--seed", check_seed, "seed")->capture_default_str();
  chk->add_option("--out", check_out, "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (self_check_flag || chk->parsed()) return run_self_check(mc_samples, check_seed, check_out);

    if (fit->parsed()) {
      finalize(fit_f);
      const Dataset data = read_landmarks(data_path);
      const FitOutput out = cmd_fit(fit_f.cfg, data, group);
      emit(fit_f.cfg.out, dump(out.json));
      if (trace_path.empty() && !fit_f.cfg.out.empty()) trace_path = fit_f.cfg.out + ".trace.csv";
      if (!trace_path.empty()) emit(trace_path, out.trace_csv);
      return out.fit.optimizer_converged ? 0 : 3;
    }
    if (cmp->parsed()) {
      finalize(cmp_f);
      const Dataset data = read_landmarks(data_path);
      std::vector<RunConfig> configs;
      for (const auto& m : models) {
        RunConfig c = cmp_f.cfg;
        const auto parts = [&] {
          std::vector<std::string> p;
          std::stringstream ss(m);
          std::string item;
          while (std::getline(ss, item, ':')) p.push_back(item);
          return p;
        }();
        c.model = parts.at(0);
        if (c.model == "gaussian") {
          c.T = 1.0;
          c.R = 0.5;
        }
        if (parts.size() > 1) c.T = parse_list(parts[1]).at(0);
        if (parts.size() > 2) c.R = parse_list(parts[2]).at(0);
        configs.push_back(c);
      }
      emit(cmp_f.cfg.out, dump(cmd_compare(configs, data)));
      return 0;
    }
    if (lrt->parsed()) {
      finalize(lrt_f);
      const Dataset data = read_landmarks(data_path);
      const auto j = cmd_lrt(lrt_f.cfg, data, group, group2);
      emit(lrt_f.cfg.out, dump(j));
      return j.at("optimizer_converged").get<bool>() ? 0 : 3;
    }
    if (den->parsed()) {
      finalize(den_f);
      DensityRequest req;
      req.mu = mu_list.empty() ? std::vector<double>{} : parse_list(mu_list);
      for (double t : sweep_list.empty() ? std::vector<double>{} : parse_list(sweep_list))
        req.sweep.push_back(static_cast<int>(t));
      nlohmann::json j;
      if (!angle_list.empty()) {
        j = cmd_density_angles(den_f.cfg, angle_N, angle_K, parse_list(angle_list), req);
      } else {
        if (data_path.empty()) throw DataError("density: give a data file or --angles");
        j = cmd_density(den_f.cfg, read_landmarks(data_path), req);
      }
      emit(den_f.cfg.out, dump(j));
      return 0;
    }
    std::cout << app.help();
    return 0;
  } catch (const NonConvergenceError& e) {
    std::fprintf(stderr, "pwshape: %s\n", e.what());
    return 3;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "pwshape: bad --models entry\n");
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "pwshape: %s\n", e.what());
    return 2;
  }
}
