// solwave: compute and validate small-amplitude solitary waves of
// Fourier-multiplier Boussinesq systems.
//
// Subcommands:
//   check        verify the structural assumptions of a model, report JSON
//   solve        one Newton solve at a fixed eps, write profiles + result
//   sweep        continuation over a descending eps list + rate fit
//   symbol-eval  evaluate a symbol expression at one frequency
//
// Exit codes: 0 success, 1 numerical/assumption failure, 2 usage/config.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "solwave/assumptions.hpp"
#include "solwave/io.hpp"
#include "solwave/models.hpp"
#include "solwave/postprocess.hpp"
#include "solwave/solver.hpp"
#include "solwave/symbol_expr.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace solwave;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  json model_block;  // the top-level model keys, extracted
  double L = 50.0;
  int N = 1024;
  double s = 1.0;
  std::optional<double> eps;
  std::vector<double> eps_list;
  double newton_tol = 1e-11;
  int max_iter = 25;
  double tail_tol = 1e-8;
  std::optional<double> xi1;  // defaults to the model's own window
  double xi_max = 1e4;
  int samples = 4000;
  std::string out_dir = "out";
  bool write_csv = true;
  bool write_json = true;
};

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

double get_num(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) {
    throw ConfigError(std::string("'") + key + "' must be a number");
  }
  return obj.at(key).get<double>();
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config is not valid JSON: ") + err.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  require_keys(doc,
               {"model", "a", "b", "c", "d", "M", "F", "G", "H", "T_outer",
                "T_inner", "T_coeff", "grid", "solve", "check", "output"},
               "config root");
  if (!doc.contains("model") || !doc.at("model").is_string()) {
    throw ConfigError("config needs a string 'model' key");
  }

  RunConfig cfg;
  for (const char* key : {"model", "a", "b", "c", "d", "M", "F", "G", "H",
                          "T_outer", "T_inner", "T_coeff"}) {
    if (doc.contains(key)) cfg.model_block[key] = doc.at(key);
  }

  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    require_keys(g, {"L", "N"}, "grid");
    cfg.L = get_num(g, "L", cfg.L);
    cfg.N = static_cast<int>(get_num(g, "N", cfg.N));
  }
  if (doc.contains("solve")) {
    const json& s = doc.at("solve");
    require_keys(s, {"s", "eps", "eps_list", "newton_tol", "max_iter",
                     "tail_tol"},
                 "solve");
    cfg.s = get_num(s, "s", cfg.s);
    cfg.newton_tol = get_num(s, "newton_tol", cfg.newton_tol);
    cfg.max_iter = static_cast<int>(get_num(s, "max_iter", cfg.max_iter));
    cfg.tail_tol = get_num(s, "tail_tol", cfg.tail_tol);
    if (s.contains("eps")) cfg.eps = get_num(s, "eps", 0.0);
    if (s.contains("eps_list")) {
      if (!s.at("eps_list").is_array()) {
        throw ConfigError("'eps_list' must be an array of numbers");
      }
      for (const json& v : s.at("eps_list")) {
        if (!v.is_number()) throw ConfigError("'eps_list' entries must be numbers");
        cfg.eps_list.push_back(v.get<double>());
      }
    }
  }
  if (doc.contains("check")) {
    const json& c = doc.at("check");
    require_keys(c, {"xi1", "xi_max", "samples"}, "check");
    if (c.contains("xi1")) cfg.xi1 = get_num(c, "xi1", 1.0);
    cfg.xi_max = get_num(c, "xi_max", cfg.xi_max);
    cfg.samples = static_cast<int>(get_num(c, "samples", cfg.samples));
  }
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    require_keys(o, {"dir", "formats"}, "output");
    if (o.contains("dir")) cfg.out_dir = o.at("dir").get<std::string>();
    if (o.contains("formats")) {
      cfg.write_csv = cfg.write_json = false;
      for (const json& f : o.at("formats")) {
        const std::string name = f.get<std::string>();
        if (name == "csv") cfg.write_csv = true;
        else if (name == "json") cfg.write_json = true;
        else throw ConfigError("unknown output format '" + name + "'");
      }
    }
  }

  if (cfg.s < 1.0) throw ConfigError("solve.s must be >= 1");
  if (cfg.newton_tol <= 0.0) throw ConfigError("solve.newton_tol must be > 0");
  if (cfg.max_iter < 1) throw ConfigError("solve.max_iter must be >= 1");
  return cfg;
}

MultiplierSymbol compile_entry(const json& block, const char* key) {
  if (!block.contains(key)) {
    throw ConfigError(std::string("custom model needs key '") + key + "'");
  }
  try {
    return compile_symbol(parse_symbol(block.at(key).get<std::string>()));
  } catch (const ParseError& err) {
    throw ConfigError(std::string("in expression '") + key + "': " + err.what());
  } catch (const UnknownIdentifier& err) {
    throw ConfigError(std::string("in expression '") + key + "': " + err.what());
  }
}

/// Model construction is a numerical concern: abcd violations, degenerate
/// gamma and similar problems surface here, after config validation.
SystemSpec build_model(const json& block) {
  const std::string name = block.at("model").get<std::string>();
  if (name == "asmp" || name == "hp" || name == "ddk") {
    return make_builtin(name);
  }
  if (name == "abcd") {
    for (const char* key : {"a", "b", "c", "d"}) {
      if (!block.contains(key)) {
        throw ConfigError(std::string("abcd model needs key '") + key + "'");
      }
    }
    return make_abcd(block.at("a").get<double>(), block.at("b").get<double>(),
                     block.at("c").get<double>(), block.at("d").get<double>());
  }
  if (name == "custom") {
    const MultiplierSymbol M = compile_entry(block, "M");
    const MultiplierSymbol F = compile_entry(block, "F");
    const MultiplierSymbol G = compile_entry(block, "G");
    const MultiplierSymbol H = compile_entry(block, "H");
    const MultiplierSymbol P = compile_entry(block, "T_outer");
    const MultiplierSymbol Q = compile_entry(block, "T_inner");
    const double t_coeff =
        block.contains("T_coeff") ? block.at("T_coeff").get<double>() : -0.5;
    const double gamma = gamma_of(M, F, G, H);
    double beta = 0.0;
    for (const MultiplierSymbol* sym : {&M, &F, &G, &H}) {
      beta = std::max(beta, detail::derivative_growth_slope(*sym));
    }
    const double s_h = std::max(0.0, detail::value_growth_slope(H));
    const double s_t = std::max(0.0, detail::value_growth_slope(Q)) +
                       std::max(0.0, detail::value_growth_slope(P));
    return SystemSpec{"custom", M, F, G, H, P, Q, t_coeff, gamma,
                      std::max(0.0, beta), s_h, s_t, detail::pick_xi1(M),
                      std::nullopt};
  }
  throw UnknownModel("unknown model '" + name + "'");
}

json report_to_json(const AssumptionReport& rep) {
  json passes = json::array();
  for (bool p : rep.passes) passes.push_back(p);
  return json{{"xi1", rep.xi1},
              {"m1", rep.m1},
              {"m2", rep.m2},
              {"m3", rep.m3},
              {"beta_est", rep.beta_est},
              {"s_h_est", rep.s_h_est},
              {"gamma", rep.gamma},
              {"predicted_exponent", rep.predicted_exponent},
              {"passes", passes},
              {"all_pass", rep.all_pass()},
              {"notes", rep.notes}};
}

void print_error(const std::string& type, const std::string& message,
                 json extra = json::object()) {
  extra["type"] = type;
  extra["message"] = message;
  std::fprintf(stderr, "%s\n", json{{"error", extra}}.dump().c_str());
}

/// Map a thrown library error to its machine-readable name.
template <class Fn>
int run_numerical(Fn&& fn) {
  try {
    return fn();
  } catch (const AbcdConditionViolated& err) {
    print_error("AbcdConditionViolated", err.what(), {{"which", err.which}});
  } catch (const SpectrumCollision& err) {
    print_error("SpectrumCollision", err.what(), {{"xi", err.xi}});
  } catch (const GridUnderResolved& err) {
    print_error("GridUnderResolved", err.what(), {{"tail", err.tail}});
  } catch (const NewtonDiverged& err) {
    print_error("NewtonDiverged", err.what(),
                {{"iterations", err.iterations}, {"last_norm", err.last_norm}});
  } catch (const SymbolSingular& err) {
    print_error("SymbolSingular", err.what(), {{"xi", err.xi}});
  } catch (const GammaZero& err) {
    print_error("GammaZero", err.what());
  } catch (const JacobianSingular& err) {
    print_error("JacobianSingular", err.what());
  } catch (const ScanUnresolved& err) {
    print_error("ScanUnresolved", err.what());
  } catch (const SmoothingMismatch& err) {
    print_error("SmoothingMismatch", err.what());
  } catch (const DerivativeUnstable& err) {
    print_error("DerivativeUnstable", err.what());
  } catch (const InsufficientData& err) {
    print_error("InsufficientData", err.what());
  } catch (const Error& err) {
    print_error("Error", err.what());
  }
  return 1;
}

std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

struct SolveArtifacts {
  SolveResult result;
  double r1 = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  std::optional<Field> physical_v;
  std::optional<Field> eta;

  explicit SolveArtifacts(SolveResult r) : result(std::move(r)) {}
};

SolveArtifacts solve_and_validate(const SystemSpec& spec, double eps,
                                  const Field& init, const RunConfig& cfg) {
  SolveArtifacts art{
      newton_solve(spec, eps, init,
                   SolveConfig{cfg.s, cfg.newton_tol, cfg.max_iter,
                               cfg.tail_tol})};
  art.physical_v = unscale(art.result.V, eps);
  if (spec.kernels) {
    const auto& K = *spec.kernels;
    art.eta = reconstruct_eta(K[2], K[3], *art.physical_v, art.result.omega);
    const auto [r1, r2] = system_residual(K[0], K[1], K[2], K[3], *art.eta,
                                          *art.physical_v, art.result.omega,
                                          cfg.s);
    art.r1 = r1;
    art.r2 = r2;
  }
  return art;
}

json result_to_json(const SolveArtifacts& art) {
  json j{{"eps", art.result.eps},
         {"omega", art.result.omega},
         {"iterations", art.result.iterations},
         {"phi_norm", art.result.phi_norm},
         {"deviation", art.result.deviation}};
  j["r1"] = std::isnan(art.r1) ? json() : json(art.r1);
  j["r2"] = std::isnan(art.r2) ? json() : json(art.r2);
  return j;
}

int cmd_check(const RunConfig& cfg) {
  return run_numerical([&] {
    AssumptionReport rep;
    try {
      const SystemSpec spec = build_model(cfg.model_block);
      rep = check_assumptions(spec, cfg.xi1.value_or(spec.xi1),
                              ScanParams{cfg.xi_max, cfg.samples});
    } catch (const AbcdConditionViolated& err) {
      rep.notes.push_back(err.what());
      std::printf("%s\n",
                  json{{"assumption_report", report_to_json(rep)}}.dump(2).c_str());
      return 1;
    }
    std::printf("%s\n",
                json{{"assumption_report", report_to_json(rep)}}.dump(2).c_str());
    return rep.all_pass() ? 0 : 1;
  });
}

int cmd_solve(const RunConfig& cfg) {
  if (!cfg.eps) throw ConfigError("solve needs solve.eps");
  if (!(*cfg.eps > 0.0 && *cfg.eps < 1.0)) {
    throw ConfigError("solve.eps must lie in (0, 1)");
  }
  return run_numerical([&] {
    const SystemSpec spec = build_model(cfg.model_block);
    const Grid grid(cfg.L, cfg.N);
    const AssumptionReport rep =
        check_assumptions(spec, cfg.xi1.value_or(spec.xi1),
                          ScanParams{cfg.xi_max, cfg.samples});
    if (!rep.all_pass()) {
      print_error("AssumptionFailure",
                  "model fails the structural assumptions; see `check`");
      return 1;
    }
    const SolveArtifacts art = solve_and_validate(
        spec, *cfg.eps, kdv_profile(spec.gamma, grid), cfg);

    fs::create_directories(cfg.out_dir);
    const std::string tag = eps_tag(*cfg.eps);
    if (cfg.write_csv) {
      write_profile_csv(cfg.out_dir + "/profile_eps" + tag + ".csv",
                        *art.physical_v, art.eta ? &*art.eta : nullptr);
      write_field_csv(cfg.out_dir + "/rescaled_eps" + tag + ".csv",
                      art.result.V);
      write_coeffs_csv(cfg.out_dir + "/coeffs_eps" + tag + ".csv",
                       art.result.V);
    }
    const json out = result_to_json(art);
    if (cfg.write_json) {
      std::ofstream(cfg.out_dir + "/result_eps" + tag + ".json")
          << out.dump(2) << '\n';
    }
    std::printf("%s\n", out.dump(2).c_str());
    return 0;
  });
}

int cmd_sweep(const RunConfig& cfg) {
  if (cfg.eps_list.size() < 3) {
    throw ConfigError(
        "sweep needs solve.eps_list with at least 3 descending values "
        "(the rate fit is otherwise underdetermined)");
  }
  return run_numerical([&] {
    const SystemSpec spec = build_model(cfg.model_block);
    const Grid grid(cfg.L, cfg.N);
    const AssumptionReport rep =
        check_assumptions(spec, cfg.xi1.value_or(spec.xi1),
                          ScanParams{cfg.xi_max, cfg.samples});
    if (!rep.all_pass()) {
      print_error("AssumptionFailure",
                  "model fails the structural assumptions; see `check`");
      return 1;
    }

    fs::create_directories(cfg.out_dir);
    const SolveConfig solve_cfg{cfg.s, cfg.newton_tol, cfg.max_iter,
                                cfg.tail_tol};
    const SweepOutcome sweep =
        continuation_sweep(spec, cfg.eps_list, grid, solve_cfg);

    std::vector<SweepRow> rows;
    std::vector<SolveResult> results;
    for (const SolveResult& r : sweep.results) {
      SolveArtifacts art{r};
      art.physical_v = unscale(r.V, r.eps);
      if (spec.kernels) {
        const auto& K = *spec.kernels;
        art.eta = reconstruct_eta(K[2], K[3], *art.physical_v, r.omega);
        const auto [r1, r2] = system_residual(
            K[0], K[1], K[2], K[3], *art.eta, *art.physical_v, r.omega, cfg.s);
        art.r1 = r1;
        art.r2 = r2;
      }
      rows.push_back(SweepRow{r.eps, r.omega, r.iterations, r.phi_norm,
                              r.deviation, art.r1, art.r2});
      results.push_back(r);
    }
    if (cfg.write_csv) {
      write_sweep_csv(cfg.out_dir + "/sweep.csv", rows);
    }

    if (!sweep.ok()) {
      print_error("SweepFailure",
                  "sweep aborted at eps = " + eps_tag(sweep.failure->eps) +
                      ": " + sweep.failure->message);
      return 1;
    }

    const RateStudy study =
        rate_fit(results, kdv_profile(spec.gamma, grid), cfg.s, rep);
    const json rate{{"rate_study",
                     json{{"eps", study.eps},
                          {"deviations", study.deviations},
                          {"fitted_slope", study.fitted_slope},
                          {"fit_r2", study.fit_r2},
                          {"predicted_exponent", study.predicted_exponent}}}};
    if (cfg.write_json) {
      std::ofstream(cfg.out_dir + "/rate.json") << rate.dump(2) << '\n';
    }
    std::printf("%s\n", rate.dump(2).c_str());
    return study.fitted_slope >= 1.0 ? 0 : 1;
  });
}

int cmd_symbol_eval(const std::string& expr, double xi) {
  // malformed expressions are usage errors; they propagate to main
  const SymbolExpr parsed = parse_symbol(expr);
  return run_numerical([&] {
    const MultiplierSymbol sym = compile_symbol(parsed);
    std::printf("%.17g\n", eval_symbol(sym, xi));
    return 0;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "pseudo-spectral solitary-wave solver for Fourier-multiplier "
      "Boussinesq systems"};
  app.require_subcommand(1);

  std::string config_path, out_dir_override;
  std::string expr_arg;
  double xi_arg = 0.0;

  CLI::App* check = app.add_subcommand("check", "verify model assumptions");
  check->add_option("--config", config_path, "JSON config file")->required();
  check->add_option("--out", out_dir_override, "output directory");

  CLI::App* solve = app.add_subcommand("solve", "solve at a single eps");
  solve->add_option("--config", config_path, "JSON config file")->required();
  solve->add_option("--out", out_dir_override, "output directory");

  CLI::App* sweep = app.add_subcommand("sweep", "continuation sweep + rate fit");
  sweep->add_option("--config", config_path, "JSON config file")->required();
  sweep->add_option("--out", out_dir_override, "output directory");

  CLI::App* symbol_eval =
      app.add_subcommand("symbol-eval", "evaluate a symbol expression");
  symbol_eval->add_option("expr", expr_arg, "expression in k")->required();
  symbol_eval->add_option("xi", xi_arg, "frequency")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) return app.exit(err);  // --help
    print_error("UsageError", err.what());
    return 2;
  }

  try {
    if (*symbol_eval) return cmd_symbol_eval(expr_arg, xi_arg);
    RunConfig cfg = load_config(config_path);
    if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
    if (*check) return cmd_check(cfg);
    if (*solve) return cmd_solve(cfg);
    if (*sweep) return cmd_sweep(cfg);
  } catch (const ConfigError& err) {
    print_error("ConfigError", err.what());
    return 2;
  } catch (const ParseError& err) {
    print_error("ParseError", err.what(),
                {{"position", err.position}, {"expected", err.expected}});
    return 2;
  } catch (const UnknownIdentifier& err) {
    print_error("UnknownIdentifier", err.what(), {{"name", err.name}});
    return 2;
  } catch (const UnknownModel& err) {
    print_error("UnknownModel", err.what());
    return 2;
  } catch (const BadGrid& err) {
    print_error("BadGrid", err.what());
    return 2;
  }
  return 2;
}
