// bumplab: batch front-end. Each subcommand resolves a config (defaults, then
// --config file, then flags), runs one computation, and writes a JSON report
// embedding the resolved config plus CSV plot data.
//
// Exit codes: 0 success, 1 usage error, 2 invalid input, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bumplab/bumplab.hpp"
#include "bumplab/config.hpp"
#include "bumplab/function_spec.hpp"
#include "bumplab/serialize.hpp"

namespace fs = std::filesystem;
using namespace bumplab;

namespace {

struct Flags {
  std::string config_path;
  std::optional<double> L;
  std::optional<std::size_t> m;
  std::optional<std::string> u, v, b, b_bmo, f, preset, family, op, out_dir;
  std::optional<double> p, delta, a_left, a_right, eta_cells, a, rel_tol, N0;
  std::optional<std::size_t> count, cube_first, cube_cells;
  std::optional<std::uint64_t> seed;
  std::vector<double> N_list;
  std::vector<long> shift_list;
  std::vector<std::size_t> K_list;
  std::vector<std::string> formats;
  bool allow_large_shift = false;
};

// Flags that were given, as a config patch.
json flag_patch(const Flags& fl, bool orlicz_p) {
  json j = json::object();
  auto set = [&](const char* section, const char* key, const auto& opt) {
    if (opt) j[section][key] = *opt;
  };
  set("grid", "L", fl.L);
  set("grid", "m", fl.m);
  set("weights", "u", fl.u);
  set("weights", "v", fl.v);
  set(orlicz_p ? "orlicz" : "bump", "p", fl.p);
  set("bump", "delta", fl.delta);
  set("bump", "preset", fl.preset);
  set("bump", "a_left", fl.a_left);
  set("bump", "a_right", fl.a_right);
  set("bump", "family", fl.family);
  set("operator", "eta_cells", fl.eta_cells);
  set("operator", "op", fl.op);
  set("symbol", "b", fl.b);
  set("symbol", "b_bmo", fl.b_bmo);
  set("input", "f", fl.f);
  if (fl.cube_first) j["input"]["cube"]["first"] = *fl.cube_first;
  if (fl.cube_cells) j["input"]["cube"]["cells"] = *fl.cube_cells;
  set("orlicz", "a", fl.a);
  set("orlicz", "rel_tol", fl.rel_tol);
  if (fl.count) j["probes"]["kr"]["count"] = *fl.count;
  if (fl.seed) j["probes"]["kr"]["seed"] = *fl.seed;
  if (!fl.N_list.empty()) j["probes"]["kr"]["N_list"] = fl.N_list;
  if (!fl.shift_list.empty()) j["probes"]["kr"]["shift_list"] = fl.shift_list;
  if (fl.allow_large_shift) j["probes"]["kr"]["allow_large_shift"] = true;
  if (fl.N0) j["probes"]["tail"]["N0"] = *fl.N0;
  if (!fl.K_list.empty()) j["probes"]["spectral"]["K_list"] = fl.K_list;
  set("output", "dir", fl.out_dir);
  if (!fl.formats.empty()) j["output"]["formats"] = fl.formats;
  return j;
}

ExperimentConfig resolve(const Flags& fl, bool orlicz_p) {
  const json file = fl.config_path.empty() ? json::object() : read_config_file(fl.config_path);
  return resolve_config(file, flag_patch(fl, orlicz_p));
}

// --- shared builders --------------------------------------------------------

struct Context {
  ExperimentConfig cfg;
  Grid grid;
  NamedFunctions named;

  explicit Context(ExperimentConfig c) : cfg(std::move(c)), grid(make_grid(cfg.L, cfg.m)) {}

  GridFunction fn(const std::string& spec) { return build_function(grid, spec, named); }

  WeightPair weights() {
    GridFunction u = fn(cfg.u);
    named.insert_or_assign("u", u);
    GridFunction v = fn(cfg.v);
    named.insert_or_assign("v", v);
    return make_weight_pair(std::move(u), std::move(v));
  }

  CubeFamily family() const {
    return cfg.family == "dyadic" ? dyadic_family(grid) : shifted_dyadic_family(grid);
  }

  Cube cube() const {
    if (cfg.cube_cells == 0) return whole_domain(grid);
    return Cube{cfg.cube_first, cfg.cube_cells};
  }

  TruncationSpec truncation() const { return truncation_in_cells(grid, cfg.eta_cells); }

  BumpSpec bump_spec() const {
    const BumpPreset preset = parse_preset(cfg.preset);
    BumpSpec s = preset == BumpPreset::custom ? make_custom_bump(cfg.p, *cfg.a_left, *cfg.a_right, cfg.delta)
                                              : make_bump_spec(preset, cfg.p, cfg.delta);
    if (cfg.a_left) s.a_left = *cfg.a_left;
    if (cfg.a_right) s.a_right = *cfg.a_right;
    return s;
  }
};

class Output {
public:
  Output(std::string command, const ExperimentConfig& cfg) : command_(std::move(command)), cfg_(cfg) {}

  void csv(const std::string& name, const std::string& body) {
    if (cfg_.wants("csv")) files_.emplace_back(stem() + "_" + name + ".csv", body);
  }

  // Writes the report and every pending CSV; nothing is written if the run failed earlier.
  void finish(const json& result) {
    json report = json::object();
    report["command"] = command_;
    report["config"] = to_json(cfg_);
    report["result"] = result;
    const std::string text = report.dump(2) + "\n";
    const fs::path dir = cfg_.out_dir;
    if (cfg_.wants("json")) atomic_write(dir / (stem() + ".json"), text);
    for (const auto& [name, body] : files_) atomic_write(dir / name, body);
    std::cout << text;
  }

private:
  std::string stem() const {
    std::string s = command_;
    for (char& c : s) {
      if (c == ' ') c = '_';
    }
    return s;
  }

  std::string command_;
  const ExperimentConfig& cfg_;
  std::vector<std::pair<std::string, std::string>> files_;
};

// --- subcommands --------------------------------------------------------------

void run_orlicz(const Flags& fl) {
  Context ctx(resolve(fl, true));
  const GridFunction f = ctx.fn(ctx.cfg.f);
  const Cube q = ctx.cube();
  const YoungFunction phi = make_young(ctx.cfg.orlicz_p, ctx.cfg.orlicz_a);
  const OrliczAverage r = orlicz_average(f, q, phi, ctx.cfg.rel_tol);
  Output out("orlicz", ctx.cfg);
  out.finish({{"value", r.value},
              {"iterations", r.iterations},
              {"bracket", {r.lower, r.upper}},
              {"cube", cube_json(ctx.grid, q)},
              {"young", {{"p", phi.p}, {"a", phi.a}}}});
}

void run_bmo(const Flags& fl) {
  Context ctx(resolve(fl, false));
  const GridFunction f = ctx.fn(ctx.cfg.f);
  const CubeFamily fam = ctx.family();
  Output out("bmo", ctx.cfg);
  out.finish({{"bmo_norm", bmo_norm(f, fam)}, {"family", fam.name}});
}

void run_ap(const Flags& fl) {
  Context ctx(resolve(fl, false));
  const GridFunction w = ctx.fn(ctx.cfg.u);
  const CubeFamily fam = ctx.family();
  const BumpReport r = ap_constant(w, ctx.cfg.p, fam);
  Output out("ap", ctx.cfg);
  out.finish({{"constant", r.constant}, {"argmax", cube_json(ctx.grid, r.argmax)}, {"family", r.family}, {"p", ctx.cfg.p}});
}

void run_bump(const Flags& fl) {
  Context ctx(resolve(fl, false));
  const WeightPair pair = ctx.weights();
  const BumpSpec spec = ctx.bump_spec();
  const CubeFamily fam = ctx.family();
  const BumpReport r = bump_constant(pair, spec, fam);
  Output out("bump", ctx.cfg);
  json result = to_json(r, ctx.grid, spec);
  result["two_weight_ap"] = two_weight_ap(pair, spec.p, fam).constant;
  out.finish(result);
}

void run_weights_gen(const Flags& fl) {
  Context ctx(resolve(fl, false));
  const WeightPair pair = ctx.weights();
  Output out("weights gen", ctx.cfg);
  out.csv("u", grid_function_csv(pair.u));
  out.csv("v", grid_function_csv(pair.v));
  auto summary = [](const GridFunction& w) {
    const auto [lo, hi] = std::minmax_element(w.values.begin(), w.values.end());
    return json{{"min", *lo}, {"max", *hi}};
  };
  out.finish({{"u", summary(pair.u)}, {"v", summary(pair.v)}});
}

void run_op_apply(const Flags& fl) {
  Context ctx(resolve(fl, false));
  const GridFunction f = ctx.fn(ctx.cfg.f);
  const HilbertKernel k;
  const std::string& op = ctx.cfg.op;
  GridFunction g(ctx.grid);
  json result = {{"op", op}};
  if (op == "M") {
    g = maximal_fn(f);
  } else if (op == "Teta") {
    g = apply_truncated(f, ctx.truncation(), k);
    result["eta"] = ctx.truncation().eta;
  } else if (op == "Tsharp") {
    g = maximal_truncation(f, k);
  } else {
    g = commutator(ctx.fn(ctx.cfg.b), f, ctx.truncation(), k);
    result["eta"] = ctx.truncation().eta;
  }
  result["max_abs"] = max_abs(g);
  Output out("op apply", ctx.cfg);
  out.csv("output", grid_function_csv(g));
  out.finish(result);
}

void run_probe_kr(const Flags& fl) {
  Context ctx(resolve(fl, false));
  const WeightPair pair = ctx.weights();
  const GridFunction b = ctx.fn(ctx.cfg.b);
  const HilbertKernel k;
  const UnitBallSample sample = sample_unit_ball(pair.v, ctx.cfg.p, ctx.cfg.count, ctx.cfg.seed);
  const KRReport r = kr_probe(sample, b, ctx.truncation(), k, pair.u, ctx.cfg.p, ctx.cfg.resolved_N_list(), ctx.cfg.shift_list,
                              ctx.cfg.allow_large_shift);
  json result = to_json(r);
  if (ctx.cfg.N0 > 0.0) {
    result["tail_constant"] = to_json(tail_constant(b, ctx.truncation(), k, pair.v, ctx.cfg.p, sample, ctx.cfg.N0));
  }
  Output out("probe kr", ctx.cfg);
  out.csv("tail", curve_csv(r.tail_curve, "N,tail"));
  out.csv("modulus", curve_csv(r.modulus_curve, "h,modulus"));
  out.finish(result);
}

void require_p2(const ExperimentConfig& cfg) {
  require(cfg.p == 2.0, "the spectral probe is defined for p = 2 only");
}

void run_probe_svd(const Flags& fl) {
  Context ctx(resolve(fl, false));
  require_p2(ctx.cfg);
  const WeightPair pair = ctx.weights();
  const GridFunction b = ctx.fn(ctx.cfg.b);
  const auto K_list = ctx.cfg.resolved_K_list();
  const SpectralReport r =
      spectral_report(singular_values(operator_matrix(b, ctx.truncation(), HilbertKernel{}, pair.u, pair.v)), K_list);
  Output out("probe svd", ctx.cfg);
  out.csv("sigma", sigma_csv(r.singular_values));
  out.finish(to_json(r));
}

void run_compare(const Flags& fl) {
  Context ctx(resolve(fl, false));
  require_p2(ctx.cfg);
  const WeightPair pair = ctx.weights();
  const auto K_list = ctx.cfg.resolved_K_list();
  const DecayComparison c = decay_compare(ctx.fn(ctx.cfg.b), ctx.fn(ctx.cfg.b_bmo), ctx.truncation(), HilbertKernel{},
                                          pair.u, pair.v, K_list, ctx.family());
  Output out("compare", ctx.cfg);
  out.csv("cmo_sigma", sigma_csv(c.cmo.singular_values));
  out.csv("bmo_sigma", sigma_csv(c.bmo.singular_values));
  out.finish(to_json(c));
}

// --- flag registration ----------------------------------------------------------

void add_common(CLI::App* app, Flags& fl) {
  app->add_option("--config", fl.config_path, "JSON config file (a previous report also works)");
  app->add_option("--L", fl.L, "half-width of the domain [-L, L]");
  app->add_option("--m", fl.m, "number of cells (power of two >= 4)");
  app->add_option("--out", fl.out_dir, "output directory");
  app->add_option("--format", fl.formats, "output formats (json, csv)");
}

void add_weights(CLI::App* app, Flags& fl) {
  app->add_option("--u", fl.u, "weight u, as a function spec");
  app->add_option("--v", fl.v, "weight v, as a function spec (may reference u, e.g. M5:u)");
}

void add_bump(CLI::App* app, Flags& fl) {
  app->add_option("--p", fl.p, "exponent p > 1");
  app->add_option("--delta", fl.delta, "bump delta > 0");
  app->add_option("--preset", fl.preset, "max, czo, comm or custom");
  app->add_option("--a-left", fl.a_left, "log exponent on the u side");
  app->add_option("--a-right", fl.a_right, "log exponent on the v side");
}

void add_family(CLI::App* app, Flags& fl) {
  app->add_option("--family", fl.family, "cube family: dyadic or dyadic+half-shift");
}

void add_operator(CLI::App* app, Flags& fl) {
  app->add_option("--eta-cells", fl.eta_cells, "truncation radius in cells (>= 2)");
  app->add_option("--b", fl.b, "commutator symbol b, as a function spec");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"bumplab: Orlicz bumps, weighted constants, and commutator compactness probes"};
  app.require_subcommand(1);
  Flags fl;
  std::function<void()> action;

  auto* orlicz = app.add_subcommand("orlicz", "Orlicz average of f over a cube");
  add_common(orlicz, fl);
  orlicz->add_option("--f", fl.f, "function spec");
  orlicz->add_option("--p", fl.p, "Young exponent p > 1");
  orlicz->add_option("--a", fl.a, "Young log exponent a >= 0");
  orlicz->add_option("--cube-first", fl.cube_first, "first cell of the cube");
  orlicz->add_option("--cube-cells", fl.cube_cells, "cube length in cells (0 = whole domain)");
  orlicz->add_option("--rel-tol", fl.rel_tol, "relative bisection tolerance");
  orlicz->callback([&] { action = [&] { run_orlicz(fl); }; });

  auto* bmo = app.add_subcommand("bmo", "BMO norm of f over a cube family");
  add_common(bmo, fl);
  add_family(bmo, fl);
  bmo->add_option("--f", fl.f, "function spec");
  bmo->callback([&] { action = [&] { run_bmo(fl); }; });

  auto* ap = app.add_subcommand("ap", "A_p constant of the weight u");
  add_common(ap, fl);
  add_family(ap, fl);
  ap->add_option("--u", fl.u, "weight, as a function spec");
  ap->add_option("--p", fl.p, "exponent p > 1");
  ap->callback([&] { action = [&] { run_ap(fl); }; });

  auto* bump = app.add_subcommand("bump", "two-weight bump constant");
  add_common(bump, fl);
  add_weights(bump, fl);
  add_bump(bump, fl);
  add_family(bump, fl);
  bump->callback([&] { action = [&] { run_bump(fl); }; });

  auto* weights = app.add_subcommand("weights", "weight utilities");
  weights->require_subcommand(1);
  auto* gen = weights->add_subcommand("gen", "emit u and v on the grid");
  add_common(gen, fl);
  add_weights(gen, fl);
  gen->callback([&] { action = [&] { run_weights_gen(fl); }; });

  auto* op = app.add_subcommand("op", "operator utilities");
  op->require_subcommand(1);
  auto* apply = op->add_subcommand("apply", "apply M, T^eta, T# or [b, T^eta] to f");
  add_common(apply, fl);
  add_operator(apply, fl);
  apply->add_option("--op", fl.op, "M, Teta, Tsharp or commutator");
  apply->add_option("--f", fl.f, "function spec");
  apply->callback([&] { action = [&] { run_op_apply(fl); }; });

  auto* probe = app.add_subcommand("probe", "compactness probes");
  probe->require_subcommand(1);
  auto* kr = probe->add_subcommand("kr", "Kolmogorov-Riesz probe of [b, T^eta]");
  add_common(kr, fl);
  add_weights(kr, fl);
  add_operator(kr, fl);
  kr->add_option("--p", fl.p, "exponent p > 1");
  kr->add_option("--count", fl.count, "unit-ball sample size");
  kr->add_option("--seed", fl.seed, "sample seed");
  kr->add_option("--N", fl.N_list, "tail radii");
  kr->add_option("--shift", fl.shift_list, "shifts in cells");
  kr->add_flag("--allow-large-shift", fl.allow_large_shift, "permit shifts of eta/4 or more");
  kr->add_option("--N0", fl.N0, "radius for the tail constant (0 skips it)");
  kr->callback([&] { action = [&] { run_probe_kr(fl); }; });

  auto* svd = probe->add_subcommand("svd", "singular values of u^{1/2} [b, T^eta] v^{-1/2} (p = 2)");
  add_common(svd, fl);
  add_weights(svd, fl);
  add_operator(svd, fl);
  svd->add_option("--K", fl.K_list, "tail indices");
  svd->callback([&] { action = [&] { run_probe_svd(fl); }; });

  auto* compare = app.add_subcommand("compare", "singular-value decay for a CMO and a BMO symbol (p = 2)");
  add_common(compare, fl);
  add_weights(compare, fl);
  add_operator(compare, fl);
  add_family(compare, fl);
  compare->add_option("--b-bmo", fl.b_bmo, "contrast symbol, rescaled to the BMO norm of b");
  compare->add_option("--K", fl.K_list, "tail indices");
  compare->callback([&] { action = [&] { run_compare(fl); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ConversionError& e) {
    app.exit(e);
    return 2;
  } catch (const CLI::ValidationError& e) {
    app.exit(e);
    return 2;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    action();
  } catch (const bumplab::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
