#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <set>

#include "run.hpp"
#include "smallcap/error.hpp"
#include "smallcap/geometry.hpp"
#include "smallcap/harness.hpp"
#include "smallcap/parallel.hpp"

namespace smallcap::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(rounded(v)) : json(format_number(v)); }

json vec_json(const Vec3& v) { return json::array({num(v[0]), num(v[1]), num(v[2])}); }

std::string vec_text(const Vec3& v) {
  return "(" + format_number(v[0]) + ", " + format_number(v[1]) + ", " + format_number(v[2]) + ")";
}

struct CommonArgs {
  std::string out = ".";
  unsigned workers = 1;
  double budget_tuples = static_cast<double>(kDefaultTupleBudget);
  double budget_cells = static_cast<double>(kDefaultQuadratureCellBudget);
  std::string run_id;

  std::uint64_t tuples() const { return static_cast<std::uint64_t>(budget_tuples); }
  std::size_t cells() const { return static_cast<std::size_t>(budget_cells); }

  json budgets() const { return {{"tuples", tuples()}, {"cells", cells()}}; }
};

void add_common(CLI::App* sub, CommonArgs& c) {
  sub->add_option("--out", c.out, "Output directory (results/, tables/, manifests/)")
      ->capture_default_str();
  sub->add_option("--workers", c.workers, "Worker threads")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
  sub->add_option("--budget-tuples", c.budget_tuples, "Max enumerated tuples")
      ->check(CLI::Range(1.0, 1e18))
      ->capture_default_str();
  sub->add_option("--budget-cells", c.budget_cells, "Max quadrature cells per pass")
      ->check(CLI::Range(1.0, 1e18))
      ->capture_default_str();
  sub->add_option("--run-id", c.run_id, "Run id (default: UTC time plus random suffix)");
}

/// Runs `body` inside a run context and maps exceptions to exit codes.
template <class Body>
int guarded(RunContext& ctx, Body&& body) {
  try {
    const int code = body();
    ctx.finish(code == kExitOk ? "ok" : "check_failed");
    return code;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.finish("FAILED", e.what());
    return kExitValidation;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    ctx.finish("FAILED", e.what());
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    ctx.finish("FAILED", e.what());
    return kExitInternal;
  }
}

// ------------------------------------------------------------------ moment

struct MomentArgs {
  std::int64_t N = 0;
  double sigma = 0.0;
  double h0 = 0.0;
  int s = 2;
  std::optional<double> p;
  std::string coeffs = "constant";
  std::uint64_t seed = 1;
  std::string method = "exact";
  double oversample = kDefaultOversample;
};

int run_moment(const MomentArgs& a, const CommonArgs& common, RunContext& ctx) {
  ctx.config = {{"N", a.N},          {"sigma", num(a.sigma)},  {"h0", num(a.h0)},
                {"s", a.s},          {"coeffs", a.coeffs},     {"method", a.method},
                {"oversample", num(a.oversample)}};
  if (a.p) ctx.config["p"] = num(*a.p);
  ctx.seeds = json::array({a.seed});
  ctx.budgets = common.budgets();
  return guarded(ctx, [&] {
    if (a.N < 1) throw ValidationError("N must be >= 1");
    if (a.p && a.method != "quad") throw ValidationError("--p only applies to --method quad");
    const auto family = parse_family(a.coeffs);
    ExpSumSpec spec{a.N, make_coeffs(family, a.N, a.seed), a.sigma, a.h0};
    spec.validate();
    MomentResult r;
    double p = 2.0 * a.s;
    if (a.method == "exact") {
      r = moment_exact(spec, a.s, common.tuples());
    } else if (a.method == "brute") {
      r = moment_brute(spec, a.s, common.tuples());
    } else {
      if (a.p) p = *a.p;
      r = moment_quadrature(spec, p, a.oversample, common.cells());
    }
    json rec = ctx.result_header();
    rec["N"] = a.N;
    rec["sigma"] = num(a.sigma);
    rec["h0"] = num(a.h0);
    rec["s"] = a.s;
    rec["p"] = num(p);
    rec["coeffs"] = std::string(family_name(family));
    rec["seed"] = a.seed;
    rec["method"] = std::string(method_name(r.method));
    rec["value"] = num(r.value);
    rec["err_estimate"] = num(r.err_estimate);
    ctx.write_json(ctx.results_path(), rec);
    std::cout << "moment N=" << a.N << " sigma=" << format_number(a.sigma) << " s=" << a.s
              << " p=" << format_number(p) << " coeffs=" << family_name(family)
              << " method=" << method_name(r.method) << " value=" << format_number(r.value)
              << " err_estimate=" << format_number(r.err_estimate) << " run=" << ctx.id()
              << "\n";
    return kExitOk;
  });
}

// ------------------------------------------------------------------- sweep

json plan_snapshot(const SweepPlan& plan) {
  json c = {{"name", plan.name}, {"kind", plan.kind}};
  if (plan.kind == "mainexp") {
    const auto& m = plan.mainexp;
    c["N"] = m.N;
    c["sigma"] = num(m.sigma);
    c["s"] = m.s;
    c["coeffs"] = std::string(family_name(m.family));
    c["h0"] = num(m.h0);
    c["h0_policy"] = m.random_h0 ? "random" : "fixed";
    c["method"] = std::string(method_name(m.method));
    c["oversample"] = num(m.oversample);
    c["tolerance"] = num(m.tolerance);
  } else if (plan.kind == "maincor") {
    const auto& m = plan.maincor;
    json rs = json::array();
    for (double r : m.R) rs.push_back(num(r));
    c["R"] = rs;
    c["beta"] = num(m.beta);
    c["p"] = num(m.p);
    c["coeffs"] = std::string(family_name(m.family));
    c["oversample"] = num(m.oversample);
    c["translates"] = m.translates;
    c["cell_side"] = num(m.cell_side);
    c["tolerance"] = num(m.tolerance);
  } else {
    json xs = json::array();
    for (double x : plan.synthetic_x) xs.push_back(num(x));
    c["N"] = xs;
    c["exponent"] = num(plan.synthetic_exponent);
    c["scale"] = num(plan.synthetic_scale);
    c["tolerance"] = num(plan.synthetic_tolerance);
  }
  return c;
}

std::vector<std::string> row_cells(const SweepRow& r) {
  return {format_number(r.x),          format_number(r.value), format_number(r.envelope),
          std::to_string(r.seed_count), r.method,               format_number(r.err_estimate)};
}

SweepResult run_synthetic(const SweepPlan& plan, const std::function<void(const SweepRow&)>& on_row) {
  SweepResult res;
  res.kind = "synthetic";
  std::vector<std::pair<double, double>> pts;
  for (double x : plan.synthetic_x) {
    SweepRow row;
    row.x = x;
    row.value = plan.synthetic_scale * std::pow(x, plan.synthetic_exponent);
    row.envelope = std::pow(x, plan.synthetic_exponent);
    row.seed_count = 1;
    row.method = "synthetic";
    res.rows.push_back(row);
    pts.emplace_back(x, row.value);
    on_row(row);
  }
  res.fit = exponent_fit(pts);
  res.target = plan.synthetic_exponent;
  res.tolerance = plan.synthetic_tolerance;
  res.envelope_constant = plan.synthetic_scale;
  res.pass = std::abs(res.fit.slope - res.target) <= res.tolerance;
  return res;
}

int run_sweep(const std::string& path, const CommonArgs& common, const CLI::App* sub,
              RunContext& ctx) {
  ctx.budgets = common.budgets();
  return guarded(ctx, [&] {
    SweepPlan plan = SweepPlan::from_doc(ConfigDoc::load(path), fs::path(path).stem().string());
    if (sub->count("--budget-tuples")) plan.mainexp.max_tuples = common.tuples();
    if (sub->count("--budget-cells")) {
      plan.mainexp.max_cells = common.cells();
      plan.maincor.max_cells = common.cells();
    }
    ctx.config = plan_snapshot(plan);
    ctx.config["source"] = path;
    const auto& seeds = plan.kind == "maincor" ? plan.maincor.seeds : plan.mainexp.seeds;
    ctx.seeds = plan.kind == "synthetic" ? json::array() : json(seeds);
    ctx.budgets = {{"tuples", plan.mainexp.max_tuples},
                   {"cells", plan.kind == "maincor" ? plan.maincor.max_cells
                                                    : plan.mainexp.max_cells}};

    CsvTable table;
    table.header = {plan.kind == "maincor" ? "R" : "N", "value",  "envelope",
                    "seed_count",                       "method", "err_estimate"};
    const fs::path table_file = ctx.table_path(plan.name);
    auto on_row = [&](const SweepRow& row) {
      table.rows.push_back(row_cells(row));
      ctx.write_output(table_file, table.str());
    };
    ctx.write_output(table_file, table.str());

    SweepResult res;
    if (plan.kind == "mainexp") {
      plan.mainexp.on_row = on_row;
      res = verify_mainexp_bound(plan.mainexp);
    } else if (plan.kind == "maincor") {
      plan.maincor.on_row = on_row;
      res = verify_maincor(plan.maincor);
    } else {
      res = run_synthetic(plan, on_row);
    }

    const std::string status = res.pass ? "PASS" : "FAIL";
    CsvTable fit;
    fit.header = {"kind",     "slope",     "intercept",         "max_residual", "n_points",
                  "target",   "tolerance", "envelope_constant", "status"};
    fit.rows.push_back({res.kind, format_number(res.fit.slope), format_number(res.fit.intercept),
                        format_number(res.fit.max_residual), std::to_string(res.fit.n_points),
                        format_number(res.target), format_number(res.tolerance),
                        format_number(res.envelope_constant), status});
    const fs::path fit_file = ctx.out() / "tables" / (plan.name + "-" + ctx.id() + "-fit.csv");
    ctx.write_output(fit_file, fit.str());

    json rec = ctx.result_header();
    rec["name"] = plan.name;
    rec["kind"] = res.kind;
    rec["table"] = fs::relative(table_file, ctx.out()).generic_string();
    rec["fit_table"] = fs::relative(fit_file, ctx.out()).generic_string();
    rec["slope"] = num(res.fit.slope);
    rec["intercept"] = num(res.fit.intercept);
    rec["max_residual"] = num(res.fit.max_residual);
    rec["n_points"] = res.fit.n_points;
    rec["target"] = num(res.target);
    rec["tolerance"] = num(res.tolerance);
    rec["envelope_constant"] = num(res.envelope_constant);
    rec["status"] = status;
    ctx.write_json(ctx.results_path(), rec);
    std::cout << "sweep " << plan.name << " kind=" << res.kind
              << " slope=" << format_number(res.fit.slope)
              << " target=" << format_number(res.target)
              << " tolerance=" << format_number(res.tolerance) << " " << status
              << " run=" << ctx.id() << "\n";
    return res.pass ? kExitOk : kExitCheckFailed;
  });
}

// ---------------------------------------------------------------- geometry

struct GeometryArgs {
  std::string check;
  double R = 1048576.0;
  double beta = 0.75;
  double c_eps = 1.0;
  double eps = 0.05;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  int case_id = 0;
  double r_k = 0.0;
  double r_next = 0.0;
  double r = 0.0;
  double R_k = 0.0;
  double R_next = 0.0;
  double R_prev = 4096.0;
  std::int64_t l = 3;
  double threshold = 0.0;
  std::int64_t N = 64;
  double sigma = 0.0;
  std::string coeffs = "random_sign";
  int bands = 16;
  int E = 2;
};

struct GeometryRun {
  json labels;
  GeometryReport report;
};

/// Consecutive (r_k, r_next) pairs, or the single pair given on the command line.
std::vector<std::pair<double, double>> scale_pairs(double given, double given_next,
                                                   const std::vector<double>& ladder) {
  if (given > 0.0) return {{given, given_next > 0.0 ? given_next : 2.0 * given}};
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < ladder.size(); ++i) out.emplace_back(ladder[i], ladder[i + 1]);
  return out;
}

json report_json(const GeometryReport& g) {
  json j = {{"samples", g.samples},
            {"attempts", g.attempts},
            {"violations", g.violations},
            {"max_multiplicity", num(g.max_multiplicity)},
            {"threshold", num(g.threshold)},
            {"max_residual", num(g.max_residual)},
            {"inverse_residual", num(g.inverse_residual)},
            {"partition_count", g.partition_count},
            {"partition_bound", g.partition_bound},
            {"detail", g.detail}};
  j["first_violation"] = g.first_violation ? vec_json(*g.first_violation) : json(nullptr);
  return j;
}

std::vector<GeometryRun> geometry_runs(const GeometryArgs& a) {
  if (a.samples < 1) throw ValidationError("samples must be >= 1");
  if (a.case_id != 0 && a.check != "geo2") throw ValidationError("--case only applies to geo2");
  if (a.threshold != 0.0 && a.check != "geo1") {
    throw ValidationError("--threshold only applies to geo1");
  }
  const DecouplingParams params{a.R, a.beta};
  std::vector<GeometryRun> runs;
  auto ladder = [&] { return ScaleLadder::build(a.R, a.beta, a.eps); };

  if (a.check == "geo1") {
    const auto pairs = scale_pairs(a.r_k, a.r_next, a.r_k > 0.0 ? std::vector<double>{} : ladder().r);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto [rk, rn] = pairs[i];
      runs.push_back({{{"r_k", num(rk)}, {"r_next", num(rn)}},
                      check_overlap_geo1(rk, rn, a.R, a.c_eps, a.samples, a.seed + i,
                                         a.threshold)});
    }
  } else if (a.check == "geo2") {
    if (a.case_id < 0 || a.case_id > 2) throw ValidationError("--case must be 0, 1 or 2");
    const auto pairs = scale_pairs(a.r_k, a.r_next, a.r_k > 0.0 ? std::vector<double>{} : ladder().r);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto [rk, rn] = pairs[i];
      std::vector<int> cases;
      if (a.case_id != 0) {
        cases = {a.case_id};
      } else {
        if (rk * rk >= a.R) cases.push_back(1);
        if (rk * rk <= a.R && a.R > rk) cases.push_back(2);
      }
      for (int c : cases) {
        runs.push_back({{{"case", c}, {"r_k", num(rk)}, {"r_next", num(rn)}, {"r", num(a.r)}},
                        check_cone_containment_geo2(c, rk, rn, a.R, a.c_eps, a.r, a.samples,
                                                    a.seed + i)});
      }
    }
  } else if (a.check == "geo3") {
    std::vector<std::pair<double, double>> pairs;
    if (a.R_k > 0.0) {
      pairs = {{a.R_k, a.R_next > 0.0 ? a.R_next : 8.0 * a.R_k}};
    } else {
      for (const auto& pr : scale_pairs(0.0, 0.0, ladder().Rk)) {
        if (pr.first >= 8.0) pairs.push_back(pr);
      }
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto [Rk, Rn] = pairs[i];
      runs.push_back({{{"R_k", num(Rk)}, {"R_next", num(Rn)}, {"r", num(a.r)}},
                      check_cone_containment_geo3(Rk, Rn, a.r, a.c_eps, a.samples, a.seed + i)});
    }
  } else if (a.check == "rescale") {
    runs.push_back({{{"R_prev", num(a.R_prev)}, {"l", a.l}},
                    check_rescale(a.R_prev, a.l, params, a.samples, a.seed)});
  } else if (a.check == "partition") {
    runs.push_back({json::object(), check_cap_partition(params, a.samples, a.seed)});
  } else if (a.check == "comparability") {
    const double rk = a.r_k > 0.0 ? a.r_k : dyadic_closest(std::pow(a.R, a.beta));
    runs.push_back({{{"r_k", num(rk)}, {"l", a.l}},
                    check_cap_comparability(rk, a.R, a.l, a.samples, a.seed)});
  } else {
    const auto family = parse_family(a.coeffs);
    if (a.N < 1) throw ValidationError("N must be >= 1");
    ExpSumSpec spec{a.N, make_coeffs(family, a.N, a.seed), a.sigma, 0.0};
    const auto bn = broad_narrow_check(spec, a.bands, a.E, a.samples, a.seed);
    GeometryReport g;
    g.check = "broad-narrow";
    g.samples = bn.samples;
    g.attempts = bn.samples;
    g.max_residual = bn.max_ratio;
    g.threshold = 1.0;
    if (bn.max_ratio > 1.0) {
      g.violations = 1;
      g.first_violation = to_vec(bn.worst);
    }
    g.detail = "max ratio " + format_number(bn.max_ratio) + " at " + vec_text(to_vec(bn.worst)) +
               ", " + std::to_string(bn.narrow_points) + " narrow points";
    runs.push_back({{{"bands", a.bands}, {"E", a.E}, {"worst", vec_json(to_vec(bn.worst))},
                     {"max_ratio", num(bn.max_ratio)}, {"narrow_points", bn.narrow_points}},
                    g});
  }
  if (runs.empty()) throw ValidationError("no scale pairs to check at these parameters");
  return runs;
}

int run_geometry(const GeometryArgs& a, const CommonArgs& common, RunContext& ctx) {
  ctx.config = {{"check", a.check},   {"R", num(a.R)},           {"beta", num(a.beta)},
                {"c_eps", num(a.c_eps)}, {"eps", num(a.eps)},    {"samples", a.samples},
                {"case", a.case_id},  {"r_k", num(a.r_k)},       {"r_next", num(a.r_next)},
                {"r", num(a.r)},      {"R_k", num(a.R_k)},       {"R_next", num(a.R_next)},
                {"R_prev", num(a.R_prev)}, {"l", a.l},           {"threshold", num(a.threshold)},           {"N", a.N},
                {"sigma", num(a.sigma)}, {"coeffs", a.coeffs},   {"bands", a.bands},
                {"E", a.E}};
  ctx.seeds = json::array({a.seed});
  ctx.budgets = common.budgets();
  return guarded(ctx, [&] {
    const auto runs = geometry_runs(a);
    GeometryReport total;
    total.check = a.check;
    json run_list = json::array();
    for (const auto& run : runs) {
      total.merge(run.report);
      json j = run.labels;
      j.update(report_json(run.report));
      run_list.push_back(j);
      if (run.report.violations > 0) {
        std::cerr << "violation: check=" << a.check << " run=" << run.labels.dump()
                  << " sample=" << (run.report.first_violation
                                        ? vec_text(*run.report.first_violation)
                                        : std::string("n/a"))
                  << "\n";
      }
    }
    const std::string status = total.violations == 0 ? "PASS" : "FAIL";
    json rec = ctx.result_header();
    rec["check"] = a.check;
    rec["params"] = ctx.config;
    rec["seed"] = a.seed;
    rec["runs"] = run_list;
    rec["samples"] = total.samples;
    rec["violations"] = total.violations;
    rec["max_multiplicity"] = num(total.max_multiplicity);
    rec["max_residual"] = num(total.max_residual);
    rec["inverse_residual"] = num(total.inverse_residual);
    rec["status"] = status;
    ctx.write_json(ctx.results_path(), rec);
    std::cout << "geometry " << a.check << " runs=" << runs.size() << " samples=" << total.samples
              << " violations=" << total.violations
              << " max_multiplicity=" << format_number(total.max_multiplicity)
              << " max_residual=" << format_number(total.max_residual) << " " << status
              << " run=" << ctx.id() << "\n";
    return total.violations == 0 ? kExitOk : kExitCheckFailed;
  });
}

}  // namespace

int run_cli(int argc, char** argv) {
  try {
    CLI::App app{"smallcap: moments of cubic exponential sums and small-cap geometry checks"};
    app.set_version_flag("--version", SMALLCAP_VERSION);
    app.require_subcommand(1);

    CommonArgs common;
    MomentArgs margs;
    auto* moment = app.add_subcommand("moment", "Moment of |S|^2s over [0,1]^2 x H");
    moment->add_option("--N", margs.N, "Number of frequencies")->required();
    moment->add_option("--sigma", margs.sigma, "H has length N^-sigma")->capture_default_str();
    moment->add_option("--h0", margs.h0, "Left end of H")->capture_default_str();
    moment->add_option("--s", margs.s, "Moment order")->capture_default_str();
    moment->add_option("--p", margs.p, "Exponent for --method quad (default 2s)");
    moment->add_option("--coeffs", margs.coeffs, "constant | random_sign | random_phase")
        ->capture_default_str();
    moment->add_option("--seed", margs.seed, "Coefficient seed")->capture_default_str();
    moment->add_option("--method", margs.method, "exact | brute | quad")
        ->check(CLI::IsMember({"exact", "brute", "quad"}))
        ->capture_default_str();
    moment->add_option("--oversample", margs.oversample, "Quadrature oversampling")
        ->capture_default_str();
    add_common(moment, common);

    std::string sweep_path;
    auto* sweep = app.add_subcommand("sweep", "Exponent sweep from a config file");
    sweep->add_option("config", sweep_path, "Sweep config file")->required();
    add_common(sweep, common);

    GeometryArgs gargs;
    auto* geometry = app.add_subcommand("geometry", "Sampled geometry check");
    geometry
        ->add_option("--check", gargs.check,
                     "geo1 | geo2 | geo3 | rescale | partition | comparability | broad-narrow")
        ->required()
        ->check(CLI::IsMember(
            {"geo1", "geo2", "geo3", "rescale", "partition", "comparability", "broad-narrow"}));
    geometry->add_option("--R", gargs.R, "Largest scale R")->capture_default_str();
    geometry->add_option("--beta", gargs.beta, "Cap exponent")->capture_default_str();
    geometry->add_option("--c-eps", gargs.c_eps, "Box constant C")->capture_default_str();
    geometry->add_option("--eps", gargs.eps, "Scale ladder step")->capture_default_str();
    geometry->add_option("--samples", gargs.samples, "Samples per run")->capture_default_str();
    geometry->add_option("--seed", gargs.seed, "Sampling seed")->capture_default_str();
    geometry->add_option("--case", gargs.case_id, "geo2 case (0 = by r_k)")->capture_default_str();
    geometry->add_option("--r-k", gargs.r_k, "r_k (default: every ladder pair)");
    geometry->add_option("--r-next", gargs.r_next, "r_(k+1) (default 2 r_k)");
    geometry->add_option("--r", gargs.r, "Single dyadic r (default: all in range)");
    geometry->add_option("--R-k", gargs.R_k, "R_k for geo3 (default: every ladder pair)");
    geometry->add_option("--R-next", gargs.R_next, "R_(k+1) for geo3 (default 8 R_k)");
    geometry->add_option("--R-prev", gargs.R_prev, "Block scale for rescale")
        ->capture_default_str();
    geometry->add_option("--l", gargs.l, "Cap or block index")->capture_default_str();
    geometry->add_option("--threshold", gargs.threshold, "geo1 overlap threshold (0 = 4 C r_next / r_k)")
        ->capture_default_str();
    geometry->add_option("--N", gargs.N, "broad-narrow: number of frequencies")
        ->capture_default_str();
    geometry->add_option("--sigma", gargs.sigma, "broad-narrow: sigma")->capture_default_str();
    geometry->add_option("--coeffs", gargs.coeffs, "broad-narrow: coefficient family")
        ->capture_default_str();
    geometry->add_option("--bands", gargs.bands, "broad-narrow: band count")
        ->capture_default_str();
    geometry->add_option("--E", gargs.E, "broad-narrow: band separation")->capture_default_str();
    add_common(geometry, common);

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? kExitOk : kExitValidation;
    }

    set_worker_count(common.workers);
    std::vector<std::string> args(argv, argv + argc);
    const std::string command = moment->parsed() ? "moment" : sweep->parsed() ? "sweep" : "geometry";
    RunContext ctx(common.out, command, args, common.run_id);
    if (moment->parsed()) return run_moment(margs, common, ctx);
    if (sweep->parsed()) return run_sweep(sweep_path, common, sweep, ctx);
    return run_geometry(gargs, common, ctx);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace smallcap::harness
