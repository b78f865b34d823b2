#include "nlt/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "nlt/diagnostics.hpp"
#include "nlt/errors.hpp"
#include "nlt/local_reference.hpp"
#include "nlt/nonlocal_solver.hpp"
#include "nlt/scenarios.hpp"

namespace nlt {

namespace fs = std::filesystem;

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kTVMonotonicity: return "tv_monotonicity";
    case ExperimentKind::kCounterexample: return "counterexample";
    case ExperimentKind::kRateStudy: return "rate_study";
    case ExperimentKind::kEntropyCheck: return "entropy_check";
    case ExperimentKind::kSingleRun: return "single_run";
  }
  return "unknown";
}

const std::vector<CatalogEntry>& experiment_catalog() {
  static const std::vector<CatalogEntry> catalog = {
      {ExperimentKind::kTVMonotonicity, "tv_monotonicity",
       "TotVar w(t) <= TotVar w(0) for convex kernels",
       "Tracks TV of the look-ahead average over time for every scenario and epsilon.",
       {"scenarios", "epsilons", "t_end"},
       {{"kernel", {{"family", "exponential"}}}, {"tolerances", {{"relative_tv", 0.02}}}}},
      {ExperimentKind::kCounterexample, "counterexample",
       "TotVar w(t) > TotVar w(0) for the uniform kernel at the matched scale eps = 4 ell",
       "Builds the block datum and checks that TV of w starts at 4 sum h + 1 and grows.",
       {"scenarios", "t_end"},
       {{"kernel", {{"family", "uniform"}}}, {"tolerances", {{"initial_tv", 1e-6}}}}},
      {ExperimentKind::kRateStudy, "rate_study",
       "||w_eps(t) - u(t)||_L1 <= C (eps + sqrt(eps t)) TotVar u0",
       "L1 distance between w_eps and the local entropy solution, log-log slope in eps.",
       {"scenarios", "epsilons", "t_end"},
       {{"kernel", {{"family", "exponential"}}},
        {"tolerances", {{"min_slope", 0.45}, {"constant_spread", 2.0}}}}},
      {ExperimentKind::kEntropyCheck, "entropy_check",
       "int |E_eps| dx <= K eps TotVar w_eps(t, .)",
       "Kruzkov residuals of w over bump test functions and the implied constant K.",
       {"scenarios", "epsilons", "t_end"},
       {{"kernel", {{"family", "exponential"}}}, {"tolerances", {{"k_hat_spread", 2.0}}}}},
      {ExperimentKind::kSingleRun, "single_run",
       "d_t u + d_x [V(u * eta_eps) u] = 0, u(0) = u0",
       "One nonlocal run with every snapshot written out.",
       {"scenarios", "epsilons", "t_end"},
       {{"kernel", {{"family", "exponential"}}}, {"tolerances", json::object()}}},
  };
  return catalog;
}

json catalog_to_json() {
  json common = {{"velocity", {{"family", "greenshields"}}},
                 {"grid", {{"cells_per_eps", 32}}},
                 {"snapshots", 50},
                 {"cfl", 0.5},
                 {"output_dir", "out"},
                 {"seed", 0},
                 {"write_snapshots", "ends"},
                 {"tolerances", {{"bounds", 1e-12}, {"mass_drift", 1e-10}}}};
  json out = json::array();
  for (const auto& e : experiment_catalog()) {
    out.push_back({{"name", e.name},
                   {"anchor", e.anchor},
                   {"summary", e.summary},
                   {"required", e.required},
                   {"defaults", e.defaults},
                   {"common_defaults", common}});
  }
  return out;
}

void print_catalog(std::ostream& os) {
  for (const auto& e : experiment_catalog()) {
    os << e.name << "\n  claim:    " << e.anchor << "\n  does:     " << e.summary
       << "\n  requires:";
    for (const auto& r : e.required) os << ' ' << r;
    os << "\n  defaults: " << e.defaults.dump() << "\n";
  }
}

// ---------------------------------------------------------------- config

namespace {

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

double number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) bad(where + ": missing '" + key + "'");
  if (!j[key].is_number()) bad(where + ": '" + key + "' must be a number");
  return j[key].get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) bad(where + ": '" + key + "' must be a number");
  return j[key].get<double>();
}

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
      bad(where + ": unknown field '" + k + "'");
    }
  }
}

void unit_state(double v, const std::string& what) {
  if (!(v >= 0.0 && v <= 1.0)) bad(what + " must lie in [0, 1]");
}

json normalize_scenario(const json& s, std::size_t index, std::uint64_t seed) {
  const std::string where = "scenarios[" + std::to_string(index) + "]";
  if (!s.is_object()) bad(where + " must be an object");
  if (!s.contains("kind") || !s["kind"].is_string()) bad(where + ": missing string 'kind'");
  const std::string kind = s["kind"];
  json n;
  n["kind"] = kind;
  n["id"] = s.value("id", kind + "_" + std::to_string(index));
  if (!n["id"].is_string()) bad(where + ": 'id' must be a string");
  if (kind == "riemann") {
    only_keys(s, {"kind", "id", "u_left", "u_right", "x0"}, where);
    n["u_left"] = number(s, "u_left", where);
    n["u_right"] = number(s, "u_right", where);
    n["x0"] = number_or(s, "x0", 0.0, where);
    unit_state(n["u_left"], where + ".u_left");
    unit_state(n["u_right"], where + ".u_right");
  } else if (kind == "ramp") {
    only_keys(s, {"kind", "id", "u_left", "u_right", "x0", "x1"}, where);
    n["u_left"] = number(s, "u_left", where);
    n["u_right"] = number(s, "u_right", where);
    n["x0"] = number_or(s, "x0", -0.5, where);
    n["x1"] = number_or(s, "x1", 0.5, where);
    unit_state(n["u_left"], where + ".u_left");
    unit_state(n["u_right"], where + ".u_right");
    if (!(n["x1"].get<double>() > n["x0"].get<double>())) bad(where + ": need x1 > x0");
  } else if (kind == "random_bv") {
    only_keys(s, {"kind", "id", "seed", "n_jumps", "support"}, where);
    if (s.contains("seed") && !s["seed"].is_number_unsigned()) {
      bad(where + ": 'seed' must be a non-negative integer");
    }
    n["seed"] = s.value("seed", seed + index);
    const double jumps = number_or(s, "n_jumps", 20, where);
    if (!(jumps >= 1 && jumps == std::floor(jumps))) bad(where + ": n_jumps must be a positive integer");
    n["n_jumps"] = static_cast<std::size_t>(jumps);
    json support = s.value("support", json::array({-1.0, 1.0}));
    if (!support.is_array() || support.size() != 2 || !support[0].is_number() ||
        !support[1].is_number() || !(support[1].get<double>() > support[0].get<double>())) {
      bad(where + ": support must be [a, b] with a < b");
    }
    n["support"] = support;
  } else if (kind == "counterexample") {
    only_keys(s, {"kind", "id", "eps1", "n_blocks", "h", "eps_ratio", "level"}, where);
    const double eps1 = number_or(s, "eps1", 1.0, where);
    const double nb = number_or(s, "n_blocks", 1, where);
    if (!(nb >= 1 && nb == std::floor(nb))) bad(where + ": n_blocks must be a positive integer");
    const auto n_blocks = static_cast<std::size_t>(nb);
    const double ratio = number_or(s, "eps_ratio", 16.0, where);
    json h = json::array();
    if (s.contains("h")) {
      if (!s["h"].is_array() || s["h"].size() != n_blocks) {
        bad(where + ": h must list one height per block");
      }
      h = s["h"];
    } else {
      for (std::size_t k = 1; k <= n_blocks; ++k) h.push_back(std::pow(2.0, -double(k)));
    }
    const double level = number_or(s, "level", double(n_blocks), where);
    if (!(level >= 1 && level <= double(n_blocks) && level == std::floor(level))) {
      bad(where + ": level must be an integer in [1, n_blocks]");
    }
    n["eps1"] = eps1;
    n["n_blocks"] = n_blocks;
    n["h"] = h;
    n["eps_ratio"] = ratio;
    n["level"] = static_cast<std::size_t>(level);
    CounterexampleSpec spec;
    spec.n_blocks = n_blocks;
    for (std::size_t k = 0; k < n_blocks; ++k) {
      spec.eps_seq.push_back(eps1 * std::pow(ratio, -double(k)));
      if (!h[k].is_number()) bad(where + ": heights must be numbers");
      spec.h_seq.push_back(h[k].get<double>());
    }
    try {
      spec.validate();
    } catch (const Error& e) {
      bad(where + ": " + e.what());
    }
  } else if (kind == "block") {
    only_keys(s, {"kind", "id", "h", "ell", "delta"}, where);
    n["h"] = number(s, "h", where);
    n["ell"] = number(s, "ell", where);
    n["delta"] = number_or(s, "delta", 0.0, where);
    try {
      BuildingBlock{n["h"], n["ell"]}.validate();
    } catch (const Error& e) {
      bad(where + ": " + e.what());
    }
  } else {
    bad(where + ": unknown scenario kind '" + kind + "'");
  }
  return n;
}

}  // namespace

ExperimentConfig parse_config(const json& input, const fs::path& base_dir) {
  if (!input.is_object()) bad("config must be a JSON object");
  const json& j = input.contains("config") && input.contains("tool") ? input["config"] : input;
  if (!j.is_object()) bad("config must be a JSON object");
  only_keys(j,
            {"experiment", "kernel", "velocity", "scenarios", "scenario", "epsilons", "grid",
             "t_end", "snapshots", "cfl", "output_dir", "seed", "write_snapshots", "tolerances"},
            "config");

  if (!j.contains("experiment") || !j["experiment"].is_string()) {
    bad("config: missing string 'experiment'");
  }
  const std::string name = j["experiment"];
  const auto& cat = experiment_catalog();
  const auto entry = std::find_if(cat.begin(), cat.end(), [&](const auto& e) { return e.name == name; });
  if (entry == cat.end()) bad("config: unknown experiment '" + name + "'");

  ExperimentConfig cfg;
  cfg.kind = entry->kind;
  cfg.base_dir = base_dir;
  json& n = cfg.normalized;
  n["experiment"] = name;

  const json kernel = j.value("kernel", entry->defaults["kernel"]);
  const KernelSpec spec = kernel_from_json(kernel, base_dir);
  const ValidationReport report = validate_kernel(spec);
  if (!report.admissible()) bad("config: kernel '" + spec.name() + "' violates the kernel assumptions");
  n["kernel"] = kernel_to_json(spec);

  const json velocity = j.value("velocity", json{{"family", "greenshields"}});
  n["velocity"] = velocity_to_json(velocity_from_json(velocity));

  if (j.contains("seed") && !j["seed"].is_number_unsigned()) {
    bad("config: 'seed' must be a non-negative integer");
  }
  const std::uint64_t seed = j.value("seed", std::uint64_t{0});
  n["seed"] = seed;

  json scenarios = json::array();
  if (j.contains("scenarios") && j.contains("scenario")) bad("config: give 'scenarios' or 'scenario', not both");
  if (j.contains("scenarios")) {
    if (!j["scenarios"].is_array() || j["scenarios"].empty()) {
      bad("config: 'scenarios' must be a non-empty array");
    }
    scenarios = j["scenarios"];
  } else if (j.contains("scenario")) {
    scenarios.push_back(j["scenario"]);
  } else {
    bad("config: missing 'scenarios'");
  }
  json norm_scen = json::array();
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    norm_scen.push_back(normalize_scenario(scenarios[i], i, seed));
  }
  std::vector<std::string> ids;
  for (const auto& s : norm_scen) ids.push_back(s["id"]);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) bad("config: scenario ids must be unique");
  n["scenarios"] = norm_scen;

  const bool all_counterexample = std::all_of(norm_scen.begin(), norm_scen.end(), [](const json& s) {
    return s["kind"] == "counterexample";
  });
  if (cfg.kind == ExperimentKind::kCounterexample && !all_counterexample) {
    bad("config: counterexample experiments take counterexample scenarios only");
  }
  json eps = json::array();
  if (j.contains("epsilons")) {
    if (!j["epsilons"].is_array() || j["epsilons"].empty()) bad("config: 'epsilons' must be a non-empty array");
    for (const auto& e : j["epsilons"]) {
      if (!e.is_number() || !(e.get<double>() > 0.0)) bad("config: epsilons must be positive numbers");
      eps.push_back(e);
    }
  } else if (!all_counterexample) {
    bad("config: missing 'epsilons'");
  }
  n["epsilons"] = eps;
  if (cfg.kind == ExperimentKind::kRateStudy || cfg.kind == ExperimentKind::kEntropyCheck) {
    if (eps.size() < 2) bad("config: " + name + " needs at least two epsilons");
  }
  for (const auto& s : norm_scen) {
    if (s["kind"] != "block") continue;
    for (const auto& e : eps) {
      const double l = s["ell"], d = s["delta"], ee = e;
      if (!(l > std::max(ee + d, 2.0 * ee))) {
        bad("config: block scenario '" + s["id"].get<std::string>() +
            "' needs ell > max(eps + delta, 2 eps) for eps = " + format_double(ee));
      }
    }
  }

  const json grid = j.value("grid", json::object());
  if (!grid.is_object()) bad("config: 'grid' must be an object");
  only_keys(grid, {"cells_per_eps", "dx"}, "grid");
  json ng;
  ng["cells_per_eps"] = number_or(grid, "cells_per_eps", 32, "grid");
  if (!(ng["cells_per_eps"].get<double>() >= kDefaultMinCellsPerEps)) {
    bad("grid: cells_per_eps must be at least " + std::to_string(kDefaultMinCellsPerEps));
  }
  if (grid.contains("dx")) {
    ng["dx"] = number(grid, "dx", "grid");
    if (!(ng["dx"].get<double>() > 0.0)) bad("grid: dx must be positive");
  }
  n["grid"] = ng;

  n["t_end"] = number(j, "t_end", "config");
  if (!(n["t_end"].get<double>() >= 0.0)) bad("config: t_end must be non-negative");
  const double snaps = number_or(j, "snapshots", 50, "config");
  if (!(snaps >= 1 && snaps == std::floor(snaps))) bad("config: snapshots must be a positive integer");
  n["snapshots"] = static_cast<std::size_t>(snaps);
  n["cfl"] = number_or(j, "cfl", 0.5, "config");
  if (!(n["cfl"].get<double>() > 0.0 && n["cfl"].get<double>() <= 1.0)) bad("config: cfl must lie in (0, 1]");
  n["output_dir"] = j.value("output_dir", std::string("out"));
  const std::string ws = j.value("write_snapshots", std::string("ends"));
  if (ws != "ends" && ws != "all" && ws != "none") bad("config: write_snapshots must be ends, all or none");
  n["write_snapshots"] = ws;

  json tol = {{"bounds", 1e-12}, {"mass_drift", 1e-10}};
  for (const auto& [k, v] : entry->defaults["tolerances"].items()) tol[k] = v;
  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object()) bad("config: 'tolerances' must be an object");
    for (const auto& [k, v] : j["tolerances"].items()) {
      if (!tol.contains(k)) bad("tolerances: unknown field '" + k + "'");
      if (!v.is_number() || !(v.get<double>() >= 0.0)) bad("tolerances: '" + k + "' must be a non-negative number");
      tol[k] = v;
    }
  }
  n["tolerances"] = tol;
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    bad(path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

std::string default_label(const ExperimentConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : cfg.normalized.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "cfg-%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool ExperimentResult::all_as_expected() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.as_expected(); });
}

// ------------------------------------------------------------------ runs

namespace {

struct Task {
  std::string id;
  json scenario;
  double epsilon;
};

struct Outcome {
  std::string id;
  json scenario;
  double epsilon = 0.0;
  double tv_u0 = 0.0;
  TVSeries tv;
  double min_state = 0.0, max_state = 0.0;  // over u and w at every step
  double mass_drift_rate = 0.0;
  double ledger_residual = 0.0;
  json manifest;
  // kind specific
  double l1_error = 0.0;
  double k_hat = 0.0;
  double expected_initial_tv = 0.0;
  double growth_rate = 0.0;
  double t_star = 0.0;
};

struct Setup {
  Profile u0;
  double tv;
  double epsilon;
  json notes;
};

double speed_bound(const VelocityModel& vm) {
  return std::max(vm.max_abs_V(), vm.max_abs_flux_slope());
}

Setup make_setup(const json& sc, double eps_config, const KernelSpec& kernel, const VelocityModel& vm,
                 const json& cfg) {
  const std::string kind = sc["kind"];
  const double T = cfg["t_end"];
  const json& grid = cfg["grid"];
  double eps = eps_config;
  double a = 0.0, b = 0.0;
  CounterexampleSpec cex;
  if (kind == "counterexample") {
    cex.n_blocks = sc["n_blocks"];
    for (std::size_t k = 0; k < cex.n_blocks; ++k) {
      cex.eps_seq.push_back(sc["eps1"].get<double>() * std::pow(sc["eps_ratio"].get<double>(), -double(k)));
      cex.h_seq.push_back(sc["h"][k]);
    }
    eps = cex.eps_seq[sc["level"].get<std::size_t>() - 1];
    a = -8.0 * cex.ell(1);
  } else if (kind == "ramp") {
    a = sc["x0"];
    b = sc["x1"];
  } else if (kind == "random_bv") {
    a = sc["support"][0];
    b = sc["support"][1];
  } else if (kind == "riemann") {
    a = b = sc["x0"];
  } else if (kind == "block") {
    a = -7.0 * sc["ell"].get<double>();
  }

  double dx = grid.contains("dx") ? grid["dx"].get<double>() : eps / grid["cells_per_eps"].get<double>();
  if (kind == "counterexample") {
    for (std::size_t k = 1; k <= cex.n_blocks; ++k) dx = std::min(dx, cex.ell(k) / 16.0);
  }
  const DiscreteKernel dk = discretize(kernel, eps, dx);
  // A jam edge jumps back one window at once and the boundary node looks one
  // more window ahead. Behind a jam the look-ahead spreads information like a
  // random walk with steps of size eps, plus numerical diffusion of size dx.
  const double slack = 12.0 * std::sqrt(T * (eps + dx)) + 2.0 * dx;
  const double reach = T * speed_bound(vm);
  const double left = std::floor((a - domain_margin(T, speed_bound(vm), 2.0 * dk.support_length()) - slack) / dx) * dx;
  const double right = b + reach + slack;
  const Grid1D g = Grid1D::covering(left, right, dx);

  Setup s{Profile::constant(g, 0.0), 0.0, eps, json::object()};
  if (kind == "counterexample") {
    s.u0 = counterexample_datum(cex, g);
    s.tv = total_variation(s.u0);
    const std::size_t level = sc["level"];
    double hsum = 0.0;
    for (std::size_t k = 0; k + 1 < level; ++k) hsum += cex.h_seq[k];
    s.notes["expected_initial_tv_w"] = 4.0 * hsum + 1.0;
    s.notes["exact_tv_u0"] = counterexample_tv(cex);
    json blocks = json::array();
    for (std::size_t k = 1; k <= cex.n_blocks; ++k) {
      blocks.push_back({{"n", k},
                        {"epsilon", cex.eps_seq[k - 1]},
                        {"ell", cex.ell(k)},
                        {"h", cex.h_seq[k - 1]},
                        {"boundary_height", cex.h_seq[k - 1] == 1.0}});
    }
    s.notes["blocks"] = blocks;
  } else if (kind == "block") {
    s.u0 = persistence_datum(sc["h"], sc["ell"], eps, sc["delta"], g);
    s.tv = total_variation(s.u0);
    s.notes["boundary_height"] = sc["h"].get<double>() == 1.0;
  } else {
    DatumSpec ds;
    if (kind == "riemann") {
      ds.kind = DatumKind::kRiemann;
      ds.u_left = sc["u_left"];
      ds.u_right = sc["u_right"];
      ds.x0 = sc["x0"];
    } else if (kind == "ramp") {
      ds.kind = DatumKind::kMonotoneRamp;
      ds.u_left = sc["u_left"];
      ds.u_right = sc["u_right"];
      ds.x0 = sc["x0"];
      ds.x1 = sc["x1"];
    } else {
      ds.kind = DatumKind::kRandomBV;
      ds.seed = sc["seed"];
      ds.n_jumps = sc["n_jumps"];
      ds.support_left = sc["support"][0];
      ds.support_right = sc["support"][1];
    }
    Datum d = standard_datum(ds, g);
    s.u0 = d.u0;
    s.tv = d.tv;
    s.notes["description"] = d.description;
  }
  s.notes["exact_tv_profile"] = s.tv;
  return s;
}

// L1 distance at time T between w and the local entropy solution.
double rate_error(const Trajectory& traj, const json& sc, const Setup& setup, const VelocityModel& vm,
                  const json& cfg) {
  const double T = cfg["t_end"];
  const Profile& w = traj.snapshots.back().w;
  if (sc["kind"] == "riemann" && vm.family() == VelocityFamily::kGreenshields) {
    const double uL = sc["u_left"], uR = sc["u_right"], x0 = sc["x0"];
    return l1_error_to(w, traj.w_anchor,
                       [&](double x) { return exact_riemann(vm, uL, uR, T, x - x0); });
  }
  // Reference on a grid four times finer over the same window.
  const Grid1D& g = setup.u0.grid();
  Grid1D fine = g;
  fine.cell_width = g.cell_width / 4.0;
  fine.n_cells = g.n_cells * 4;
  std::vector<double> v(fine.n_cells);
  for (std::size_t j = 0; j < fine.n_cells; ++j) v[j] = setup.u0[j / 4];
  LocalRunConfig lc{fine, vm, T, cfg["cfl"].get<double>(), {}, false};
  const Trajectory ref = solve_local(lc, Profile(fine, std::move(v)));
  const Profile& u = ref.snapshots.back().u;
  return l1_error_to(w, traj.w_anchor, [&](double x) {
    const auto j = static_cast<std::ptrdiff_t>(std::floor((x - fine.x_left) / fine.cell_width));
    return u.extended(j);
  });
}

Outcome run_task(const Task& task, const ExperimentConfig& cfg, const fs::path& dir) {
  const json& n = cfg.normalized;
  const KernelSpec kernel = kernel_from_json(n["kernel"], cfg.base_dir);
  const VelocityModel vm = velocity_from_json(n["velocity"]);
  const Setup setup = make_setup(task.scenario, task.epsilon, kernel, vm, n);
  const double T = n["t_end"];

  NonlocalRunConfig rc{setup.u0.grid(), kernel, setup.epsilon, vm, T, 0.5, {}};
  rc.cfl = n["cfl"];
  rc.snapshot_times = uniform_times(T, n["snapshots"]);
  rc.enforce_bounds = false;
  const Trajectory traj = solve(rc, setup.u0);

  Outcome o;
  o.id = task.id;
  o.scenario = task.scenario;
  o.epsilon = setup.epsilon;
  o.tv_u0 = setup.tv;
  o.tv = tv_series(traj);
  o.min_state = std::min(setup.u0.min(), traj.snapshots.front().w.min());
  o.max_state = std::max(setup.u0.max(), traj.snapshots.front().w.max());
  for (const auto& s : traj.steps) {
    o.min_state = std::min({o.min_state, s.min_u, s.min_w});
    o.max_state = std::max({o.max_state, s.max_u, s.max_w});
  }
  o.mass_drift_rate = traj.mass_drift_rate();
  o.ledger_residual = traj.mass_ledger_residual();

  json m;
  m["id"] = task.id;
  m["scenario"] = task.scenario;
  m["datum"] = setup.notes;
  m["run"] = echo_to_json(traj.echo);
  m["grid"] = {{"x_left", traj.grid().x_left},
               {"cell_width", traj.grid().cell_width},
               {"n_cells", traj.grid().n_cells},
               {"boundary_left", traj.grid().boundary_left},
               {"boundary_right", traj.grid().boundary_right}};
  m["mass"] = {{"initial", traj.initial_mass},
               {"final", traj.final_mass()},
               {"inflow", traj.inflow},
               {"outflow", traj.outflow},
               {"ledger_residual", o.ledger_residual},
               {"drift_rate", o.mass_drift_rate}};
  m["steps"] = traj.steps.size();
  m["warnings"] = traj.warnings;

  switch (cfg.kind) {
    case ExperimentKind::kRateStudy:
      o.l1_error = rate_error(traj, task.scenario, setup, vm, n);
      m["l1_error"] = o.l1_error;
      break;
    case ExperimentKind::kEntropyCheck: {
      const EntropyReport r =
          dissipation_bound_fit(traj, default_c_grid(), default_phi_family(traj, setup.epsilon));
      o.k_hat = r.k_hat;
      json phis = json::array();
      for (const auto& p : r.test_functions) {
        phis.push_back({{"tc", p.tc}, {"ht", p.ht}, {"xc", p.xc}, {"hx", p.hx}});
      }
      m["entropy"] = {{"c_values", r.c_values},
                      {"test_functions", phis},
                      {"residuals", r.residuals},
                      {"sup_tv_w", r.sup_tv_w},
                      {"min_normalized_residual", r.min_normalized},
                      {"k_hat", r.k_hat}};
      break;
    }
    case ExperimentKind::kCounterexample:
      o.expected_initial_tv = setup.notes["expected_initial_tv_w"];
      o.growth_rate = o.tv.times.size() >= 2 ? initial_growth_rate(o.tv, T) : 0.0;
      o.t_star = increase_interval(o.tv);
      m["growth_rate"] = o.growth_rate;
      m["increase_interval_end"] = o.t_star;
      break;
    default:
      break;
  }
  o.manifest = m;

  write_tv_csv(dir / "series" / ("tv_" + task.id + ".csv"), o.tv);
  const std::string ws = n["write_snapshots"];
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const bool end = k == 0 || k + 1 == traj.snapshots.size();
    if (ws == "all" || (ws == "ends" && end)) {
      std::ostringstream name;
      name << task.id << "_" << std::setw(4) << std::setfill('0') << k << ".csv";
      write_snapshot_csv(dir / "snapshots" / name.str(), traj.snapshots[k], traj.w_anchor);
    }
  }
  return o;
}

template <class F>
auto parallel_map(std::size_t count, int jobs, F f) {
  using R = decltype(f(std::size_t{0}));
  std::vector<R> out;
  out.reserve(count);
  const std::size_t width = static_cast<std::size_t>(std::max(1, jobs));
  std::vector<std::future<R>> pending;
  std::size_t next = 0;
  while (out.size() < count) {
    while (next < count && pending.size() < width) {
      pending.push_back(std::async(std::launch::async, f, next));
      ++next;
    }
    out.push_back(pending.front().get());
    pending.erase(pending.begin());
  }
  return out;
}

Verdict make(std::string name, bool pass, double value, double threshold, bool expected = true,
             std::string detail = {}) {
  return {std::move(name), pass, expected, value, threshold, std::move(detail)};
}

json verdict_json(const Verdict& v) {
  return {{"name", v.name},
          {"verdict", v.pass ? "PASS" : "FAIL"},
          {"expected", v.expected_pass ? "PASS" : "FAIL"},
          {"as_expected", v.as_expected()},
          {"value", v.value},
          {"threshold", v.threshold},
          {"detail", v.detail}};
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  const json& n = cfg.normalized;
  const std::string label = opts.label.empty() ? default_label(cfg) : opts.label;
  if (label.find('/') != std::string::npos || label == "." || label == "..") {
    bad("label must be a plain directory name");
  }
  const fs::path dir = fs::path(n["output_dir"].get<std::string>()) / to_string(cfg.kind) / label;

  std::vector<Task> tasks;
  for (const auto& sc : n["scenarios"]) {
    const std::string sid = sc["id"];
    if (sc["kind"] == "counterexample") {
      tasks.push_back({sid, sc, 0.0});
      continue;
    }
    const auto& eps = n["epsilons"];
    const std::size_t count = cfg.kind == ExperimentKind::kSingleRun ? 1 : eps.size();
    for (std::size_t k = 0; k < count; ++k) {
      tasks.push_back({sid + "_eps" + std::to_string(k), sc, eps[k].get<double>()});
    }
  }
  if (cfg.kind == ExperimentKind::kSingleRun) tasks.resize(1);

  fs::create_directories(dir / "series");
  fs::create_directories(dir / "snapshots");
  const auto outcomes = parallel_map(tasks.size(), opts.jobs,
                                     [&](std::size_t i) { return run_task(tasks[i], cfg, dir); });
  if (opts.log) {
    for (const auto& o : outcomes) {
      *opts.log << "run " << o.id << "  eps=" << o.epsilon << "  tv(u0)=" << o.tv_u0
                << "  tv(w) " << o.tv.tv_w.front() << " -> " << o.tv.tv_w.back() << "\n";
    }
  }

  const json& tol = n["tolerances"];
  ExperimentResult result;
  result.dir = dir;
  auto& V = result.verdicts;

  // Invariants checked for every kind.
  double worst_bound = 0.0, worst_drift = 0.0, worst_tv0 = -1e300;
  for (const auto& o : outcomes) {
    worst_bound = std::max({worst_bound, -o.min_state, o.max_state - 1.0});
    const double T = n["t_end"];
    worst_drift = std::max(worst_drift, T > 0.0 ? std::abs(o.ledger_residual) / T : 0.0);
    worst_tv0 = std::max(worst_tv0, o.tv.tv_w.front() - o.tv_u0);
  }
  V.push_back(make("max_principle", worst_bound <= tol["bounds"].get<double>(), worst_bound, tol["bounds"]));
  V.push_back(make("mass_conservation", worst_drift <= tol["mass_drift"].get<double>(), worst_drift,
                   tol["mass_drift"]));
  V.push_back(make("initial_tv_bound", worst_tv0 <= 1e-10, worst_tv0, 1e-10));

  json series = json::object();
  switch (cfg.kind) {
    case ExperimentKind::kTVMonotonicity: {
      const double rel = tol["relative_tv"];
      double worst = 0.0;
      std::string where;
      for (const auto& o : outcomes) {
        const auto v = monotonicity_verdict(o.tv, rel * o.tv_u0);
        const double ratio = o.tv_u0 > 0.0 ? v.worst_violation / o.tv_u0 : v.worst_violation;
        if (ratio >= worst) {
          worst = ratio;
          where = o.id;
        }
      }
      V.push_back(make("monotonicity", worst <= rel, worst, rel, true, "worst run " + where));
      break;
    }
    case ExperimentKind::kCounterexample: {
      for (const auto& o : outcomes) {
        const double err = std::abs(o.tv.tv_w.front() - o.expected_initial_tv);
        V.push_back(make("initial_tv[" + o.id + "]", err <= tol["initial_tv"].get<double>(), err,
                         tol["initial_tv"]));
        const auto mv = monotonicity_verdict(o.tv, 0.0);
        V.push_back(make("monotonicity[" + o.id + "]", mv.pass, mv.worst_violation, 0.0, false,
                         "growth rate " + format_double(o.growth_rate)));
        V.push_back(make("tv_increase[" + o.id + "]", o.t_star > 0.0, o.t_star, 0.0, true,
                         "TV(w) > TV(w(0)) on ]0, t*]"));
      }
      break;
    }
    case ExperimentKind::kRateStudy: {
      std::vector<double> constants;
      for (const auto& sc : n["scenarios"]) {
        const std::string sid = sc["id"];
        std::vector<RatePoint> pts;
        double c_max = 0.0;
        for (const auto& o : outcomes) {
          if (o.scenario["id"] != sid) continue;
          pts.push_back({o.epsilon, o.l1_error});
          c_max = std::max(c_max, rate_constant(o.epsilon, o.l1_error, n["t_end"], o.tv_u0));
        }
        write_rate_csv(dir / "series" / ("rate_" + sid + ".csv"), pts);
        const RateReport r = rate_fit(pts);
        constants.push_back(c_max);
        series[sid] = {{"slope", r.slope}, {"intercept", r.intercept}, {"residual", r.residual},
                       {"rate_constant", c_max}};
        V.push_back(make("slope[" + sid + "]", r.slope >= tol["min_slope"].get<double>(), r.slope,
                         tol["min_slope"]));
      }
      const auto [lo, hi] = std::minmax_element(constants.begin(), constants.end());
      const double spread = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
      V.push_back(make("rate_constant_spread", spread <= tol["constant_spread"].get<double>(), spread,
                       tol["constant_spread"]));
      break;
    }
    case ExperimentKind::kEntropyCheck: {
      std::ofstream csv(dir / "series" / "entropy.csv");
      csv << "epsilon,k_hat\n";
      std::vector<double> pooled;
      for (const auto& e : n["epsilons"]) {
        double k = 0.0;
        for (const auto& o : outcomes) {
          if (o.epsilon == e.get<double>()) k = std::max(k, o.k_hat);
        }
        pooled.push_back(k);
        csv << format_double(e) << ',' << format_double(k) << '\n';
      }
      const auto [lo, hi] = std::minmax_element(pooled.begin(), pooled.end());
      const double spread = *hi == 0.0 ? 1.0 : (*lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity());
      V.push_back(make("k_hat_spread", spread <= tol["k_hat_spread"].get<double>(), spread,
                       tol["k_hat_spread"], true, "max K over scenarios, per epsilon"));
      break;
    }
    case ExperimentKind::kSingleRun:
      break;
  }

  json manifest;
  manifest["tool"] = "nltlab";
  manifest["experiment"] = to_string(cfg.kind);
  manifest["label"] = label;
  manifest["config"] = n;
  const KernelSpec kernel = kernel_from_json(n["kernel"], cfg.base_dir);
  json checks = json::array();
  for (const auto& c : validate_kernel(kernel).checks) {
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"worst_point", c.worst_point},
                      {"worst_value", c.worst_value}});
  }
  manifest["kernel_validation"] = checks;
  json runs = json::array();
  for (const auto& o : outcomes) runs.push_back(o.manifest);
  manifest["runs"] = runs;
  if (!series.empty()) manifest["fits"] = series;
  write_json(dir / "manifest.json", manifest);

  json verdicts;
  verdicts["experiment"] = to_string(cfg.kind);
  verdicts["label"] = label;
  json vs = json::array();
  for (const auto& v : V) vs.push_back(verdict_json(v));
  verdicts["verdicts"] = vs;
  verdicts["all_as_expected"] = result.all_as_expected();
  write_json(dir / "verdicts.json", verdicts);
  return result;
}

}  // namespace nlt
