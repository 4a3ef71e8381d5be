#include "bdlp/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bdlp/config_space.hpp"
#include "bdlp/hierarchy.hpp"
#include "bdlp/version.hpp"

namespace bdlp {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
  }
}

Kernel parse_kernel(const json& obj, const std::string& where) {
  reject_unknown_keys(obj, {"family", "scale"}, where);
  return Kernel(kernel_family_from_string(obj.value("family", std::string("gaussian"))),
                obj.value("scale", 1.0));
}

json kernel_json(const Kernel& k) {
  return json{{"family", to_string(k.family)}, {"scale", k.scale}};
}

}  // namespace

Field InitialCondition::realize(const GridSpec& grid) const {
  switch (kind) {
    case Kind::constant:
      if (value < 0.0) throw std::invalid_argument("initial: constant value must be >= 0");
      return Field::constant(grid, value);
    case Kind::sinusoid:
      if (mean < 0.0) throw std::invalid_argument("initial: sinusoid mean must be >= 0");
      return Field::sinusoid(grid, mean, amplitude, mode);
    case Kind::table: {
      std::ifstream in(table_path);
      if (!in) throw std::invalid_argument("initial: cannot open table " + table_path);
      std::vector<double> v;
      double x;
      while (in >> x) v.push_back(x);
      if (static_cast<int>(v.size()) != grid.size)
        throw std::invalid_argument("initial: table length does not match grid size");
      Field f(grid, std::move(v));
      f.require_nonnegative("initial table");
      return f;
    }
  }
  throw std::invalid_argument("initial: unknown kind");
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json root = json::parse(text);
  reject_unknown_keys(root, {"model", "initial", "solver", "ibm", "truncation", "ops"}, "root");
  ExperimentConfig cfg;

  if (root.contains("model")) {
    const json& m = root["model"];
    reject_unknown_keys(m,
                        {"m", "kappa_minus", "kappa_plus", "C", "eps", "L", "M", "a_minus",
                         "a_plus"},
                        "model");
    cfg.model.m = m.value("m", cfg.model.m);
    cfg.model.kappa_minus = m.value("kappa_minus", cfg.model.kappa_minus);
    cfg.model.kappa_plus = m.value("kappa_plus", cfg.model.kappa_plus);
    cfg.model.weight_c = m.value("C", cfg.model.weight_c);
    cfg.model.eps = m.value("eps", cfg.model.eps);
    cfg.model.length = m.value("L", cfg.model.length);
    cfg.model.grid_size = m.value("M", cfg.model.grid_size);
    if (m.contains("a_minus")) cfg.model.a_minus = parse_kernel(m["a_minus"], "model.a_minus");
    if (m.contains("a_plus")) cfg.model.a_plus = parse_kernel(m["a_plus"], "model.a_plus");
  }
  cfg.model.check();

  if (root.contains("initial")) {
    const json& ic = root["initial"];
    reject_unknown_keys(ic, {"kind", "value", "mean", "amplitude", "mode", "path"}, "initial");
    const std::string kind = ic.value("kind", std::string("constant"));
    if (kind == "constant") {
      cfg.initial.kind = InitialCondition::Kind::constant;
      cfg.initial.value = ic.value("value", 1.0);
    } else if (kind == "sinusoid") {
      cfg.initial.kind = InitialCondition::Kind::sinusoid;
      cfg.initial.mean = ic.value("mean", 1.0);
      cfg.initial.amplitude = ic.value("amplitude", 0.5);
      cfg.initial.mode = ic.value("mode", 1);
    } else if (kind == "table") {
      cfg.initial.kind = InitialCondition::Kind::table;
      cfg.initial.table_path = ic.value("path", std::string());
    } else {
      throw std::invalid_argument("config: initial.kind must be constant|sinusoid|table");
    }
  }

  if (root.contains("solver")) {
    const json& s = root["solver"];
    reject_unknown_keys(s, {"T", "dt", "tol", "max_iter", "restart_every", "rk4_dt"}, "solver");
    cfg.solver.horizon = s.value("T", cfg.solver.horizon);
    cfg.solver.dt = s.value("dt", cfg.solver.dt);
    cfg.solver.tol = s.value("tol", cfg.solver.tol);
    cfg.solver.max_iter = s.value("max_iter", cfg.solver.max_iter);
    cfg.solver.restart_every = s.value("restart_every", cfg.solver.restart_every);
    cfg.solver.rk4_dt = s.value("rk4_dt", cfg.solver.rk4_dt);
  }

  if (root.contains("ibm")) {
    const json& b = root["ibm"];
    reject_unknown_keys(
        b, {"eps_list", "replicates", "snapshot_times", "seed", "bin_width", "pair_bins",
            "pair_rmax"},
        "ibm");
    if (b.contains("eps_list")) cfg.ibm.eps_list = b["eps_list"].get<std::vector<double>>();
    cfg.ibm.replicates = b.value("replicates", cfg.ibm.replicates);
    if (b.contains("snapshot_times"))
      cfg.ibm.snapshot_times = b["snapshot_times"].get<std::vector<double>>();
    cfg.ibm.seed = b.value("seed", cfg.ibm.seed);
    cfg.ibm.bin_width = b.value("bin_width", cfg.ibm.bin_width);
    cfg.ibm.pair_bins = b.value("pair_bins", cfg.ibm.pair_bins);
    cfg.ibm.pair_rmax = b.value("pair_rmax", cfg.ibm.pair_rmax);
    for (double e : cfg.ibm.eps_list)
      if (!(e > 0.0 && e <= 1.0))
        throw std::invalid_argument("config: ibm.eps_list entries must lie in (0, 1]");
    if (cfg.ibm.replicates < 1)
      throw std::invalid_argument("config: ibm.replicates must be >= 1");
  }

  if (root.contains("truncation")) {
    const json& t = root["truncation"];
    reject_unknown_keys(t, {"N", "M_ops"}, "truncation");
    cfg.truncation.levels = t.value("N", cfg.truncation.levels);
    cfg.truncation.grid_size = t.value("M_ops", cfg.truncation.grid_size);
    if (cfg.truncation.levels < 1)
      throw std::invalid_argument("config: truncation.N must be >= 1");
  }

  if (root.contains("ops")) {
    const json& o = root["ops"];
    reject_unknown_keys(o, {"samples", "lambda", "seed"}, "ops");
    cfg.ops.samples = o.value("samples", cfg.ops.samples);
    cfg.ops.lambda = o.value("lambda", cfg.ops.lambda);
    cfg.ops.seed = o.value("seed", cfg.ops.seed);
    if (cfg.ops.samples < 1) throw std::invalid_argument("config: ops.samples must be >= 1");
    if (!(cfg.ops.lambda > 0.0)) throw std::invalid_argument("config: ops.lambda must be > 0");
  }

  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ExperimentConfig::canonical_json() const {
  json ic;
  switch (initial.kind) {
    case InitialCondition::Kind::constant:
      ic = {{"kind", "constant"}, {"value", initial.value}};
      break;
    case InitialCondition::Kind::sinusoid:
      ic = {{"kind", "sinusoid"},
            {"mean", initial.mean},
            {"amplitude", initial.amplitude},
            {"mode", initial.mode}};
      break;
    case InitialCondition::Kind::table:
      ic = {{"kind", "table"}, {"path", initial.table_path}};
      break;
  }
  json root{
      {"model",
       {{"m", model.m},
        {"kappa_minus", model.kappa_minus},
        {"kappa_plus", model.kappa_plus},
        {"C", model.weight_c},
        {"eps", model.eps},
        {"L", model.length},
        {"M", model.grid_size},
        {"a_minus", kernel_json(model.a_minus)},
        {"a_plus", kernel_json(model.a_plus)}}},
      {"initial", ic},
      {"solver",
       {{"T", solver.horizon},
        {"dt", solver.dt},
        {"tol", solver.tol},
        {"max_iter", solver.max_iter},
        {"restart_every", solver.restart_every},
        {"rk4_dt", solver.rk4_dt}}},
      {"ibm",
       {{"eps_list", ibm.eps_list},
        {"replicates", ibm.replicates},
        {"snapshot_times", ibm.snapshot_times},
        {"seed", ibm.seed},
        {"bin_width", ibm.bin_width},
        {"pair_bins", ibm.pair_bins},
        {"pair_rmax", ibm.pair_rmax}}},
      {"truncation", {{"N", truncation.levels}, {"M_ops", truncation.grid_size}}},
      {"ops", {{"samples", ops.samples}, {"lambda", ops.lambda}, {"seed", ops.seed}}}};
  return root.dump();
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string ExperimentConfig::config_hash() const {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_json())));
  return buf;
}

int ExperimentConfig::effective_threads() const {
  int t = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (t < 1) t = 1;
  if (const char* env = std::getenv("BDLP_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) t = std::min(t, cap);
  }
  return t;
}

namespace {

std::string artifact_header(const ExperimentConfig& cfg) {
  return std::string("# bdlp ") + kVersion + " config=" + cfg.config_hash() + "\n";
}

json meta_json(const ExperimentConfig& cfg) {
  return json{{"tool", "bdlp"}, {"version", kVersion}, {"config", cfg.config_hash()}};
}

json validation_json(const ValidationReport& rep) {
  return json{{"bigmort_ok", rep.bigmort_ok},
              {"bigmort_margin", rep.bigmort_margin},
              {"bigcomp_ok", rep.bigcomp_ok},
              {"bigcomp_margin", rep.bigcomp_margin},
              {"bigcomp_argmin", rep.bigcomp_argmin},
              {"c_lower_ok", rep.c_lower_ok},
              {"c_lower_threshold", rep.c_lower_threshold},
              {"contraction_q", rep.contraction_q},
              {"all_ok", rep.all_ok()}};
}

json level_function_json(const LevelFunction& f) {
  json levels = json::array();
  for (int n = 0; n <= f.max_points(); ++n) {
    json lvl = json::array();
    for (std::size_t r = 0; r < f.space()->level_size(n); ++r) {
      const auto cfg = f.space()->config(n, r);
      lvl.push_back(json{{"sites", std::vector<int>(cfg.begin(), cfg.end())},
                         {"value", f.value(n, r)}});
    }
    levels.push_back(lvl);
  }
  return json{{"weight", f.weight()}, {"levels", levels}};
}

void append_regime_warnings(const ExperimentConfig& cfg, const Field& rho0, std::string& summary) {
  const auto rep = validate_params(cfg.model);
  if (!rep.bigmort_ok)
    summary += "warning: mortality condition fails (contraction not guaranteed)\n";
  if (!rep.bigcomp_ok) summary += "warning: kernel domination condition fails\n";
  if (!rep.c_lower_ok) summary += "warning: C below the contraction threshold\n";
  if (rho0.max() > cfg.model.weight_c)
    summary += "warning: initial density exceeds the cap C\n";
  if (!domain_resolves_kernel(cfg.model.a_minus, cfg.model.length) ||
      !domain_resolves_kernel(cfg.model.a_plus, cfg.model.length))
    summary += "warning: domain shorter than six kernel scale lengths\n";
}

}  // namespace

RunOutcome run_validate(const ExperimentConfig& cfg) {
  const auto rep = validate_params(cfg.model);
  RunOutcome out;
  out.ok = true;  // report-only: failures are warnings, not errors
  std::ostringstream s;
  s << "bigmort_ok=" << (rep.bigmort_ok ? "true" : "false")
    << " margin=" << fmt(rep.bigmort_margin) << "\n"
    << "bigcomp_ok=" << (rep.bigcomp_ok ? "true" : "false")
    << " margin=" << fmt(rep.bigcomp_margin) << " at x=" << fmt(rep.bigcomp_argmin) << "\n"
    << "c_lower_ok=" << (rep.c_lower_ok ? "true" : "false")
    << " threshold=" << fmt(rep.c_lower_threshold) << "\n"
    << "contraction_q=" << fmt(rep.contraction_q) << "\n";
  out.summary = s.str();

  json doc = validation_json(rep);
  doc["meta"] = meta_json(cfg);
  out.artifacts.push_back({"validate.json", doc.dump(2) + "\n"});
  return out;
}

namespace {

std::string trajectory_csv(const ExperimentConfig& cfg, const Trajectory& traj) {
  std::string text = artifact_header(cfg);
  text += "t,x,rho\n";
  for (std::size_t k = 0; k < traj.node_count(); ++k)
    for (int i = 0; i < traj.grid.size; ++i) {
      text += fmt(traj.times[k]);
      text += ',';
      text += fmt(traj.grid.site(i));
      text += ',';
      text += fmt(traj.nodes[k][i]);
      text += '\n';
    }
  return text;
}

}  // namespace

RunOutcome run_vlasov(const ExperimentConfig& cfg, const std::string& method) {
  RunOutcome out;
  const Field rho0 = cfg.initial.realize(cfg.model.grid());
  append_regime_warnings(cfg, rho0, out.summary);
  VlasovSolver solver(cfg.model);

  json diag = {{"method", method}, {"meta", meta_json(cfg)}};
  Trajectory traj;
  if (method == "picard") {
    PicardOptions opt;
    opt.horizon = cfg.solver.horizon;
    opt.dt = cfg.solver.dt;
    opt.tol = cfg.solver.tol;
    opt.max_iter = cfg.solver.max_iter;
    opt.restart_every = cfg.solver.restart_every;
    opt.allow_out_of_regime = cfg.override_regime;
    auto [t, d] = solver.picard(rho0, opt);
    traj = std::move(t);
    diag["converged"] = d.converged;
    diag["iterations"] = d.iterations;
    diag["tol"] = d.tol;
    diag["contraction_q"] = d.contraction_q;
    diag["differences"] = d.differences;
    diag["ratios"] = d.ratios;
    out.summary += "picard converged in " + std::to_string(d.iterations) + " iterations\n";
  } else if (method == "rk4") {
    traj = solver.rk4(rho0, cfg.solver.horizon, cfg.solver.rk4_dt);
    diag["dt"] = cfg.solver.rk4_dt;
    out.summary += "rk4 integrated " + std::to_string(traj.node_count() - 1) + " steps\n";
  } else if (method == "linear") {
    traj = solver.linear_upper(rho0, cfg.solver.horizon, cfg.solver.rk4_dt);
    diag["dt"] = cfg.solver.rk4_dt;
    out.summary += "linear comparison integrated\n";
  } else {
    throw std::invalid_argument("vlasov: method must be picard|rk4|linear");
  }
  diag["horizon"] = cfg.solver.horizon;
  diag["min_value"] = traj.min_value();
  diag["max_value"] = traj.max_value();

  out.artifacts.push_back({"trajectory.csv", trajectory_csv(cfg, traj)});
  out.artifacts.push_back({"diagnostics.json", diag.dump(2) + "\n"});
  return out;
}

RunOutcome run_ibm(const ExperimentConfig& cfg, bool binned) {
  RunOutcome out;
  const Field rho0 = cfg.initial.realize(cfg.model.grid());
  append_regime_warnings(cfg, rho0, out.summary);
  if (cfg.ibm.snapshot_times.empty())
    throw std::invalid_argument("ibm: need at least one snapshot time");

  IbmSimulator sim(cfg.model);
  const double horizon =
      *std::max_element(cfg.ibm.snapshot_times.begin(), cfg.ibm.snapshot_times.end());
  const auto ensemble = sim.run_ensemble(rho0, horizon, cfg.ibm.snapshot_times,
                                         cfg.ibm.replicates, cfg.ibm.seed,
                                         cfg.effective_threads());

  std::string snap_text = artifact_header(cfg);
  if (binned) {
    snap_text += "replicate,t,bin_center,count\n";
    const int bins = static_cast<int>(std::llround(cfg.model.length / cfg.ibm.bin_width));
    for (std::size_t r = 0; r < ensemble.replicates.size(); ++r)
      for (std::size_t si = 0; si < ensemble.snapshot_times.size(); ++si) {
        std::vector<int> counts(bins, 0);
        for (double x : ensemble.replicates[r][si].positions) {
          int b = static_cast<int>(x / cfg.ibm.bin_width);
          if (b >= bins) b = bins - 1;
          ++counts[b];
        }
        for (int b = 0; b < bins; ++b) {
          snap_text += std::to_string(r);
          snap_text += ',';
          snap_text += fmt(ensemble.snapshot_times[si]);
          snap_text += ',';
          snap_text += fmt((b + 0.5) * cfg.ibm.bin_width);
          snap_text += ',';
          snap_text += std::to_string(counts[b]);
          snap_text += '\n';
        }
      }
  } else {
    snap_text += "replicate,t,x\n";
    for (std::size_t r = 0; r < ensemble.replicates.size(); ++r)
      for (std::size_t si = 0; si < ensemble.snapshot_times.size(); ++si)
        for (double x : ensemble.replicates[r][si].positions) {
          snap_text += std::to_string(r);
          snap_text += ',';
          snap_text += fmt(ensemble.snapshot_times[si]);
          snap_text += ',';
          snap_text += fmt(x);
          snap_text += '\n';
        }
  }
  out.artifacts.push_back({"snapshots.csv", std::move(snap_text)});

  std::string dens_text = artifact_header(cfg);
  dens_text += "t,bin_center,density\n";
  for (std::size_t si = 0; si < ensemble.snapshot_times.size(); ++si) {
    const auto dens = empirical_density(ensemble, si, cfg.ibm.bin_width);
    for (int b = 0; b < dens.bin_count(); ++b) {
      dens_text += fmt(ensemble.snapshot_times[si]);
      dens_text += ',';
      dens_text += fmt(dens.center(b));
      dens_text += ',';
      dens_text += fmt(dens.values[b]);
      dens_text += '\n';
    }
  }
  out.artifacts.push_back({"density.csv", std::move(dens_text)});

  const std::size_t last = ensemble.snapshot_times.size() - 1;
  const auto pair = pair_correlation(ensemble, last, cfg.ibm.pair_bins, cfg.ibm.pair_rmax);
  std::string g_text = artifact_header(cfg);
  g_text += "r,g,stderr\n";
  for (int b = 0; b < static_cast<int>(pair.g.size()); ++b) {
    g_text += fmt(pair.center(b));
    g_text += ',';
    g_text += fmt(pair.g[b]);
    g_text += ',';
    g_text += fmt(pair.stderr_g[b]);
    g_text += '\n';
  }
  out.artifacts.push_back({"pair_correlation.csv", std::move(g_text)});

  out.summary += "ensemble of " + std::to_string(cfg.ibm.replicates) + " replicates at eps=" +
                 fmt(cfg.model.eps) + "\n";
  return out;
}

RunOutcome run_sweep(const ExperimentConfig& cfg) {
  RunOutcome out;
  const Field rho0 = cfg.initial.realize(cfg.model.grid());
  append_regime_warnings(cfg, rho0, out.summary);
  if (cfg.ibm.snapshot_times.empty())
    throw std::invalid_argument("sweep: need at least one snapshot time");

  SweepSettings settings;
  settings.horizon =
      *std::max_element(cfg.ibm.snapshot_times.begin(), cfg.ibm.snapshot_times.end());
  settings.snapshot_times = cfg.ibm.snapshot_times;
  settings.eps_list = cfg.ibm.eps_list;
  settings.replicates = cfg.ibm.replicates;
  settings.bin_width = cfg.ibm.bin_width;
  settings.solver_dt = cfg.solver.rk4_dt;
  settings.threads = cfg.effective_threads();

  const auto rows = epsilon_sweep(cfg.model, rho0, settings, cfg.ibm.seed);

  std::string text = artifact_header(cfg);
  text += "eps,t,l2_error,stderr\n";
  for (const auto& row : rows) {
    text += fmt(row.eps);
    text += ',';
    text += fmt(row.time);
    text += ',';
    text += fmt(row.l2);
    text += ',';
    text += fmt(row.stderr_l2);
    text += '\n';
  }
  out.artifacts.push_back({"sweep.csv", std::move(text)});
  out.summary += "sweep over " + std::to_string(cfg.ibm.eps_list.size()) + " eps values, " +
                 std::to_string(rows.size()) + " rows\n";
  return out;
}

RunOutcome run_ops(const ExperimentConfig& cfg, const std::string& check) {
  const bool want_bounds = check == "all" || check == "bounds";
  const bool want_resolvent = check == "all" || check == "resolvent";
  const bool want_chaos = check == "all" || check == "chaos";
  const bool want_adjoint = check == "all" || check == "adjoint";
  if (!(want_bounds || want_resolvent || want_chaos || want_adjoint))
    throw std::invalid_argument("ops: check must be all|bounds|resolvent|chaos|adjoint");

  const GridSpec grid(cfg.model.length, cfg.truncation.grid_size);
  auto space = std::make_shared<const ConfigSpace>(grid, cfg.truncation.levels);
  ModelParams params = cfg.model;
  params.grid_size = cfg.truncation.grid_size;
  const HierarchyOps ops(space, params);
  const int interior = space->max_points() - 1;

  RunOutcome out;
  json checks;
  bool all_pass = true;

  auto note = [&](const std::string& name, bool pass, const std::string& detail) {
    out.summary += std::string(pass ? "pass" : "FAIL") + "  " + name +
                   (detail.empty() ? "" : "  " + detail) + "\n";
    all_pass = all_pass && pass;
  };

  if (want_bounds) {
    const auto rep = ops.relative_bound_report(cfg.ops.samples, cfg.ops.seed);
    json j{{"pass", rep.pass},
           {"ceiling", rep.ceiling},
           {"observed", rep.max_ratio},
           {"samples", rep.samples},
           {"params", {{"m", params.m}, {"C", params.weight_c}}}};
    if (rep.worst_sample >= 0) {
      Rng rng(derive_seed(cfg.ops.seed, rep.worst_sample));
      j["worst_input"] = level_function_json(
          random_level_function(space, params.weight_c, interior, rng, true));
    }
    checks["relative_bound"] = j;
    note("relative_bound", rep.pass,
         "max " + fmt(rep.max_ratio) + " <= " + fmt(rep.ceiling));

    json feps = json::array();
    bool feps_pass = true;
    for (double lambda : {0.5, 1.0, 10.0}) {
      const double observed = ops.f_eps_max(lambda);
      const bool pass = observed < 1.0 / lambda;
      feps_pass = feps_pass && pass;
      feps.push_back({{"lambda", lambda},
                      {"observed", observed},
                      {"ceiling", 1.0 / lambda},
                      {"pass", pass}});
    }
    checks["f_eps_bound"] = {{"pass", feps_pass}, {"rows", feps}, {"samples", "exhaustive"}};
    note("f_eps_bound", feps_pass, "exhaustive over the truncation");
  }

  if (want_resolvent) {
    Rng rng(derive_seed(cfg.ops.seed, 0x517e));
    const auto g = random_level_function(space, params.weight_c, interior, rng);
    const std::vector<double> eps_list{1.0, 0.1, 0.01};
    const auto table = ops.resolvent_convergence(eps_list, cfg.ops.lambda, g);

    bool monotone = true, sup_ok = true, linear_ok = true;
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
      const auto& hi = table.rows[i];
      const auto& lo = table.rows[i + 1];
      monotone = monotone && lo.delta1 <= hi.delta1 * (1.0 + 1e-12) &&
                 lo.delta2 <= hi.delta2 * (1.0 + 1e-12) && lo.delta3 <= hi.delta3 * (1.0 + 1e-12);
    }
    const auto& r01 = table.rows[1];  // eps = 0.1
    const auto& r001 = table.rows[2];
    for (auto pair : {std::pair{r001.delta1, r01.delta1},
                      std::pair{r001.delta2, r01.delta2},
                      std::pair{r001.delta3, r01.delta3}}) {
      if (pair.second == 0.0) continue;
      const double ratio = pair.first / pair.second;
      linear_ok = linear_ok && ratio >= 0.05 && ratio <= 0.2;
    }
    for (const auto& row : table.rows)
      sup_ok = sup_ok && row.resolvent_norm <= table.base_norm * (1.0 + 1e-12);

    double tail = 0.0;
    const auto res = ops.resolvent_l_ren(cfg.ops.lambda, g, 40, &tail);
    QuasiObservable defect = ops.apply_l_ren_truncated(res);
    QuasiObservable lam_term = res;
    lam_term *= -cfg.ops.lambda;
    defect += lam_term;
    defect -= g;
    const double residual = lc_norm(defect);
    const double neumann_ceiling = std::max(1e-8 * lc_norm(g), 4.0 * tail);
    const bool neumann_ok = residual <= neumann_ceiling;

    json rows = json::array();
    for (const auto& row : table.rows)
      rows.push_back({{"eps", row.eps},
                      {"delta1", row.delta1},
                      {"delta2", row.delta2},
                      {"delta3", row.delta3},
                      {"resolvent_norm", row.resolvent_norm}});
    const bool pass = monotone && sup_ok && linear_ok && neumann_ok;
    checks["resolvent"] = {{"pass", pass},
                           {"monotone", monotone},
                           {"sup_bound", sup_ok},
                           {"linear_in_eps", linear_ok},
                           {"neumann_roundtrip_residual", residual},
                           {"neumann_tail_bound", tail},
                           {"lambda", cfg.ops.lambda},
                           {"base_norm", table.base_norm},
                           {"rows", rows}};
    note("resolvent", pass, "roundtrip residual " + fmt(residual));
  }

  if (want_chaos) {
    Rng rng(derive_seed(cfg.ops.seed, 0xc4a05));
    double worst = 0.0;
    for (int s = 0; s < cfg.ops.samples; ++s) {
      std::vector<double> v(grid.size);
      for (double& x : v) x = params.weight_c * uniform01(rng);
      worst = std::max(worst, ops.chaos_residual(Field(grid, std::move(v))));
    }
    const bool pass = worst <= 1e-12;
    checks["chaos"] = {{"pass", pass},
                       {"observed", worst},
                       {"ceiling", 1e-12},
                       {"samples", cfg.ops.samples}};
    note("chaos", pass, "max residual " + fmt(worst));
  }

  if (want_adjoint) {
    bool pass_v = true, pass_lren = true;
    double worst_v = 0.0, worst_lren = 0.0;
    for (int s = 0; s < cfg.ops.samples; ++s) {
      Rng rng(derive_seed(cfg.ops.seed + 0xad01, s));
      const auto g = random_level_function(space, params.weight_c, interior, rng);
      const auto k = random_level_function(space, params.weight_c, interior, rng);
      const double bound = 1e-10 * lc_norm(g) * kc_norm(k);

      const double lhs_v = pairing(ops.apply(OperatorId::v, g), k);
      const double rhs_v = pairing(g, ops.apply_dual(OperatorId::v_star, k));
      worst_v = std::max(worst_v, std::abs(lhs_v - rhs_v));
      pass_v = pass_v && std::abs(lhs_v - rhs_v) <= bound;

      const double lhs_l = pairing(ops.apply(OperatorId::l_ren, g), k);
      const auto dual = scale_reps(
          ops.apply_dual(OperatorId::l_star, scale_reps(k, 1.0 / params.eps)), params.eps);
      const double rhs_l = pairing(g, dual);
      worst_lren = std::max(worst_lren, std::abs(lhs_l - rhs_l));
      pass_lren = pass_lren && std::abs(lhs_l - rhs_l) <= bound;
    }
    checks["adjoint_v"] = {{"pass", pass_v}, {"observed", worst_v}, {"samples", cfg.ops.samples}};
    checks["adjoint_l_ren"] = {
        {"pass", pass_lren}, {"observed", worst_lren}, {"samples", cfg.ops.samples}};
    note("adjoint_v", pass_v, "worst gap " + fmt(worst_v));
    note("adjoint_l_ren", pass_lren, "worst gap " + fmt(worst_lren));
  }

  json doc{{"checks", checks}, {"pass", all_pass}, {"meta", meta_json(cfg)}};
  out.artifacts.push_back({"ops_report.json", doc.dump(2) + "\n"});
  out.ok = all_pass;
  return out;
}

}  // namespace bdlp
