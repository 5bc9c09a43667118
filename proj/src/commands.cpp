#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "tiknest/experiment.hpp"

namespace tiknest {

namespace fs = std::filesystem;

namespace {

void write_file(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw ConfigError("cannot create directory '" + p.parent_path().string() + "'");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

std::string trace_csv(const Trace& trace) {
  std::ostringstream out;
  write_trace_csv(out, trace);
  return out.str();
}

std::string table_csv(const CsvTable& table) {
  std::ostringstream out;
  write_table_csv(out, table);
  return out.str();
}

std::string svg_sibling(const std::string& csv_path) {
  return fs::path(csv_path).replace_extension(".svg").string();
}

ChartSeries record_series(const Trace& trace, const std::string& label,
                          double (*pick)(const IterateRecord&)) {
  ChartSeries s{label, {}, {}};
  for (const auto& r : trace.records) {
    s.x.push_back(static_cast<double>(r.k));
    s.y.push_back(pick(r));
  }
  return s;
}

double pick_f(const IterateRecord& r) { return r.f_x; }
double pick_dist(const IterateRecord& r) { return r.dist_xstar; }
double pick_velocity(const IterateRecord& r) { return r.velocity; }

double final_distance(const Trace& trace, const Objective& obj) {
  if (trace.records.empty()) return std::nan("");
  return (trace.records.back().x - obj.require_oracle().x_star).norm();
}

std::string describe_schedule(const SolverConfig& cfg) {
  std::ostringstream out;
  if (const auto& pp = cfg.schedule.polynomial_params()) {
    out << describe_certification(*pp, cfg.s());
  } else {
    out << "rate_certified: n/a (tabulated schedule)";
  }
  out << "\nk0 = " << cfg.schedule.k0() << ", k1 = " << cfg.schedule.k1()
      << ", condition (S) " << (cfg.schedule.condition_s_holds() ? "holds" : "fails");
  return out.str();
}

std::string run_report(const SolverConfig& cfg, const Trace& trace,
                       const std::optional<std::string>& failure) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "run: " << trace.summary << "\n";
  out << describe_schedule(cfg) << "\n";
  out << "iterations completed: " << trace.iterations << ", records: " << trace.records.size()
      << "\n";
  if (failure) out << "error: " << *failure << "\n";
  for (const auto& w : trace.warnings) out << "warning: " << w << "\n";
  if (!trace.records.empty()) {
    const auto& last = trace.records.back();
    out << "final k = " << last.k << ": f(x) = " << last.f_x << ", |grad f(x)| = "
        << last.grad_norm_x << ", velocity = " << last.velocity;
    if (std::isfinite(last.dist_xstar)) out << ", |x - x*| = " << last.dist_xstar;
    out << "\n";
  }
  if (!failure && cfg.objective.oracle()) {
    try {
      out << format_rate_report(rate_report(trace, cfg.schedule, cfg.objective));
    } catch (const InsufficientDataError& e) {
      out << "rate report skipped: " << e.what() << "\n";
    }
  }
  return out.str();
}

}  // namespace

int cmd_run(const std::string& config_path, const CommandOptions& opts, std::ostream& out,
            std::ostream& err) {
  ExperimentConfig cfg;
  std::optional<SolverConfig> solver;
  try {
    cfg = load_config(config_path);
    if (opts.iters) cfg.max_iter = *opts.iters;
    solver.emplace(build_solver_config(cfg));
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  Trace trace;
  std::optional<std::string> failure;
  try {
    trace = run(*solver);
  } catch (const DivergenceError& e) {
    trace = e.partial();
    failure = e.what();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  for (const auto& w : trace.warnings) err << "warning: " << w << "\n";

  try {
    write_file(cfg.outputs.csv_path, trace_csv(trace));
    const std::string report = run_report(*solver, trace, failure);
    write_file(cfg.outputs.report_path, report);
    std::optional<std::string> svg_path = cfg.outputs.svg_path;
    if (!svg_path && opts.svg) svg_path = svg_sibling(cfg.outputs.csv_path);
    if (svg_path) {
      ChartOptions chart{"f(x_k) - min f", "k", "potential energy", true};
      auto series = record_series(trace, "f(x_k)", pick_f);
      if (const auto& oracle = solver->objective.oracle()) {
        for (double& y : series.y) y -= oracle->min_value;
      }
      write_file(*svg_path, render_svg({series}, chart));
    }
    if (!opts.quiet) out << report;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  if (failure) {
    err << "error: " << *failure << "\n";
    return kExitDiverged;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

namespace {

// Condition (Q) and the sequence hypotheses are asymptotic; for the default schedule (Q)
// first holds near k = 2e8. Hypothesis decade trends run to 1000 kbar.
constexpr Index kCheckHorizon = 10'000'000'000;

struct CheckRow {
  std::string name;
  bool pass;
  std::string detail;
};

std::string sci(double v) {
  std::ostringstream out;
  out << std::setprecision(4) << v;
  return out.str();
}

}  // namespace

int cmd_check(const std::string& config_path, const CommandOptions& opts, std::ostream& out,
              std::ostream& err) {
  std::optional<SolverConfig> solver;
  try {
    ExperimentConfig cfg = load_config(config_path);
    if (opts.iters) cfg.max_iter = *opts.iters;
    solver.emplace(build_solver_config(cfg));
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  const Schedule& sched = solver->schedule;
  const Objective& obj = solver->objective;
  const double s = solver->s();
  const Index horizon = std::max<Index>(solver->max_iter, kCheckHorizon);
  std::vector<CheckRow> rows;

  try {
    if (const auto& pp = sched.polynomial_params()) {
      const std::string line = describe_certification(*pp, s);
      out << line << "\n";
      rows.push_back({"certification", certify(*pp, s) != Certification::uncertified, line});
    } else {
      out << "rate_certified: n/a (tabulated schedule)\n";
    }

    {
      std::ostringstream d;
      d << "s*L = " << sci(s * obj.lipschitz()) << ", k0 = " << sched.k0()
        << ", k1 = " << sched.k1();
      rows.push_back({"condition_S", sched.condition_s_holds(), d.str()});
    }

    Index hypothesis_horizon = horizon;
    {
      const auto k2 = find_k2(sched, horizon);
      if (k2) hypothesis_horizon = std::max(horizon, 1000 * (*k2 + 1));
      std::ostringstream d;
      if (k2) {
        d << "k2 = " << *k2 << ", kbar = " << *k2 + 1 << " (horizon " << horizon << ")";
      } else {
        d << "(Q) fails at horizon " << horizon;
      }
      rows.push_back({"condition_Q", k2.has_value(), d.str()});
    }

    const auto hyp = check_theorem2_hypotheses(sched, hypothesis_horizon);
    for (const auto& c : hyp.checks) rows.push_back({"hypothesis " + c.name, c.pass, c.detail});

    if (const auto& pp = sched.polynomial_params()) {
      double worst_b = 0.0, worst_c = 0.0;
      for (Index k : log_grid(std::max<Index>(2, sched.k1()), horizon, 100)) {
        const double b = b_coef(sched, k), c = c_coef(sched, k);
        const double bp = bp_closed_form(*pp, s, k), cp = cp_closed_form(*pp, s, k);
        worst_b = std::max(worst_b, std::abs(bp - b) / std::max(std::abs(b), 1e-14));
        worst_c = std::max(worst_c, std::abs(cp - c) / std::max(std::abs(c), 1e-14));
      }
      rows.push_back({"closed_form_b", worst_b <= 1e-10, "max rel diff " + sci(worst_b)});
      rows.push_back({"closed_form_c", worst_c <= 1e-10, "max rel diff " + sci(worst_c)});
    }

    const auto descent = check_descent_lemma(obj);
    rows.push_back({"descent_lemma", descent.pass(), "max violation " + sci(descent.max_violation)});
    const auto gradient = check_gradient_inequality(obj);
    rows.push_back(
        {"gradient_inequality", gradient.pass(), "max violation " + sci(gradient.max_violation)});
    const double s_check = std::min(s, 1.0 / obj.lipschitz());
    const auto modified = check_modified_descent(obj, s_check);
    std::string note = s_check < s ? " (sampled at s = 1/L)" : "";
    rows.push_back({"modified_descent", modified.pass(),
                    "max violation " + sci(std::max(modified.f3.max_violation,
                                                    modified.f4.max_violation)) +
                        note});
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  bool all = true;
  for (const auto& r : rows) {
    all = all && r.pass;
    if (!opts.quiet || !r.pass) {
      out << (r.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(34) << r.name << r.detail
          << "\n";
    }
  }
  out << (all ? "all checks passed" : "some checks failed") << "\n";
  return all ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

namespace {

struct FigureRun {
  std::string name;
  SolverConfig cfg;
  Trace trace;
  std::optional<std::string> error;
};

SolverConfig figure_config(double a, double b, std::optional<double> step, double default_step,
                           const PolyScheduleParams& params, Variant variant, Index iters) {
  Objective obj = paper_quadratic(a, b);
  const double chosen = step.value_or(default_step);
  const double s = chosen > 0.0 ? chosen : 0.9 / obj.lipschitz();
  Schedule sched = Schedule::polynomial(params, s, obj.lipschitz());
  Vector x0(2), x1(2);
  x0 << 1.0, -1.0;
  x1 << -1.0, 1.0;
  return SolverConfig{std::move(obj), std::move(sched), x0, x1, iters, variant, 1};
}

void execute(FigureRun& fr) {
  try {
    fr.trace = run(fr.cfg);
  } catch (const DivergenceError& e) {
    fr.trace = e.partial();
    fr.error = e.what();
  }
}

std::string file_label(const std::string& label) {
  std::string out;
  for (char ch : label) {
    if (ch != '=') out += ch;
  }
  return out;
}

/// One row per k in [1, n]; missing records become NaN.
CsvTable align(const std::vector<std::string>& labels, const std::vector<const Trace*>& traces,
               Index n, double (*pick)(const IterateRecord&)) {
  CsvTable table;
  table.columns.push_back("k");
  for (const auto& l : labels) table.columns.push_back(l);
  for (Index k = 1; k <= n; ++k) {
    std::vector<double> row{static_cast<double>(k)};
    for (const Trace* t : traces) {
      double v = std::nan("");
      if (k <= static_cast<Index>(t->records.size()) && t->records[k - 1].k == k) {
        v = pick(t->records[k - 1]);
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<ChartSeries> table_series(const CsvTable& table, std::size_t dashed_from) {
  std::vector<ChartSeries> out;
  for (std::size_t c = 1; c < table.columns.size(); ++c) {
    ChartSeries s{table.columns[c], {}, {}, c >= dashed_from};
    for (const auto& row : table.rows) {
      s.x.push_back(row[0]);
      s.y.push_back(row[c]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

int reproduce_fig1(const fs::path& dir, const CommandOptions& opts, std::ostream& out) {
  const Index iters = opts.iters.value_or(20);
  const std::vector<double> p_values{0.3, 0.6, 0.9, 1.2, 1.5};
  PolyScheduleParams params{1.0, 0.8, 1.0, 1.5};
  SolverConfig base = figure_config(0.1, 100.0, opts.step, 0.1, params, Variant::full, iters);
  const std::vector<MatrixRun> runs = run_matrix(base, p_values);

  const double f_x1 = base.objective.value(base.x1);
  const double min_f = base.objective.require_oracle().min_value;

  std::vector<std::string> labels;
  std::vector<const Trace*> traces;
  for (const auto& r : runs) {
    labels.push_back(r.label);
    traces.push_back(&r.trace);
    write_file((dir / ("fig1_" + file_label(r.label) + ".csv")).string(), trace_csv(r.trace));
  }

  CsvTable velocity = align(labels, traces, iters, pick_velocity);
  velocity.columns.push_back("ref_1_over_k");
  for (auto& row : velocity.rows) row.push_back(1.0 / row[0]);
  CsvTable energy = align(labels, traces, iters, pick_f);
  for (auto& row : energy.rows) {
    for (std::size_t c = 1; c < row.size(); ++c) row[c] -= min_f;
  }
  energy.columns.push_back("ref_f_x1_over_k2");
  for (auto& row : energy.rows) row.push_back(f_x1 / (row[0] * row[0]));
  write_file((dir / "fig1_velocity.csv").string(), table_csv(velocity));
  write_file((dir / "fig1_energy.csv").string(), table_csv(energy));
  if (opts.svg) {
    write_file((dir / "fig1_velocity.svg").string(),
               render_svg(table_series(velocity, labels.size() + 1),
                          {"Discrete velocity |x_k - x_{k-1}|", "k", "velocity", true}));
    write_file((dir / "fig1_energy.svg").string(),
               render_svg(table_series(energy, labels.size() + 1),
                          {"Potential energy f(x_k) - min f", "k", "energy", true}));
  }

  std::ostringstream rep;
  rep << std::setprecision(10);
  rep << "fig1: paper_quadratic(0.1, 100), q_k = k^0.8, eps_k = 1/k^p, s = " << base.s()
      << ", " << iters << " iterations\n";
  if (base.s() * base.objective.lipschitz() >= 1.0) {
    rep << "warning: step size exceeds 1/L (s*L = " << base.s() * base.objective.lipschitz()
        << ")\n";
  }
  rep << "f(x1) = " << f_x1 << "\n";
  bool diverged = false;
  std::optional<double> e_p15, e_base;
  for (const auto& r : runs) {
    if (r.error) {
      diverged = true;
      rep << r.label << ": error: " << *r.error << "\n";
      continue;
    }
    const double e = r.trace.records.back().f_x - min_f;
    if (r.label == "p=1.5") e_p15 = e;
    if (r.label == "baseline") e_base = e;
    rep << r.label << ": energy at k = " << r.trace.records.back().k << " is " << e << " ("
        << (e < f_x1 ? "below" : "not below") << " f(x1))\n";
  }
  if (e_p15 && e_base) {
    const bool similar = *e_p15 <= *e_base || *e_p15 <= 1.1 * *e_base;
    rep << "p=1.5 vs baseline: " << (similar ? "similar or better" : "worse") << "\n";
  }
  write_file((dir / "fig1_report.txt").string(), rep.str());
  if (!opts.quiet) out << rep.str();
  return diverged ? kExitDiverged : kExitOk;
}

std::string min_norm_line(const FigureRun& fr) {
  std::ostringstream out;
  out << std::setprecision(10);
  const double d = final_distance(fr.trace, fr.cfg.objective);
  out << fr.name << ": final |x - x*| = " << d << ", min-norm verdict "
      << (d <= RateOptions{}.min_norm_threshold ? "PASS" : "FAIL") << "\n";
  return out.str();
}

int reproduce_ablation(const std::string& figure, const fs::path& dir, const CommandOptions& opts,
                       std::ostream& out) {
  const Index iters = opts.iters.value_or(10'000);
  const PolyScheduleParams params{1.0, 0.8, 1.0, 1.5};
  std::vector<FigureRun> runs;
  auto add = [&](const std::string& name, Variant v) {
    runs.push_back({name, figure_config(1.0, 5.0, opts.step, 0.0, params, v, iters), {}, {}});
  };
  if (figure == "fig2") {
    add("drop_both", Variant::drop_both);
  } else if (figure == "fig3a") {
    add("drop_eps", Variant::drop_eps);
    add("full", Variant::full);
  } else {
    add("drop_c", Variant::drop_c);
    add("full", Variant::full);
  }
  for (auto& fr : runs) execute(fr);

  CsvTable components;
  components.columns.push_back("k");
  for (const auto& fr : runs) {
    components.columns.push_back(fr.name + "_x1");
    components.columns.push_back(fr.name + "_x2");
    write_file((dir / (figure + "_" + fr.name + ".csv")).string(), trace_csv(fr.trace));
  }
  for (Index k = 1; k <= iters; ++k) {
    std::vector<double> row{static_cast<double>(k)};
    for (const auto& fr : runs) {
      const bool have = k <= static_cast<Index>(fr.trace.records.size());
      row.push_back(have ? fr.trace.records[k - 1].x(0) : std::nan(""));
      row.push_back(have ? fr.trace.records[k - 1].x(1) : std::nan(""));
    }
    components.rows.push_back(std::move(row));
  }
  write_file((dir / (figure + "_components.csv")).string(), table_csv(components));
  if (opts.svg) {
    write_file((dir / (figure + "_components.svg")).string(),
               render_svg(table_series(components, components.columns.size()),
                          {figure + ": iterate components", "k", "component", false}));
    std::vector<ChartSeries> dist;
    for (const auto& fr : runs) dist.push_back(record_series(fr.trace, fr.name, pick_dist));
    write_file((dir / (figure + "_distance.svg")).string(),
               render_svg(dist, {figure + ": distance to x*", "k", "|x_k - x*|", true}));
  }

  std::ostringstream rep;
  rep << std::setprecision(10);
  rep << figure << ": paper_quadratic(1, 5), q_k = k^0.8, eps_k = 1/k^1.5, s = " << runs[0].cfg.s()
      << ", " << iters << " iterations\n";
  bool diverged = false;
  for (const auto& fr : runs) {
    for (const auto& w : fr.trace.warnings) rep << fr.name << ": warning: " << w << "\n";
    if (fr.error) {
      diverged = true;
      rep << fr.name << ": error: " << *fr.error << "\n";
      continue;
    }
    if (figure == "fig2") {
      const double d = final_distance(fr.trace, fr.cfg.objective);
      rep << fr.name << ": final |x - x*| = " << d << " (threshold " << kFig2DistanceThreshold
          << "): " << (d > kFig2DistanceThreshold ? "no convergence to the minimal norm element"
                                                   : "within threshold")
          << "\n";
    } else {
      rep << min_norm_line(fr);
    }
  }
  write_file((dir / (figure + "_report.txt")).string(), rep.str());
  if (!opts.quiet) out << rep.str();
  return diverged ? kExitDiverged : kExitOk;
}

}  // namespace

int cmd_reproduce(const std::string& figure, const std::string& out_dir,
                  const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  if (figure != "fig1" && figure != "fig2" && figure != "fig3a" && figure != "fig3b") {
    err << "error: unknown figure '" << figure << "' (expected fig1, fig2, fig3a or fig3b)\n";
    return kExitConfigError;
  }
  try {
    if (opts.iters && *opts.iters < 1) throw ConfigError("--iters must be positive");
    if (opts.step && !(*opts.step >= 0.0 && std::isfinite(*opts.step))) {
      throw ConfigError("--step must be positive or auto");
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out_dir + "'");
    if (figure == "fig1") return reproduce_fig1(out_dir, opts, out);
    return reproduce_ablation(figure, out_dir, opts, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace tiknest
