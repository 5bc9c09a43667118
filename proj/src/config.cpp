#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tiknest/experiment.hpp"

namespace tiknest {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing field '" + key + "'");
  return *it;
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": expected a finite number");
  return v;
}

std::vector<double> get_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_number(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Index get_index(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<Index>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

ProblemSpec parse_problem(const json& j) {
  if (!j.is_object()) throw ConfigError("problem: expected an object");
  const std::string type = get_string(require(j, "type", "problem"), "problem.type");
  if (type == "paper_quadratic") {
    return PaperQuadraticSpec{get_number(require(j, "a", "problem"), "problem.a"),
                              get_number(require(j, "b", "problem"), "problem.b")};
  }
  if (type == "shifted_quadratic") {
    return ShiftedQuadraticSpec{get_vector(require(j, "u", "problem"), "problem.u")};
  }
  if (type == "psd_quadratic") {
    const json& rows = require(j, "A", "problem");
    if (!rows.is_array()) throw ConfigError("problem.A: expected an array of rows");
    PsdQuadraticSpec spec;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      spec.A.push_back(get_vector(rows[i], "problem.A[" + std::to_string(i) + "]"));
    }
    spec.b = get_vector(require(j, "b", "problem"), "problem.b");
    return spec;
  }
  throw ConfigError("problem.type: unknown problem '" + type +
                    "' (expected paper_quadratic, shifted_quadratic or psd_quadratic)");
}

ScheduleSpec parse_schedule(const json& j) {
  if (!j.is_object()) throw ConfigError("schedule: expected an object");
  ScheduleSpec spec;
  if (j.contains("a")) spec.poly.a = get_number(j["a"], "schedule.a");
  if (j.contains("q")) spec.poly.q_exp = get_number(j["q"], "schedule.q");
  if (j.contains("c")) spec.poly.c = get_number(j["c"], "schedule.c");
  if (j.contains("p")) spec.poly.p_exp = get_number(j["p"], "schedule.p");
  if (j.contains("generic")) {
    const json& g = j["generic"];
    if (!g.is_object()) throw ConfigError("schedule.generic: expected an object");
    TabulatedSchedule table{get_vector(require(g, "eps", "schedule.generic"), "schedule.generic.eps"),
                            get_vector(require(g, "q", "schedule.generic"), "schedule.generic.q")};
    if (table.eps.size() != table.q.size()) {
      throw ConfigError("schedule.generic: eps and q must have the same length");
    }
    spec.table = std::move(table);
  }
  return spec;
}

json problem_to_json(const ProblemSpec& spec) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PaperQuadraticSpec>) {
          return {{"type", "paper_quadratic"}, {"a", p.a}, {"b", p.b}};
        } else if constexpr (std::is_same_v<T, ShiftedQuadraticSpec>) {
          return {{"type", "shifted_quadratic"}, {"u", p.u}};
        } else {
          return {{"type", "psd_quadratic"}, {"A", p.A}, {"b", p.b}};
        }
      },
      spec);
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");

  ExperimentConfig cfg;
  cfg.problem = parse_problem(require(j, "problem", "config"));
  if (j.contains("schedule")) cfg.schedule = parse_schedule(j["schedule"]);
  if (j.contains("s")) {
    const json& s = j["s"];
    if (s.is_string()) {
      if (s.get<std::string>() != "auto") throw ConfigError("s: expected a number or \"auto\"");
    } else {
      cfg.s = get_number(s, "s");
      if (!(*cfg.s > 0.0)) throw ConfigError("s: must be positive");
    }
  }
  if (j.contains("variant")) cfg.variant = parse_variant(get_string(j["variant"], "variant"));
  cfg.x0 = get_vector(require(j, "x0", "config"), "x0");
  cfg.x1 = get_vector(require(j, "x1", "config"), "x1");
  if (j.contains("max_iter")) cfg.max_iter = get_index(j["max_iter"], "max_iter");
  if (cfg.max_iter < 1) throw ConfigError("max_iter: must be positive");
  if (j.contains("record_every")) cfg.record_every = get_index(j["record_every"], "record_every");
  if (cfg.record_every < 0) throw ConfigError("record_every: must be >= 0");

  const json& out = require(j, "outputs", "config");
  if (!out.is_object()) throw ConfigError("outputs: expected an object");
  cfg.outputs.csv_path = get_string(require(out, "csv_path", "outputs"), "outputs.csv_path");
  cfg.outputs.report_path =
      get_string(require(out, "report_path", "outputs"), "outputs.report_path");
  if (out.contains("svg_path") && !out["svg_path"].is_null()) {
    cfg.outputs.svg_path = get_string(out["svg_path"], "outputs.svg_path");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
  json j;
  j["problem"] = problem_to_json(cfg.problem);
  json sched = {{"a", cfg.schedule.poly.a},
                {"q", cfg.schedule.poly.q_exp},
                {"c", cfg.schedule.poly.c},
                {"p", cfg.schedule.poly.p_exp}};
  if (cfg.schedule.table) {
    sched["generic"] = {{"eps", cfg.schedule.table->eps}, {"q", cfg.schedule.table->q}};
  }
  j["schedule"] = sched;
  if (cfg.s) {
    j["s"] = *cfg.s;
  } else {
    j["s"] = "auto";
  }
  j["variant"] = std::string(to_string(cfg.variant));
  j["x0"] = cfg.x0;
  j["x1"] = cfg.x1;
  j["max_iter"] = cfg.max_iter;
  j["record_every"] = cfg.record_every;
  json out = {{"csv_path", cfg.outputs.csv_path}, {"report_path", cfg.outputs.report_path}};
  if (cfg.outputs.svg_path) out["svg_path"] = *cfg.outputs.svg_path;
  j["outputs"] = out;
  return j.dump(2) + "\n";
}

bool operator==(const PaperQuadraticSpec& l, const PaperQuadraticSpec& r) {
  return l.a == r.a && l.b == r.b;
}
bool operator==(const ShiftedQuadraticSpec& l, const ShiftedQuadraticSpec& r) { return l.u == r.u; }
bool operator==(const PsdQuadraticSpec& l, const PsdQuadraticSpec& r) {
  return l.A == r.A && l.b == r.b;
}
bool operator==(const TabulatedSchedule& l, const TabulatedSchedule& r) {
  return l.eps == r.eps && l.q == r.q;
}
bool operator==(const ScheduleSpec& l, const ScheduleSpec& r) {
  return l.poly.a == r.poly.a && l.poly.q_exp == r.poly.q_exp && l.poly.c == r.poly.c &&
         l.poly.p_exp == r.poly.p_exp && l.table == r.table;
}
bool operator==(const OutputSpec& l, const OutputSpec& r) {
  return l.csv_path == r.csv_path && l.svg_path == r.svg_path && l.report_path == r.report_path;
}
bool operator==(const ExperimentConfig& l, const ExperimentConfig& r) {
  return l.problem == r.problem && l.schedule == r.schedule && l.s == r.s &&
         l.variant == r.variant && l.x0 == r.x0 && l.x1 == r.x1 && l.max_iter == r.max_iter &&
         l.record_every == r.record_every && l.outputs == r.outputs;
}

Objective build_objective(const ProblemSpec& spec) {
  return std::visit(
      [](const auto& p) -> Objective {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PaperQuadraticSpec>) {
          return paper_quadratic(p.a, p.b);
        } else if constexpr (std::is_same_v<T, ShiftedQuadraticSpec>) {
          if (p.u.empty()) throw ConfigError("problem.u: must be non-empty");
          return shifted_quadratic(to_vector(p.u));
        } else {
          const auto n = static_cast<Eigen::Index>(p.A.size());
          if (n == 0) throw ConfigError("problem.A: must be non-empty");
          Matrix A(n, n);
          for (Eigen::Index i = 0; i < n; ++i) {
            if (static_cast<Eigen::Index>(p.A[i].size()) != n) {
              throw ConfigError("problem.A: must be square");
            }
            for (Eigen::Index j = 0; j < n; ++j) A(i, j) = p.A[i][j];
          }
          if (static_cast<Eigen::Index>(p.b.size()) != n) {
            throw ConfigError("problem.b: length must match A");
          }
          return psd_quadratic(A, to_vector(p.b));
        }
      },
      spec);
}

double resolve_step(const ExperimentConfig& cfg, const Objective& obj) {
  return cfg.s ? *cfg.s : 0.9 / obj.lipschitz();
}

Schedule build_schedule(const ScheduleSpec& spec, double s, double lipschitz) {
  if (!spec.table) return Schedule::polynomial(spec.poly, s, lipschitz);
  const PolyScheduleParams poly = spec.poly;
  const auto eps_table = spec.table->eps;
  const auto q_table = spec.table->q;
  auto eps = [poly, eps_table](Index k) {
    if (k <= static_cast<Index>(eps_table.size())) return eps_table[k - 1];
    return poly.c / std::pow(static_cast<double>(k), poly.p_exp);
  };
  auto q = [poly, q_table](Index k) {
    if (k <= static_cast<Index>(q_table.size())) return q_table[k - 1];
    return poly.a * std::pow(static_cast<double>(k), poly.q_exp);
  };
  return Schedule::generic(eps, q, s, lipschitz);
}

SolverConfig build_solver_config(const ExperimentConfig& cfg) {
  Objective obj = build_objective(cfg.problem);
  const double s = resolve_step(cfg, obj);
  Schedule sched = build_schedule(cfg.schedule, s, obj.lipschitz());
  const auto n = static_cast<std::size_t>(obj.dimension());
  if (cfg.x0.size() != n || cfg.x1.size() != n) {
    throw ConfigError("x0 and x1 must have dimension " + std::to_string(n));
  }
  return SolverConfig{std::move(obj), std::move(sched), to_vector(cfg.x0), to_vector(cfg.x1),
                      cfg.max_iter, cfg.variant, cfg.record_every};
}

}  // namespace tiknest
