#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tiknest/diagnostics.hpp"
#include "tiknest/problems.hpp"
#include "tiknest/schedules.hpp"
#include "tiknest/solver.hpp"

namespace tiknest {

// ---------------------------------------------------------------------------
// Experiment configuration

struct PaperQuadraticSpec {
  double a = 1.0;
  double b = 5.0;
};

struct ShiftedQuadraticSpec {
  std::vector<double> u;
};

struct PsdQuadraticSpec {
  std::vector<std::vector<double>> A;  ///< row-major
  std::vector<double> b;
};

using ProblemSpec = std::variant<PaperQuadraticSpec, ShiftedQuadraticSpec, PsdQuadraticSpec>;

/// Tabulated eps_k and q_k for k = 1..n. Indices past the table fall back to the
/// polynomial rule.
struct TabulatedSchedule {
  std::vector<double> eps;
  std::vector<double> q;
};

struct ScheduleSpec {
  PolyScheduleParams poly;
  std::optional<TabulatedSchedule> table;
};

struct OutputSpec {
  std::string csv_path;
  std::optional<std::string> svg_path;
  std::string report_path;
};

struct ExperimentConfig {
  ProblemSpec problem = PaperQuadraticSpec{};
  ScheduleSpec schedule;
  std::optional<double> s;  ///< empty means "auto" = 0.9 / L
  Variant variant = Variant::full;
  std::vector<double> x0;
  std::vector<double> x1;
  Index max_iter = 20;
  Index record_every = 0;
  OutputSpec outputs;
};

/// Throw ConfigError with a message naming the offending field.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string dump_config(const ExperimentConfig& cfg);

bool operator==(const PaperQuadraticSpec&, const PaperQuadraticSpec&);
bool operator==(const ShiftedQuadraticSpec&, const ShiftedQuadraticSpec&);
bool operator==(const PsdQuadraticSpec&, const PsdQuadraticSpec&);
bool operator==(const TabulatedSchedule&, const TabulatedSchedule&);
bool operator==(const ScheduleSpec&, const ScheduleSpec&);
bool operator==(const OutputSpec&, const OutputSpec&);
bool operator==(const ExperimentConfig&, const ExperimentConfig&);

Objective build_objective(const ProblemSpec& spec);
double resolve_step(const ExperimentConfig& cfg, const Objective& obj);
Schedule build_schedule(const ScheduleSpec& spec, double s, double lipschitz);
SolverConfig build_solver_config(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// CSV traces

inline constexpr const char* kCsvHeader =
    "k,f_x,f_y,grad_norm_x,grad_norm_y,velocity,dist_xstar,eps_k,b_k,c_k";

struct CsvTraceRow {
  Index k = 0;
  double f_x = 0.0;
  double f_y = 0.0;
  double grad_norm_x = 0.0;
  double grad_norm_y = 0.0;
  double velocity = 0.0;
  double dist_xstar = 0.0;
  double eps_k = 0.0;
  double b_k = 0.0;
  double c_k = 0.0;

  static CsvTraceRow from_record(const IterateRecord& rec);
};

/// 17 significant digits, so parsing recovers the double exactly.
std::string format_number(double v);

void write_trace_csv(std::ostream& out, const Trace& trace);
/// Throws ConfigError on a wrong header or malformed row.
std::vector<CsvTraceRow> read_trace_csv(std::istream& in);

/// Column table: a header line then one row per k.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
void write_table_csv(std::ostream& out, const CsvTable& table);

// ---------------------------------------------------------------------------
// SVG charts

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct ChartOptions {
  std::string title;
  std::string x_label = "k";
  std::string y_label;
  bool log_y = false;
  int width = 720;
  int height = 480;
};

/// Polyline chart. Non-finite points, and non-positive ones on a log axis, are skipped.
std::string render_svg(const std::vector<ChartSeries>& series, const ChartOptions& opts);

// ---------------------------------------------------------------------------
// Commands

struct CommandOptions {
  std::optional<Index> iters;  ///< overrides max_iter
  std::optional<double> step;  ///< step size of reproduced figures; 0 selects 0.9 / L
  bool svg = false;            ///< also emit SVG plots
  bool quiet = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitDiverged = 2;
inline constexpr int kExitConfigError = 3;

/// Final-distance threshold above which the drop_both reproduction counts as not
/// reaching the minimal-norm solution.
inline constexpr double kFig2DistanceThreshold = 0.5;

int cmd_run(const std::string& config_path, const CommandOptions& opts, std::ostream& out,
            std::ostream& err);
int cmd_check(const std::string& config_path, const CommandOptions& opts, std::ostream& out,
              std::ostream& err);
int cmd_reproduce(const std::string& figure, const std::string& out_dir,
                  const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace tiknest
