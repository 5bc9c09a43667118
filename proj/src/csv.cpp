#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "tiknest/experiment.hpp"

namespace tiknest {

CsvTraceRow CsvTraceRow::from_record(const IterateRecord& rec) {
  return {rec.k,        rec.f_x,        rec.f_y,   rec.grad_norm_x, rec.grad_norm_y,
          rec.velocity, rec.dist_xstar, rec.eps_k, rec.b_k,         rec.c_k};
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << kCsvHeader << '\n';
  for (const auto& rec : trace.records) {
    const CsvTraceRow r = CsvTraceRow::from_record(rec);
    out << r.k;
    for (double v : {r.f_x, r.f_y, r.grad_norm_x, r.grad_norm_y, r.velocity, r.dist_xstar,
                     r.eps_k, r.b_k, r.c_k}) {
      out << ',' << format_number(v);
    }
    out << '\n';
  }
}

namespace {

double parse_cell(const std::string& cell, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE) {
    throw ConfigError("csv line " + std::to_string(line) + ": bad number '" + cell + "'");
  }
  return v;
}

}  // namespace

std::vector<CsvTraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ConfigError("csv: header must be '" + std::string(kCsvHeader) + "'");
  }
  std::vector<CsvTraceRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(parse_cell(cell, line_no));
    if (cells.size() != 10) {
      throw ConfigError("csv line " + std::to_string(line_no) + ": expected 10 columns");
    }
    rows.push_back({static_cast<Index>(cells[0]), cells[1], cells[2], cells[3], cells[4],
                    cells[5], cells[6], cells[7], cells[8], cells[9]});
  }
  return rows;
}

void write_table_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

}  // namespace tiknest
