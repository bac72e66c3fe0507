#ifndef DG_CSV_HPP
#define DG_CSV_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "dg/analysis.hpp"
#include "dg/linalg.hpp"
#include "dg/quadrature.hpp"

namespace dg {

// All CSV output goes through one float formatter so files are byte-stable.
inline std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    require(out_.good(), "cannot open CSV file for writing: " + path);
  }

  void header(const std::string& line) { out_ << line << "\n"; }

  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

// Trace schema shared by simulate and compare runs. Budget terms are written
// as signed contributions to dE/dt, so dissipative terms appear negative.
inline void write_trace_header(CsvWriter& w) {
  w.header("step,time,energy,dEdt,dissip,pbt,surface_alias,volume_resid");
}

inline void write_trace_row(CsvWriter& w, int step, const EnergyReport& rep) {
  w.row({std::to_string(step), csv_double(rep.time), csv_double(rep.energy),
         csv_double(rep.dEdt), csv_double(-rep.dissip), csv_double(-rep.pbt),
         csv_double(rep.surface_alias), csv_double(rep.volume_resid)});
}

inline void write_edge_study_csv(const std::string& path, const std::vector<EdgeStudyRow>& rows) {
  CsvWriter w(path);
  w.header("N,twoNminus1,dissipation,aliasing,sum,unstable");
  for (const EdgeStudyRow& r : rows)
    w.row({std::to_string(r.n), std::to_string(r.two_n_minus_1), csv_double(r.dissipation),
           csv_double(r.aliasing), csv_double(r.sum), r.unstable ? "1" : "0"});
}

// Debug dumps of quadrature rules and operator matrices.
inline void write_rule_csv(const std::string& path, const QuadratureRule& rule) {
  CsvWriter w(path);
  w.header("node,weight");
  for (int i = 0; i <= rule.order; ++i)
    w.row({csv_double(rule.nodes[i]), csv_double(rule.weights[i])});
}

inline void write_matrix_csv(const std::string& path, const Matrix& m) {
  CsvWriter w(path);
  for (int i = 0; i < m.rows(); ++i) {
    std::vector<std::string> cells;
    cells.reserve(m.cols());
    for (int j = 0; j < m.cols(); ++j) cells.push_back(csv_double(m(i, j)));
    w.row(cells);
  }
}

}  // namespace dg

#endif  // DG_CSV_HPP
