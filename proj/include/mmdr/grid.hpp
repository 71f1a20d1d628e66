#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "mmdr/common.hpp"
#include "mmdr/io_util.hpp"

namespace mmdr {

enum class CellStatus { kOk, kDegenerate };

inline const char* cell_status_name(CellStatus s) {
  return s == CellStatus::kOk ? "ok" : "degenerate";
}

inline CellStatus cell_status_from_name(const std::string& name) {
  if (name == "ok") return CellStatus::kOk;
  if (name == "degenerate") return CellStatus::kDegenerate;
  throw MalformedFileError(strfmt("unknown status '%s'", name.c_str()));
}

/// One fit evaluation at one grid cell.  Degenerate trials (e.g. CCA on a
/// singular covariance) keep their coordinates but carry NaN metrics.
struct TrialRow {
  std::string method;
  int t = 0, n_x = 0, n_y = 0, m_self = 0, m_shared = 0, k = 0;
  double gamma_self = 0.0, gamma_shared = 0.0;
  double rc = 0.0, rc0 = 0.0, rc_prime = 0.0;
  int trial = 0, proj_trial = 0;
  CellStatus status = CellStatus::kOk;
};

inline auto row_cell_key(const TrialRow& r) {
  return std::tie(r.method, r.t, r.n_x, r.n_y, r.m_self, r.m_shared, r.k,
                  r.gamma_self, r.gamma_shared);
}

inline auto row_sort_key(const TrialRow& r) {
  return std::tie(r.method, r.t, r.n_x, r.n_y, r.m_self, r.m_shared, r.k,
                  r.gamma_self, r.gamma_shared, r.proj_trial, r.trial);
}

/// Canonical row order; makes output independent of execution interleaving.
inline void sort_rows(std::vector<TrialRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const TrialRow& a, const TrialRow& b) {
    return row_sort_key(a) < row_sort_key(b);
  });
}

/// Per-cell aggregate over the ok trials of one coordinate tuple.
struct CellStat {
  std::string method;
  int t = 0, n_x = 0, n_y = 0, m_self = 0, m_shared = 0, k = 0;
  double gamma_self = 0.0, gamma_shared = 0.0;
  int n_ok = 0, n_degenerate = 0;
  double mean_rc = 0.0, mean_rc0 = 0.0, mean_rc_prime = 0.0;
  double std_rc_prime = 0.0;  ///< sample std over ok trials
};

inline std::vector<CellStat> aggregate_rows(std::vector<TrialRow> rows) {
  sort_rows(rows);
  std::vector<CellStat> cells;
  size_t i = 0;
  while (i < rows.size()) {
    size_t j = i;
    while (j < rows.size() && row_cell_key(rows[j]) == row_cell_key(rows[i])) ++j;
    CellStat c;
    c.method = rows[i].method;
    c.t = rows[i].t;
    c.n_x = rows[i].n_x;
    c.n_y = rows[i].n_y;
    c.m_self = rows[i].m_self;
    c.m_shared = rows[i].m_shared;
    c.k = rows[i].k;
    c.gamma_self = rows[i].gamma_self;
    c.gamma_shared = rows[i].gamma_shared;
    for (size_t r = i; r < j; ++r) {
      if (rows[r].status == CellStatus::kOk) {
        ++c.n_ok;
        c.mean_rc += rows[r].rc;
        c.mean_rc0 += rows[r].rc0;
        c.mean_rc_prime += rows[r].rc_prime;
      } else {
        ++c.n_degenerate;
      }
    }
    if (c.n_ok > 0) {
      c.mean_rc /= c.n_ok;
      c.mean_rc0 /= c.n_ok;
      c.mean_rc_prime /= c.n_ok;
      if (c.n_ok > 1) {
        double ss = 0.0;
        for (size_t r = i; r < j; ++r)
          if (rows[r].status == CellStatus::kOk) {
            const double d = rows[r].rc_prime - c.mean_rc_prime;
            ss += d * d;
          }
        c.std_rc_prime = std::sqrt(ss / (c.n_ok - 1));
      }
    } else {
      c.mean_rc = c.mean_rc0 = c.mean_rc_prime = c.std_rc_prime = NAN;
    }
    cells.push_back(std::move(c));
    i = j;
  }
  return cells;
}

/// One swept coordinate of an experiment grid.
struct AxisDef {
  std::string name;
  std::vector<double> values;
};

/// A complete experiment output: the swept axes, every trial row (sorted),
/// the per-cell aggregates, and run metadata for the JSON sidecar.
struct GridResult {
  std::vector<AxisDef> axes;
  std::vector<TrialRow> rows;
  std::vector<CellStat> cells;
  nlohmann::json metadata;
};

/// Shortest exact decimal form: 17 significant digits round-trip a double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  return strfmt("%.17g", v);
}

inline double parse_double_field(const std::string& s) {
  if (s == "nan") return NAN;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw MalformedFileError(strfmt("bad numeric field '%s'", s.c_str()));
  return v;
}

inline int parse_int_field(const std::string& s) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw MalformedFileError(strfmt("bad integer field '%s'", s.c_str()));
  return static_cast<int>(v);
}

inline const char* results_csv_header() {
  return "method,t,n_x,n_y,m_self,m_shared,k,gamma_self,gamma_shared,"
         "rc,rc0,rc_prime,trial,proj_trial,status";
}

inline std::string results_csv_string(const std::vector<TrialRow>& rows) {
  std::string out = results_csv_header();
  out += '\n';
  for (const TrialRow& r : rows) {
    out += strfmt("%s,%d,%d,%d,%d,%d,%d,%s,%s,%s,%s,%s,%d,%d,%s\n",
                  r.method.c_str(), r.t, r.n_x, r.n_y, r.m_self, r.m_shared,
                  r.k, format_double(r.gamma_self).c_str(),
                  format_double(r.gamma_shared).c_str(),
                  format_double(r.rc).c_str(), format_double(r.rc0).c_str(),
                  format_double(r.rc_prime).c_str(), r.trial, r.proj_trial,
                  cell_status_name(r.status));
  }
  return out;
}

inline void write_results_csv(const std::filesystem::path& path,
                              const std::vector<TrialRow>& rows) {
  write_file_atomic(path, results_csv_string(rows));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

inline std::vector<TrialRow> parse_results_csv(const std::string& text) {
  std::vector<TrialRow> rows;
  size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != results_csv_header())
        throw MalformedFileError("results CSV header does not match the expected schema");
      continue;
    }
    auto f = split_csv_line(line);
    if (f.size() != 15)
      throw MalformedFileError(
          strfmt("line %d: expected 15 fields, got %zu", line_no, f.size()));
    TrialRow r;
    r.method = f[0];
    r.t = parse_int_field(f[1]);
    r.n_x = parse_int_field(f[2]);
    r.n_y = parse_int_field(f[3]);
    r.m_self = parse_int_field(f[4]);
    r.m_shared = parse_int_field(f[5]);
    r.k = parse_int_field(f[6]);
    r.gamma_self = parse_double_field(f[7]);
    r.gamma_shared = parse_double_field(f[8]);
    r.rc = parse_double_field(f[9]);
    r.rc0 = parse_double_field(f[10]);
    r.rc_prime = parse_double_field(f[11]);
    r.trial = parse_int_field(f[12]);
    r.proj_trial = parse_int_field(f[13]);
    r.status = cell_status_from_name(f[14]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<TrialRow> read_results_csv(const std::filesystem::path& path) {
  return parse_results_csv(read_file(path));
}

inline void write_grid_json(const std::filesystem::path& path,
                            const GridResult& grid) {
  nlohmann::json j;
  j["version"] = 1;
  j["axes"] = nlohmann::json::array();
  for (const AxisDef& a : grid.axes)
    j["axes"].push_back({{"name", a.name}, {"values", a.values}});
  j["n_rows"] = grid.rows.size();
  j["n_cells"] = grid.cells.size();
  j["metadata"] = grid.metadata;
  write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace mmdr
