#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmdr/dr_core.hpp"
#include "mmdr/grid.hpp"
#include "mmdr/io_util.hpp"
#include "mmdr/model_gen.hpp"

namespace mmdr {

/// A fitted method together with the column statistics of its training data,
/// so new raw data can be standardized the same way before projection.
struct FittedModel {
  FitConfig config;
  ProjectionPair projection;
  ColumnStats stats_x, stats_y;
  bool center = true;
};

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& rows, const char* what) {
  if (!rows.is_array())
    throw MalformedFileError(strfmt("model field '%s' must be an array", what));
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  Eigen::Index n_cols = 0;
  if (n_rows > 0) {
    if (!rows[0].is_array())
      throw MalformedFileError(strfmt("model field '%s' must be nested arrays", what));
    n_cols = static_cast<Eigen::Index>(rows[0].size());
  }
  Matrix m(n_rows, n_cols);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    const auto& row = rows[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n_cols)
      throw MalformedFileError(strfmt("model field '%s' has ragged rows", what));
    for (Eigen::Index c = 0; c < n_cols; ++c) {
      const auto& v = row[static_cast<size_t>(c)];
      if (!v.is_number())
        throw MalformedFileError(strfmt("model field '%s' holds a non-number", what));
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

inline nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline Vector vector_from_json(const nlohmann::json& arr, const char* what) {
  if (!arr.is_array())
    throw MalformedFileError(strfmt("model field '%s' must be an array", what));
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto& item = arr[static_cast<size_t>(i)];
    if (!item.is_number())
      throw MalformedFileError(strfmt("model field '%s' holds a non-number", what));
    v[i] = item.get<double>();
  }
  return v;
}

inline nlohmann::json stats_to_json(const ColumnStats& s) {
  return {{"mean", vector_to_json(s.mean)},
          {"std", vector_to_json(s.stddev)},
          {"degenerate", s.degenerate}};
}

inline ColumnStats stats_from_json(const nlohmann::json& obj, const char* what) {
  if (!obj.is_object() || !obj.contains("mean") || !obj.contains("std"))
    throw MalformedFileError(strfmt("model field '%s' malformed", what));
  ColumnStats s;
  s.mean = vector_from_json(obj["mean"], what);
  s.stddev = vector_from_json(obj["std"], what);
  if (obj.contains("degenerate"))
    s.degenerate = obj["degenerate"].get<std::vector<int>>();
  if (s.mean.size() != s.stddev.size())
    throw MalformedFileError(strfmt("model field '%s' length mismatch", what));
  return s;
}

}  // namespace detail

inline void save_model(const FittedModel& model, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["kind"] = "fitted-model";
  doc["version"] = 1;
  doc["method"] = method_name(model.config.method);
  doc["k"] = model.config.k;
  doc["tol"] = model.config.tol;
  doc["max_iter"] = model.config.max_iter;
  doc["c_x"] = model.config.c_x;
  doc["c_y"] = model.config.c_y;
  doc["center"] = model.center;
  doc["scores"] = detail::vector_to_json(model.projection.scores);
  nlohmann::json info = nlohmann::json::array();
  for (const DirectionInfo& d : model.projection.info)
    info.push_back({{"iterations", d.iterations},
                    {"converged", d.converged},
                    {"rank_deficient", d.rank_deficient}});
  doc["directions"] = std::move(info);
  doc["w_x"] = detail::matrix_to_json(model.projection.w_x);
  doc["w_y"] = detail::matrix_to_json(model.projection.w_y);
  doc["stats_x"] = detail::stats_to_json(model.stats_x);
  doc["stats_y"] = detail::stats_to_json(model.stats_y);
  write_file_atomic(path, doc.dump(2) + "\n");
}

inline FittedModel load_model(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedFileError(strfmt("%s: not a model file (%s)",
                                    path.string().c_str(), e.what()));
  }
  if (!doc.is_object() || doc.value("kind", "") != "fitted-model")
    throw MalformedFileError(strfmt("%s: not a model file", path.string().c_str()));
  if (doc.value("version", 0) != 1)
    throw MalformedFileError(strfmt("%s: unsupported model version",
                                    path.string().c_str()));
  FittedModel model;
  model.config.method = method_from_name(doc.value("method", "pca"));
  model.config.k = doc.value("k", 1);
  model.config.tol = doc.value("tol", 1e-4);
  model.config.max_iter = doc.value("max_iter", 5000);
  model.config.c_x = doc.value("c_x", 0.1);
  model.config.c_y = doc.value("c_y", 0.1);
  model.center = doc.value("center", true);
  model.projection.method = model.config.method;
  model.projection.scores = detail::vector_from_json(doc.at("scores"), "scores");
  model.projection.w_x = detail::matrix_from_json(doc.at("w_x"), "w_x");
  model.projection.w_y = detail::matrix_from_json(doc.at("w_y"), "w_y");
  if (doc.contains("directions"))
    for (const auto& d : doc["directions"]) {
      DirectionInfo info;
      info.iterations = d.value("iterations", 0);
      info.converged = d.value("converged", true);
      info.rank_deficient = d.value("rank_deficient", false);
      model.projection.info.push_back(info);
    }
  model.stats_x = detail::stats_from_json(doc.at("stats_x"), "stats_x");
  model.stats_y = detail::stats_from_json(doc.at("stats_y"), "stats_y");
  if (model.projection.w_x.cols() != model.projection.w_y.cols())
    throw MalformedFileError(strfmt("%s: weight blocks disagree on k",
                                    path.string().c_str()));
  return model;
}

/// Write a matrix as CSV with a single header row col_prefix0..col_prefix{N-1}.
inline void write_matrix_csv(const Matrix& m, const std::filesystem::path& path,
                             const std::string& col_prefix = "x") {
  std::string out;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (c) out += ',';
    out += col_prefix + std::to_string(c);
  }
  out += '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

/// Read a numeric CSV written by write_matrix_csv (one header row).
inline Matrix read_matrix_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::istringstream stream(text);
  std::string line;
  if (!std::getline(stream, line))
    throw MalformedFileError(strfmt("%s: empty CSV", path.string().c_str()));
  const size_t n_cols = split_csv_line(line).size();
  std::vector<double> values;
  size_t n_rows = 0;
  size_t line_no = 1;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != n_cols)
      throw MalformedFileError(strfmt("%s:%zu: expected %zu fields, got %zu",
                                      path.string().c_str(), line_no, n_cols,
                                      fields.size()));
    for (const std::string& f : fields) values.push_back(parse_double_field(f));
    ++n_rows;
  }
  Matrix m(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
  for (size_t r = 0; r < n_rows; ++r)
    for (size_t c = 0; c < n_cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          values[r * n_cols + c];
  return m;
}

}  // namespace mmdr
