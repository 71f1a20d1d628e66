#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmdr/dr_core.hpp"
#include "mmdr/experiments.hpp"
#include "mmdr/io_util.hpp"
#include "mmdr/model_gen.hpp"

namespace mmdr {

/// Raised for malformed or invalid configuration; maps to exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

enum class ExperimentKind { kPhaseDiagram, kDimSweep, kNoiseFloor, kSpectrum, kMnist };

inline const char* kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kPhaseDiagram: return "phase-diagram";
    case ExperimentKind::kDimSweep: return "dim-sweep";
    case ExperimentKind::kNoiseFloor: return "noise-floor";
    case ExperimentKind::kSpectrum: return "spectrum";
    case ExperimentKind::kMnist: return "mnist";
  }
  throw InvalidParameterError("unknown experiment kind");
}

inline ExperimentKind kind_from_name(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::kPhaseDiagram, ExperimentKind::kDimSweep,
        ExperimentKind::kNoiseFloor, ExperimentKind::kSpectrum,
        ExperimentKind::kMnist})
    if (name == kind_name(k)) return k;
  throw ConfigError(strfmt("unknown experiment kind '%s'", name.c_str()));
}

/// One fully validated run description; field meanings are documented in
/// config_reference().
struct RunConfig {
  int version = 1;
  ExperimentKind kind = ExperimentKind::kPhaseDiagram;
  std::string preset;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out_dir = "out";
  ModelParams model;
  std::vector<FitConfig> methods;
  std::vector<double> gamma_self_grid, gamma_shared_grid;
  std::vector<int> k_grid, t_list, m_self_list, k_list;
  int n_inner_trials = 10, n_proj_trials = 10;
  int t_test = 0;
  int rc0_trials = 20;
  int n_trials = 20;  ///< noise-floor sample count per cell
  int n_top = 40;     ///< spectrum length
  std::string data_dir;

  SweepSpec to_sweep_spec() const {
    SweepSpec s;
    s.base = model;
    s.methods = methods;
    s.gamma_self_grid = gamma_self_grid;
    s.gamma_shared_grid = gamma_shared_grid;
    s.k_grid = k_grid;
    s.t_list = t_list;
    s.m_self_list = m_self_list;
    s.n_inner_trials = n_inner_trials;
    s.n_proj_trials = n_proj_trials;
    s.t_test = t_test;
    s.rc0_trials = rc0_trials;
    s.master_seed = seed;
    s.workers = workers;
    return s;
  }

  /// Model parameters for the spectrum kind: singleton SNR grids select the
  /// signal variances, otherwise the configured variances are used as-is.
  ModelParams spectrum_params() const {
    if (gamma_self_grid.size() == 1 && gamma_shared_grid.size() == 1)
      return params_from_snr(model, gamma_self_grid[0], gamma_shared_grid[0]);
    return model;
  }
};

namespace detail {

struct KeyDoc {
  const char* key;
  const char* type;
  const char* text;
};

inline const std::vector<KeyDoc>& top_level_keys() {
  static const std::vector<KeyDoc> keys = {
      {"version", "integer", "schema version; must be 1 when present (default 1)"},
      {"kind", "string",
       "experiment kind: phase-diagram | dim-sweep | noise-floor | spectrum | "
       "mnist; required unless implied by the subcommand"},
      {"preset", "string", "named defaults bundle: paper | ci (default: none)"},
      {"seed", "integer", "master seed; every random stream derives from it (default 1)"},
      {"workers", "integer", "worker threads for trial loops (default 1)"},
      {"out", "string", "output directory (default \"out\")"},
      {"model", "object", "generative model parameters, keys listed below"},
      {"methods", "array",
       "fit configurations, one object per method, keys listed below (default: "
       "pca, pls, cca, rcca at k=1)"},
      {"gamma_self", "array",
       "self-signal SNR grid (default: 8 equally spaced values in [0.05, 1])"},
      {"gamma_shared", "array",
       "shared-signal SNR grid (default: 8 equally spaced values in [0.05, 1])"},
      {"k_grid", "array",
       "retained dimensions for dim-sweep and mnist (defaults depend on kind)"},
      {"t_list", "array",
       "training sample counts; empty means model.t; for mnist, 0 means the "
       "full training split (defaults depend on kind)"},
      {"m_self_list", "array",
       "self-signal dimension sweep values; empty means model.m_self_x"},
      {"k_list", "array",
       "retained dimensions for noise-floor maps (default 1, 2, 5, 10, 30, 100)"},
      {"n_inner_trials", "integer",
       "dataset realizations per quenched projection (default 10)"},
      {"n_proj_trials", "integer", "quenched projection draws (default 10)"},
      {"t_test", "integer",
       "test sample count; 0 uses the training T for the test split (default 0)"},
      {"rc0_trials", "integer",
       "surrogate pairs per chance-level estimate (default 20)"},
      {"n_trials", "integer", "noise-floor samples per (T, k) cell (default 20)"},
      {"n_top", "integer", "singular values reported by spectrum (default 40)"},
      {"data_dir", "string",
       "image data directory; empty falls back to $MMDR_DATA_DIR, then "
       "$HOME/.cache/mmdr/mnist"},
  };
  return keys;
}

inline const std::vector<KeyDoc>& model_keys() {
  static const std::vector<KeyDoc> keys = {
      {"n_x", "integer", "observed dimensionality of view X (default 1000)"},
      {"n_y", "integer", "observed dimensionality of view Y (default 1000)"},
      {"t", "integer", "training sample count (default 1000)"},
      {"m_self_x", "integer", "self-signal dimensions in X (default 1)"},
      {"m_self_y", "integer", "self-signal dimensions in Y (default 1)"},
      {"m_shared", "integer", "shared-signal dimensions (default 1)"},
      {"var_r_x", "number", "noise variance in X (default 1)"},
      {"var_r_y", "number", "noise variance in Y (default 1)"},
      {"var_u_x", "number",
       "self latent variance in X; overridden by gamma_self grids (default 0)"},
      {"var_u_y", "number",
       "self latent variance in Y; overridden by gamma_self grids (default 0)"},
      {"var_p", "number",
       "shared latent variance; overridden by gamma_shared grids (default 0)"},
      {"var_v_x", "number", "self projection variance in X (default 1)"},
      {"var_v_y", "number", "self projection variance in Y (default 1)"},
      {"var_q_x", "number", "shared projection variance into X (default 1)"},
      {"var_q_y", "number", "shared projection variance into Y (default 1)"},
      {"center", "boolean", "mean-center columns before scaling (default true)"},
      {"seed", "integer",
       "generation seed; used as the master seed when no top-level seed is given"},
  };
  return keys;
}

inline const std::vector<KeyDoc>& method_keys() {
  static const std::vector<KeyDoc> keys = {
      {"method", "string", "pca | pls | cca | rcca (required)"},
      {"k", "integer", "direction pairs to extract (default 1)"},
      {"tol", "number", "iteration convergence tolerance (default 1e-4)"},
      {"max_iter", "integer", "iteration cap per direction (default 5000)"},
      {"c_x", "number", "X-side ridge weight in [0, 1]; rcca only (default 0.1)"},
      {"c_y", "number", "Y-side ridge weight in [0, 1]; rcca only (default 0.1)"},
  };
  return keys;
}

inline bool known_key(const std::vector<KeyDoc>& table, const std::string& key) {
  for (const KeyDoc& doc : table)
    if (key == doc.key) return true;
  return false;
}

inline std::int64_t require_int(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number_integer())
    throw ConfigError(strfmt("config key '%s' must be an integer", key.c_str()));
  return v.get<std::int64_t>();
}

inline double require_number(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number())
    throw ConfigError(strfmt("config key '%s' must be a number", key.c_str()));
  return v.get<double>();
}

inline bool require_bool(const nlohmann::json& v, const std::string& key) {
  if (!v.is_boolean())
    throw ConfigError(strfmt("config key '%s' must be a boolean", key.c_str()));
  return v.get<bool>();
}

inline std::string require_string(const nlohmann::json& v, const std::string& key) {
  if (!v.is_string())
    throw ConfigError(strfmt("config key '%s' must be a string", key.c_str()));
  return v.get<std::string>();
}

inline std::vector<double> require_number_list(const nlohmann::json& v,
                                               const std::string& key) {
  if (!v.is_array())
    throw ConfigError(strfmt("config key '%s' must be an array of numbers", key.c_str()));
  std::vector<double> out;
  for (const auto& item : v) out.push_back(require_number(item, key));
  return out;
}

inline std::vector<int> require_int_list(const nlohmann::json& v,
                                         const std::string& key) {
  if (!v.is_array())
    throw ConfigError(strfmt("config key '%s' must be an array of integers", key.c_str()));
  std::vector<int> out;
  for (const auto& item : v)
    out.push_back(static_cast<int>(require_int(item, key)));
  return out;
}

inline std::vector<double> snr_linspace(int n) {
  std::vector<double> values(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    values[static_cast<size_t>(i)] = 0.05 + 0.95 * i / (n - 1.0);
  return values;
}

inline std::vector<FitConfig> default_methods() {
  std::vector<FitConfig> methods;
  for (Method m : {Method::kPca, Method::kPls, Method::kCca, Method::kRcca}) {
    FitConfig cfg;
    cfg.method = m;
    methods.push_back(cfg);
  }
  return methods;
}

inline FitConfig parse_method(const nlohmann::json& entry, size_t index) {
  const std::string where = strfmt("methods[%zu]", index);
  if (!entry.is_object())
    throw ConfigError(strfmt("config key '%s' must be an object", where.c_str()));
  FitConfig cfg;
  bool has_method = false;
  for (const auto& [key, value] : entry.items()) {
    if (!known_key(method_keys(), key))
      throw ConfigError(strfmt("unknown config key '%s.%s'", where.c_str(), key.c_str()));
    const std::string full = where + "." + key;
    if (key == "method") {
      const std::string name = require_string(value, full);
      try {
        cfg.method = method_from_name(name);
      } catch (const Error&) {
        throw ConfigError(strfmt("config key '%s' has unknown method '%s'",
                                 full.c_str(), name.c_str()));
      }
      has_method = true;
    } else if (key == "k") {
      cfg.k = static_cast<int>(require_int(value, full));
    } else if (key == "tol") {
      cfg.tol = require_number(value, full);
    } else if (key == "max_iter") {
      cfg.max_iter = static_cast<int>(require_int(value, full));
    } else if (key == "c_x") {
      cfg.c_x = require_number(value, full);
    } else if (key == "c_y") {
      cfg.c_y = require_number(value, full);
    }
  }
  if (!has_method)
    throw ConfigError(strfmt("config key '%s.method' missing", where.c_str()));
  if (cfg.k < 1)
    throw ConfigError(strfmt("config key '%s.k' must be positive", where.c_str()));
  if (!(cfg.tol > 0.0))
    throw ConfigError(strfmt("config key '%s.tol' must be positive", where.c_str()));
  if (cfg.max_iter < 1)
    throw ConfigError(strfmt("config key '%s.max_iter' must be positive", where.c_str()));
  if (!(cfg.c_x >= 0.0 && cfg.c_x <= 1.0) || !(cfg.c_y >= 0.0 && cfg.c_y <= 1.0))
    throw ConfigError(strfmt("config key '%s' ridge weights must lie in [0, 1]",
                             where.c_str()));
  return cfg;
}

inline void parse_model(const nlohmann::json& obj, RunConfig& cfg,
                        bool* has_model_seed, std::uint64_t* model_seed) {
  if (!obj.is_object())
    throw ConfigError("config key 'model' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known_key(model_keys(), key))
      throw ConfigError(strfmt("unknown config key 'model.%s'", key.c_str()));
    const std::string full = "model." + key;
    ModelParams& m = cfg.model;
    if (key == "n_x") m.n_x = static_cast<int>(require_int(value, full));
    else if (key == "n_y") m.n_y = static_cast<int>(require_int(value, full));
    else if (key == "t") m.t = static_cast<int>(require_int(value, full));
    else if (key == "m_self_x") m.m_self_x = static_cast<int>(require_int(value, full));
    else if (key == "m_self_y") m.m_self_y = static_cast<int>(require_int(value, full));
    else if (key == "m_shared") m.m_shared = static_cast<int>(require_int(value, full));
    else if (key == "var_r_x") m.var_r_x = require_number(value, full);
    else if (key == "var_r_y") m.var_r_y = require_number(value, full);
    else if (key == "var_u_x") m.var_u_x = require_number(value, full);
    else if (key == "var_u_y") m.var_u_y = require_number(value, full);
    else if (key == "var_p") m.var_p = require_number(value, full);
    else if (key == "var_v_x") m.var_v_x = require_number(value, full);
    else if (key == "var_v_y") m.var_v_y = require_number(value, full);
    else if (key == "var_q_x") m.var_q_x = require_number(value, full);
    else if (key == "var_q_y") m.var_q_y = require_number(value, full);
    else if (key == "center") m.center = require_bool(value, full);
    else if (key == "seed") {
      *model_seed = static_cast<std::uint64_t>(require_int(value, full));
      *has_model_seed = true;
    }
  }
}

inline std::pair<int, int> line_and_column(const std::string& text, size_t byte) {
  int line = 1, column = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace detail

/// Kind-dependent defaults before preset and file keys are applied.
inline RunConfig default_config(ExperimentKind kind) {
  RunConfig cfg;
  cfg.kind = kind;
  cfg.model.n_x = cfg.model.n_y = 1000;
  cfg.model.t = 1000;
  cfg.model.m_self_x = cfg.model.m_self_y = 1;
  cfg.model.m_shared = 1;
  cfg.methods = detail::default_methods();
  cfg.gamma_self_grid = detail::snr_linspace(8);
  cfg.gamma_shared_grid = detail::snr_linspace(8);
  switch (kind) {
    case ExperimentKind::kDimSweep:
      cfg.k_grid = {2, 5, 10, 15, 30, 60, 110, 150};
      break;
    case ExperimentKind::kNoiseFloor:
      cfg.t_list = {100, 300, 1000, 3000, 10000};
      cfg.k_list = {1, 2, 5, 10, 30, 100};
      break;
    case ExperimentKind::kMnist:
      cfg.k_grid = {1, 2, 5, 10, 20, 50, 100, 200, 500, 784};
      cfg.t_list = {1000, 10000, 0};
      break;
    default:
      break;
  }
  return cfg;
}

/// Named defaults bundles; applied before explicit config keys.
inline void apply_preset(RunConfig& cfg, const std::string& name) {
  if (name.empty()) return;
  if (name == "paper") {
    cfg.model.n_x = cfg.model.n_y = 1000;
    cfg.model.t = 1000;
    cfg.n_inner_trials = cfg.n_proj_trials = 10;
    cfg.gamma_self_grid = detail::snr_linspace(8);
    cfg.gamma_shared_grid = detail::snr_linspace(8);
  } else if (name == "ci") {
    cfg.model.n_x = cfg.model.n_y = 200;
    cfg.model.t = 600;
    cfg.n_inner_trials = cfg.n_proj_trials = 3;
    cfg.gamma_self_grid = detail::snr_linspace(3);
    cfg.gamma_shared_grid = detail::snr_linspace(3);
  } else {
    throw ConfigError(strfmt("unknown preset '%s'", name.c_str()));
  }
  cfg.preset = name;
}

/// Build and validate a RunConfig from parsed JSON.  kind_hint comes from the
/// subcommand; preset_override from the --preset flag.
inline RunConfig config_from_json(const nlohmann::json& root,
                                  const std::string& kind_hint = "",
                                  const std::string& preset_override = "") {
  if (!root.is_object() && !root.is_null())
    throw ConfigError("config root must be a key-value object");
  const nlohmann::json obj = root.is_null() ? nlohmann::json::object() : root;

  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!detail::known_key(detail::top_level_keys(), key))
      throw ConfigError(strfmt("unknown config key '%s'", key.c_str()));
  }
  if (obj.contains("version")) {
    const std::int64_t v = detail::require_int(obj["version"], "version");
    if (v != 1)
      throw ConfigError(strfmt("unsupported config version %lld; expected 1",
                               static_cast<long long>(v)));
  }

  // A "*" hint accepts any kind (subcommands that only consume the model and
  // method sections), defaulting to phase-diagram when the file names none.
  const bool any_kind = kind_hint == "*";
  std::string kind_str = any_kind ? "" : kind_hint;
  if (obj.contains("kind")) {
    const std::string file_kind = detail::require_string(obj["kind"], "kind");
    if (!kind_hint.empty() && !any_kind && file_kind != kind_hint)
      throw ConfigError(strfmt("config kind '%s' does not match subcommand '%s'",
                               file_kind.c_str(), kind_hint.c_str()));
    kind_str = file_kind;
  }
  if (kind_str.empty() && any_kind) kind_str = kind_name(ExperimentKind::kPhaseDiagram);
  if (kind_str.empty()) throw ConfigError("experiment kind missing");

  RunConfig cfg = default_config(kind_from_name(kind_str));
  std::string preset = preset_override;
  if (preset.empty() && obj.contains("preset"))
    preset = detail::require_string(obj["preset"], "preset");
  apply_preset(cfg, preset);

  bool has_top_seed = false, has_model_seed = false;
  std::uint64_t model_seed = 0;
  for (const auto& [key, value] : obj.items()) {
    if (key == "version" || key == "kind" || key == "preset") continue;
    if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(detail::require_int(value, key));
      has_top_seed = true;
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(detail::require_int(value, key));
    } else if (key == "out") {
      cfg.out_dir = detail::require_string(value, key);
    } else if (key == "model") {
      detail::parse_model(value, cfg, &has_model_seed, &model_seed);
    } else if (key == "methods") {
      if (!value.is_array())
        throw ConfigError("config key 'methods' must be an array");
      cfg.methods.clear();
      for (size_t i = 0; i < value.size(); ++i)
        cfg.methods.push_back(detail::parse_method(value[i], i));
    } else if (key == "gamma_self") {
      cfg.gamma_self_grid = detail::require_number_list(value, key);
    } else if (key == "gamma_shared") {
      cfg.gamma_shared_grid = detail::require_number_list(value, key);
    } else if (key == "k_grid") {
      cfg.k_grid = detail::require_int_list(value, key);
    } else if (key == "t_list") {
      cfg.t_list = detail::require_int_list(value, key);
    } else if (key == "m_self_list") {
      cfg.m_self_list = detail::require_int_list(value, key);
    } else if (key == "k_list") {
      cfg.k_list = detail::require_int_list(value, key);
    } else if (key == "n_inner_trials") {
      cfg.n_inner_trials = static_cast<int>(detail::require_int(value, key));
    } else if (key == "n_proj_trials") {
      cfg.n_proj_trials = static_cast<int>(detail::require_int(value, key));
    } else if (key == "t_test") {
      cfg.t_test = static_cast<int>(detail::require_int(value, key));
    } else if (key == "rc0_trials") {
      cfg.rc0_trials = static_cast<int>(detail::require_int(value, key));
    } else if (key == "n_trials") {
      cfg.n_trials = static_cast<int>(detail::require_int(value, key));
    } else if (key == "n_top") {
      cfg.n_top = static_cast<int>(detail::require_int(value, key));
    } else if (key == "data_dir") {
      cfg.data_dir = detail::require_string(value, key);
    }
  }
  if (!has_top_seed && has_model_seed) cfg.seed = model_seed;

  try {
    cfg.model.validate();
  } catch (const Error& e) {
    throw ConfigError(strfmt("config key 'model' invalid: %s", e.what()));
  }
  if (cfg.workers < 1) throw ConfigError("config key 'workers' must be positive");
  if (cfg.methods.empty()) throw ConfigError("config key 'methods' must not be empty");
  if (cfg.n_inner_trials < 1 || cfg.n_proj_trials < 1)
    throw ConfigError("config trial counts must be positive");
  if (cfg.t_test < 0) throw ConfigError("config key 't_test' must be non-negative");
  if (cfg.rc0_trials < 2)
    throw ConfigError("config key 'rc0_trials' must be at least 2");
  for (double g : cfg.gamma_self_grid)
    if (!(g >= 0.0) || !std::isfinite(g))
      throw ConfigError("config key 'gamma_self' values must be non-negative");
  for (double g : cfg.gamma_shared_grid)
    if (!(g >= 0.0) || !std::isfinite(g))
      throw ConfigError("config key 'gamma_shared' values must be non-negative");
  if (cfg.gamma_self_grid.empty() || cfg.gamma_shared_grid.empty())
    throw ConfigError("SNR grids must not be empty");

  switch (cfg.kind) {
    case ExperimentKind::kPhaseDiagram:
      break;
    case ExperimentKind::kDimSweep:
      if (cfg.k_grid.empty())
        throw ConfigError("config key 'k_grid' must not be empty for dim-sweep");
      for (int k : cfg.k_grid)
        if (k < 1) throw ConfigError("config key 'k_grid' values must be positive");
      break;
    case ExperimentKind::kNoiseFloor:
      if (cfg.t_list.empty() || cfg.k_list.empty())
        throw ConfigError("config keys 't_list' and 'k_list' must not be empty "
                          "for noise-floor");
      for (int t : cfg.t_list)
        if (t < 2) throw ConfigError("config key 't_list' values must be at least 2");
      for (int k : cfg.k_list)
        if (k < 1) throw ConfigError("config key 'k_list' values must be positive");
      if (cfg.n_trials < 2)
        throw ConfigError("config key 'n_trials' must be at least 2");
      break;
    case ExperimentKind::kSpectrum:
      if (cfg.n_top < 1) throw ConfigError("config key 'n_top' must be positive");
      break;
    case ExperimentKind::kMnist:
      if (cfg.k_grid.empty())
        throw ConfigError("config key 'k_grid' must not be empty for mnist");
      for (int k : cfg.k_grid)
        if (k < 1) throw ConfigError("config key 'k_grid' values must be positive");
      if (cfg.t_list.empty())
        throw ConfigError("config key 't_list' must not be empty for mnist");
      break;
  }
  return cfg;
}

/// Read and validate a config file.  Empty or absent content behaves like an
/// empty object, so the experiment kind must come from the subcommand.
inline RunConfig load_config(const std::filesystem::path& path,
                             const std::string& kind_hint = "",
                             const std::string& preset_override = "") {
  const std::string text = read_file(path);
  bool blank = true;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) {
      blank = false;
      break;
    }
  nlohmann::json root = nlohmann::json::object();
  if (!blank) {
    try {
      root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      // e.byte is one past the failing character
      const auto [line, column] =
          detail::line_and_column(text, e.byte > 0 ? e.byte - 1 : 0);
      std::string what = e.what();
      if (const size_t pos = what.find("syntax error"); pos != std::string::npos)
        what = what.substr(pos);
      throw ConfigError(strfmt("%s: parse error at line %d, column %d: %s",
                               path.string().c_str(), line, column, what.c_str()));
    }
  }
  return config_from_json(root, kind_hint, preset_override);
}

/// Generated documentation for every accepted key and both presets.
inline std::string config_reference() {
  std::string out;
  out += "Configuration reference (version 1)\n";
  out += "===================================\n\n";
  out += "All subcommands read one JSON document. Unknown keys are rejected.\n";
  out += "A preset fills defaults first; explicit keys override it; the --seed,\n";
  out += "--workers and --out flags override the file.\n\n";
  auto table = [&out](const char* heading, const std::vector<detail::KeyDoc>& keys) {
    out += heading;
    out += "\n";
    for (size_t i = 0; std::string(heading)[i]; ++i) out += '-';
    out += "\n";
    for (const detail::KeyDoc& doc : keys)
      out += strfmt("  %-16s %-8s %s\n", doc.key, doc.type, doc.text);
    out += "\n";
  };
  table("Top-level keys", detail::top_level_keys());
  table("model.* keys", detail::model_keys());
  table("methods[] keys", detail::method_keys());
  out += "Presets\n-------\n";
  out += "  paper  N_X = N_Y = 1000, T = 1000, 10x10 trials, 8-point SNR grids\n";
  out += "  ci     N_X = N_Y = 200, T = 600, 3x3 trials, 3-point SNR grids\n";
  return out;
}

}  // namespace mmdr
