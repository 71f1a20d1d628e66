#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmdr/mmdr.hpp"
#include "mmdr/mnist_fetch.hpp"

namespace fs = std::filesystem;
using namespace mmdr;

namespace {

struct GlobalFlags {
  std::string config, out, preset;
  int workers = 1;
  std::uint64_t seed = 1;
  bool has_seed = false, has_workers = false, has_out = false;
};

/// Config file if given, otherwise preset/defaults; flags override the file.
RunConfig load_run_config(const GlobalFlags& g, const std::string& kind_hint) {
  RunConfig cfg = g.config.empty()
                      ? config_from_json(nlohmann::json::object(), kind_hint, g.preset)
                      : load_config(g.config, kind_hint, g.preset);
  if (g.has_seed) cfg.seed = g.seed;
  if (g.has_workers) cfg.workers = g.workers;
  if (g.has_out) cfg.out_dir = g.out;
  if (cfg.workers < 1) throw ConfigError("workers must be positive");
  return cfg;
}

fs::path resolve_data_dir(const std::string& flag, const std::string& from_config) {
  if (!flag.empty()) return flag;
  if (!from_config.empty()) return from_config;
  if (const char* env = std::getenv("MMDR_DATA_DIR"); env && *env) return env;
  if (const char* home = std::getenv("HOME"); home && *home)
    return fs::path(home) / ".cache" / "mmdr" / "mnist";
  return fs::path("mmdr-data");
}

/// Comma-separated integers; the word "all" maps to 0 (full training split).
std::vector<int> parse_int_list_flag(const std::string& text, const char* flag) {
  std::vector<int> out;
  std::string item;
  std::istringstream stream(text);
  while (std::getline(stream, item, ',')) {
    if (item == "all") {
      out.push_back(0);
      continue;
    }
    try {
      size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError(strfmt("%s: '%s' is not an integer", flag, item.c_str()));
    }
  }
  if (out.empty()) throw ConfigError(strfmt("%s: empty list", flag));
  return out;
}

void note(const fs::path& path) { std::cout << "wrote " << path.string() << "\n"; }

void write_grid_outputs(const GridResult& grid, const fs::path& out) {
  fs::create_directories(out);
  write_results_csv(out / "results.csv", grid.rows);
  note(out / "results.csv");
  write_grid_json(out / "grid.json", grid);
  note(out / "grid.json");
}

void run_phase(const RunConfig& cfg) {
  const GridResult grid = run_phase_diagram(cfg.to_sweep_spec());
  const fs::path out = cfg.out_dir;
  write_grid_outputs(grid, out);
  PlotSpec spec;
  spec.kind = PlotKind::kHeatmap;
  spec.title = "bias-corrected correlation recovery";
  spec.x_label = "shared-signal SNR";
  spec.y_label = "self-signal SNR";
  render_heatmap(grid, spec, out / "phase_diagram.svg");
  note(out / "phase_diagram.svg");
}

void run_dim(const RunConfig& cfg) {
  const GridResult grid = run_dimension_sweep(cfg.to_sweep_spec());
  const fs::path out = cfg.out_dir;
  write_grid_outputs(grid, out);
  PlotSpec spec;
  spec.kind = PlotKind::kLineWithErrorbars;
  spec.title = "recovery vs retained dimensions";
  spec.x_axis = "k";
  spec.x_over_t = true;
  spec.log_x = true;
  spec.x_label = "retained dimensions / T";
  spec.y_label = "corrected recovery";
  render_curves(grid, spec, out / "dim_sweep.svg");
  note(out / "dim_sweep.svg");
}

void run_noise(const RunConfig& cfg) {
  const GridResult grid = run_noise_floor_map(cfg.t_list, cfg.k_list,
                                              cfg.n_trials, cfg.seed,
                                              cfg.model.m_shared, cfg.workers);
  const fs::path out = cfg.out_dir;
  write_grid_outputs(grid, out);
  PlotSpec heat;
  heat.kind = PlotKind::kHeatmap;
  heat.title = "chance-level recovery floor";
  heat.x_axis = "k";
  heat.y_axis = "t";
  heat.x_label = "retained dimensions";
  heat.y_label = "samples";
  render_heatmap(grid, heat, out / "noise_floor.svg");
  note(out / "noise_floor.svg");
  PlotSpec curves;
  curves.kind = PlotKind::kLineWithErrorbars;
  curves.title = "chance-level recovery vs samples";
  curves.x_axis = "t";
  curves.x_over_t = false;
  curves.log_x = true;
  curves.x_label = "test samples";
  curves.y_label = "chance-level recovery";
  render_curves(grid, curves, out / "noise_curves.svg");
  note(out / "noise_curves.svg");
}

void run_spectrum_cmd(const RunConfig& cfg) {
  const ModelParams params = cfg.spectrum_params();
  const QuenchedProjections proj = sample_projections(
      params, derive_seed(cfg.seed, {stream_label("spectrum-proj")}));
  const SpectrumResult result = run_spectrum_analysis(
      params, proj, derive_seed(cfg.seed, {stream_label("spectrum-data")}),
      cfg.n_top);
  const fs::path out = cfg.out_dir;
  fs::create_directories(out);
  std::string csv = "index,s_xx,s_xy\n";
  const Eigen::Index n =
      std::max(result.s_xx.size(), result.s_xy.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    csv += std::to_string(i + 1);
    csv += ',';
    if (i < result.s_xx.size()) csv += format_double(result.s_xx[i]);
    csv += ',';
    if (i < result.s_xy.size()) csv += format_double(result.s_xy[i]);
    csv += '\n';
  }
  write_file_atomic(out / "spectrum.csv", csv);
  note(out / "spectrum.csv");
  PlotSpec spec;
  spec.kind = PlotKind::kSpectrum;
  spec.title = "covariance singular spectra";
  render_spectrum(result, spec, out / "spectrum.svg");
  note(out / "spectrum.svg");
}

void run_mnist_cmd(const RunConfig& cfg, const std::string& data_dir_flag,
                   const std::string& t_flag, const std::string& k_flag,
                   bool no_cache) {
  const fs::path dir = resolve_data_dir(data_dir_flag, cfg.data_dir);
  if (!mnist_files_present(dir)) {
    std::cout << "fetching image data into " << dir.string() << "\n";
    download_mnist(dir);
  }
  const fs::path cache =
      dir / strfmt("views-seed%llu.bin",
                   static_cast<unsigned long long>(cfg.seed));
  ViewBundle bundle;
  if (!no_cache && fs::exists(cache)) {
    std::cout << "loading cached views from " << cache.string() << "\n";
    bundle = load_view_bundle(cache);
  } else {
    std::cout << "building two-view dataset (seed "
              << static_cast<unsigned long long>(cfg.seed) << ")\n";
    bundle = build_dataset(load_mnist_dir(dir), cfg.seed, cfg.workers);
    if (!no_cache) {
      save_view_bundle(cache, bundle);
      note(cache);
    }
  }
  const int n_train = static_cast<int>(bundle.train.x_view.rows());

  std::vector<int> t_list =
      t_flag.empty() ? cfg.t_list : parse_int_list_flag(t_flag, "--t");
  for (int& t : t_list)
    if (t <= 0) t = n_train;
  const std::vector<int> k_grid =
      k_flag.empty() ? cfg.k_grid : parse_int_list_flag(k_flag, "--k");

  const GridResult grid = run_mnist_sweep(bundle, cfg.methods, k_grid, t_list,
                                          cfg.rc0_trials, cfg.seed, cfg.workers);
  const fs::path out = cfg.out_dir;
  write_grid_outputs(grid, out);
  PlotSpec spec;
  spec.kind = PlotKind::kLineWithErrorbars;
  spec.title = "recovery vs retained dimensions";
  spec.x_axis = "k";
  spec.x_over_t = true;
  spec.log_x = true;
  spec.x_label = "retained dimensions / T";
  spec.y_label = "corrected total correlation";
  render_curves(grid, spec, out / "mnist_curves.svg");
  note(out / "mnist_curves.svg");

  // Raw between-view structure on a capped slice of the training split.
  const Eigen::Index slice = std::min<Eigen::Index>(2000, n_train);
  Matrix xs = bundle.train.x_view.topRows(slice);
  Matrix ys = bundle.train.y_view.topRows(slice);
  standardize_columns(xs);
  standardize_columns(ys);
  PlotSpec hist;
  hist.kind = PlotKind::kHistogram;
  hist.title = "between-view pixel correlations";
  hist.x_label = "correlation";
  hist.bins = 80;
  render_histogram(cross_view_correlations(xs, ys), hist,
                   out / "correlations.svg");
  note(out / "correlations.svg");
}

void run_fit(const RunConfig& cfg) {
  const QuenchedProjections proj = sample_projections(
      cfg.model, derive_seed(cfg.seed, {stream_label("fit-proj")}));
  const PairedDataset data = generate_dataset(
      cfg.model, proj, derive_seed(cfg.seed, {stream_label("fit-data")}));
  const fs::path out = cfg.out_dir;
  fs::create_directories(out);
  write_matrix_csv(data.x, out / "train_x.csv", "x");
  note(out / "train_x.csv");
  write_matrix_csv(data.y, out / "train_y.csv", "y");
  note(out / "train_y.csv");

  const CovarianceBlocks cov = covariance_blocks(data.x, data.y);
  int n_fitted = 0;
  for (const FitConfig& method : cfg.methods) {
    ProjectionPair pair;
    try {
      pair = fit_from_cov(cov, method);
    } catch (const SingularCovarianceError& e) {
      std::cout << method_name(method.method) << ": skipped (" << e.what()
                << ")\n";
      continue;
    }
    FittedModel model{method, pair, data.stats_x, data.stats_y, cfg.model.center};
    const fs::path path =
        out / (std::string("model_") + method_name(method.method) + ".json");
    save_model(model, path);
    note(path);
    std::cout << method_name(method.method) << ": k=" << method.k
              << strfmt(", leading score %.6f\n",
                        pair.scores.size() ? pair.scores[0] : 0.0);
    ++n_fitted;
  }
  if (n_fitted == 0) throw Error("no method could be fitted");
}

void run_transform(const std::string& model_path, const std::string& x_path,
                   const std::string& y_path, const std::string& out_dir) {
  const FittedModel model = load_model(model_path);
  const fs::path out = out_dir;
  fs::create_directories(out);
  Matrix x = read_matrix_csv(x_path);
  if (x.cols() != model.projection.w_x.rows())
    throw DimensionMismatchError(
        strfmt("input has %ld columns, model expects %ld", x.cols(),
               model.projection.w_x.rows()));
  apply_column_stats(x, model.stats_x, model.center);
  write_matrix_csv(transform(x, model.projection.w_x), out / "z_x.csv", "z");
  note(out / "z_x.csv");
  if (!y_path.empty()) {
    Matrix y = read_matrix_csv(y_path);
    if (y.cols() != model.projection.w_y.rows())
      throw DimensionMismatchError(
          strfmt("input has %ld columns, model expects %ld", y.cols(),
                 model.projection.w_y.rows()));
    apply_column_stats(y, model.stats_y, model.center);
    write_matrix_csv(transform(y, model.projection.w_y), out / "z_y.csv", "z");
    note(out / "z_y.csv");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-view dimensionality reduction benchmark"};
  app.require_subcommand(1);
  GlobalFlags g;
  auto* opt_config = app.add_option("--config", g.config, "JSON config file");
  auto* opt_out = app.add_option("--out", g.out, "output directory");
  auto* opt_workers =
      app.add_option("--workers", g.workers, "worker threads for trial loops");
  auto* opt_seed =
      app.add_option("--seed", g.seed, "master seed (overrides the config)");
  app.add_option("--preset", g.preset, "defaults bundle: paper | ci");

  CLI::App* sub_phase = app.add_subcommand(
      "phase-diagram", "recovery over an SNR x SNR grid, one panel per method");
  CLI::App* sub_dim = app.add_subcommand(
      "dim-sweep", "recovery as a function of retained dimensions");
  CLI::App* sub_noise = app.add_subcommand(
      "noise-floor", "chance-level recovery over (samples, dimensions)");
  CLI::App* sub_spectrum = app.add_subcommand(
      "spectrum", "singular spectra of the covariance blocks");
  CLI::App* sub_mnist = app.add_subcommand(
      "mnist", "two-view image benchmark (downloads data on first use)");
  std::string data_dir_flag, t_flag, k_flag;
  bool no_cache = false;
  sub_mnist->add_option("--data-dir", data_dir_flag,
                        "image data directory (default: $MMDR_DATA_DIR, then "
                        "$HOME/.cache/mmdr/mnist)");
  sub_mnist->add_option("--t", t_flag,
                        "comma-separated training sizes; 'all' = full split");
  sub_mnist->add_option("--k", k_flag, "comma-separated retained dimensions");
  sub_mnist->add_flag("--no-cache", no_cache,
                      "rebuild views, do not read or write the bundle cache");
  CLI::App* sub_fit = app.add_subcommand(
      "fit", "generate one dataset and save fitted weights per method");
  CLI::App* sub_transform =
      app.add_subcommand("transform", "project CSV data with saved weights");
  std::string model_flag, x_flag, y_flag;
  sub_transform->add_option("--model", model_flag, "fitted model file")
      ->required();
  sub_transform->add_option("--x", x_flag, "CSV with X-view rows")->required();
  sub_transform->add_option("--y", y_flag, "CSV with Y-view rows");
  CLI::App* sub_reference = app.add_subcommand(
      "config-reference", "print the configuration key reference");
  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  g.has_seed = opt_seed->count() > 0;
  g.has_workers = opt_workers->count() > 0;
  g.has_out = opt_out->count() > 0;
  (void)opt_config;

  try {
    if (*sub_phase) {
      run_phase(load_run_config(g, "phase-diagram"));
    } else if (*sub_dim) {
      run_dim(load_run_config(g, "dim-sweep"));
    } else if (*sub_noise) {
      run_noise(load_run_config(g, "noise-floor"));
    } else if (*sub_spectrum) {
      run_spectrum_cmd(load_run_config(g, "spectrum"));
    } else if (*sub_mnist) {
      run_mnist_cmd(load_run_config(g, "mnist"), data_dir_flag, t_flag, k_flag,
                    no_cache);
    } else if (*sub_fit) {
      run_fit(load_run_config(g, "*"));
    } else if (*sub_transform) {
      run_transform(model_flag, x_flag, y_flag, g.has_out ? g.out : "out");
    } else if (*sub_reference) {
      const std::string text = config_reference();
      std::cout << text;
      if (g.has_out) {
        fs::create_directories(g.out);
        write_file_atomic(fs::path(g.out) / "config_reference.txt", text);
        note(fs::path(g.out) / "config_reference.txt");
      }
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
