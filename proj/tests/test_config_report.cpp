#include "mmdr/config.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "mmdr/experiments.hpp"
#include "mmdr/fit_io.hpp"
#include "mmdr/svg.hpp"
#include "oracles.hpp"

using namespace mmdr;
using nlohmann::json;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("mmdr-cfg-" + std::to_string(::getpid()) + "-" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  out << text;
}

/// Throws-with-substring helper; gtest has no built-in message matcher.
template <typename Fn>
std::string config_error_of(Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected a ConfigError";
  return "";
}

size_t count_occurrences(const std::string& hay, const std::string& needle) {
  size_t n = 0;
  for (size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

/// Tiny planted-signal grid used by the plot tests.
GridResult tiny_phase_grid(std::vector<FitConfig> methods,
                           std::vector<double> gammas = {0.05, 1.0}) {
  SweepSpec spec;
  spec.base.n_x = 10;
  spec.base.n_y = 8;
  spec.base.t = 50;
  spec.base.m_self_x = spec.base.m_self_y = 1;
  spec.base.m_shared = 1;
  spec.methods = std::move(methods);
  spec.gamma_self_grid = gammas;
  spec.gamma_shared_grid = gammas;
  spec.n_inner_trials = 2;
  spec.n_proj_trials = 1;
  spec.rc0_trials = 2;
  spec.master_seed = 5;
  return run_phase_diagram(spec);
}

FitConfig method_cfg(Method m, int k = 1, double c = 0.5) {
  FitConfig cfg;
  cfg.method = m;
  cfg.k = k;
  cfg.c_x = cfg.c_y = c;
  return cfg;
}

/// Runs the installed CLI binary; returns its exit code.
int run_cli(const std::string& args, const std::filesystem::path& dir,
            std::string* out_text = nullptr, std::string* err_text = nullptr) {
  const std::string out_file = (dir / "stdout.txt").string();
  const std::string err_file = (dir / "stderr.txt").string();
  const std::string cmd = std::string(MMDR_CLI_PATH) + " " + args + " > " +
                          out_file + " 2> " + err_file;
  const int status = std::system(cmd.c_str());
  if (out_text) *out_text = read_file(out_file);
  if (err_text) *err_text = read_file(err_file);
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

}  // namespace

TEST(ConfigReportTest, EmptyConfigNeedsAnExperimentKind) {
  const std::string msg =
      config_error_of([] { config_from_json(json::object()); });
  EXPECT_NE(msg.find("experiment kind missing"), std::string::npos);
}

TEST(ConfigReportTest, BlankFileLoadsTheSubcommandDefaults) {
  TempDir tmp;
  write_text(tmp.path / "blank.json", "  \n\t\n");
  const RunConfig cfg = load_config(tmp.path / "blank.json", "noise-floor");
  EXPECT_EQ(cfg.kind, ExperimentKind::kNoiseFloor);
  EXPECT_EQ(cfg.t_list, (std::vector<int>{100, 300, 1000, 3000, 10000}));
  EXPECT_EQ(cfg.k_list, (std::vector<int>{1, 2, 5, 10, 30, 100}));
  EXPECT_EQ(cfg.n_trials, 20);
  EXPECT_EQ(cfg.seed, 1u);
}

TEST(ConfigReportTest, KindDefaultsMatchTheirExperiments) {
  const RunConfig phase = config_from_json(json::object(), "phase-diagram");
  EXPECT_EQ(phase.model.n_x, 1000);
  EXPECT_EQ(phase.model.t, 1000);
  EXPECT_EQ(phase.model.m_shared, 1);
  ASSERT_EQ(phase.methods.size(), 4u);
  EXPECT_EQ(method_name(phase.methods[0].method), std::string("pca"));
  ASSERT_EQ(phase.gamma_self_grid.size(), 8u);
  EXPECT_DOUBLE_EQ(phase.gamma_self_grid.front(), 0.05);
  EXPECT_DOUBLE_EQ(phase.gamma_self_grid.back(), 1.0);
  EXPECT_EQ(phase.n_inner_trials, 10);
  EXPECT_EQ(phase.n_proj_trials, 10);
  EXPECT_EQ(phase.rc0_trials, 20);

  const RunConfig dim = config_from_json(json::object(), "dim-sweep");
  EXPECT_EQ(dim.k_grid, (std::vector<int>{2, 5, 10, 15, 30, 60, 110, 150}));

  const RunConfig mnist = config_from_json(json::object(), "mnist");
  EXPECT_EQ(mnist.k_grid,
            (std::vector<int>{1, 2, 5, 10, 20, 50, 100, 200, 500, 784}));
  EXPECT_EQ(mnist.t_list, (std::vector<int>{1000, 10000, 0}));
}

TEST(ConfigReportTest, CiPresetShrinksTheExperiment) {
  const RunConfig cfg =
      config_from_json(json{{"kind", "phase-diagram"}, {"preset", "ci"}});
  EXPECT_EQ(cfg.model.n_x, 200);
  EXPECT_EQ(cfg.model.n_y, 200);
  EXPECT_EQ(cfg.model.t, 600);
  EXPECT_EQ(cfg.n_inner_trials, 3);
  EXPECT_EQ(cfg.n_proj_trials, 3);
  ASSERT_EQ(cfg.gamma_self_grid.size(), 3u);
  EXPECT_DOUBLE_EQ(cfg.gamma_self_grid[1], 0.525);
  EXPECT_EQ(cfg.preset, "ci");
}

TEST(ConfigReportTest, PaperPresetSetsFullScale) {
  const RunConfig cfg =
      config_from_json(json{{"kind", "phase-diagram"}, {"preset", "paper"}});
  EXPECT_EQ(cfg.model.n_x, 1000);
  EXPECT_EQ(cfg.model.t, 1000);
  EXPECT_EQ(cfg.n_inner_trials, 10);
  EXPECT_EQ(cfg.gamma_shared_grid.size(), 8u);
  EXPECT_THROW(config_from_json(json{{"kind", "spectrum"}, {"preset", "huge"}}),
               ConfigError);
}

TEST(ConfigReportTest, ExplicitKeysOverrideThePreset) {
  const RunConfig cfg = config_from_json(json{{"kind", "phase-diagram"},
                                              {"preset", "ci"},
                                              {"n_inner_trials", 7},
                                              {"gamma_self", {0.2, 0.9}}});
  EXPECT_EQ(cfg.n_inner_trials, 7);
  EXPECT_EQ(cfg.gamma_self_grid, (std::vector<double>{0.2, 0.9}));
  EXPECT_EQ(cfg.n_proj_trials, 3);  // untouched preset value survives
}

TEST(ConfigReportTest, PresetFlagOverridesTheFilePreset) {
  const RunConfig cfg = config_from_json(
      json{{"kind", "phase-diagram"}, {"preset", "paper"}}, "", "ci");
  EXPECT_EQ(cfg.model.n_x, 200);
  EXPECT_EQ(cfg.preset, "ci");
}

TEST(ConfigReportTest, UnknownKeysAreNamedAtEveryLevel) {
  std::string msg = config_error_of(
      [] { config_from_json(json{{"kind", "phase-diagram"}, {"gamma_sharedd", 1}}); });
  EXPECT_NE(msg.find("gamma_sharedd"), std::string::npos);

  msg = config_error_of([] {
    config_from_json(json{{"kind", "phase-diagram"}, {"model", {{"bogus", 1}}}});
  });
  EXPECT_NE(msg.find("model.bogus"), std::string::npos);

  msg = config_error_of([] {
    config_from_json(json{{"kind", "phase-diagram"},
                          {"methods", json::array({{{"method", "pca"}, {"bogus", 1}}})}});
  });
  EXPECT_NE(msg.find("methods[0].bogus"), std::string::npos);
}

TEST(ConfigReportTest, UnsupportedVersionIsRejected) {
  const std::string msg = config_error_of(
      [] { config_from_json(json{{"version", 2}, {"kind", "spectrum"}}); });
  EXPECT_NE(msg.find("version"), std::string::npos);
  EXPECT_NO_THROW(config_from_json(json{{"version", 1}, {"kind", "spectrum"}}));
}

TEST(ConfigReportTest, FileKindMustMatchTheSubcommandHint) {
  EXPECT_THROW(config_from_json(json{{"kind", "dim-sweep"}}, "phase-diagram"),
               ConfigError);
  // The wildcard hint accepts any kind and defaults to phase-diagram.
  EXPECT_EQ(config_from_json(json{{"kind", "mnist"}}, "*").kind,
            ExperimentKind::kMnist);
  EXPECT_EQ(config_from_json(json::object(), "*").kind,
            ExperimentKind::kPhaseDiagram);
  const std::string msg =
      config_error_of([] { config_from_json(json{{"kind", "pies"}}); });
  EXPECT_NE(msg.find("unknown experiment kind 'pies'"), std::string::npos);
}

TEST(ConfigReportTest, ParseErrorsCarryFileLineAndColumn) {
  TempDir tmp;
  write_text(tmp.path / "bad.json", "{\n  \"seed\": 1,\n  \"workers\": }\n");
  try {
    load_config(tmp.path / "bad.json", "phase-diagram");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("bad.json"), std::string::npos);
    EXPECT_NE(msg.find("parse error at line 3"), std::string::npos);
    EXPECT_NE(msg.find("column"), std::string::npos);
  }
}

TEST(ConfigReportTest, WrongTypesNameTheOffendingKey) {
  std::string msg = config_error_of([] {
    config_from_json(json{{"kind", "phase-diagram"}, {"seed", "abc"}});
  });
  EXPECT_NE(msg.find("'seed'"), std::string::npos);

  msg = config_error_of([] {
    config_from_json(json{{"kind", "phase-diagram"}, {"gamma_self", "x"}});
  });
  EXPECT_NE(msg.find("'gamma_self'"), std::string::npos);

  msg = config_error_of([] {
    config_from_json(json{{"kind", "phase-diagram"}, {"methods", 3}});
  });
  EXPECT_NE(msg.find("methods"), std::string::npos);
}

TEST(ConfigReportTest, OutOfRangeValuesAreRejected) {
  auto with = [](json patch) {
    patch["kind"] = "phase-diagram";
    return patch;
  };
  EXPECT_THROW(config_from_json(with({{"rc0_trials", 1}})), ConfigError);
  EXPECT_THROW(config_from_json(with({{"n_inner_trials", 0}})), ConfigError);
  EXPECT_THROW(config_from_json(with({{"gamma_self", json::array()}})),
               ConfigError);
  EXPECT_THROW(config_from_json(with({{"gamma_shared", {-0.5}}})), ConfigError);
  EXPECT_THROW(config_from_json(with({{"model", {{"t", 0}}}})), ConfigError);
  EXPECT_THROW(
      config_from_json(with({{"methods", json::array({{{"method", "magic"}}})}})),
      ConfigError);
  EXPECT_THROW(
      config_from_json(
          with({{"methods", json::array({{{"method", "rcca"}, {"c_x", 1.5}}})}})),
      ConfigError);
  EXPECT_THROW(
      config_from_json(
          with({{"methods", json::array({{{"method", "pca"}, {"k", 0}}})}})),
      ConfigError);
  EXPECT_THROW(
      config_from_json(json{{"kind", "dim-sweep"}, {"k_grid", json::array()}}),
      ConfigError);
  EXPECT_THROW(config_from_json(json{{"kind", "noise-floor"}, {"t_list", {1}}}),
               ConfigError);
}

TEST(ConfigReportTest, ModelSeedIsAFallbackMasterSeed) {
  const RunConfig fallback = config_from_json(
      json{{"kind", "phase-diagram"}, {"model", {{"seed", 42}}}});
  EXPECT_EQ(fallback.seed, 42u);
  const RunConfig explicit_seed = config_from_json(
      json{{"kind", "phase-diagram"}, {"seed", 7}, {"model", {{"seed", 42}}}});
  EXPECT_EQ(explicit_seed.seed, 7u);
}

TEST(ConfigReportTest, MethodEntriesParseTheirKnobs) {
  const RunConfig cfg = config_from_json(
      json{{"kind", "phase-diagram"},
           {"methods", json::array({{{"method", "rcca"},
                                     {"k", 3},
                                     {"c_x", 0.25},
                                     {"c_y", 0.4},
                                     {"tol", 1e-6},
                                     {"max_iter", 123}}})}});
  ASSERT_EQ(cfg.methods.size(), 1u);
  EXPECT_EQ(cfg.methods[0].method, Method::kRcca);
  EXPECT_EQ(cfg.methods[0].k, 3);
  EXPECT_DOUBLE_EQ(cfg.methods[0].c_x, 0.25);
  EXPECT_DOUBLE_EQ(cfg.methods[0].c_y, 0.4);
  EXPECT_DOUBLE_EQ(cfg.methods[0].tol, 1e-6);
  EXPECT_EQ(cfg.methods[0].max_iter, 123);

  const std::string msg = config_error_of([] {
    config_from_json(json{{"kind", "phase-diagram"},
                          {"methods", json::array({{{"k", 2}}})}});
  });
  EXPECT_NE(msg.find("methods[0].method"), std::string::npos);
}

TEST(ConfigReportTest, KindNamesRoundTrip) {
  for (ExperimentKind k :
       {ExperimentKind::kPhaseDiagram, ExperimentKind::kDimSweep,
        ExperimentKind::kNoiseFloor, ExperimentKind::kSpectrum,
        ExperimentKind::kMnist})
    EXPECT_EQ(kind_from_name(kind_name(k)), k);
  EXPECT_THROW(kind_from_name("parabola"), ConfigError);
}

TEST(ConfigReportTest, ConfigReferenceDocumentsEveryKey) {
  const std::string text = config_reference();
  for (const auto* table :
       {&detail::top_level_keys(), &detail::model_keys(), &detail::method_keys()})
    for (const detail::KeyDoc& doc : *table)
      EXPECT_NE(text.find(doc.key), std::string::npos) << doc.key;
  EXPECT_NE(text.find("paper"), std::string::npos);
  EXPECT_NE(text.find("ci"), std::string::npos);
}

TEST(ConfigReportTest, SweepSpecMirrorsTheConfig) {
  const RunConfig cfg = config_from_json(json{{"kind", "dim-sweep"},
                                              {"seed", 9},
                                              {"workers", 3},
                                              {"k_grid", {1, 2}},
                                              {"t_test", 500},
                                              {"gamma_self", {0.3}},
                                              {"gamma_shared", {0.8}}});
  const SweepSpec s = cfg.to_sweep_spec();
  EXPECT_EQ(s.master_seed, 9u);
  EXPECT_EQ(s.workers, 3);
  EXPECT_EQ(s.k_grid, (std::vector<int>{1, 2}));
  EXPECT_EQ(s.t_test, 500);
  EXPECT_EQ(s.gamma_self_grid, (std::vector<double>{0.3}));
  EXPECT_EQ(s.base.n_x, cfg.model.n_x);
  EXPECT_EQ(s.methods.size(), cfg.methods.size());
}

TEST(ConfigReportTest, SpectrumParamsFollowSingletonGrids) {
  const RunConfig cfg = config_from_json(json{{"kind", "spectrum"},
                                              {"gamma_self", {0.2}},
                                              {"gamma_shared", {0.8}}});
  const ModelParams direct = params_from_snr(cfg.model, 0.2, 0.8);
  const ModelParams via = cfg.spectrum_params();
  EXPECT_DOUBLE_EQ(via.var_u_x, direct.var_u_x);
  EXPECT_DOUBLE_EQ(via.var_p, direct.var_p);

  RunConfig multi = cfg;
  multi.gamma_self_grid = {0.2, 0.4};
  EXPECT_DOUBLE_EQ(multi.spectrum_params().var_p, multi.model.var_p);
}

TEST(ConfigReportTest, HeatmapOutputIsByteDeterministic) {
  TempDir tmp;
  const GridResult grid =
      tiny_phase_grid({method_cfg(Method::kPca), method_cfg(Method::kPls)});
  PlotSpec spec;
  spec.kind = PlotKind::kHeatmap;
  spec.title = "phase diagram";
  render_heatmap(grid, spec, tmp.path / "a.svg");
  render_heatmap(grid, spec, tmp.path / "b.svg");
  const std::string a = read_file(tmp.path / "a.svg");
  EXPECT_EQ(a, read_file(tmp.path / "b.svg"));
  EXPECT_NE(a.find("<svg"), std::string::npos);
  EXPECT_NE(a.find("phase diagram"), std::string::npos);
}

TEST(ConfigReportTest, HeatmapDrawsOneRectPerPopulatedCell) {
  TempDir tmp;
  PlotSpec spec;
  spec.kind = PlotKind::kHeatmap;

  // A 1x1 grid with one method: exactly one data cell plus its chance cell.
  const GridResult one = tiny_phase_grid({method_cfg(Method::kPca)}, {0.5});
  render_heatmap(one, spec, tmp.path / "one.svg");
  const std::string svg1 = read_file(tmp.path / "one.svg");
  EXPECT_EQ(count_occurrences(svg1, "class=\"cell\""), 1u);
  EXPECT_EQ(count_occurrences(svg1, "class=\"floorcell\""), 1u);

  // 2x2 gammas, two methods: 8 data cells, one 4-cell chance panel.
  const GridResult grid =
      tiny_phase_grid({method_cfg(Method::kPca), method_cfg(Method::kPls)});
  render_heatmap(grid, spec, tmp.path / "grid.svg");
  const std::string svg2 = read_file(tmp.path / "grid.svg");
  EXPECT_EQ(count_occurrences(svg2, "class=\"cell\""), 8u);
  EXPECT_EQ(count_occurrences(svg2, "class=\"floorcell\""), 4u);
  EXPECT_EQ(count_occurrences(svg2, "pca (k=1)"), 1u);
  EXPECT_EQ(count_occurrences(svg2, "pls (k=1)"), 1u);
  EXPECT_EQ(count_occurrences(svg2, "noise (k=1)"), 1u);

  GridResult empty;
  EXPECT_THROW(render_heatmap(empty, spec, tmp.path / "no.svg"),
               InvalidParameterError);
}

TEST(ConfigReportTest, HeatmapHatchesCellsWithNoSurvivingTrials) {
  TempDir tmp;
  SweepSpec sw;
  sw.base.n_x = 30;
  sw.base.n_y = 30;
  sw.base.t = 20;  // undersampled: CCA fails, PLS succeeds
  sw.base.m_self_x = sw.base.m_self_y = 1;
  sw.base.m_shared = 1;
  sw.methods = {method_cfg(Method::kCca, 1, 0.0), method_cfg(Method::kPls)};
  sw.gamma_self_grid = {0.5};
  sw.gamma_shared_grid = {0.5};
  sw.n_inner_trials = 1;
  sw.n_proj_trials = 1;
  sw.rc0_trials = 2;
  const GridResult grid = run_phase_diagram(sw);

  PlotSpec spec;
  spec.kind = PlotKind::kHeatmap;
  render_heatmap(grid, spec, tmp.path / "hatch.svg");
  const std::string svg = read_file(tmp.path / "hatch.svg");
  EXPECT_EQ(count_occurrences(svg, "class=\"cell degenerate\""), 1u);
  EXPECT_EQ(count_occurrences(svg, "class=\"cell\""), 1u);  // the pls cell
  EXPECT_NE(svg.find("url(#hatch)"), std::string::npos);
}

TEST(ConfigReportTest, HeatmapMarksValuesAboveTheColorScale) {
  TempDir tmp;
  GridResult grid;
  TrialRow r;
  r.method = "pls";
  r.t = 100;
  r.k = 1;
  r.m_shared = 1;
  r.gamma_self = 0.5;
  r.gamma_shared = 0.5;
  r.rc = 1.6;
  r.rc0 = 0.1;
  r.rc_prime = 1.5;  // beyond the fixed [0, 1] scale
  grid.rows = {r};
  grid.cells = aggregate_rows(grid.rows);
  grid.axes = {{"gamma_self", {0.5}}, {"gamma_shared", {0.5}}};

  PlotSpec spec;
  spec.kind = PlotKind::kHeatmap;
  render_heatmap(grid, spec, tmp.path / "over.svg");
  const std::string svg = read_file(tmp.path / "over.svg");
  EXPECT_NE(svg.find("class=\"overflow\""), std::string::npos);
  EXPECT_GE(count_occurrences(svg, ">+<"), 1u);
}

TEST(ConfigReportTest, CurvesDrawOnePolylinePerMethodWithLegend) {
  TempDir tmp;
  SweepSpec sw;
  sw.base.n_x = 10;
  sw.base.n_y = 8;
  sw.base.t = 50;
  sw.base.m_self_x = sw.base.m_self_y = 1;
  sw.base.m_shared = 1;
  sw.methods = {method_cfg(Method::kPca), method_cfg(Method::kRcca)};
  sw.gamma_self_grid = {0.3};
  sw.gamma_shared_grid = {1.0};
  sw.k_grid = {1, 2, 4};
  sw.n_inner_trials = 3;
  sw.n_proj_trials = 1;
  sw.rc0_trials = 2;
  const GridResult grid = run_dimension_sweep(sw);

  PlotSpec spec;
  spec.kind = PlotKind::kLineWithErrorbars;
  spec.x_axis = "k";
  spec.x_label = "k / T";
  render_curves(grid, spec, tmp.path / "curves.svg");
  render_curves(grid, spec, tmp.path / "curves2.svg");
  const std::string svg = read_file(tmp.path / "curves.svg");
  EXPECT_EQ(svg, read_file(tmp.path / "curves2.svg"));
  EXPECT_EQ(count_occurrences(svg, "<polyline"), 2u);
  EXPECT_EQ(count_occurrences(svg, "class=\"legend\""), 2u);
  EXPECT_NE(svg.find(">pca<"), std::string::npos);
  EXPECT_NE(svg.find(">rcca<"), std::string::npos);

  GridResult empty;
  empty.axes = grid.axes;
  EXPECT_THROW(render_curves(empty, spec, tmp.path / "none.svg"),
               InvalidParameterError);
}

TEST(ConfigReportTest, SpectrumAndHistogramPlotsRender) {
  TempDir tmp;
  SpectrumResult sr;
  sr.s_xx = Vector::LinSpaced(10, 10.0, 1.0);
  sr.s_xy = Vector::LinSpaced(10, 2.0, 0.1);
  PlotSpec spec;
  spec.kind = PlotKind::kSpectrum;
  render_spectrum(sr, spec, tmp.path / "spec.svg");
  const std::string svg = read_file(tmp.path / "spec.svg");
  EXPECT_NE(svg.find("C_XX"), std::string::npos);
  EXPECT_NE(svg.find("C_XY"), std::string::npos);
  EXPECT_EQ(count_occurrences(svg, "<polyline"), 2u);

  PlotSpec hist;
  hist.kind = PlotKind::kHistogram;
  hist.bins = 20;
  std::vector<double> values;
  CounterRng rng(3);
  for (int i = 0; i < 500; ++i) values.push_back(rng.next_gaussian());
  render_histogram(values, hist, tmp.path / "hist.svg");
  const std::string hsvg = read_file(tmp.path / "hist.svg");
  const size_t bars = count_occurrences(hsvg, "class=\"bar\"");
  EXPECT_GE(bars, 10u);
  EXPECT_LE(bars, 20u);
  EXPECT_THROW(render_histogram({}, hist, tmp.path / "none.svg"),
               InvalidParameterError);
}

TEST(ConfigReportTest, PlotSpecValidatesItsFields) {
  PlotSpec spec;
  spec.color_max = spec.color_min;
  EXPECT_THROW(spec.validate(), InvalidParameterError);
  spec = PlotSpec{};
  spec.bins = 0;
  EXPECT_THROW(spec.validate(), InvalidParameterError);
  spec = PlotSpec{};
  spec.panel_rows = -1;
  EXPECT_THROW(spec.validate(), InvalidParameterError);
  EXPECT_NO_THROW(PlotSpec{}.validate());
}

TEST(ConfigReportTest, FittedModelRoundTripsThroughJson) {
  TempDir tmp;
  CounterRng rng(8);
  Matrix x = gaussian_matrix(rng, 60, 6);
  Matrix y = gaussian_matrix(rng, 60, 5);
  y.col(0) += x.col(0);

  FittedModel model;
  model.config = method_cfg(Method::kRcca, 2, 0.3);
  const ColumnStats sx = standardize_columns(x);
  const ColumnStats sy = standardize_columns(y);
  model.projection = fit(x, y, model.config);
  model.stats_x = sx;
  model.stats_y = sy;

  const auto path = tmp.path / "model.json";
  save_model(model, path);
  const FittedModel back = load_model(path);
  EXPECT_EQ(back.config.method, Method::kRcca);
  EXPECT_EQ(back.config.k, 2);
  EXPECT_DOUBLE_EQ(back.config.c_x, 0.3);
  EXPECT_TRUE((back.projection.w_x.array() == model.projection.w_x.array()).all());
  EXPECT_TRUE((back.projection.w_y.array() == model.projection.w_y.array()).all());
  EXPECT_TRUE((back.projection.scores.array() == model.projection.scores.array()).all());
  ASSERT_EQ(back.projection.info.size(), model.projection.info.size());
  EXPECT_EQ(back.projection.info[0].converged, model.projection.info[0].converged);
  EXPECT_TRUE((back.stats_x.mean.array() == model.stats_x.mean.array()).all());
  EXPECT_TRUE((back.stats_y.stddev.array() == model.stats_y.stddev.array()).all());
  EXPECT_EQ(back.center, model.center);
}

TEST(ConfigReportTest, ModelLoaderRejectsCorruptDocuments) {
  TempDir tmp;
  write_text(tmp.path / "junk.json", "not json at all");
  EXPECT_THROW(load_model(tmp.path / "junk.json"), MalformedFileError);

  write_text(tmp.path / "kind.json", R"({"kind": "something-else"})");
  EXPECT_THROW(load_model(tmp.path / "kind.json"), MalformedFileError);

  json doc = {{"kind", "fitted-model"}, {"version", 2}};
  write_text(tmp.path / "version.json", doc.dump());
  EXPECT_THROW(load_model(tmp.path / "version.json"), MalformedFileError);

  doc = {{"kind", "fitted-model"},
         {"version", 1},
         {"method", "pca"},
         {"scores", {1.0}},
         {"w_x", {{1.0}, {2.0}}},
         {"w_y", {{1.0, 2.0}}},  // two columns: disagrees with w_x
         {"stats_x", {{"mean", {0.0}}, {"std", {1.0}}, {"degenerate", json::array()}}},
         {"stats_y", {{"mean", {0.0}}, {"std", {1.0}}, {"degenerate", json::array()}}}};
  write_text(tmp.path / "k.json", doc.dump());
  try {
    load_model(tmp.path / "k.json");
    FAIL() << "expected MalformedFileError";
  } catch (const MalformedFileError& e) {
    EXPECT_NE(std::string(e.what()).find("disagree on k"), std::string::npos);
  }

  doc["w_y"] = {{1.0}, {2.0, 3.0}};  // ragged matrix
  write_text(tmp.path / "ragged.json", doc.dump());
  EXPECT_THROW(load_model(tmp.path / "ragged.json"), MalformedFileError);
}

TEST(ConfigReportTest, MatrixCsvRoundTripsAtFullPrecision) {
  TempDir tmp;
  CounterRng rng(12);
  Matrix m = gaussian_matrix(rng, 7, 3);
  m(0, 0) = 1.0 / 3.0;
  m(1, 1) = 1e-200;
  const auto path = tmp.path / "m.csv";
  write_matrix_csv(m, path, "x");
  const std::string text = read_file(path);
  EXPECT_EQ(text.substr(0, text.find('\n')), "x0,x1,x2");

  const Matrix back = read_matrix_csv(path);
  ASSERT_EQ(back.rows(), 7);
  ASSERT_EQ(back.cols(), 3);
  EXPECT_TRUE((back.array() == m.array()).all());

  write_text(tmp.path / "ragged.csv", "a,b\n1.0,2.0\n3.0\n");
  try {
    read_matrix_csv(tmp.path / "ragged.csv");
    FAIL() << "expected MalformedFileError";
  } catch (const MalformedFileError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos);
  }
}

TEST(ConfigReportTest, CliConfigReferenceCommandPrintsTheDocs) {
  TempDir tmp;
  std::string out;
  const int code = run_cli("config-reference", tmp.path, &out);
  EXPECT_EQ(code, 0);
  EXPECT_NE(out.find("Top-level keys"), std::string::npos);
  EXPECT_NE(out.find("gamma_shared"), std::string::npos);
}

TEST(ConfigReportTest, CliRejectsBadInvocationsWithExitTwo) {
  TempDir tmp;
  std::string err;
  EXPECT_EQ(run_cli("no-such-subcommand", tmp.path, nullptr, &err), 2);

  write_text(tmp.path / "bad.json",
             R"({"kind": "phase-diagram", "gamma_sharedd": [0.1]})");
  const int code = run_cli(
      "phase-diagram --config " + (tmp.path / "bad.json").string() + " --out " +
          (tmp.path / "out").string(),
      tmp.path, nullptr, &err);
  EXPECT_EQ(code, 2);
  EXPECT_NE(err.find("gamma_sharedd"), std::string::npos);
}

TEST(ConfigReportTest, CliRunsATinyPhaseDiagramDeterministically) {
  TempDir tmp;
  const json cfg = {{"kind", "phase-diagram"},
                    {"model", {{"n_x", 12}, {"n_y", 10}, {"t", 50}}},
                    {"gamma_self", {0.1, 1.0}},
                    {"gamma_shared", {0.1, 1.0}},
                    {"methods", json::array({{{"method", "pca"}},
                                             {{"method", "pls"}}})},
                    {"n_inner_trials", 1},
                    {"n_proj_trials", 1},
                    {"rc0_trials", 2}};
  write_text(tmp.path / "cfg.json", cfg.dump());

  const std::string base = "phase-diagram --config " +
                           (tmp.path / "cfg.json").string() + " --out ";
  std::string out;
  ASSERT_EQ(run_cli(base + (tmp.path / "o1").string() + " --workers 1",
                    tmp.path, &out),
            0);
  ASSERT_EQ(run_cli(base + (tmp.path / "o2").string() + " --workers 2",
                    tmp.path, &out),
            0);

  for (const char* name : {"results.csv", "grid.json", "phase_diagram.svg"}) {
    EXPECT_TRUE(std::filesystem::exists(tmp.path / "o1" / name)) << name;
    EXPECT_EQ(read_file(tmp.path / "o1" / name), read_file(tmp.path / "o2" / name))
        << name;
  }
  const std::string csv = read_file(tmp.path / "o1" / "results.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), results_csv_header());
  EXPECT_NO_THROW(parse_results_csv(csv));
}

TEST(ConfigReportTest, CliFitAndTransformRoundTrip) {
  TempDir tmp;
  const json cfg = {{"model", {{"n_x", 8}, {"n_y", 6}, {"t", 40}}},
                    {"methods", json::array({{{"method", "pca"}, {"k", 2}}})}};
  write_text(tmp.path / "cfg.json", cfg.dump());
  const std::string out_dir = (tmp.path / "fit").string();

  ASSERT_EQ(run_cli("fit --config " + (tmp.path / "cfg.json").string() +
                        " --out " + out_dir,
                    tmp.path),
            0);
  for (const char* name : {"model_pca.json", "train_x.csv", "train_y.csv"})
    ASSERT_TRUE(std::filesystem::exists(tmp.path / "fit" / name)) << name;

  ASSERT_EQ(run_cli("transform --model " + out_dir + "/model_pca.json --x " +
                        out_dir + "/train_x.csv --y " + out_dir +
                        "/train_y.csv --out " + (tmp.path / "tr").string(),
                    tmp.path),
            0);
  const Matrix zx = read_matrix_csv(tmp.path / "tr" / "z_x.csv");
  EXPECT_EQ(zx.rows(), 40);
  EXPECT_EQ(zx.cols(), 2);

  // The exported projections must match an in-process replay of the model.
  const FittedModel model = load_model(tmp.path / "fit" / "model_pca.json");
  Matrix x = read_matrix_csv(tmp.path / "fit" / "train_x.csv");
  apply_column_stats(x, model.stats_x, model.center);
  const Matrix want = x * model.projection.w_x;
  EXPECT_LT((zx - want).cwiseAbs().maxCoeff(), 1e-12);
}
