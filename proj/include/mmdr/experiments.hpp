#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "mmdr/dr_core.hpp"
#include "mmdr/grid.hpp"
#include "mmdr/metrics.hpp"
#include "mmdr/model_gen.hpp"
#include "mmdr/parallel.hpp"

namespace mmdr {

/// Declarative description of one experiment grid.  Cells are the cross
/// product t_list x m_self_list x gamma grids; every cell is averaged over
/// n_proj_trials projection draws x n_inner_trials data draws.
struct SweepSpec {
  ModelParams base;  ///< t and m_self_* are overridden per cell
  std::vector<FitConfig> methods;
  std::vector<double> gamma_self_grid{1.0};
  std::vector<double> gamma_shared_grid{1.0};
  std::vector<int> k_grid;      ///< dimension sweeps; phase diagrams use each method's own k
  std::vector<int> t_list;      ///< empty: just base.t
  std::vector<int> m_self_list; ///< empty: just base.m_self_x
  int n_inner_trials = 10;
  int n_proj_trials = 10;
  int t_test = 0;  ///< 0: test split has the same T as training
  int rc0_trials = 20;
  std::uint64_t master_seed = 1;
  int workers = 1;
};

namespace detail {

/// Chance-level stream key; shared between sweeps and the noise-floor map so
/// a sweep's subtracted floor is exactly the mapped one.
inline std::uint64_t rc0_stream_seed(std::uint64_t master, int t_test, int k,
                                     int m_shared, int n_trials) {
  return derive_seed(master, {stream_label("rc0"),
                              static_cast<std::uint64_t>(t_test),
                              static_cast<std::uint64_t>(k),
                              static_cast<std::uint64_t>(k),
                              static_cast<std::uint64_t>(m_shared),
                              static_cast<std::uint64_t>(n_trials)});
}

inline nlohmann::json model_params_json(const ModelParams& p) {
  return nlohmann::json{
      {"n_x", p.n_x},           {"n_y", p.n_y},
      {"t", p.t},               {"m_self_x", p.m_self_x},
      {"m_self_y", p.m_self_y}, {"m_shared", p.m_shared},
      {"var_r_x", p.var_r_x},   {"var_r_y", p.var_r_y},
      {"var_u_x", p.var_u_x},   {"var_u_y", p.var_u_y},
      {"var_p", p.var_p},       {"var_v_x", p.var_v_x},
      {"var_v_y", p.var_v_y},   {"var_q_x", p.var_q_x},
      {"var_q_y", p.var_q_y},   {"center", p.center}};
}

inline nlohmann::json sweep_metadata(const SweepSpec& s, const char* kind) {
  nlohmann::json m;
  m["kind"] = kind;
  m["master_seed"] = s.master_seed;
  m["n_inner_trials"] = s.n_inner_trials;
  m["n_proj_trials"] = s.n_proj_trials;
  m["t_test"] = s.t_test;
  m["rc0_trials"] = s.rc0_trials;
  m["base"] = model_params_json(s.base);
  m["methods"] = nlohmann::json::array();
  for (const FitConfig& c : s.methods)
    m["methods"].push_back({{"method", method_name(c.method)},
                            {"k", c.k},
                            {"c_x", c.c_x},
                            {"c_y", c.c_y},
                            {"tol", c.tol},
                            {"max_iter", c.max_iter}});
  return m;
}

inline std::vector<double> as_doubles(const std::vector<int>& v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(),
                 [](int x) { return static_cast<double>(x); });
  return out;
}

/// The shared engine behind phase diagrams and dimension sweeps.  With
/// sweep_k every method is fit once at max(k_grid) and evaluated on leading
/// column prefixes; the deflation order makes those prefixes identical to
/// separate smaller fits.
inline GridResult run_grid(const SweepSpec& spec_in, bool sweep_k,
                           const char* kind) {
  SweepSpec spec = spec_in;
  if (spec.t_list.empty()) spec.t_list = {spec.base.t};
  if (spec.m_self_list.empty()) spec.m_self_list = {spec.base.m_self_x};
  if (spec.methods.empty())
    throw InvalidParameterError("sweep spec has no methods");
  if (spec.gamma_self_grid.empty() || spec.gamma_shared_grid.empty())
    throw InvalidParameterError("sweep spec has empty gamma grids");
  if (spec.n_inner_trials < 1 || spec.n_proj_trials < 1)
    throw InvalidParameterError("trial counts must be at least 1");
  if (spec.rc0_trials < 1)
    throw InvalidParameterError("rc0_trials must be at least 1");
  if (spec.base.m_shared < 1)
    throw InvalidParameterError("sweeps need m_shared >= 1 to scale the metric");
  for (int t : spec.t_list)
    if (t < 2) throw InvalidParameterError("every T must be at least 2");
  if (sweep_k)
    for (int k : spec.k_grid)
      if (k < 1) throw InvalidParameterError("k grid values must be positive");

  // Per-method evaluation widths and the width to fit at.
  std::vector<std::vector<int>> eval_ks(spec.methods.size());
  std::vector<int> fit_k(spec.methods.size());
  for (size_t mi = 0; mi < spec.methods.size(); ++mi) {
    if (sweep_k) {
      eval_ks[mi] = spec.k_grid;
      fit_k[mi] = *std::max_element(spec.k_grid.begin(), spec.k_grid.end());
    } else {
      eval_ks[mi] = {spec.methods[mi].k};
      fit_k[mi] = spec.methods[mi].k;
    }
  }
  std::vector<size_t> method_offset(spec.methods.size() + 1, 0);
  for (size_t mi = 0; mi < spec.methods.size(); ++mi)
    method_offset[mi + 1] = method_offset[mi] + eval_ks[mi].size();
  const size_t rows_per_trial = method_offset.back();
  const size_t rows_per_item =
      static_cast<size_t>(spec.n_inner_trials) * rows_per_trial;

  const std::int64_t n_t = static_cast<std::int64_t>(spec.t_list.size());
  const std::int64_t n_m = static_cast<std::int64_t>(spec.m_self_list.size());
  const std::int64_t n_gs = static_cast<std::int64_t>(spec.gamma_self_grid.size());
  const std::int64_t n_gh = static_cast<std::int64_t>(spec.gamma_shared_grid.size());
  const std::int64_t n_cells = n_t * n_m * n_gs * n_gh;
  const std::int64_t n_items = n_cells * spec.n_proj_trials;

  GridResult out;
  out.rows.assign(static_cast<size_t>(n_items) * rows_per_item, TrialRow{});

  // Chance levels depend only on (T_test, k); fill the cache up front so
  // workers only read it.
  Rc0Cache cache;
  for (int t : spec.t_list) {
    const int teff = spec.t_test > 0 ? spec.t_test : t;
    for (size_t mi = 0; mi < spec.methods.size(); ++mi)
      for (int k : eval_ks[mi])
        cache.get(teff, k, k, spec.base.m_shared, spec.rc0_trials,
                  rc0_stream_seed(spec.master_seed, teff, k,
                                  spec.base.m_shared, spec.rc0_trials));
  }

  parallel_for(n_items, spec.workers, [&](std::int64_t item) {
    const std::int64_t cell = item / spec.n_proj_trials;
    const int pj = static_cast<int>(item % spec.n_proj_trials);
    std::int64_t rest = cell;
    const std::int64_t hi = rest % n_gh;
    rest /= n_gh;
    const std::int64_t gi = rest % n_gs;
    rest /= n_gs;
    const std::int64_t mi_self = rest % n_m;
    const std::int64_t ti = rest / n_m;

    const int t = spec.t_list[static_cast<size_t>(ti)];
    const int m_self = spec.m_self_list[static_cast<size_t>(mi_self)];
    const double gs = spec.gamma_self_grid[static_cast<size_t>(gi)];
    const double gh = spec.gamma_shared_grid[static_cast<size_t>(hi)];

    ModelParams p0 = spec.base;
    p0.t = t;
    p0.m_self_x = m_self;
    p0.m_self_y = m_self;
    const ModelParams params = params_from_snr(p0, gs, gh);
    const int teff = spec.t_test > 0 ? spec.t_test : t;
    ModelParams ptest = params;
    ptest.t = teff;

    // Projections are quenched: shared across the gamma and T axes, redrawn
    // per projection trial and per m_self (their shapes change with it).
    const std::uint64_t quench =
        derive_seed(spec.master_seed, {stream_label("quench"),
                                       static_cast<std::uint64_t>(m_self),
                                       static_cast<std::uint64_t>(pj)});
    const QuenchedProjections proj = sample_projections(params, quench);

    const size_t row_base = static_cast<size_t>(item) * rows_per_item;
    for (int inner = 0; inner < spec.n_inner_trials; ++inner) {
      const PairedDataset train = generate_dataset(
          params, proj,
          derive_seed(spec.master_seed, {stream_label("train"),
                                         static_cast<std::uint64_t>(cell),
                                         static_cast<std::uint64_t>(pj),
                                         static_cast<std::uint64_t>(inner)}));
      const PairedDataset test = generate_dataset(
          ptest, proj,
          derive_seed(spec.master_seed, {stream_label("test"),
                                         static_cast<std::uint64_t>(cell),
                                         static_cast<std::uint64_t>(pj),
                                         static_cast<std::uint64_t>(inner)}));
      const CovarianceBlocks blocks = covariance_blocks(train.x, train.y);

      for (size_t mi = 0; mi < spec.methods.size(); ++mi) {
        FitConfig cfg = spec.methods[mi];
        cfg.k = fit_k[mi];
        const size_t slot0 = row_base +
                             static_cast<size_t>(inner) * rows_per_trial +
                             method_offset[mi];
        auto make_row = [&](int k) {
          TrialRow r;
          r.method = method_name(cfg.method);
          r.t = t;
          r.n_x = spec.base.n_x;
          r.n_y = spec.base.n_y;
          r.m_self = m_self;
          r.m_shared = spec.base.m_shared;
          r.k = k;
          r.gamma_self = gs;
          r.gamma_shared = gh;
          r.trial = inner;
          r.proj_trial = pj;
          return r;
        };
        auto mark_degenerate = [](TrialRow& r) {
          r.rc = r.rc0 = r.rc_prime = NAN;
          r.status = CellStatus::kDegenerate;
        };
        try {
          const ProjectionPair pair = fit_from_cov(blocks, cfg);
          const Matrix zx = test.x * pair.w_x;
          const Matrix zy = test.y * pair.w_y;
          for (size_t ki = 0; ki < eval_ks[mi].size(); ++ki) {
            const int k = eval_ks[mi][ki];
            TrialRow r = make_row(k);
            try {
              const double rcv =
                  rc(zx.leftCols(k), zy.leftCols(k), spec.base.m_shared);
              const Rc0Stats floor = cache.get(
                  teff, k, k, spec.base.m_shared, spec.rc0_trials,
                  rc0_stream_seed(spec.master_seed, teff, k,
                                  spec.base.m_shared, spec.rc0_trials));
              r.rc = rcv;
              r.rc0 = floor.mean;
              r.rc_prime = rcv - floor.mean;
            } catch (const DegenerateColumnError&) {
              mark_degenerate(r);
            }
            out.rows[slot0 + ki] = std::move(r);
          }
        } catch (const SingularCovarianceError&) {
          for (size_t ki = 0; ki < eval_ks[mi].size(); ++ki) {
            TrialRow r = make_row(eval_ks[mi][ki]);
            mark_degenerate(r);
            out.rows[slot0 + ki] = std::move(r);
          }
        }
      }
    }
  });

  sort_rows(out.rows);
  out.cells = aggregate_rows(out.rows);
  out.axes.push_back({"t", as_doubles(spec.t_list)});
  out.axes.push_back({"m_self", as_doubles(spec.m_self_list)});
  out.axes.push_back({"gamma_self", spec.gamma_self_grid});
  out.axes.push_back({"gamma_shared", spec.gamma_shared_grid});
  if (sweep_k) out.axes.push_back({"k", as_doubles(spec.k_grid)});
  out.metadata = sweep_metadata(spec, kind);
  return out;
}

}  // namespace detail

/// SNR x SNR map; every method entry is fit and scored at its own k.
inline GridResult run_phase_diagram(const SweepSpec& spec) {
  return detail::run_grid(spec, false, "phase-diagram");
}

/// Score vs projection width k; fit once per trial at max(k_grid), score all
/// leading prefixes.
inline GridResult run_dimension_sweep(const SweepSpec& spec) {
  if (spec.k_grid.empty())
    throw InvalidParameterError("dimension sweep needs a non-empty k grid");
  return detail::run_grid(spec, true, "dim-sweep");
}

/// Chance level of the scoring statistic per (T, k) cell, one row per
/// surrogate draw; rc holds the raw sample and rc0 stays zero.
inline GridResult run_noise_floor_map(const std::vector<int>& t_list,
                                      const std::vector<int>& k_list,
                                      int n_trials, std::uint64_t seed,
                                      int m_shared = 1, int workers = 1) {
  if (t_list.empty() || k_list.empty())
    throw InvalidParameterError("noise-floor map needs non-empty T and k lists");
  if (n_trials < 1)
    throw InvalidParameterError("noise-floor map needs at least one trial");
  if (m_shared < 1) throw InvalidParameterError("m_shared must be positive");
  for (int t : t_list)
    if (t < 2) throw InvalidParameterError("every T must be at least 2");
  for (int k : k_list)
    if (k < 1) throw InvalidParameterError("every k must be positive");

  GridResult out;
  const std::int64_t n_cells =
      static_cast<std::int64_t>(t_list.size()) *
      static_cast<std::int64_t>(k_list.size());
  out.rows.assign(static_cast<size_t>(n_cells) * static_cast<size_t>(n_trials),
                  TrialRow{});
  parallel_for(n_cells, workers, [&](std::int64_t cell) {
    const int t = t_list[static_cast<size_t>(cell) / k_list.size()];
    const int k = k_list[static_cast<size_t>(cell) % k_list.size()];
    const auto samples = rc0_samples(
        t, k, k, m_shared, n_trials,
        detail::rc0_stream_seed(seed, t, k, m_shared, n_trials));
    for (int i = 0; i < n_trials; ++i) {
      TrialRow r;
      r.method = "noise";
      r.t = t;
      r.k = k;
      r.m_shared = m_shared;
      r.rc = samples[static_cast<size_t>(i)];
      r.rc0 = 0.0;
      r.rc_prime = r.rc;
      r.trial = i;
      out.rows[static_cast<size_t>(cell) * static_cast<size_t>(n_trials) +
               static_cast<size_t>(i)] = std::move(r);
    }
  });
  sort_rows(out.rows);
  out.cells = aggregate_rows(out.rows);
  out.axes.push_back({"t", detail::as_doubles(t_list)});
  out.axes.push_back({"k", detail::as_doubles(k_list)});
  out.metadata = {{"kind", "noise-floor"},
                  {"n_trials", n_trials},
                  {"m_shared", m_shared},
                  {"master_seed", seed}};
  return out;
}

/// Descending singular values of the two covariance blocks of one draw.
struct SpectrumResult {
  Vector s_xx, s_xy;
};

inline SpectrumResult run_spectrum_analysis(const ModelParams& params,
                                            const QuenchedProjections& proj,
                                            std::uint64_t seed, int n_top) {
  if (n_top < 1) throw InvalidParameterError("n_top must be positive");
  const PairedDataset d = generate_dataset(params, proj, seed);
  const CovarianceBlocks b = covariance_blocks(d.x, d.y);
  Vector sxx = singular_spectrum(b.c_xx);
  Vector sxy = singular_spectrum(b.c_xy);
  SpectrumResult out;
  out.s_xx = sxx.head(std::min<Eigen::Index>(n_top, sxx.size()));
  out.s_xy = sxy.head(std::min<Eigen::Index>(n_top, sxy.size()));
  return out;
}

}  // namespace mmdr
