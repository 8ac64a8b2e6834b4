#include "triring/working_point.hpp"

#include <algorithm>
#include <cmath>

#include "triring/errors.hpp"
#include "triring/parallel.hpp"
#include "triring/simplex.hpp"

namespace triring {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

// Peak fidelities of a bias point over the band: one eigensolve, a coarse
// frequency grid, then two local refinement passes around the argmax.
WorkingPointCandidate evaluate_bias(const CircuitParams& params, Sector sector,
                                    const BiasPoint& bias,
                                    const WorkingPointSearch& search,
                                    int cutoff, int grid_points) {
  WorkingPointCandidate cand;
  cand.bias = bias;
  try {
    SmatrixOptions opts;
    opts.cutoff = cutoff;
    const ChannelModel model = channel_model_for(
        params, bias, sector, search.f_min, search.f_max, opts);
    const auto grid = linspace(search.f_min, search.f_max, grid_points);
    double best_cw = 0.0, best_ccw = 0.0, best_f = grid.front();
    for (double f : grid) {
      const FidelitySet fi = fidelities(smatrix_at(model, f));
      if (fi.f_cw > best_cw) {
        best_cw = fi.f_cw;
        best_f = f;
      }
      best_ccw = std::max(best_ccw, fi.f_ccw);
    }
    double step = grid[1] - grid[0];
    for (int pass = 0; pass < 2; ++pass) {
      const double lo = std::max(search.f_min, best_f - 2.0 * step);
      const double hi = std::min(search.f_max, best_f + 2.0 * step);
      for (double f : linspace(lo, hi, 33)) {
        const FidelitySet fi = fidelities(smatrix_at(model, f));
        if (fi.f_cw > best_cw) {
          best_cw = fi.f_cw;
          best_f = f;
        }
      }
      step = (hi - lo) / 32.0;
    }
    cand.peak_f_cw = best_cw;
    cand.peak_f_ccw = best_ccw;
    cand.peak_frequency = best_f;
  } catch (const TruncationError&) {
    // Bias points whose spectrum cannot cover the band simply score zero.
    cand.peak_f_cw = 0.0;
    cand.peak_f_ccw = 0.0;
  }
  return cand;
}

}  // namespace

WorkingPointResult find_working_point(const CircuitParams& params,
                                      Sector sector,
                                      const WorkingPointSearch& search,
                                      int n_threads) {
  params.validate();
  if (search.phi_steps < 1 || search.ng_steps < 1) {
    throw ParameterError("search grid must be non-empty");
  }

  // Coarse candidates. The ng grid excludes its upper endpoint (offset
  // charges are periodic with period 1).
  const auto phis = linspace(search.phi_lo, search.phi_hi, search.phi_steps);
  std::vector<double> ngs(search.ng_steps);
  for (int i = 0; i < search.ng_steps; ++i) {
    ngs[i] = search.ng_lo + (search.ng_hi - search.ng_lo) * i / search.ng_steps;
  }

  std::vector<BiasPoint> grid;
  grid.reserve(phis.size() * ngs.size() * ngs.size() * ngs.size());
  for (double phi : phis) {
    for (double g1 : ngs) {
      for (double g2 : ngs) {
        for (double g3 : ngs) grid.push_back(BiasPoint{phi, {g1, g2, g3}});
      }
    }
  }

  std::vector<WorkingPointCandidate> coarse(grid.size());
  parallel_for(static_cast<int>(grid.size()), n_threads, [&](int i) {
    coarse[i] = evaluate_bias(params, sector, grid[i], search,
                              search.coarse_cutoff, search.coarse_grid_points);
  });

  std::stable_sort(coarse.begin(), coarse.end(),
                   [](const WorkingPointCandidate& a,
                      const WorkingPointCandidate& b) {
                     return std::max(a.peak_f_cw, a.peak_f_ccw) >
                            std::max(b.peak_f_cw, b.peak_f_ccw);
                   });

  // Refine the leading candidates. Flux reversal transposes S, so a strong
  // anticlockwise candidate is refined at the mirrored flux.
  const int n_refine =
      std::min<int>(search.top_candidates, static_cast<int>(coarse.size()));
  std::vector<WorkingPointCandidate> refined(n_refine);
  parallel_for(n_refine, n_threads, [&](int i) {
    WorkingPointCandidate c = coarse[i];
    BiasPoint start = c.bias;
    if (c.peak_f_ccw > c.peak_f_cw) start.phi_b = -start.phi_b;

    const auto objective = [&](const Eigen::VectorXd& x) {
      const BiasPoint b{x(0), {x(1), x(2), x(3)}};
      return -evaluate_bias(params, sector, b, search, search.refine_cutoff,
                            search.coarse_grid_points)
                  .peak_f_cw;
    };
    Eigen::VectorXd x0(4);
    x0 << start.phi_b, start.ng[0], start.ng[1], start.ng[2];
    SimplexOptions sopts;
    sopts.max_iterations = search.refine_iterations;
    sopts.initial_step = 0.04;
    sopts.x_tolerance = 1e-7;
    sopts.f_tolerance = 1e-10;
    const SimplexResult res = nelder_mead(objective, x0, sopts);
    refined[i] = evaluate_bias(
        params, sector, BiasPoint{res.x(0), {res.x(1), res.x(2), res.x(3)}},
        search, search.refine_cutoff, search.coarse_grid_points);
  });

  int best_idx = 0;
  for (int i = 1; i < n_refine; ++i) {
    if (refined[i].peak_f_cw > refined[best_idx].peak_f_cw) best_idx = i;
  }

  WorkingPointResult out;
  out.best = refined[best_idx].bias;
  out.trace = coarse;

  // Final metrics at the production cutoff, on a grid wide enough to bracket
  // the peak and its half-maximum crossings.
  SmatrixOptions fopts;
  fopts.cutoff = search.final_cutoff;
  const auto final_grid =
      linspace(search.f_min, search.f_max, search.final_grid_points);
  const ScatteringSpectrum spec =
      smatrix_spectrum(params, out.best, sector, final_grid, fopts);

  // A peak pinned to the band edge means the search budget did not isolate an
  // interior optimum; report the best found with the warning flag cleared.
  const auto edge_metrics = [&](const ScatteringSpectrum& sp) {
    CirculationMetrics m;
    for (std::size_t i = 0; i < sp.grid.size(); ++i) {
      const FidelitySet fi = fidelities(sp.matrices[i]);
      if (fi.f_cw >= m.f_cw) {
        m.f_cw = fi.f_cw;
        m.f_ccw = fi.f_ccw;
        m.r = fi.r;
        m.peak_frequency = sp.grid[i];
      }
    }
    m.il_db = -20.0 * std::log10(std::max(m.f_cw, 1e-300));
    m.is_db = -20.0 * std::log10(std::max(m.f_ccw, 1e-300));
    m.r_db = 20.0 * std::log10(std::max(m.r, 1e-300));
    m.bandwidth_defined = false;
    return m;
  };
  try {
    out.metrics = circulation_metrics(spec);
    out.interior_optimum = true;
  } catch (const EvaluationError&) {
    out.metrics = edge_metrics(spec);
    out.interior_optimum = false;
  }

  // Anticlockwise twin: flux reversal transposes S, swapping cw and ccw.
  out.best_ccw = out.best;
  out.best_ccw.phi_b = -out.best.phi_b;
  const ScatteringSpectrum spec_ccw =
      smatrix_spectrum(params, out.best_ccw, sector, final_grid, fopts);
  // Metrics of the ccw optimum reported in its circulating sense: reuse the
  // cw machinery on the transposed matrices.
  ScatteringSpectrum transposed = spec_ccw;
  for (auto& s : transposed.matrices) s = s.transpose().eval();
  try {
    out.metrics_ccw = circulation_metrics(transposed);
  } catch (const EvaluationError&) {
    out.metrics_ccw = edge_metrics(transposed);
  }
  return out;
}

}  // namespace triring
