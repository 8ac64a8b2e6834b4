#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "triring/spectroscopy.hpp"

namespace triring {

// Box bounds for one fit parameter.
struct FitBound {
  double lo = 0.0;
  double hi = 0.0;
};

// Spectroscopy fit: circuit energies, flux map and per-side offset charges
// against extracted ridge points. The capacitor ratios cg:cc:ci of `init` are
// held fixed; the fitted charging scale rescales their total.
struct FitProblem {
  std::vector<RidgePoint> points;
  CircuitParams init;
  FluxMap flux_guess;
  std::array<double, 3> ng_left_init{};
  std::array<double, 3> ng_right_init{};
  std::vector<Sector> sectors{Sector::eee, Sector::eoo, Sector::oeo,
                              Sector::ooe};

  // Bounds. Energies in GHz, flux map in radians (ng is fitted on [0,1) with
  // period-1 wrapping and needs no bounds).
  FitBound ej_bound{5.0, 25.0};
  FitBound ec_bound{1.0, 6.0};
  FitBound a_bound{0.1, 10.0};
  FitBound b_bound{-6.3, 6.3};

  int m_transitions = 3;
  int cutoff = 4;
  int restarts = 2;
  int max_iterations = 2500;
  std::uint64_t seed = 1;
};

struct FitResult {
  std::array<double, 3> ej{};
  double ec_sigma = 0.0;  // GHz
  CircuitParams params;   // init with fitted ej and rescaled capacitances
  FluxMap flux;
  std::array<double, 3> ng_left{};
  std::array<double, 3> ng_right{};
  double residual_rms = 0.0;  // GHz
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

// Weighted Chamfer objective: for each ridge point, the squared distance to
// the nearest predicted line at that control value, averaged with the ridge
// weights. Used by fit_parameters and exposed for diagnostics.
double fit_objective(const FitProblem& problem,
                     const std::array<double, 3>& ej, double ec_sigma,
                     const FluxMap& flux, const std::array<double, 3>& ng_left,
                     const std::array<double, 3>& ng_right, int n_threads = 1);

// Derivative-free minimization (Nelder-Mead with restarts) of the Chamfer
// objective over 12 parameters: E_J1..3, E_C_Sigma, flux-map slope/offset and
// the two offset-charge triples. Deterministic for a fixed seed.
FitResult fit_parameters(const FitProblem& problem, int n_threads = 1);

}  // namespace triring
