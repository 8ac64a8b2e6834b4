#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "triring/circuit.hpp"

namespace triring {

// Background-normalized spectroscopy image: rows follow the flux-bias control
// axis, columns the frequency axis.
struct SnrMap {
  std::vector<double> control;  // ascending, arbitrary units
  std::vector<double> freq;     // ascending, GHz
  Eigen::MatrixXd z;            // control x freq

  void validate() const;
};

// Per-frequency z-score against the statistics of the listed off-resonant
// control rows. Throws EvaluationError for a zero-variance background column.
SnrMap normalize_snr(const Eigen::MatrixXd& raw,
                     const std::vector<double>& control,
                     const std::vector<double>& freq,
                     const std::vector<int>& background_controls);

struct RidgePoint {
  double control = 0.0;  // control value (not index)
  double freq = 0.0;     // GHz
  double weight = 0.0;   // |z| at the ridge point
};

// Per control row: local maxima of |z| above `threshold`, thinned so that
// retained peaks are at least `min_separation_ghz` apart (larger |z| wins).
std::vector<RidgePoint> extract_ridges(const SnrMap& map, double threshold,
                                       double min_separation_ghz);

// Affine map from the flux-bias control parameter to phi_b, with an optional
// breakpoint splitting the control axis into two charge-bias configurations.
struct FluxMap {
  double a = 1.0;  // radians per control unit
  double b = 0.0;  // radians
  std::optional<double> breakpoint;

  double phi(double control) const { return a * control + b; }
};

// One predicted transition line sample.
struct SpectrumLine {
  double control = 0.0;
  Sector sector = Sector::eee;
  int transition = 1;  // k in f_0k
  double freq = 0.0;   // GHz
};

// Model transition lines f_01..f_0m for each control value and sector, using
// the left/right offset charges on the two sides of the breakpoint (right
// configuration applies at control >= breakpoint).
std::vector<SpectrumLine> model_spectrum_map(
    const CircuitParams& params, const std::vector<Sector>& sectors,
    const FluxMap& flux_map, const std::array<double, 3>& ng_left,
    const std::array<double, 3>& ng_right,
    const std::vector<double>& control_grid, int m_transitions, int cutoff = 8,
    int n_threads = 1);

}  // namespace triring
