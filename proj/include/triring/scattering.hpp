#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "triring/eigensolver.hpp"

namespace triring {

// 3x3 scattering snapshot at one drive frequency. Element (a, b) is the
// transmission amplitude from input port a to output port b (ports are
// 0-indexed in code; S12 in formulas is s(0, 1)).
struct ScatteringMatrix {
  double f = 0.0;  // GHz
  Eigen::Matrix3cd s;
};

struct ScatteringSpectrum {
  std::vector<double> grid;  // GHz, strictly ascending
  std::vector<Eigen::Matrix3cd> matrices;
  CircuitParams params;
  BiasPoint bias{};
  Sector sector = Sector::eee;
};

// Eq.-style circulation averages: f_cw over (S12, S23, S31), f_ccw over
// (S13, S32, S21), r over the diagonal.
struct FidelitySet {
  double f_cw = 0.0;
  double f_ccw = 0.0;
  double r = 0.0;
};

FidelitySet fidelities(const Eigen::Matrix3cd& s);

// Retained single-excitation scattering channels: transition energies from
// the ground state and port coupling rows C_{a,k} = sqrt(kappa) <k|n_a|0>.
struct ChannelModel {
  Eigen::VectorXd transitions;  // GHz, size K
  Eigen::MatrixXcd c;           // 3 x K
  Eigen::MatrixXcd h_eff;       // K x K, diag(transitions) - (i/2) C^dag C
};

struct SmatrixOptions {
  int cutoff = 8;
  // Retained-state window beyond [f_min, f_max] in units of kappa.
  double window_kappas = 10.0;
  // Initial number of excited states requested from the eigensolver; grows
  // automatically until the window is covered.
  int initial_states = 18;
  int max_states = 96;
};

// Charge-operator matrix elements <k|n_a|0> for every retained excited state
// k >= 1 (rows: ports/islands a = 0..2).
Eigen::MatrixXcd coupling_amplitudes(const EigenSolution& eigs,
                                     const ChargeBasis& basis);

// Ground-state moments <0|n_a|0> and <0|n_a^2|0> (completeness checks).
Eigen::Vector3d ground_charge_mean(const EigenSolution& eigs,
                                   const ChargeBasis& basis);
Eigen::Vector3d ground_charge_second_moment(const EigenSolution& eigs,
                                            const ChargeBasis& basis);

// Builds the channel model for a frequency window [f_min, f_max] from an
// eigensolution. Throws TruncationError if the solution's states do not cover
// the window.
ChannelModel make_channel_model(const EigenSolution& eigs,
                                const ChargeBasis& basis, double kappa,
                                double f_min, double f_max,
                                double window_kappas = 10.0);

// Solves the ring and assembles the channel model for the window in one call
// (the hot path for bias sweeps: one eigensolve, any number of frequencies).
ChannelModel channel_model_for(const CircuitParams& params,
                               const BiasPoint& bias, Sector sector,
                               double f_min, double f_max,
                               const SmatrixOptions& options = {});

// S(f) = I - i C (f I - H_eff)^{-1} C^dag; exactly unitary for real f.
Eigen::Matrix3cd smatrix_at(const ChannelModel& model, double f);

ScatteringMatrix smatrix(const CircuitParams& params, const BiasPoint& bias,
                         Sector sector, double f,
                         const SmatrixOptions& options = {});

ScatteringSpectrum smatrix_spectrum(const CircuitParams& params,
                                    const BiasPoint& bias, Sector sector,
                                    const std::vector<double>& grid,
                                    const SmatrixOptions& options = {});

// Peak circulation figures of a computed spectrum. IL/IS are reported as
// positive decibel magnitudes, R signed; all evaluated at the f_cw peak.
struct CirculationMetrics {
  double f_cw = 0.0;
  double f_ccw = 0.0;
  double r = 0.0;
  double il_db = 0.0;
  double is_db = 0.0;
  double r_db = 0.0;
  double peak_frequency = 0.0;   // GHz
  double bandwidth_fwhm = 0.0;   // GHz, valid when bandwidth_defined
  bool bandwidth_defined = false;
};

// Throws EvaluationError when the f_cw peak sits on the grid edge. A
// half-maximum crossing that is not bracketed by the grid leaves
// bandwidth_defined = false.
CirculationMetrics circulation_metrics(const ScatteringSpectrum& spectrum);

// Single-photon saturation power estimate h f kappa |<e|n|g>|^2 in dBm.
double saturation_power_dbm(double f_ghz, double kappa_ghz,
                            double coupling_sq);

// Samples random symmetric unitary 3x3 matrices (S = U^T U with U Haar) and
// returns the largest max(f_cw, f_ccw) observed; the time-reversal-symmetric
// bound 2/3 must not be exceeded.
double trs_fidelity_bound_check(int samples, std::uint64_t seed);

// Independent oracle: direct numerical maximization of the circulation
// fidelity over parameterized symmetric unitaries. Approaches 2/3.
double trs_fidelity_bound_maximize(int restarts, std::uint64_t seed);

}  // namespace triring
