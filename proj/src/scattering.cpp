#include "triring/scattering.hpp"

#include <algorithm>
#include <cmath>

#include "triring/constants.hpp"
#include "triring/errors.hpp"
#include "triring/rng.hpp"
#include "triring/simplex.hpp"

namespace triring {

namespace {
using Cd = std::complex<double>;
}

FidelitySet fidelities(const Eigen::Matrix3cd& s) {
  FidelitySet out;
  out.f_cw = (std::abs(s(0, 1)) + std::abs(s(1, 2)) + std::abs(s(2, 0))) / 3.0;
  out.f_ccw = (std::abs(s(0, 2)) + std::abs(s(2, 1)) + std::abs(s(1, 0))) / 3.0;
  out.r = (std::abs(s(0, 0)) + std::abs(s(1, 1)) + std::abs(s(2, 2))) / 3.0;
  return out;
}

Eigen::MatrixXcd coupling_amplitudes(const EigenSolution& eigs,
                                     const ChargeBasis& basis) {
  if (eigs.n_states() < 2) {
    throw ParameterError("coupling amplitudes need at least two eigenstates");
  }
  const int n_exc = eigs.n_states() - 1;
  Eigen::MatrixXcd c(3, n_exc);
  const auto& ground = eigs.states.col(0);
  Eigen::VectorXcd weighted(basis.dim());
  for (int a = 0; a < 3; ++a) {
    for (int i = 0; i < basis.dim(); ++i) {
      weighted(i) = static_cast<double>(basis.charges_at(i)[a]) * ground(i);
    }
    for (int k = 1; k <= n_exc; ++k) {
      c(a, k - 1) = eigs.states.col(k).dot(weighted);  // <k|n_a|0>
    }
  }
  return c;
}

Eigen::Vector3d ground_charge_mean(const EigenSolution& eigs,
                                   const ChargeBasis& basis) {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  const auto& ground = eigs.states.col(0);
  for (int i = 0; i < basis.dim(); ++i) {
    const double p = std::norm(ground(i));
    const auto n = basis.charges_at(i);
    for (int a = 0; a < 3; ++a) out(a) += n[a] * p;
  }
  return out;
}

Eigen::Vector3d ground_charge_second_moment(const EigenSolution& eigs,
                                            const ChargeBasis& basis) {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  const auto& ground = eigs.states.col(0);
  for (int i = 0; i < basis.dim(); ++i) {
    const double p = std::norm(ground(i));
    const auto n = basis.charges_at(i);
    for (int a = 0; a < 3; ++a) out(a) += static_cast<double>(n[a]) * n[a] * p;
  }
  return out;
}

ChannelModel make_channel_model(const EigenSolution& eigs,
                                const ChargeBasis& basis, double kappa,
                                double f_min, double f_max,
                                double window_kappas) {
  if (!(kappa >= 0.0)) throw ParameterError("kappa must be >= 0");
  if (!(f_min <= f_max)) throw ParameterError("empty frequency window");
  const double lo = f_min - window_kappas * kappa;
  const double hi = f_max + window_kappas * kappa;

  const Eigen::MatrixXcd amp = coupling_amplitudes(eigs, basis);
  const int n_exc = eigs.n_states() - 1;
  const double top = eigs.energies(eigs.n_states() - 1) - eigs.energies(0);
  if (top < hi) {
    throw TruncationError(
        "retained states end at " + std::to_string(top) +
        " GHz, below the requested window top " + std::to_string(hi) + " GHz");
  }

  std::vector<int> keep;
  for (int k = 1; k <= n_exc; ++k) {
    const double de = eigs.energies(k) - eigs.energies(0);
    if (de >= lo && de <= hi) keep.push_back(k);
  }

  ChannelModel model;
  const int n_keep = static_cast<int>(keep.size());
  model.transitions.resize(n_keep);
  model.c.resize(3, n_keep);
  for (int i = 0; i < n_keep; ++i) {
    model.transitions(i) = eigs.energies(keep[i]) - eigs.energies(0);
    model.c.col(i) = std::sqrt(kappa) * amp.col(keep[i] - 1);
  }
  model.h_eff = model.transitions.asDiagonal();
  model.h_eff -= Cd(0.0, 0.5) * (model.c.adjoint() * model.c);
  return model;
}

Eigen::Matrix3cd smatrix_at(const ChannelModel& model, double f) {
  const int k = static_cast<int>(model.transitions.size());
  if (k == 0) return Eigen::Matrix3cd::Identity();
  Eigen::MatrixXcd m = -model.h_eff;
  m.diagonal().array() += Cd(f, 0.0);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  const Eigen::MatrixXcd x = lu.solve(model.c.adjoint());
  if (!x.allFinite()) {
    throw EvaluationError("singular scattering solve at f = " +
                          std::to_string(f) + " GHz");
  }
  return Eigen::Matrix3cd::Identity() - Cd(0.0, 1.0) * (model.c * x);
}

namespace {

// Number of eigenstates needed so the retained-state window (plus the
// widening used by convergence checks) is covered.
EigenSolution solve_for_window(const CircuitParams& params,
                               const BiasPoint& bias, Sector sector,
                               const ChargeBasis& basis,
                               const SmatrixOptions& options, double f_max) {
  const double hi = f_max + options.window_kappas * params.kappa;
  int n = std::min(options.initial_states, basis.dim());
  EigensolveOptions eopts;
  for (;;) {
    EigenSolution sol = solve_ring(params, bias, sector, basis, n, eopts);
    const double top = sol.energies(sol.n_states() - 1) - sol.energies(0);
    if (top >= hi) return sol;
    if (n >= options.max_states || n >= basis.dim()) {
      throw TruncationError(
          "cannot cover scattering window: " + std::to_string(n) +
          " states reach only " + std::to_string(top) + " GHz");
    }
    n = std::min({options.max_states, basis.dim(), n + n / 2 + 4});
  }
}

}  // namespace

ChannelModel channel_model_for(const CircuitParams& params,
                               const BiasPoint& bias, Sector sector,
                               double f_min, double f_max,
                               const SmatrixOptions& options) {
  const ChargeBasis basis(options.cutoff);
  const EigenSolution sol =
      solve_for_window(params, bias, sector, basis, options, f_max);
  return make_channel_model(sol, basis, params.kappa, f_min, f_max,
                            options.window_kappas);
}

ScatteringMatrix smatrix(const CircuitParams& params, const BiasPoint& bias,
                         Sector sector, double f,
                         const SmatrixOptions& options) {
  const ChannelModel model = channel_model_for(params, bias, sector, f, f,
                                               options);
  return {f, smatrix_at(model, f)};
}

ScatteringSpectrum smatrix_spectrum(const CircuitParams& params,
                                    const BiasPoint& bias, Sector sector,
                                    const std::vector<double>& grid,
                                    const SmatrixOptions& options) {
  if (grid.empty()) throw ParameterError("frequency grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw ParameterError("frequency grid must be strictly ascending");
    }
  }
  const ChargeBasis basis(options.cutoff);
  const EigenSolution sol =
      solve_for_window(params, bias, sector, basis, options, grid.back());
  const ChannelModel model =
      make_channel_model(sol, basis, params.kappa, grid.front(), grid.back(),
                         options.window_kappas);
  ScatteringSpectrum out;
  out.grid = grid;
  out.params = params;
  out.bias = bias;
  out.sector = sector;
  out.matrices.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      out.matrices[i] = smatrix_at(model, grid[i]);
    } catch (const EvaluationError& e) {
      throw EvaluationError("grid index " + std::to_string(i) + ": " +
                            e.what());
    }
  }
  return out;
}

namespace {

double interp_crossing(double x0, double y0, double x1, double y1,
                       double target) {
  if (y1 == y0) return x0;
  return x0 + (target - y0) * (x1 - x0) / (y1 - y0);
}

}  // namespace

CirculationMetrics circulation_metrics(const ScatteringSpectrum& spectrum) {
  const int n = static_cast<int>(spectrum.grid.size());
  if (n < 3) throw ParameterError("spectrum too short for peak metrics");

  std::vector<double> fcw(n);
  for (int i = 0; i < n; ++i) fcw[i] = fidelities(spectrum.matrices[i]).f_cw;

  int peak = 0;
  for (int i = 1; i < n; ++i) {
    if (fcw[i] > fcw[peak]) peak = i;
  }
  if (peak == 0 || peak == n - 1) {
    throw EvaluationError("f_cw peak lies on the grid edge at " +
                          std::to_string(spectrum.grid[peak]) + " GHz");
  }

  const FidelitySet at_peak = fidelities(spectrum.matrices[peak]);
  CirculationMetrics m;
  m.f_cw = at_peak.f_cw;
  m.f_ccw = at_peak.f_ccw;
  m.r = at_peak.r;
  m.peak_frequency = spectrum.grid[peak];
  m.il_db = -20.0 * std::log10(std::max(at_peak.f_cw, 1e-300));
  m.is_db = -20.0 * std::log10(std::max(at_peak.f_ccw, 1e-300));
  m.r_db = 20.0 * std::log10(std::max(at_peak.r, 1e-300));

  // FWHM of the f_cw(f) peak by linear interpolation at half maximum.
  const double half = at_peak.f_cw / 2.0;
  int jl = peak;
  while (jl > 0 && fcw[jl] > half) --jl;
  int jr = peak;
  while (jr < n - 1 && fcw[jr] > half) ++jr;
  if (fcw[jl] <= half && fcw[jr] <= half) {
    const double left =
        interp_crossing(spectrum.grid[jl], fcw[jl], spectrum.grid[jl + 1],
                        fcw[jl + 1], half);
    const double right =
        interp_crossing(spectrum.grid[jr - 1], fcw[jr - 1], spectrum.grid[jr],
                        fcw[jr], half);
    m.bandwidth_fwhm = right - left;
    m.bandwidth_defined = true;
  }
  return m;
}

double saturation_power_dbm(double f_ghz, double kappa_ghz,
                            double coupling_sq) {
  if (!(f_ghz > 0.0) || !(kappa_ghz > 0.0) || !(coupling_sq > 0.0)) {
    throw ParameterError("saturation power inputs must be positive");
  }
  const double watts = constants::planck_h * (f_ghz * 1e9) *
                       (kappa_ghz * 1e9) * coupling_sq;
  return 10.0 * std::log10(watts / 1e-3);
}

namespace {

// Haar-random unitary via QR of a complex Ginibre matrix with the standard
// phase correction.
Eigen::Matrix3cd haar_unitary(Rng& rng) {
  Eigen::Matrix3cd z;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) z(i, j) = rng.complex_normal();
  }
  Eigen::HouseholderQR<Eigen::Matrix3cd> qr(z);
  Eigen::Matrix3cd q = qr.householderQ();
  const Eigen::Matrix3cd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < 3; ++j) {
    const Cd d = r(j, j);
    q.col(j) *= std::abs(d) > 0 ? d / std::abs(d) : Cd(1.0, 0.0);
  }
  return q;
}

}  // namespace

double trs_fidelity_bound_check(int samples, std::uint64_t seed) {
  if (samples < 1) throw ParameterError("samples must be >= 1");
  Rng rng(seed);
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Eigen::Matrix3cd u = haar_unitary(rng);
    const Eigen::Matrix3cd s = u.transpose() * u;  // symmetric unitary
    const FidelitySet f = fidelities(s);
    best = std::max(best, std::max(f.f_cw, f.f_ccw));
  }
  return best;
}

double trs_fidelity_bound_maximize(int restarts, std::uint64_t seed) {
  // Chart over U(3): 18 reals -> Ginibre matrix -> QR -> unitary U -> U^T U.
  const auto objective = [](const Eigen::VectorXd& x) {
    Eigen::Matrix3cd z;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        z(i, j) = Cd(x(2 * (3 * i + j)), x(2 * (3 * i + j) + 1));
      }
    }
    if (!z.allFinite() || z.norm() < 1e-8) return 1.0;
    Eigen::HouseholderQR<Eigen::Matrix3cd> qr(z);
    Eigen::Matrix3cd q = qr.householderQ();
    const Eigen::Matrix3cd s = q.transpose() * q;
    const FidelitySet f = fidelities(s);
    return -std::max(f.f_cw, f.f_ccw);
  };

  Rng rng(seed);
  double best = 0.0;
  SimplexOptions opts;
  opts.max_iterations = 4000;
  opts.x_tolerance = 1e-10;
  opts.f_tolerance = 1e-12;
  opts.initial_step = 0.5;
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd x0(18);
    for (int i = 0; i < 18; ++i) x0(i) = rng.normal();
    const SimplexResult res = nelder_mead(objective, x0, opts);
    best = std::max(best, -res.f_min);
  }
  return best;
}

}  // namespace triring
