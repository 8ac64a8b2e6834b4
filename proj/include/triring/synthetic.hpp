#pragma once

#include <cstdint>
#include <vector>

#include "triring/classifier.hpp"
#include "triring/spectroscopy.hpp"

namespace triring {

// Markov sector-switching process with geometric dwell distributions.
struct SectorChainSpec {
  int k = 4;
  std::vector<double> mean_dwell;  // samples, one per sector, >= 1
  std::vector<double> initial;     // initial distribution, sums to 1
  std::uint64_t seed = 1;

  void validate() const;
};

// Label sequence of the switching process; on leaving a sector the chain
// jumps uniformly to one of the other sectors. Bit-reproducible under seed.
std::vector<int> simulate_sector_chain(const SectorChainSpec& spec,
                                       int length);

// Additive complex Gaussian measurement noise (per element, per quadrature).
struct NoiseSpec {
  double sigma = 0.0;

  void validate() const;
};

// Noisy scattering snapshots: sample t = S(label_t) + noise. Carries the true
// labels for oracle comparisons.
SectorTimeSeries synthesize_timeseries(
    const std::vector<int>& labels,
    const std::vector<Eigen::Matrix3cd>& sector_matrices,
    const NoiseSpec& noise, double tau_s, std::uint64_t seed);

// Synthetic spectroscopy image: standard-normal background plus Lorentzian
// ridges of the given amplitude centered on the model transition lines.
SnrMap synthesize_snr_map(const CircuitParams& params,
                          const std::vector<Sector>& sectors,
                          const FluxMap& flux_map,
                          const std::array<double, 3>& ng_left,
                          const std::array<double, 3>& ng_right,
                          const std::vector<double>& control_grid,
                          const std::vector<double>& freq_grid,
                          double ridge_amplitude, double linewidth_ghz,
                          int m_transitions, std::uint64_t seed,
                          int cutoff = 6, int n_threads = 1);

}  // namespace triring
