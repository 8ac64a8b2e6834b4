#include "triring/synthetic.hpp"

#include <cmath>

#include "triring/errors.hpp"
#include "triring/rng.hpp"

namespace triring {

void SectorChainSpec::validate() const {
  if (k < 1) throw ParameterError("sector count must be >= 1");
  if (static_cast<int>(mean_dwell.size()) != k) {
    throw ParameterError("need one mean dwell per sector");
  }
  for (double d : mean_dwell) {
    if (!(d >= 1.0)) throw ParameterError("mean dwells must be >= 1 sample");
  }
  if (!initial.empty()) {
    if (static_cast<int>(initial.size()) != k) {
      throw ParameterError("initial distribution size mismatch");
    }
    double sum = 0.0;
    for (double p : initial) {
      if (!(p >= 0.0)) throw ParameterError("initial probabilities must be >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ParameterError("initial distribution must sum to 1");
    }
  }
}

std::vector<int> simulate_sector_chain(const SectorChainSpec& spec,
                                       int length) {
  spec.validate();
  if (length < 1) throw ParameterError("length must be >= 1");
  Rng rng(spec.seed);

  int state = 0;
  if (!spec.initial.empty()) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (int s = 0; s < spec.k; ++s) {
      acc += spec.initial[s];
      if (u < acc) {
        state = s;
        break;
      }
    }
  } else if (spec.k > 1) {
    state = static_cast<int>(rng.uniform_int(spec.k));
  }

  std::vector<int> labels(length);
  for (int t = 0; t < length; ++t) {
    labels[t] = state;
    // Geometric dwell: leave with probability 1/mean at each step.
    if (spec.k > 1 && rng.uniform() < 1.0 / spec.mean_dwell[state]) {
      const int hop = static_cast<int>(rng.uniform_int(spec.k - 1));
      state = hop >= state ? hop + 1 : hop;
    }
  }
  return labels;
}

void NoiseSpec::validate() const {
  if (!(sigma >= 0.0)) throw ParameterError("noise sigma must be >= 0");
}

SectorTimeSeries synthesize_timeseries(
    const std::vector<int>& labels,
    const std::vector<Eigen::Matrix3cd>& sector_matrices,
    const NoiseSpec& noise, double tau_s, std::uint64_t seed) {
  noise.validate();
  if (labels.empty()) throw ParameterError("label sequence is empty");
  if (!(tau_s > 0.0)) throw ParameterError("tau_s must be positive");
  for (int lbl : labels) {
    if (lbl < 0 || lbl >= static_cast<int>(sector_matrices.size())) {
      throw ParameterError("label without a sector matrix");
    }
  }
  Rng rng(seed);
  SectorTimeSeries out;
  out.tau_s = tau_s;
  out.samples.resize(labels.size());
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const Eigen::Matrix3cd& s = sector_matrices[labels[t]];
    for (int e = 0; e < 9; ++e) {
      out.samples[t][e] =
          s(e / 3, e % 3) + noise.sigma * rng.complex_normal();
    }
  }
  out.true_labels = labels;
  return out;
}

SnrMap synthesize_snr_map(const CircuitParams& params,
                          const std::vector<Sector>& sectors,
                          const FluxMap& flux_map,
                          const std::array<double, 3>& ng_left,
                          const std::array<double, 3>& ng_right,
                          const std::vector<double>& control_grid,
                          const std::vector<double>& freq_grid,
                          double ridge_amplitude, double linewidth_ghz,
                          int m_transitions, std::uint64_t seed, int cutoff,
                          int n_threads) {
  if (control_grid.empty() || freq_grid.empty()) {
    throw ParameterError("grids must be non-empty");
  }
  if (!(ridge_amplitude >= 0.0) || !(linewidth_ghz > 0.0)) {
    throw ParameterError("ridge amplitude must be >= 0 and linewidth > 0");
  }

  SnrMap map;
  map.control = control_grid;
  map.freq = freq_grid;
  map.z.resize(control_grid.size(), freq_grid.size());

  Rng rng(seed);
  for (Eigen::Index i = 0; i < map.z.rows(); ++i) {
    for (Eigen::Index j = 0; j < map.z.cols(); ++j) map.z(i, j) = rng.normal();
  }

  if (ridge_amplitude > 0.0) {
    const auto lines =
        model_spectrum_map(params, sectors, flux_map, ng_left, ng_right,
                           control_grid, m_transitions, cutoff, n_threads);
    const double hw = linewidth_ghz / 2.0;
    std::size_t li = 0;
    for (std::size_t iu = 0; iu < control_grid.size(); ++iu) {
      for (; li < lines.size() && lines[li].control == control_grid[iu]; ++li) {
        const double f0 = lines[li].freq;
        for (std::size_t j = 0; j < freq_grid.size(); ++j) {
          const double d = freq_grid[j] - f0;
          map.z(iu, j) += ridge_amplitude * hw * hw / (d * d + hw * hw);
        }
      }
    }
  }
  map.validate();
  return map;
}

}  // namespace triring
