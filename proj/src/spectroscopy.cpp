#include "triring/spectroscopy.hpp"

#include <algorithm>
#include <cmath>

#include "triring/eigensolver.hpp"
#include "triring/errors.hpp"
#include "triring/parallel.hpp"

namespace triring {

void SnrMap::validate() const {
  if (control.empty() || freq.empty()) {
    throw ParameterError("SNR map axes must be non-empty");
  }
  if (z.rows() != static_cast<Eigen::Index>(control.size()) ||
      z.cols() != static_cast<Eigen::Index>(freq.size())) {
    throw ParameterError("SNR map shape does not match its axes");
  }
  for (std::size_t i = 1; i < control.size(); ++i) {
    if (!(control[i] > control[i - 1])) {
      throw ParameterError("control axis must be strictly ascending");
    }
  }
  for (std::size_t i = 1; i < freq.size(); ++i) {
    if (!(freq[i] > freq[i - 1])) {
      throw ParameterError("frequency axis must be strictly ascending");
    }
  }
  if (!z.allFinite()) throw ParameterError("SNR map contains non-finite values");
}

SnrMap normalize_snr(const Eigen::MatrixXd& raw,
                     const std::vector<double>& control,
                     const std::vector<double>& freq,
                     const std::vector<int>& background_controls) {
  if (background_controls.size() < 2) {
    throw ParameterError("need at least 2 background samples per frequency");
  }
  for (int idx : background_controls) {
    if (idx < 0 || idx >= raw.rows()) {
      throw ParameterError("background control index out of range");
    }
  }
  SnrMap out;
  out.control = control;
  out.freq = freq;
  out.z.resize(raw.rows(), raw.cols());

  const double nb = static_cast<double>(background_controls.size());
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    double mean = 0.0;
    for (int idx : background_controls) mean += raw(idx, j);
    mean /= nb;
    double var = 0.0;
    for (int idx : background_controls) {
      const double d = raw(idx, j) - mean;
      var += d * d;
    }
    var /= (nb - 1.0);
    if (!(var > 0.0)) {
      throw EvaluationError("zero background variance at frequency index " +
                            std::to_string(j));
    }
    out.z.col(j) = (raw.col(j).array() - mean) / std::sqrt(var);
  }
  out.validate();
  return out;
}

std::vector<RidgePoint> extract_ridges(const SnrMap& map, double threshold,
                                       double min_separation_ghz) {
  if (!(threshold > 0.0)) throw ParameterError("threshold must be positive");
  map.validate();

  std::vector<RidgePoint> out;
  const int nf = static_cast<int>(map.freq.size());
  for (std::size_t row = 0; row < map.control.size(); ++row) {
    // Local maxima of |z| along the frequency axis.
    std::vector<int> peaks;
    for (int j = 0; j < nf; ++j) {
      const double v = std::abs(map.z(row, j));
      if (v < threshold) continue;
      const double left = j > 0 ? std::abs(map.z(row, j - 1)) : -1.0;
      const double right = j + 1 < nf ? std::abs(map.z(row, j + 1)) : -1.0;
      if (v >= left && v > right) peaks.push_back(j);
    }
    // Thin by separation, strongest first.
    std::stable_sort(peaks.begin(), peaks.end(), [&](int a, int b) {
      return std::abs(map.z(row, a)) > std::abs(map.z(row, b));
    });
    std::vector<int> kept;
    for (int j : peaks) {
      const bool clash = std::any_of(kept.begin(), kept.end(), [&](int k) {
        return std::abs(map.freq[j] - map.freq[k]) < min_separation_ghz;
      });
      if (!clash) kept.push_back(j);
    }
    std::sort(kept.begin(), kept.end());
    for (int j : kept) {
      out.push_back(
          {map.control[row], map.freq[j], std::abs(map.z(row, j))});
    }
  }
  return out;
}

std::vector<SpectrumLine> model_spectrum_map(
    const CircuitParams& params, const std::vector<Sector>& sectors,
    const FluxMap& flux_map, const std::array<double, 3>& ng_left,
    const std::array<double, 3>& ng_right,
    const std::vector<double>& control_grid, int m_transitions, int cutoff,
    int n_threads) {
  if (m_transitions < 1) throw ParameterError("need at least one transition");
  if (sectors.empty()) throw ParameterError("sector list is empty");
  if (flux_map.a == 0.0) throw ParameterError("flux map slope must be nonzero");

  const int nu = static_cast<int>(control_grid.size());
  const int ns = static_cast<int>(sectors.size());
  std::vector<std::vector<SpectrumLine>> rows(
      static_cast<std::size_t>(nu) * ns);

  parallel_for(nu * ns, n_threads, [&](int idx) {
    const int iu = idx / ns;
    const int is = idx % ns;
    const double u = control_grid[iu];
    BiasPoint bias;
    bias.phi_b = flux_map.phi(u);
    bias.ng = (flux_map.breakpoint && u >= *flux_map.breakpoint) ? ng_right
                                                                 : ng_left;
    const auto freqs = transition_frequencies(params, bias, sectors[is],
                                              m_transitions, cutoff);
    auto& row = rows[idx];
    row.reserve(freqs.size());
    for (int k = 0; k < static_cast<int>(freqs.size()); ++k) {
      row.push_back({u, sectors[is], k + 1, freqs[k]});
    }
  });

  std::vector<SpectrumLine> out;
  out.reserve(static_cast<std::size_t>(nu) * ns * m_transitions);
  for (const auto& row : rows) out.insert(out.end(), row.begin(), row.end());
  return out;
}

}  // namespace triring
