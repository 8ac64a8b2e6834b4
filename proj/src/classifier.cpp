#include "triring/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "triring/errors.hpp"
#include "triring/parallel.hpp"
#include "triring/rng.hpp"

namespace triring {

void SectorTimeSeries::validate() const {
  if (!(tau_s > 0.0)) throw ParameterError("tau_s must be positive");
  if (samples.empty()) throw ParameterError("time series is empty");
  if (true_labels && true_labels->size() != samples.size()) {
    throw ParameterError("true label count does not match sample count");
  }
}

FeatureMatrix featurize(const SectorTimeSeries& series) {
  series.validate();
  const int n = static_cast<int>(series.samples.size());
  FeatureMatrix out;
  out.x.resize(n, 18);
  for (int i = 0; i < n; ++i) {
    for (int e = 0; e < 9; ++e) {
      out.x(i, 2 * e) = series.samples[i][e].real();
      out.x(i, 2 * e + 1) = series.samples[i][e].imag();
    }
  }
  out.mean = out.x.colwise().mean();
  out.scale.resize(18);
  for (int d = 0; d < 18; ++d) {
    const double var =
        (out.x.col(d).array() - out.mean(d)).square().sum() / n;
    if (var > 0.0) {
      out.scale(d) = std::sqrt(var);
    } else {
      out.scale(d) = 1.0;  // retained unscaled
      out.zero_variance_dims.push_back(d);
    }
    out.x.col(d) = (out.x.col(d).array() - out.mean(d)) / out.scale(d);
  }
  return out;
}

namespace {

struct LloydResult {
  Eigen::MatrixXd centroids;  // k x 18
  std::vector<int> labels;
  double inertia = 0.0;
};

int nearest_centroid(const Eigen::MatrixXd& centroids,
                     const Eigen::RowVectorXd& p, double* dist_sq) {
  int best = 0;
  double bd = (centroids.row(0) - p).squaredNorm();
  for (int c = 1; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c) - p).squaredNorm();
    if (d < bd) {
      bd = d;
      best = c;
    }
  }
  if (dist_sq) *dist_sq = bd;
  return best;
}

LloydResult lloyd_run(const Eigen::MatrixXd& x, int k, std::uint64_t seed) {
  const int n = static_cast<int>(x.rows());
  Rng rng(seed);

  // Greedy farthest-point initialization from a seeded first pick.
  Eigen::MatrixXd centroids(k, x.cols());
  centroids.row(0) = x.row(static_cast<int>(rng.uniform_int(n)));
  Eigen::VectorXd min_d =
      (x.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    int far_idx = 0;
    min_d.maxCoeff(&far_idx);
    centroids.row(c) = x.row(far_idx);
    min_d = min_d.cwiseMin(
        (x.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }

  LloydResult res;
  res.labels.assign(n, 0);
  double prev_inertia = std::numeric_limits<double>::max();
  for (int iter = 0; iter < 300; ++iter) {
    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      double d = 0.0;
      res.labels[i] = nearest_centroid(centroids, x.row(i), &d);
      inertia += d;
    }
    // Update step; an emptied cluster is reseeded at the worst-fit sample.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(res.labels[i]) += x.row(i);
      ++counts[res.labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centroids.row(c) = sums.row(c) / counts[c];
      } else {
        int worst = 0;
        double worst_d = -1.0;
        for (int i = 0; i < n; ++i) {
          double d = 0.0;
          nearest_centroid(centroids, x.row(i), &d);
          if (d > worst_d) {
            worst_d = d;
            worst = i;
          }
        }
        centroids.row(c) = x.row(worst);
      }
    }
    res.inertia = inertia;
    if (prev_inertia < std::numeric_limits<double>::max()) {
      const double rel = std::abs(prev_inertia - inertia) /
                         std::max(prev_inertia, 1e-300);
      if (rel < 1e-8) break;
    }
    prev_inertia = inertia;
  }
  // Final assignment consistent with the returned centroids.
  res.inertia = 0.0;
  for (int i = 0; i < n; ++i) {
    double d = 0.0;
    res.labels[i] = nearest_centroid(centroids, x.row(i), &d);
    res.inertia += d;
  }
  res.centroids = centroids;
  return res;
}

}  // namespace

SectorClassification kmeans_classify(const FeatureMatrix& features,
                                     const SectorTimeSeries& series, int k,
                                     std::uint64_t seed, int restarts,
                                     int n_threads) {
  const int n = static_cast<int>(features.x.rows());
  if (k < 1) throw ParameterError("k must be >= 1");
  if (n < k) throw ParameterError("need at least k samples");
  restarts = std::max(1, restarts);

  std::vector<LloydResult> runs(restarts);
  parallel_for(restarts, n_threads, [&](int r) {
    runs[r] = lloyd_run(features.x, k, derive_seed(seed, r));
  });
  int winner = 0;
  for (int r = 1; r < restarts; ++r) {
    if (runs[r].inertia < runs[winner].inertia) winner = r;
  }
  const LloydResult& best = runs[winner];

  SectorClassification out;
  out.k = k;
  out.labels = best.labels;
  out.inertia = best.inertia;
  out.seed = seed;
  out.counts.assign(k, 0);
  for (int lbl : best.labels) ++out.counts[lbl];

  // Cluster statistics in original units.
  out.means.resize(k);
  out.covariances.assign(k, Eigen::MatrixXd::Zero(18, 18));
  Eigen::MatrixXd raw(n, 18);
  for (int d = 0; d < 18; ++d) {
    raw.col(d) = features.x.col(d) * features.scale(d);
    raw.col(d).array() += features.mean(d);
  }
  for (int c = 0; c < k; ++c) {
    Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(18);
    for (int i = 0; i < n; ++i) {
      if (best.labels[i] == c) mu += raw.row(i);
    }
    if (out.counts[c] > 0) mu /= out.counts[c];
    for (int e = 0; e < 9; ++e) {
      out.means[c][e] = {mu(2 * e), mu(2 * e + 1)};
    }
    if (out.counts[c] > 1) {
      Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(18, 18);
      for (int i = 0; i < n; ++i) {
        if (best.labels[i] != c) continue;
        const Eigen::RowVectorXd d = raw.row(i) - mu;
        cov += d.transpose() * d;
      }
      out.covariances[c] = cov / (out.counts[c] - 1);
    }
  }
  return out;
}

DwellStatistics dwell_statistics(const std::vector<int>& labels, double tau_s,
                                 int k) {
  if (labels.empty()) throw ParameterError("label sequence is empty");
  if (!(tau_s > 0.0)) throw ParameterError("tau_s must be positive");
  for (int lbl : labels) {
    if (lbl < 0 || lbl >= k) throw ParameterError("label out of range");
  }

  DwellStatistics out;
  out.tau_s = tau_s;
  out.dwells.resize(k);
  out.transitions = Eigen::MatrixXi::Zero(k, k);

  int run_start = 0;
  for (std::size_t i = 1; i <= labels.size(); ++i) {
    if (i == labels.size() || labels[i] != labels[run_start]) {
      out.dwells[labels[run_start]].push_back(static_cast<int>(i) - run_start);
      if (i < labels.size()) {
        out.transitions(labels[run_start], labels[i]) += 1;
      }
      run_start = static_cast<int>(i);
    }
  }

  out.mean_dwell_samples.assign(k, 0.0);
  out.mean_dwell_seconds.assign(k, 0.0);
  for (int c = 0; c < k; ++c) {
    if (out.dwells[c].empty()) continue;
    double sum = 0.0;
    for (int d : out.dwells[c]) sum += d;
    out.mean_dwell_samples[c] = sum / out.dwells[c].size();
    out.mean_dwell_seconds[c] = out.mean_dwell_samples[c] * tau_s;
  }
  return out;
}

SectorAverage sector_average_smatrix(const SectorTimeSeries& series,
                                     const std::vector<int>& labels,
                                     int cluster) {
  series.validate();
  if (labels.size() != series.samples.size()) {
    throw ParameterError("label count does not match sample count");
  }
  SectorAverage out;
  out.mean.setZero();
  out.standard_error.setZero();

  std::array<std::complex<double>, 9> sum{};
  int count = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != cluster) continue;
    for (int e = 0; e < 9; ++e) sum[e] += series.samples[i][e];
    ++count;
  }
  if (count == 0) throw EvaluationError("empty cluster");
  out.count = count;

  std::array<std::complex<double>, 9> mean{};
  for (int e = 0; e < 9; ++e) mean[e] = sum[e] / static_cast<double>(count);

  std::array<double, 9> var{};
  if (count > 1) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] != cluster) continue;
      for (int e = 0; e < 9; ++e) {
        var[e] += std::norm(series.samples[i][e] - mean[e]);
      }
    }
    for (int e = 0; e < 9; ++e) var[e] /= (count - 1);
  }
  for (int e = 0; e < 9; ++e) {
    out.mean(e / 3, e % 3) = mean[e];
    // Standard error of the complex mean; zero-denominator case (a single
    // sample) is reported as zero and flagged by count == 1.
    out.standard_error(e / 3, e % 3) =
        count > 1 ? std::sqrt(var[e] / count) : 0.0;
  }
  return out;
}

CirculatingSectorId identify_circulating_sector(
    const std::vector<ScatteringSpectrum>& per_sector_spectra) {
  if (per_sector_spectra.empty()) {
    throw ParameterError("need at least one sector spectrum");
  }
  CirculatingSectorId out;
  for (int s = 0; s < static_cast<int>(per_sector_spectra.size()); ++s) {
    const auto& spec = per_sector_spectra[s];
    for (const auto& m : spec.matrices) {
      const FidelitySet f = fidelities(m);
      if (f.f_cw > out.peak_fidelity) {
        out.peak_fidelity = f.f_cw;
        out.sector_index = s;
        out.clockwise = true;
      }
      if (f.f_ccw > out.peak_fidelity) {
        out.peak_fidelity = f.f_ccw;
        out.sector_index = s;
        out.clockwise = false;
      }
    }
  }
  out.exceeds_trs_bound = out.peak_fidelity > 2.0 / 3.0;
  return out;
}

}  // namespace triring
