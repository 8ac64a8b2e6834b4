#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "triring/scattering.hpp"

namespace triring {

// Time series of full 3x3 complex scattering snapshots. The 9 elements are
// stored row-major: S11, S12, S13, S21, ..., S33.
struct SectorTimeSeries {
  double tau_s = 0.0;  // sample period, seconds
  std::vector<std::array<std::complex<double>, 9>> samples;
  std::optional<std::vector<int>> true_labels;  // synthetic data only

  void validate() const;
};

// Real/imaginary interleaved 18-dimensional features, z-scored per dimension.
struct FeatureMatrix {
  Eigen::MatrixXd x;      // n_samples x 18
  Eigen::VectorXd mean;   // 18, original units
  Eigen::VectorXd scale;  // 18, std used for scaling (1 for flagged dims)
  std::vector<int> zero_variance_dims;
};

FeatureMatrix featurize(const SectorTimeSeries& series);

struct SectorClassification {
  int k = 0;
  std::vector<int> labels;
  // Per-cluster statistics in original (unscaled) units.
  std::vector<std::array<std::complex<double>, 9>> means;
  std::vector<Eigen::MatrixXd> covariances;  // 18x18, symmetric PSD
  std::vector<int> counts;
  double inertia = 0.0;  // in feature space
  std::uint64_t seed = 0;
};

// K-means with greedy farthest-point initialization and Lloyd iterations to a
// relative inertia change below 1e-8; best of `restarts` runs (ties broken by
// restart order). An emptied cluster is reseeded at the worst-fit sample.
// Deterministic for a fixed seed; restarts evaluate in parallel.
SectorClassification kmeans_classify(const FeatureMatrix& features,
                                     const SectorTimeSeries& series, int k,
                                     std::uint64_t seed, int restarts = 8,
                                     int n_threads = 1);

struct DwellStatistics {
  // Run lengths per cluster, in samples, in order of appearance.
  std::vector<std::vector<int>> dwells;
  std::vector<double> mean_dwell_samples;
  std::vector<double> mean_dwell_seconds;
  Eigen::MatrixXi transitions;  // (from, to) counts for adjacent unequal labels
  double tau_s = 0.0;
};

DwellStatistics dwell_statistics(const std::vector<int>& labels, double tau_s,
                                 int k);

struct SectorAverage {
  Eigen::Matrix3cd mean;
  Eigen::Matrix3d standard_error;  // per element, complex-magnitude SE
  int count = 0;
};

// Elementwise mean and standard error over the samples assigned to `cluster`.
// Throws EvaluationError for an empty cluster.
SectorAverage sector_average_smatrix(const SectorTimeSeries& series,
                                     const std::vector<int>& labels,
                                     int cluster);

struct CirculatingSectorId {
  int sector_index = -1;
  bool clockwise = true;
  double peak_fidelity = 0.0;
  bool exceeds_trs_bound = false;
};

// Picks the sector (and direction) whose spectrum attains the highest peak
// circulation fidelity, and reports whether it clears the 2/3 bound.
CirculatingSectorId identify_circulating_sector(
    const std::vector<ScatteringSpectrum>& per_sector_spectra);

}  // namespace triring
