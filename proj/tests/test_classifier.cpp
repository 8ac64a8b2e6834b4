#include <doctest.h>

#include <cmath>
#include <complex>

#include "test_support.hpp"
#include "triring/classifier.hpp"
#include "triring/errors.hpp"
#include "triring/synthetic.hpp"

using namespace triring;

namespace {

// Four well-separated synthetic sector matrices (order unit scale).
std::vector<Eigen::Matrix3cd> toy_sectors(double separation) {
  std::vector<Eigen::Matrix3cd> out(4);
  for (int s = 0; s < 4; ++s) {
    out[s].setZero();
    for (int e = 0; e < 9; ++e) {
      out[s](e / 3, e % 3) =
          std::complex<double>(0.1 * e + separation * s, 0.05 * e - 0.3 * s);
    }
  }
  return out;
}

SectorTimeSeries toy_series(int n, double noise, double separation,
                            std::uint64_t seed) {
  SectorChainSpec chain;
  chain.k = 4;
  chain.mean_dwell = {12.0, 16.0, 20.0, 14.0};
  chain.seed = seed;
  const auto labels = simulate_sector_chain(chain, n);
  return synthesize_timeseries(labels, toy_sectors(separation), {noise},
                               300e-6, seed + 1);
}

double label_accuracy(const std::vector<int>& truth,
                      const std::vector<int>& found, int k) {
  // Best assignment over cluster relabelings (k=4: brute-force permutations).
  std::vector<int> perm(k);
  for (int i = 0; i < k; ++i) perm[i] = i;
  double best = 0.0;
  std::sort(perm.begin(), perm.end());
  do {
    int hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (perm[found[i]] == truth[i]) ++hits;
    }
    best = std::max(best, static_cast<double>(hits) / truth.size());
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("featurize standardizes and flags constants") {
  SectorTimeSeries series;
  series.tau_s = 1e-3;
  series.samples.resize(50);
  for (int i = 0; i < 50; ++i) {
    for (int e = 0; e < 9; ++e) {
      series.samples[i][e] = {0.3 * i * (e + 1), 1.0};  // imag parts constant
    }
  }
  const auto f = featurize(series);
  CHECK(f.x.rows() == 50);
  CHECK(f.x.cols() == 18);
  // All imaginary dimensions are constant: retained unscaled and flagged.
  CHECK(f.zero_variance_dims.size() == 9);
  for (int d = 0; d < 18; d += 2) {
    CHECK(f.x.col(d).mean() == doctest::Approx(0.0).epsilon(1e-9));
    const double var = f.x.col(d).squaredNorm() / 50;
    CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("constant series features are all zero") {
  SectorTimeSeries series;
  series.tau_s = 1e-3;
  series.samples.resize(10);
  for (auto& s : series.samples) s.fill({1.5, -2.5});
  const auto f = featurize(series);
  CHECK(f.x.cwiseAbs().maxCoeff() == 0.0);
  CHECK(f.zero_variance_dims.size() == 18);
}

TEST_CASE("kmeans with k=1 returns the grand mean") {
  const auto series = toy_series(200, 0.01, 1.0, 5);
  const auto feats = featurize(series);
  const auto cls = kmeans_classify(feats, series, 1, 7, 2);
  CHECK(cls.k == 1);
  for (int lbl : cls.labels) CHECK(lbl == 0);
  std::complex<double> acc = 0.0;
  for (const auto& s : series.samples) acc += s[0];
  acc /= static_cast<double>(series.samples.size());
  CHECK(std::abs(cls.means[0][0] - acc) < 1e-12);
}

TEST_CASE("kmeans recovers well-separated synthetic sectors exactly") {
  const auto series = toy_series(3000, 0.05, 1.2, 11);  // separation >> noise
  const auto feats = featurize(series);
  const auto cls = kmeans_classify(feats, series, 4, 3, 6, 2);
  REQUIRE(series.true_labels);
  const double acc = label_accuracy(*series.true_labels, cls.labels, 4);
  CHECK(acc >= 0.999);

  // Covariances are symmetric PSD.
  for (const auto& cov : cls.covariances) {
    CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
  }
}

TEST_CASE("kmeans is deterministic for a fixed seed") {
  const auto series = toy_series(500, 0.2, 0.8, 23);
  const auto feats = featurize(series);
  const auto a = kmeans_classify(feats, series, 4, 17, 4, 1);
  const auto b = kmeans_classify(feats, series, 4, 17, 4, 2);
  CHECK(a.inertia == b.inertia);
  CHECK(a.labels == b.labels);
}

TEST_CASE("dwell statistics") {
  // constant labels
  {
    const auto d = dwell_statistics(std::vector<int>(40, 2), 300e-6, 4);
    CHECK(d.dwells[2].size() == 1);
    CHECK(d.dwells[2][0] == 40);
    CHECK(d.transitions.sum() == 0);
  }
  // strictly alternating
  {
    std::vector<int> labels(30);
    for (int i = 0; i < 30; ++i) labels[i] = i % 2;
    const auto d = dwell_statistics(labels, 300e-6, 2);
    for (int c = 0; c < 2; ++c) {
      for (int len : d.dwells[c]) CHECK(len == 1);
    }
    CHECK(d.transitions(0, 1) == 15);
    CHECK(d.transitions(1, 0) == 14);
  }
  // 10 samples at 300 us = 3 ms
  {
    std::vector<int> labels(10, 0);
    labels.resize(20, 1);
    const auto d = dwell_statistics(labels, 300e-6, 2);
    CHECK(d.mean_dwell_seconds[0] == doctest::Approx(3e-3));
  }
  // dwell lengths sum to the series length
  {
    const auto series = toy_series(1000, 0.1, 1.0, 31);
    const auto d = dwell_statistics(*series.true_labels, 300e-6, 4);
    int total = 0;
    for (const auto& runs : d.dwells) {
      for (int len : runs) total += len;
    }
    CHECK(total == 1000);
    // Row sums of the transition matrix count the exits per cluster.
    for (int c = 0; c < 4; ++c) {
      int exits = 0;
      for (std::size_t i = 1; i < series.true_labels->size(); ++i) {
        if ((*series.true_labels)[i - 1] == c &&
            (*series.true_labels)[i] != c) {
          ++exits;
        }
      }
      CHECK(d.transitions.row(c).sum() == exits);
    }
  }
}

TEST_CASE("sector averages recover the injected matrices") {
  const auto sectors = toy_sectors(1.0);
  SectorChainSpec chain;
  chain.k = 4;
  chain.mean_dwell = {10.0, 10.0, 10.0, 10.0};
  chain.seed = 41;
  const auto labels = simulate_sector_chain(chain, 2000);
  const auto series =
      synthesize_timeseries(labels, sectors, {0.0}, 300e-6, 42);  // noiseless
  for (int c = 0; c < 4; ++c) {
    const auto avg = sector_average_smatrix(series, labels, c);
    CHECK((avg.mean - sectors[c]).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(avg.standard_error.maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(
      sector_average_smatrix(series, std::vector<int>(2000, 0), 3),
      EvaluationError);
}

TEST_CASE("single-sample cluster is flagged by its count") {
  SectorTimeSeries series;
  series.tau_s = 1e-3;
  series.samples.resize(3);
  for (auto& s : series.samples) s.fill({1.0, 0.0});
  const std::vector<int> labels{0, 1, 1};
  const auto avg = sector_average_smatrix(series, labels, 0);
  CHECK(avg.count == 1);
  CHECK(avg.standard_error.maxCoeff() == 0.0);
}

TEST_CASE("label permutation leaves downstream statistics invariant") {
  const auto series = toy_series(800, 0.05, 1.0, 53);
  const auto feats = featurize(series);
  const auto cls = kmeans_classify(feats, series, 4, 9, 4, 1);
  const auto d0 = dwell_statistics(cls.labels, series.tau_s, 4);

  // Relabel clusters by a fixed permutation.
  const std::array<int, 4> perm{2, 0, 3, 1};
  std::vector<int> relabeled(cls.labels.size());
  for (std::size_t i = 0; i < cls.labels.size(); ++i) {
    relabeled[i] = perm[cls.labels[i]];
  }
  const auto d1 = dwell_statistics(relabeled, series.tau_s, 4);
  int total0 = 0, total1 = 0;
  for (int c = 0; c < 4; ++c) {
    total0 += static_cast<int>(d0.dwells[c].size());
    total1 += static_cast<int>(d1.dwells[perm[c]].size());
    CHECK(d0.mean_dwell_samples[c] ==
          doctest::Approx(d1.mean_dwell_samples[perm[c]]));
  }
  CHECK(total0 == total1);
  CHECK(d0.transitions.sum() == d1.transitions.sum());
}
