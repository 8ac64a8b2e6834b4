#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "test_support.hpp"
#include "triring/errors.hpp"
#include "triring/fitting.hpp"
#include "triring/rng.hpp"

using namespace triring;
using testing::fitted_device;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

// Ridge points sampled exactly on the model lines of `truth`.
std::vector<RidgePoint> perfect_points(const CircuitParams& truth,
                                       const FluxMap& flux,
                                       const std::array<double, 3>& ng_left,
                                       const std::array<double, 3>& ng_right,
                                       const std::vector<double>& controls,
                                       const std::vector<Sector>& sectors,
                                       int m, int cutoff) {
  const auto lines = model_spectrum_map(truth, sectors, flux, ng_left,
                                        ng_right, controls, m, cutoff, 2);
  std::vector<RidgePoint> pts;
  pts.reserve(lines.size());
  for (const auto& ln : lines) pts.push_back({ln.control, ln.freq, 1.0});
  return pts;
}

double circ_dist(double a, double b) {
  const double d = std::abs(a - b);
  const double w = d - std::floor(d);
  return std::min(w, 1.0 - w);
}

// Junction energies are identifiable up to the ring relabeling symmetry;
// compare the sorted triples.
double ej_error(std::array<double, 3> fit, std::array<double, 3> truth) {
  std::sort(fit.begin(), fit.end());
  std::sort(truth.begin(), truth.end());
  double worst = 0.0;
  for (int j = 0; j < 3; ++j) {
    worst = std::max(worst, std::abs(fit[j] - truth[j]) / truth[j]);
  }
  return worst;
}

// Offset recovery is defined modulo the model's exact equivalences: global
// sign (conjugation), integer shifts, half-integer sector shifts (which
// relabel sectors) and cyclic island relabeling.
double ng_error(const std::array<double, 3>& fit,
                const std::array<double, 3>& truth) {
  double best = 1.0;
  for (int rot = 0; rot < 3; ++rot) {
    std::array<double, 3> rotated;
    for (int j = 0; j < 3; ++j) rotated[j] = fit[(j + rot) % 3];
    for (int sign = -1; sign <= 1; sign += 2) {
      for (Sector s : all_sectors()) {
        const auto shift = sector_offsets(s);
        double worst = 0.0;
        for (int j = 0; j < 3; ++j) {
          worst = std::max(worst,
                           circ_dist(sign * rotated[j] + shift[j], truth[j]));
        }
        best = std::min(best, worst);
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("perfect on-model points fit with tiny residual") {
  const CircuitParams truth = fitted_device();
  const FluxMap flux{0.9, -2.2, std::nullopt};
  const std::array<double, 3> ng{0.12, 0.43, 0.31};
  const auto controls = linspace(0.3, 4.7, 9);
  const std::vector<Sector> sectors{Sector::eee, Sector::eoo};

  FitProblem prob;
  prob.points = perfect_points(truth, flux, ng, ng, controls, sectors, 2, 2);
  prob.init = truth;
  prob.flux_guess = flux;
  prob.ng_left_init = ng;
  prob.ng_right_init = ng;
  prob.sectors = sectors;
  prob.m_transitions = 2;
  prob.cutoff = 2;
  prob.restarts = 1;
  prob.max_iterations = 500;

  const auto res = fit_parameters(prob, 2);
  CHECK(res.residual_rms < 1e-6);
}

TEST_CASE("round trip recovers the parameters from a perturbed start") {
  // Unit-scale round trip (small perturbation, coarse basis); the full
  // noisy/glitch round trip at specification tolerances runs in the
  // acceptance suite.
  CircuitParams truth = fitted_device();
  const FluxMap flux{0.9, -2.2, std::nullopt};
  const std::array<double, 3> ng{0.12, 0.43, 0.31};
  // Two transitions per sector leave a shallow compensation valley between
  // the junction spread and the offsets; four transitions pin everything.
  const auto controls = linspace(0.3, 4.7, 7);
  const std::vector<Sector> sectors{Sector::eee, Sector::eoo};

  FitProblem prob;
  prob.points = perfect_points(truth, flux, ng, ng, controls, sectors, 4, 2);
  prob.init = truth;
  prob.init.ej = {11.8 * 1.02, 11.8 * 0.99, 12.06 * 1.02};
  prob.init = prob.init.with_total_capacitance(truth.c_sigma() * 1.02);
  prob.flux_guess = {0.9 * 1.02, -2.2 * 0.98, std::nullopt};
  prob.ng_left_init = {0.14, 0.41, 0.33};
  prob.ng_right_init = {0.14, 0.41, 0.33};
  prob.sectors = sectors;
  prob.m_transitions = 4;
  prob.cutoff = 2;
  prob.restarts = 1;
  prob.max_iterations = 2000;

  const auto res = fit_parameters(prob, 2);
  CHECK(ej_error(res.ej, truth.ej) < 0.01);
  CHECK(std::abs(res.ec_sigma - 2.97) / 2.97 < 0.02);
  CHECK(ng_error(res.ng_left, ng) < 0.05);
  CHECK(res.residual_rms < 1e-4);
}

TEST_CASE("fit requires enough points") {
  FitProblem prob;
  prob.points.resize(5, {0.0, 6.0, 1.0});
  prob.init = fitted_device();
  prob.flux_guess = {1.0, 0.0, std::nullopt};
  CHECK_THROWS_AS(fit_parameters(prob), ParameterError);
}

TEST_CASE("objective is invariant under point relabeling") {
  const CircuitParams truth = fitted_device();
  const FluxMap flux{1.1, -1.0, std::nullopt};
  const std::array<double, 3> ng{0.2, 0.1, 0.4};
  const auto controls = linspace(0.5, 2.5, 6);
  FitProblem prob;
  prob.points =
      perfect_points(truth, flux, ng, ng, controls, {Sector::eee}, 2, 2);
  prob.init = truth;
  prob.flux_guess = flux;
  prob.ng_left_init = ng;
  prob.ng_right_init = ng;
  prob.sectors = {Sector::eee};
  prob.m_transitions = 2;
  prob.cutoff = 2;

  const double f0 = fit_objective(prob, truth.ej, 2.96, flux, ng, ng, 2);
  Rng rng(4);
  for (int i = static_cast<int>(prob.points.size()) - 1; i > 0; --i) {
    std::swap(prob.points[i],
              prob.points[static_cast<int>(rng.uniform_int(i + 1))]);
  }
  const double f1 = fit_objective(prob, truth.ej, 2.96, flux, ng, ng, 2);
  CHECK(f0 == doctest::Approx(f1).epsilon(1e-14));
}

TEST_CASE("breakpoint-disabled map equals the left configuration") {
  const CircuitParams truth = fitted_device();
  const std::array<double, 3> left{0.1, 0.2, 0.3};
  const std::array<double, 3> right{0.7, 0.2, 0.3};
  const auto controls = linspace(0.2, 3.8, 5);
  const FluxMap no_bp{1.0, -2.0, std::nullopt};
  const auto a = model_spectrum_map(truth, {Sector::eee}, no_bp, left, right,
                                    controls, 2, 2, 2);
  const auto b = model_spectrum_map(truth, {Sector::eee}, no_bp, left, left,
                                    controls, 2, 2, 2);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].freq == b[i].freq);
}
