#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "triring/working_point.hpp"

using namespace triring;
using testing::fitted_device;

namespace {

// Compact search budget for unit tests: narrow ranges around the known
// working point of the fitted device.
WorkingPointSearch quick_search() {
  WorkingPointSearch s;
  s.phi_lo = 2.2;
  s.phi_hi = 3.2;
  s.phi_steps = 3;
  s.ng_lo = 0.3;
  s.ng_hi = 0.9;
  s.ng_steps = 3;
  s.f_min = 5.0;
  s.f_max = 7.5;
  s.coarse_grid_points = 60;
  s.final_grid_points = 400;
  s.coarse_cutoff = 4;
  s.refine_cutoff = 5;
  s.final_cutoff = 6;
  s.top_candidates = 2;
  s.refine_iterations = 60;
  return s;
}

}  // namespace

TEST_CASE("search finds the circulation working point") {
  const auto res = find_working_point(fitted_device(), Sector::eee,
                                      quick_search(), 2);
  CHECK(res.metrics.f_cw > 0.9);
  CHECK(res.metrics.peak_frequency > 5.5);
  CHECK(res.metrics.peak_frequency < 7.0);
  CHECK(res.metrics.bandwidth_defined);

  // ccw optimum is the flux-reversed twin with matching metrics.
  CHECK(res.best_ccw.phi_b == -res.best.phi_b);
  CHECK(res.metrics_ccw.f_cw ==
        doctest::Approx(res.metrics.f_cw).epsilon(1e-9));
  CHECK(res.metrics_ccw.peak_frequency ==
        doctest::Approx(res.metrics.peak_frequency).epsilon(1e-9));
}

TEST_CASE("search is deterministic") {
  const auto a =
      find_working_point(fitted_device(), Sector::eee, quick_search(), 1);
  const auto b =
      find_working_point(fitted_device(), Sector::eee, quick_search(), 2);
  CHECK(a.best.phi_b == b.best.phi_b);
  for (int j = 0; j < 3; ++j) CHECK(a.best.ng[j] == b.best.ng[j]);
  CHECK(a.metrics.f_cw == b.metrics.f_cw);
}

TEST_CASE("zero flux forces reciprocity at every candidate") {
  WorkingPointSearch s = quick_search();
  s.phi_lo = 0.0;
  s.phi_hi = 0.0;
  s.phi_steps = 1;
  s.top_candidates = 1;
  s.refine_iterations = 1;
  const auto res = find_working_point(fitted_device(), Sector::eee, s, 2);
  for (const auto& cand : res.trace) {
    CHECK(cand.peak_f_cw == doctest::Approx(cand.peak_f_ccw).epsilon(1e-7));
    CHECK(std::max(cand.peak_f_cw, cand.peak_f_ccw) <= 2.0 / 3.0 + 1e-6);
  }
}
