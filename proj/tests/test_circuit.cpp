#include <doctest.h>

#include "triring/circuit.hpp"
#include "triring/errors.hpp"

using namespace triring;

TEST_CASE("capacitance matrix from designed values") {
  const auto cap = build_capacitance_matrix(3.5, 25.0, 8.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(cap.c(i, i) == doctest::Approx(52.5).epsilon(1e-14));
    for (int j = 0; j < 3; ++j) {
      if (i != j) CHECK(cap.c(i, j) == doctest::Approx(-12.0).epsilon(1e-14));
    }
  }
  // inverse consistency
  const Eigen::Matrix3d prod = cap.cinv * cap.c;
  CHECK((prod - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("capacitance matrix with decoupled islands") {
  const auto cap = build_capacitance_matrix(3.5, 25.0, 0.0);
  CHECK(cap.c(0, 0) == doctest::Approx(28.5));
  CHECK(cap.c(0, 1) == 0.0);
  CHECK(cap.c(1, 2) == 0.0);
}

TEST_CASE("capacitance matrix rejects bad input") {
  CHECK_THROWS_AS(build_capacitance_matrix(-1.0, 25.0, 8.0), ParameterError);
  CHECK_THROWS_AS(build_capacitance_matrix(0.0, 25.0, 8.0), ParameterError);
  // Not positive definite: strong negative coupling
  Eigen::Matrix3d bad;
  bad << 1, -5, -5, -5, 1, -5, -5, -5, 1;
  CHECK_THROWS_AS(build_capacitance_matrix(bad), ConditioningError);
}

TEST_CASE("charging energy scale") {
  // 52 fF gives 2.98 GHz; the fitted value in the source device rounds to
  // 2.97 within 1%.
  CHECK(charging_energy_scale(52.0) == doctest::Approx(2.97).epsilon(0.01));
  CHECK(charging_energy_scale(52.0) == doctest::Approx(2.9800).epsilon(2e-4));
  // inverse proportionality, exact
  CHECK(charging_energy_scale(104.0) ==
        doctest::Approx(charging_energy_scale(52.0) / 2.0).epsilon(1e-15));
  // designed total capacitance 52.5 fF
  CHECK(charging_energy_scale(52.5) == doctest::Approx(2.9517).epsilon(1e-4));
  CHECK_THROWS_AS(charging_energy_scale(0.0), ParameterError);
  CHECK_THROWS_AS(charging_energy_scale(-3.0), ParameterError);
}

TEST_CASE("sector offsets") {
  CHECK(sector_offsets(Sector::eee) == std::array<double, 3>{0.0, 0.0, 0.0});
  CHECK(sector_offsets(Sector::eoo) == std::array<double, 3>{0.0, 0.5, 0.5});
  CHECK(sector_offsets(Sector::oeo) == std::array<double, 3>{0.5, 0.0, 0.5});
  CHECK(sector_offsets(Sector::ooe) == std::array<double, 3>{0.5, 0.5, 0.0});

  // Applying the same parity flip twice returns to eee modulo 1.
  for (Sector s : all_sectors()) {
    const auto off = sector_offsets(s);
    for (int j = 0; j < 3; ++j) {
      const double twice = off[j] + off[j];
      CHECK(twice - std::floor(twice) == doctest::Approx(0.0));
    }
  }

  // Each non-reference sector has exactly two half shifts.
  for (Sector s : {Sector::eoo, Sector::oeo, Sector::ooe}) {
    const auto off = sector_offsets(s);
    int halves = 0;
    for (double o : off) halves += (o == 0.5);
    CHECK(halves == 2);
  }
}

TEST_CASE("sector labels round trip") {
  for (Sector s : all_sectors()) {
    CHECK(sector_from_label(sector_label(s)) == s);
  }
  CHECK_THROWS_AS(sector_from_label("xyz"), ParameterError);
}

TEST_CASE("junction spread") {
  CHECK(junction_spread({11.37, 11.35, 11.16}) ==
        doctest::Approx(0.019).epsilon(0.03));
  CHECK(junction_spread({11.8, 11.8, 12.06}) ==
        doctest::Approx(0.022).epsilon(0.03));
  CHECK(junction_spread({5.0, 5.0, 5.0}) == 0.0);
  CHECK_THROWS_AS(junction_spread({1.0, -1.0, 1.0}), ParameterError);
}

TEST_CASE("params validation and rescaling") {
  CircuitParams p;
  p.ej = {11.8, 11.8, 12.06};
  p.cg = 3.5;
  p.cc = 25.0;
  p.ci = 8.0;
  p.kappa = 0.119;
  p.validate();
  CHECK(p.c_sigma() == doctest::Approx(52.5));

  const auto q = p.with_total_capacitance(52.0);
  CHECK(q.c_sigma() == doctest::Approx(52.0).epsilon(1e-14));
  CHECK(q.cg / q.cc == doctest::Approx(p.cg / p.cc).epsilon(1e-14));

  CircuitParams bad = p;
  bad.kappa = -1.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}
