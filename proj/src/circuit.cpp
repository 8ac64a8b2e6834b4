#include "triring/circuit.hpp"

#include <algorithm>
#include <cmath>

#include "triring/constants.hpp"
#include "triring/errors.hpp"

namespace triring {

std::string sector_label(Sector s) {
  switch (s) {
    case Sector::eee: return "eee";
    case Sector::eoo: return "eoo";
    case Sector::oeo: return "oeo";
    case Sector::ooe: return "ooe";
  }
  throw ParameterError("invalid sector enum value");
}

Sector sector_from_label(const std::string& label) {
  for (Sector s : all_sectors()) {
    if (sector_label(s) == label) return s;
  }
  throw ParameterError("unknown sector label '" + label +
                       "' (expected eee, eoo, oeo or ooe)");
}

std::array<double, 3> sector_offsets(Sector s) {
  switch (s) {
    case Sector::eee: return {0.0, 0.0, 0.0};
    case Sector::eoo: return {0.0, 0.5, 0.5};
    case Sector::oeo: return {0.5, 0.0, 0.5};
    case Sector::ooe: return {0.5, 0.5, 0.0};
  }
  throw ParameterError("invalid sector enum value");
}

void CircuitParams::validate() const {
  for (double e : ej) {
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw ParameterError("Josephson energies must be finite and >= 0");
    }
  }
  if (!cap_override) {
    if (!(cg > 0.0) || !(cc > 0.0) || !(ci >= 0.0)) {
      throw ParameterError("capacitances must satisfy cg > 0, cc > 0, ci >= 0");
    }
  }
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw ParameterError("kappa must be finite and >= 0");
  }
}

CircuitParams CircuitParams::with_total_capacitance(double c_sigma_ff) const {
  if (!(c_sigma_ff > 0.0)) {
    throw ParameterError("total capacitance must be positive");
  }
  CircuitParams out = *this;
  const double scale = c_sigma_ff / c_sigma();
  out.cg = cg * scale;
  out.cc = cc * scale;
  out.ci = ci * scale;
  return out;
}

namespace {

CapacitanceMatrix invert_checked(const Eigen::Matrix3d& c) {
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * c.cwiseAbs().maxCoeff()) {
    throw ParameterError("capacitance matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(c);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) {
    throw ConditioningError("capacitance matrix is not positive definite");
  }
  if (hi / lo > 1e12) {
    throw ConditioningError("capacitance matrix condition number exceeds 1e12");
  }
  CapacitanceMatrix out;
  out.c = c;
  out.cinv = c.inverse();
  return out;
}

}  // namespace

CapacitanceMatrix build_capacitance_matrix(double cg, double cc, double ci) {
  if (!(cg > 0.0) || !(cc > 0.0) || !(ci >= 0.0)) {
    throw ParameterError("capacitances must satisfy cg > 0, cc > 0, ci >= 0");
  }
  const double diag = cg + cc + 3.0 * ci;
  const double off = -1.5 * ci;
  Eigen::Matrix3d c;
  c.setConstant(off);
  c.diagonal().setConstant(diag);
  return invert_checked(c);
}

CapacitanceMatrix build_capacitance_matrix(const Eigen::Matrix3d& c) {
  return invert_checked(c);
}

CapacitanceMatrix capacitance_of(const CircuitParams& params) {
  if (params.cap_override) {
    return build_capacitance_matrix(*params.cap_override);
  }
  return build_capacitance_matrix(params.cg, params.cc, params.ci);
}

double charging_energy_scale(double c_sigma_ff) {
  if (!(c_sigma_ff > 0.0)) {
    throw ParameterError("C_sigma must be positive");
  }
  return constants::charging_ghz_ff / c_sigma_ff;
}

void BiasPoint::validate() const {
  if (!std::isfinite(phi_b)) throw ParameterError("phi_b must be finite");
  for (double g : ng) {
    if (!std::isfinite(g)) throw ParameterError("offset charges must be finite");
  }
}

std::array<double, 3> effective_offsets(const BiasPoint& bias, Sector sector) {
  const auto shift = sector_offsets(sector);
  return {bias.ng[0] + shift[0], bias.ng[1] + shift[1], bias.ng[2] + shift[2]};
}

double junction_spread(const std::array<double, 3>& values) {
  for (double v : values) {
    if (!(v > 0.0)) throw ParameterError("junction_spread requires positive values");
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double mean = (values[0] + values[1] + values[2]) / 3.0;
  return (*hi - *lo) / mean;
}

}  // namespace triring
