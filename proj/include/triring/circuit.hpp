#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>

namespace triring {

// Quasiparticle parity sector of the three islands. The reference sector eee
// has even parity everywhere; a quasiparticle tunnelling event flips the
// parity of exactly two islands, so the non-reference sectors each carry two
// odd islands.
enum class Sector { eee, eoo, oeo, ooe };

constexpr std::array<Sector, 4> all_sectors() {
  return {Sector::eee, Sector::eoo, Sector::oeo, Sector::ooe};
}

std::string sector_label(Sector s);
Sector sector_from_label(const std::string& label);

// Offset-charge shift of a sector, in Cooper-pair units: an odd island shifts
// its offset charge by 1/2 (the sign is unobservable mod 1).
std::array<double, 3> sector_offsets(Sector s);

// Static electrical identity of a device. Energies in GHz (ordinary
// frequency), capacitances in fF. `cap_override`, when set, replaces the
// constructed Maxwell matrix wholesale.
struct CircuitParams {
  std::array<double, 3> ej{};  // Josephson energies E_J1..3, GHz
  double cg = 0.0;             // island-ground capacitance, fF
  double cc = 0.0;             // island-waveguide coupling capacitance, fF
  double ci = 0.0;             // island-island capacitance parameter, fF
  double kappa = 0.0;          // per-port coupling rate, GHz
  std::optional<Eigen::Matrix3d> cap_override;

  // Throws ParameterError on non-positive energies/capacitances or kappa < 0.
  void validate() const;

  double c_sigma() const { return cg + cc + 3.0 * ci; }

  // Same capacitor ratios rescaled so that the diagonal of the Maxwell matrix
  // equals `c_sigma_ff`.
  CircuitParams with_total_capacitance(double c_sigma_ff) const;
};

// Maxwell capacitance matrix of the ring and its inverse.
struct CapacitanceMatrix {
  Eigen::Matrix3d c;     // fF
  Eigen::Matrix3d cinv;  // 1/fF
};

// Diagonal C_sigma = cg + cc + 3 ci, off-diagonal -(3/2) ci for each island
// pair. Throws ParameterError for non-positive inputs, ConditioningError if
// the matrix is not safely invertible.
CapacitanceMatrix build_capacitance_matrix(double cg, double cc, double ci);

// Escape hatch for a measured/user-supplied full Maxwell matrix.
CapacitanceMatrix build_capacitance_matrix(const Eigen::Matrix3d& c);

CapacitanceMatrix capacitance_of(const CircuitParams& params);

// (2e)^2/(h C_sigma) in GHz for C_sigma in fF.
double charging_energy_scale(double c_sigma_ff);

// Tunable operating condition: dimensionless loop flux phi_b = 2 pi Phi_b/Phi_0
// and per-island offset charges in Cooper-pair units.
struct BiasPoint {
  double phi_b = 0.0;
  std::array<double, 3> ng{};

  void validate() const;  // finite entries
};

// Offset charges seen by the Hamiltonian: gate charges plus the sector shift.
std::array<double, 3> effective_offsets(const BiasPoint& bias, Sector sector);

// (max - min)/mean of a positive triple.
double junction_spread(const std::array<double, 3>& values);

}  // namespace triring
