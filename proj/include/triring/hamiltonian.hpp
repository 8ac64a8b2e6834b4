#pragma once

#include <Eigen/Sparse>
#include <complex>

#include "triring/charge_basis.hpp"
#include "triring/circuit.hpp"

namespace triring {

using SparseMatrixXcd = Eigen::SparseMatrix<std::complex<double>>;

// Ring Hamiltonian in the truncated charge basis, in GHz.
//
// The charging part is diagonal: E(n) = (1/2)(2e)^2 (n-g)^T C^{-1} (n-g) / h
// with g the effective offsets (gate charges plus sector shift). Junction k
// couples islands (k, k+1 mod 3) and moves one Cooper pair between them with
// amplitude -(E_Jk/2) e^{i phi_b/3}; the loop flux is split equally over the
// three junctions. Transitions that would leave the basis are dropped, so the
// operator is Hermitian by construction.
SparseMatrixXcd build_hamiltonian(const CircuitParams& params,
                                  const BiasPoint& bias, Sector sector,
                                  const ChargeBasis& basis);

// Same, with a precomputed capacitance matrix (hot path for sweeps).
SparseMatrixXcd build_hamiltonian(const CircuitParams& params,
                                  const CapacitanceMatrix& cap,
                                  const BiasPoint& bias, Sector sector,
                                  const ChargeBasis& basis);

}  // namespace triring
