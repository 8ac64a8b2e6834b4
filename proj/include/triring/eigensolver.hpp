#pragma once

#include <Eigen/Dense>

#include "triring/charge_basis.hpp"
#include "triring/circuit.hpp"
#include "triring/hamiltonian.hpp"

namespace triring {

// Lowest eigenpairs of a ring Hamiltonian. Energies ascend; states are the
// matching orthonormal eigenvectors over the charge basis, with the phase
// fixed so that the first non-negligible amplitude of each vector is real
// positive (deterministic output for non-degenerate levels).
struct EigenSolution {
  Eigen::VectorXd energies;  // GHz, ascending
  Eigen::MatrixXcd states;   // dim x n_states, column k matches energies[k]

  // Ground-state probability weight on the outermost charge shell, and the
  // truncation flag raised when it exceeds 1e-6.
  double boundary_population = 0.0;
  bool truncation_warning = false;
  int iterations = 0;

  int n_states() const { return static_cast<int>(energies.size()); }
};

struct EigensolveOptions {
  enum class Method { automatic, dense, lanczos };
  Method method = Method::automatic;
  // Absolute eigenvalue/residual tolerance in GHz.
  double tolerance = 1e-10;
  int max_blocks = 0;  // 0 = derived from n_states
};

// Lowest n_states eigenpairs of a Hermitian operator. Dense path for small
// matrices, shift-invert block Lanczos (full reorthogonalization, block size
// 3) otherwise. Deterministic: the Lanczos start block is seeded by a fixed
// internal constant. Throws SolverError on non-convergence.
EigenSolution eigensolve(const SparseMatrixXcd& h, int n_states,
                         const EigensolveOptions& options = {});

// Convenience wrapper: build the Hamiltonian, solve, and fill in the
// boundary-population diagnostics for the given basis.
EigenSolution solve_ring(const CircuitParams& params, const BiasPoint& bias,
                         Sector sector, const ChargeBasis& basis, int n_states,
                         const EigensolveOptions& options = {});

// Transition frequencies f_0k = E_k - E_0 for k = 1..m, ascending.
std::vector<double> transition_frequencies(const CircuitParams& params,
                                           const BiasPoint& bias,
                                           Sector sector, int m,
                                           int cutoff = 8);

}  // namespace triring
