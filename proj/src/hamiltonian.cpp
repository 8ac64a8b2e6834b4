#include "triring/hamiltonian.hpp"

#include <cmath>
#include <vector>

#include "triring/constants.hpp"

namespace triring {

SparseMatrixXcd build_hamiltonian(const CircuitParams& params,
                                  const CapacitanceMatrix& cap,
                                  const BiasPoint& bias, Sector sector,
                                  const ChargeBasis& basis) {
  params.validate();
  bias.validate();

  const int dim = basis.dim();
  const int cutoff = basis.cutoff();
  const auto g = effective_offsets(bias, sector);
  const Eigen::Matrix3d quad = 0.5 * constants::charging_ghz_ff * cap.cinv;
  const std::complex<double> hop_phase =
      std::exp(std::complex<double>(0.0, bias.phi_b / 3.0));

  std::vector<Eigen::Triplet<std::complex<double>>> triplets;
  triplets.reserve(static_cast<std::size_t>(dim) * 7);

  Eigen::Vector3d d;
  for (int i = 0; i < dim; ++i) {
    const auto n = basis.charges_at(i);
    d << n[0] - g[0], n[1] - g[1], n[2] - g[2];
    triplets.emplace_back(i, i, std::complex<double>(d.dot(quad * d), 0.0));

    // hop from island k+1 to island k across junction k
    for (int k = 0; k < 3; ++k) {
      const int j = k;
      const int jp = (k + 1) % 3;
      if (n[j] < cutoff && n[jp] > -cutoff) {
        std::array<int, 3> m = n;
        ++m[j];
        --m[jp];
        const int t = basis.index_of(m[0], m[1], m[2]);
        const std::complex<double> amp = -(params.ej[k] / 2.0) * hop_phase;
        triplets.emplace_back(t, i, amp);
        triplets.emplace_back(i, t, std::conj(amp));
      }
    }
  }

  SparseMatrixXcd h(dim, dim);
  h.setFromTriplets(triplets.begin(), triplets.end());
  h.makeCompressed();
  return h;
}

SparseMatrixXcd build_hamiltonian(const CircuitParams& params,
                                  const BiasPoint& bias, Sector sector,
                                  const ChargeBasis& basis) {
  return build_hamiltonian(params, capacitance_of(params), bias, sector, basis);
}

}  // namespace triring
