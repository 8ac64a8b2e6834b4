#include "triring/eigensolver.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "triring/errors.hpp"
#include "triring/rng.hpp"

namespace triring {

namespace {

using Cd = std::complex<double>;

// Deterministic phase convention: rotate each column so its first amplitude
// above the noise floor is real positive.
void fix_phases(Eigen::MatrixXcd& states) {
  for (Eigen::Index c = 0; c < states.cols(); ++c) {
    auto col = states.col(c);
    const double floor = 1e-12 * col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      const double a = std::abs(col(i));
      if (a > floor) {
        col *= std::conj(col(i)) / a;
        break;
      }
    }
  }
}

EigenSolution dense_solve(const SparseMatrixXcd& h, int n_states) {
  Eigen::MatrixXcd dense = Eigen::MatrixXcd(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense);
  if (solver.info() != Eigen::Success) {
    throw SolverError("dense Hermitian eigensolver failed");
  }
  EigenSolution out;
  out.energies = solver.eigenvalues().head(n_states);
  out.states = solver.eigenvectors().leftCols(n_states);
  fix_phases(out.states);
  return out;
}

// Gershgorin bounds on the spectrum.
std::pair<double, double> spectrum_bounds(const SparseMatrixXcd& h) {
  const int n = static_cast<int>(h.cols());
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (int j = 0; j < n; ++j) {
    double diag = 0.0;
    double radius = 0.0;
    for (SparseMatrixXcd::InnerIterator it(h, j); it; ++it) {
      if (it.row() == j) {
        diag = it.value().real();
      } else {
        radius += std::abs(it.value());
      }
    }
    lo = std::min(lo, diag - radius);
    hi = std::max(hi, diag + radius);
  }
  return {lo, hi};
}

// Cheap upper estimate of the lowest eigenvalue: a short plain Lanczos sweep
// without reorthogonalization. Ritz values cannot undershoot the spectrum
// materially, so (estimate - margin) is a safe shift for shift-invert.
double estimate_lowest(const SparseMatrixXcd& h, int steps) {
  const int dim = static_cast<int>(h.rows());
  steps = std::min(steps, dim);
  Eigen::VectorXcd v(dim);
  std::uint64_t s = 0x657374696d617465ULL;
  for (int i = 0; i < dim; ++i) {
    const double re = static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
    const double im = static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
    v(i) = Cd(2.0 * re - 1.0, 2.0 * im - 1.0);
  }
  v.normalize();
  Eigen::VectorXcd prev = Eigen::VectorXcd::Zero(dim);
  Eigen::VectorXd alpha(steps), beta(steps);
  int m = 0;
  double last_beta = 0.0;
  for (int j = 0; j < steps; ++j) {
    Eigen::VectorXcd w = h * v;
    if (j > 0) w -= last_beta * prev;
    const double a = std::real(v.dot(w));
    w -= a * v;
    alpha(j) = a;
    m = j + 1;
    const double b = w.norm();
    beta(j) = b;
    if (b < 1e-12) break;  // invariant subspace reached: estimate is exact
    prev = v;
    v = w / b;
    last_beta = b;
  }
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    t(j, j) = alpha(j);
    if (j + 1 < m) {
      t(j + 1, j) = beta(j);
      t(j, j + 1) = beta(j);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  return es.eigenvalues()(0);
}

// Shift-invert thick-restart block Lanczos. Solves for the n_states lowest
// eigenpairs of h around the shift `sigma` (must lie strictly below the
// spectrum). Block size 3 resolves the degeneracies of a cyclically symmetric
// ring; the subspace is compressed back to the leading Ritz vectors whenever
// it reaches its cap, which keeps the dense projection small.
EigenSolution lanczos_with_shift(const SparseMatrixXcd& h, int n_states,
                                 const EigensolveOptions& options,
                                 double sigma, double norm_scale) {
  const int dim = static_cast<int>(h.rows());
  const int block = std::min(3, dim);
  const int keep = std::min(n_states + 6, dim - block);
  const int m_max =
      std::min(dim, std::max(keep + 5 * block, 2 * n_states + block));
  const int step_budget = options.max_blocks > 0
                              ? options.max_blocks
                              : std::max(60, 16 * n_states);

  SparseMatrixXcd shifted = h;
  {
    SparseMatrixXcd ident(dim, dim);
    ident.setIdentity();
    shifted -= sigma * ident;
  }
  // (h - sigma I) is Hermitian positive definite for a shift below the
  // spectrum, so a pivot-free Cholesky-type factorization applies.
  Eigen::SimplicialLDLT<SparseMatrixXcd> solver;
  solver.compute(shifted);
  if (solver.info() != Eigen::Success) {
    throw SolverError("sparse LDLT factorization failed in shift-invert Lanczos");
  }

  Eigen::MatrixXcd q(dim, m_max + block);       // basis columns
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(  // projected operator
      m_max + block, m_max + block);

  // Deterministic fill for start/replacement directions.
  std::uint64_t noise_state = 0x7269676e736f6c76ULL;
  const auto fill_random = [&](Eigen::Ref<Eigen::MatrixXcd> w) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        const double re =
            static_cast<double>(splitmix64(noise_state) >> 11) * 0x1.0p-53;
        const double im =
            static_cast<double>(splitmix64(noise_state) >> 11) * 0x1.0p-53;
        w(i, c) = Cd(2.0 * re - 1.0, 2.0 * im - 1.0);
      }
    }
  };

  // QR of an already-projected block; directions lost to rank deficiency are
  // replaced by fresh deterministic vectors orthogonal to the basis so the
  // recursion can continue (their T coupling is already ~0).
  const auto qr_block = [&](Eigen::MatrixXcd& w, int n_prev,
                            Eigen::MatrixXcd* r_out) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(w);
    Eigen::MatrixXcd r =
        qr.matrixQR().topRows(w.cols()).triangularView<Eigen::Upper>();
    Eigen::MatrixXcd thin =
        qr.householderQ() * Eigen::MatrixXcd::Identity(dim, w.cols());
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      if (std::abs(r(c, c)) < 1e-12) {
        Eigen::VectorXcd f(dim);
        fill_random(f);
        for (int pass = 0; pass < 2 && n_prev > 0; ++pass) {
          const auto prev = q.leftCols(n_prev);
          f -= prev * (prev.adjoint() * f).eval();
        }
        f -= thin.leftCols(c) * (thin.leftCols(c).adjoint() * f).eval();
        thin.col(c) = f.normalized();
        r.row(c).setZero();
      }
    }
    w = thin;
    if (r_out) *r_out = r;
  };

  {
    Eigen::MatrixXcd v(dim, block);
    fill_random(v);
    qr_block(v, 0, nullptr);
    q.leftCols(block) = v;
  }

  int m = 0;  // fully projected columns; current block sits at [m, m+block)
  int steps = 0;
  EigenSolution out;

  Eigen::VectorXd ritz_vals;
  Eigen::MatrixXcd ritz_vecs;
  while (true) {
    // Extend the subspace until the cap.
    while (m + block <= m_max && steps < step_budget) {
      const auto cur = q.middleCols(m, block);
      Eigen::MatrixXcd w = solver.solve(cur);
      const int span = m + block;
      // Two projection passes, both recorded, so T stays the exact projected
      // operator and the Ritz residual estimates remain trustworthy.
      Eigen::MatrixXcd coupling = q.leftCols(span).adjoint() * w;
      w.noalias() -= q.leftCols(span) * coupling;
      const Eigen::MatrixXcd second = q.leftCols(span).adjoint() * w;
      w.noalias() -= q.leftCols(span) * second;
      coupling += second;
      t.block(0, m, span, block) = coupling;
      t.block(m, 0, block, span) = coupling.adjoint();
      // The QR factor is the coupling of this block's image to the next
      // block; without it the Ritz residual estimates read zero.
      Eigen::MatrixXcd r;
      qr_block(w, span, &r);
      t.block(span, m, block, block) = r;
      t.block(m, span, block, block) = r.adjoint();
      q.middleCols(span, block) = w;
      m += block;
      ++steps;
    }

    // Rayleigh-Ritz on the projected operator.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> small(t.topLeftCorner(m, m));
    const Eigen::VectorXd vals = small.eigenvalues();
    const Eigen::MatrixXcd vecs = small.eigenvectors();
    if (m < n_states) {
      throw SolverError("Lanczos subspace exhausted below n_states");
    }

    // Residual coupling of each Ritz pair lives in the current block:
    // r_i = || T[m:m+block, 0:m] y_i ||.
    const Eigen::MatrixXcd tail = t.block(m, 0, block, m);
    int converged = 0;
    for (int k = 0; k < n_states; ++k) {
      const int idx = m - 1 - k;
      const double theta = vals(idx);
      if (theta <= 0.0) break;
      const double rnorm = (tail * vecs.col(idx)).norm();
      const double lambda_err = rnorm / (theta * theta);
      const double h_residual = norm_scale * rnorm / theta;
      const double lambda = sigma + 1.0 / theta;
      if (lambda_err < options.tolerance &&
          h_residual < 3e-9 * std::max(1.0, std::abs(lambda))) {
        ++converged;
      } else {
        break;
      }
    }
    if (converged >= n_states) {
      ritz_vals = vals;
      ritz_vecs = vecs;
      out.iterations = steps;
      break;
    }
    if (steps >= step_budget) {
      throw SolverError("block Lanczos did not converge: " +
                        std::to_string(converged) + "/" +
                        std::to_string(n_states) + " states within budget");
    }

    // Thick restart: compress to the leading Ritz vectors, carry the current
    // block over as the continuation direction.
    const int nk = std::min(keep, m);
    Eigen::MatrixXcd compressed = q.leftCols(m) * vecs.rightCols(nk);
    const Eigen::MatrixXcd s_coupling = tail * vecs.rightCols(nk);
    q.leftCols(nk) = compressed;
    q.middleCols(nk, block) = q.middleCols(m, block);
    t.setZero();
    for (int i = 0; i < nk; ++i) t(i, i) = vals(m - nk + i);
    t.block(nk, 0, block, nk) = s_coupling;
    t.block(0, nk, nk, block) = s_coupling.adjoint();
    m = nk;
  }

  out.energies.resize(n_states);
  out.states.resize(dim, n_states);
  for (int k = 0; k < n_states; ++k) {
    const int idx = m - 1 - k;
    out.energies(k) = sigma + 1.0 / ritz_vals(idx);
    out.states.col(k) = q.leftCols(m) * ritz_vecs.col(idx);
    out.states.col(k).normalize();
  }
  // Enforce ascending order in case of clustered values.
  std::vector<int> order(n_states);
  for (int i = 0; i < n_states; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return out.energies(a) < out.energies(b);
  });
  Eigen::VectorXd e2(n_states);
  Eigen::MatrixXcd s2(dim, n_states);
  for (int i = 0; i < n_states; ++i) {
    e2(i) = out.energies(order[i]);
    s2.col(i) = out.states.col(order[i]);
  }
  out.energies.swap(e2);
  out.states.swap(s2);
  fix_phases(out.states);
  return out;
}

EigenSolution lanczos_solve(const SparseMatrixXcd& h, int n_states,
                            const EigensolveOptions& options) {
  const auto [gersh_lo, gersh_hi] = spectrum_bounds(h);
  // A shift close below the ground state keeps the inverted spectrum well
  // separated; the short estimation sweep overshoots the true minimum by far
  // less than the margin used here.
  const double span = std::max(gersh_hi - gersh_lo, 1.0);
  const double margin = std::max(2.0, 1e-3 * span);
  const double estimate = estimate_lowest(h, 80);
  const double sigma = std::max(estimate - margin, gersh_lo - 1.0);

  EigenSolution out =
      lanczos_with_shift(h, n_states, options, sigma, gersh_hi - sigma);
  if (out.energies(0) <= estimate + 1e-6) return out;
  // The shift bracketed away the ground state (estimation sweep failed to get
  // close); fall back to the safe Gershgorin shift with a larger budget.
  EigensolveOptions retry = options;
  retry.max_blocks = 48 * n_states + 600;  // far shift converges slowly
  return lanczos_with_shift(h, n_states, retry, gersh_lo - 1.0,
                            gersh_hi - gersh_lo + 1.0);
}

}  // namespace

EigenSolution eigensolve(const SparseMatrixXcd& h, int n_states,
                         const EigensolveOptions& options) {
  const int dim = static_cast<int>(h.rows());
  if (n_states < 1) throw ParameterError("n_states must be >= 1");
  if (n_states > dim) {
    throw ParameterError("n_states exceeds the basis dimension");
  }

  bool dense = options.method == EigensolveOptions::Method::dense;
  if (options.method == EigensolveOptions::Method::automatic) {
    dense = dim <= 64 || n_states * 3 >= dim;
  }
  EigenSolution out =
      dense ? dense_solve(h, n_states) : lanczos_solve(h, n_states, options);

  // Residual audit on the returned pairs.
  const double scale = std::max(out.energies.cwiseAbs().maxCoeff(), 1.0);
  for (int k = 0; k < n_states; ++k) {
    const double res =
        (h * out.states.col(k) - out.energies(k) * out.states.col(k)).norm();
    if (res > 1e-8 * scale) {
      throw SolverError("eigenpair residual " + std::to_string(res) +
                        " exceeds tolerance for state " + std::to_string(k));
    }
  }
  return out;
}

EigenSolution solve_ring(const CircuitParams& params, const BiasPoint& bias,
                         Sector sector, const ChargeBasis& basis, int n_states,
                         const EigensolveOptions& options) {
  const SparseMatrixXcd h = build_hamiltonian(params, bias, sector, basis);
  EigenSolution out = eigensolve(h, n_states, options);
  double pop = 0.0;
  for (int i = 0; i < basis.dim(); ++i) {
    if (basis.on_boundary(i)) pop += std::norm(out.states(i, 0));
  }
  out.boundary_population = pop;
  out.truncation_warning = pop > 1e-6;
  return out;
}

std::vector<double> transition_frequencies(const CircuitParams& params,
                                           const BiasPoint& bias,
                                           Sector sector, int m, int cutoff) {
  if (m < 1) throw ParameterError("transition count must be >= 1");
  const ChargeBasis basis(cutoff);
  const EigenSolution sol = solve_ring(params, bias, sector, basis, m + 1);
  std::vector<double> out(m);
  for (int k = 1; k <= m; ++k) out[k - 1] = sol.energies(k) - sol.energies(0);
  return out;
}

}  // namespace triring
