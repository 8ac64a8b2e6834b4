#include "triring/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "triring/errors.hpp"

namespace triring {

SimplexResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& x0, const SimplexOptions& options) {
  const int n = static_cast<int>(x0.size());
  if (n < 1) throw ParameterError("simplex needs at least one dimension");

  // Dimension-adaptive coefficients (Gao & Han 2012).
  const double nd = n;
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / nd;
  const double gamma = 0.75 - 1.0 / (2.0 * nd);
  const double delta = 1.0 - 1.0 / nd;

  std::vector<Eigen::VectorXd> verts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (int i = 0; i < n; ++i) {
    const double h = x0(i) != 0.0 ? options.initial_step * std::abs(x0(i))
                                  : options.initial_step;
    verts[i + 1](i) += h;
  }
  int evals = 0;
  for (int i = 0; i <= n; ++i) {
    vals[i] = objective(verts[i]);
    ++evals;
  }

  std::vector<int> order(n + 1);
  SimplexResult out;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = order[0];
    const int worst = order[n];
    const int second = order[n - 1];

    out.iterations = iter;
    double diam = 0.0;
    for (int i = 0; i <= n; ++i) {
      diam = std::max(diam, (verts[i] - verts[best]).lpNorm<Eigen::Infinity>());
    }
    if (diam < options.x_tolerance &&
        std::abs(vals[worst] - vals[best]) < options.f_tolerance) {
      out.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i) {
      if (i != worst) centroid += verts[i];
    }
    centroid /= nd;

    const Eigen::VectorXd xr = centroid + alpha * (centroid - verts[worst]);
    const double fr = objective(xr);
    ++evals;

    if (fr < vals[best]) {
      const Eigen::VectorXd xe = centroid + beta * (xr - centroid);
      const double fe = objective(xe);
      ++evals;
      if (fe < fr) {
        verts[worst] = xe;
        vals[worst] = fe;
      } else {
        verts[worst] = xr;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      verts[worst] = xr;
      vals[worst] = fr;
    } else {
      // Contraction, outside or inside of the reflection point.
      const bool outside = fr < vals[worst];
      Eigen::VectorXd xc;
      if (outside) {
        xc = centroid + gamma * (xr - centroid);
      } else {
        xc = centroid - gamma * (centroid - verts[worst]);
      }
      const double fc = objective(xc);
      ++evals;
      if (fc < std::min(fr, vals[worst])) {
        verts[worst] = xc;
        vals[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          verts[i] = verts[best] + delta * (verts[i] - verts[best]);
          vals[i] = objective(verts[i]);
          ++evals;
        }
      }
    }
  }

  const auto it = std::min_element(vals.begin(), vals.end());
  out.x = verts[static_cast<int>(it - vals.begin())];
  out.f_min = *it;
  out.evaluations = evals;
  return out;
}

}  // namespace triring
