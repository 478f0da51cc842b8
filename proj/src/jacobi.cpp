#include "fvpnet/jacobi.hpp"

#include <algorithm>
#include <cmath>

#include "fvpnet/errors.hpp"

namespace fvpnet {

std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t n, double symmetry_tol,
                                       std::size_t max_sweeps) {
  if (a.size() != n * n) throw InvalidInput("jacobi_eigenvalues: matrix size mismatch");
  auto at = [&a, n](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(at(i, j) - at(j, i)) > symmetry_tol) throw InvalidInput("jacobi_eigenvalues: matrix is not symmetric");

  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    double diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diag += at(i, i) * at(i, i);
      for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    }
    if (off == 0.0 || off <= 1e-32 * diag) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double app = at(p, p);
        const double aqq = at(q, q);
        // rotation angle annihilating a_pq; the smaller root keeps |theta| <= pi/4
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        at(p, p) = app - t * apq;
        at(q, q) = aqq + t * apq;
        at(p, q) = 0.0;
        at(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = at(r, p);
          const double arq = at(r, q);
          at(r, p) = arp - s * (arq + tau * arp);
          at(r, q) = arq + s * (arp - tau * arq);
          at(p, r) = at(r, p);
          at(q, r) = at(r, q);
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

}  // namespace fvpnet
