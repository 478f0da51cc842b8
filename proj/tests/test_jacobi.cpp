// Jacobi eigenvalues against Eigen's self-adjoint solver.
#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fvpnet/errors.hpp"
#include "fvpnet/jacobi.hpp"
#include "fvpnet/rng.hpp"

using namespace fvpnet;

TEST_CASE("jacobi matches eigen on random symmetric matrices") {
  Rng rng(1);
  for (std::size_t n : {1u, 2u, 3u, 5u, 10u, 20u, 50u}) {
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::MatrixXd a(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.normal();
      std::vector<double> flat(n * n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) flat[i * n + j] = a(i, j);
      const std::vector<double> ours = jacobi_eigenvalues(flat, n);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
      const Eigen::VectorXd ref = solver.eigenvalues();  // ascending
      REQUIRE(ours.size() == n);
      const double scale = std::max(1.0, ref.cwiseAbs().maxCoeff());
      for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(ours[k] - ref(static_cast<Eigen::Index>(k))) <= 1e-10 * scale);
      for (std::size_t k = 1; k < n; ++k) CHECK(ours[k - 1] <= ours[k]);
    }
  }
}

TEST_CASE("jacobi on a path laplacian") {
  // eigenvalues of the path-graph Laplacian on n vertices: 2 - 2 cos(pi k / n)
  const std::size_t n = 12;
  std::vector<double> l(n * n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    l[i * n + i + 1] = l[(i + 1) * n + i] = -1.0;
    l[i * n + i] += 1.0;
    l[(i + 1) * n + i + 1] += 1.0;
  }
  const std::vector<double> eig = jacobi_eigenvalues(l, n);
  for (std::size_t k = 0; k < n; ++k)
    CHECK(eig[k] == doctest::Approx(2 - 2 * std::cos(M_PI * static_cast<double>(k) / n)).epsilon(1e-12));
  CHECK(std::abs(eig[0]) <= 1e-12);
}

TEST_CASE("jacobi rejects asymmetric input") {
  CHECK_THROWS_AS(jacobi_eigenvalues({1.0, 2.0, 0.0, 1.0}, 2), InvalidInput);
  CHECK_THROWS_AS(jacobi_eigenvalues({1.0, 2.0, 3.0}, 2), InvalidInput);
}
