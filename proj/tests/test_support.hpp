// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the test binaries. The Gaussian sampler is hand-rolled
// (Box-Muller over raw mt19937_64 draws) so seeded matrices are bit-stable
// across standard libraries.

#ifndef LQW_TEST_SUPPORT_HPP
#define LQW_TEST_SUPPORT_HPP

#include <Eigen/Dense>
#include <Eigen/QR>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace lqw_test {

class Gaussian {
  public:
    explicit Gaussian(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    double next_uniform() {
        // (0, 1]: log stays finite
        return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    }
    std::mt19937_64 rng_;
};

/// Haar-distributed d x d unitary from a seeded complex Ginibre matrix.
inline Eigen::MatrixXcd random_unitary(int d, std::uint64_t seed) {
    Gaussian gauss(seed);
    Eigen::MatrixXcd ginibre(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) ginibre(i, j) = std::complex<double>(gauss(), gauss());
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) {
        const std::complex<double> diag = r(j, j);
        q.col(j) *= diag / std::abs(diag);
    }
    return q;
}

}  // namespace lqw_test

#endif  // LQW_TEST_SUPPORT_HPP
