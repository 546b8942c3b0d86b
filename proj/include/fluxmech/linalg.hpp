#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "fluxmech/errors.hpp"

namespace fluxmech {

/// Dense real square matrix, row major.
class SquareMatrix {
 public:
  explicit SquareMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  [[nodiscard]] std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::vector<double> a_;
};

/// Solves a x = b by Gaussian elimination with partial pivoting.
/// Throws numeric_error when a pivot falls to roundoff relative to the
/// largest matrix entry (singular or numerically singular system).
[[nodiscard]] std::vector<double> lu_solve(SquareMatrix a, std::vector<double> b);

/// All eigenvalues of a real square matrix: balancing, reduction to upper
/// Hessenberg form by elimination, then double-shift QR iteration.
/// Complex eigenvalues come out in conjugate pairs. Throws numeric_error
/// if the QR iteration fails to converge.
[[nodiscard]] std::vector<std::complex<double>> eigenvalues(SquareMatrix a);

} // namespace fluxmech
