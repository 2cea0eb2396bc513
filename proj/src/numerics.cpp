#include "dmlreg/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dmlreg/error.hpp"

namespace dmlreg {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base ^ mix64(index + 0x632be59bd9b4e019ULL));
}

double Rng::standard_normal() {
  // 1 - u lies in (0, 1], keeping the log finite.
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = engine_();
  while (v >= limit) v = engine_();
  return v % bound;
}

Rng Rng::substream(std::uint64_t index) const {
  return Rng(derive_seed(seed_, index));
}

Vector solve_linear(const Matrix& a, const Vector& b) {
  if (a.rows() != a.cols()) {
    fail(ErrorCode::DimensionMismatch, "solve_linear: matrix is " +
                                           std::to_string(a.rows()) + "x" +
                                           std::to_string(a.cols()));
  }
  if (a.rows() != b.size()) {
    fail(ErrorCode::DimensionMismatch,
         "solve_linear: matrix has " + std::to_string(a.rows()) +
             " rows, right-hand side has " + std::to_string(b.size()));
  }
  if (!a.allFinite() || !b.allFinite()) {
    fail(ErrorCode::NotSPD, "solve_linear: non-finite input");
  }
  if (a.rows() == 0) return Vector(0);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    fail(ErrorCode::NotSPD, "solve_linear: matrix is not symmetric");
  }

  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    const double lo = Eigen::SelfAdjointEigenSolver<Matrix>(a, Eigen::EigenvaluesOnly).eigenvalues()[0];
    if (lo < -1e-12 * scale) fail(ErrorCode::NotSPD, "solve_linear: matrix is not positive definite");
    fail(ErrorCode::Singular, "solve_linear: Cholesky factorization failed");
  }
  // A pivot that is tiny relative to the largest one means the system is
  // numerically singular even though the factorization ran to completion.
  const Vector pivots = Matrix(llt.matrixL()).diagonal();
  const double pmax = pivots.maxCoeff();
  const double pmin = pivots.minCoeff();
  if (!(pmin > 0.0) || pmin * pmin < 1e-15 * pmax * pmax) {
    fail(ErrorCode::Singular, "solve_linear: matrix is numerically singular");
  }
  Vector x = llt.solve(b);
  if (!x.allFinite()) {
    fail(ErrorCode::Singular, "solve_linear: non-finite solution");
  }
  return x;
}

Vector sample_uniform(Rng& rng, double lo, double hi, Eigen::Index count) {
  if (!(lo < hi)) {
    fail(ErrorCode::InvalidRange, "sample_uniform: need lo < hi");
  }
  Vector out(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    double v = lo + (hi - lo) * rng.uniform01();
    // Rounding can land exactly on hi for wide ranges.
    out[i] = v < hi ? v : std::nextafter(hi, lo);
  }
  return out;
}

Vector sample_gaussian(Rng& rng, double mean, double sd, Eigen::Index count) {
  if (!(sd >= 0.0)) {
    fail(ErrorCode::InvalidScale, "sample_gaussian: sd must be >= 0");
  }
  Vector out(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    out[i] = mean + sd * rng.standard_normal();
  }
  return out;
}

Matrix sample_uniform_matrix(Rng& rng, double lo, double hi, Eigen::Index rows,
                             Eigen::Index cols) {
  if (!(lo < hi)) {
    fail(ErrorCode::InvalidRange, "sample_uniform_matrix: need lo < hi");
  }
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      double v = lo + (hi - lo) * rng.uniform01();
      out(i, j) = v < hi ? v : std::nextafter(hi, lo);
    }
  }
  return out;
}

}  // namespace dmlreg
