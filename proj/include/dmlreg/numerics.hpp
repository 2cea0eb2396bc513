#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace dmlreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Deterministic random source: std::mt19937_64 bits with uniform and
/// Gaussian conversions done in-house, identical on every toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random mantissa bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by rejection, bound > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via Box-Muller; consumes exactly two draws.
  double standard_normal();

  /// Independent child stream for the given index (e.g. a replicate).
  Rng substream(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for substream `index` of `base`: mix64(base ^ mix64(index + golden)).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Solves A x = b for symmetric positive-definite A by Cholesky
/// factorization. Throws NotSPD for a non-symmetric matrix or a failed
/// factorization and Singular when the factor has a vanishing pivot.
Vector solve_linear(const Matrix& a, const Vector& b);

/// `count` i.i.d. draws from Unif[lo, hi). Throws InvalidRange if lo >= hi.
Vector sample_uniform(Rng& rng, double lo, double hi, Eigen::Index count);

/// `count` i.i.d. draws from N(mean, sd^2). Throws InvalidScale if sd < 0.
Vector sample_gaussian(Rng& rng, double mean, double sd, Eigen::Index count);

/// rows x cols matrix of Unif[lo, hi) draws, filled row by row.
Matrix sample_uniform_matrix(Rng& rng, double lo, double hi, Eigen::Index rows,
                             Eigen::Index cols);

}  // namespace dmlreg
