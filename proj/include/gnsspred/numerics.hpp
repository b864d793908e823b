#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace gnsspred {

class CholeskyFactor;
class SymMatrix;
CholeskyFactor cholesky(const SymMatrix& a, double jitter);

/// Symmetric matrix stored as its packed row-major lower triangle.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t order) : order_(order), data_(order * (order + 1) / 2, 0.0) {}

  std::size_t order() const noexcept { return order_; }

  double& operator()(std::size_t i, std::size_t j) noexcept {
    return i >= j ? data_[index(i, j)] : data_[index(j, i)];
  }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return i >= j ? data_[index(i, j)] : data_[index(j, i)];
  }

  /// Row i of the lower triangle: entries (i, 0..i).
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + index(i, 0), i + 1};
  }

  double max_abs() const noexcept;
  double mean_diagonal() const noexcept;

 private:
  static std::size_t index(std::size_t i, std::size_t j) noexcept { return i * (i + 1) / 2 + j; }

  std::size_t order_ = 0;
  std::vector<double> data_;

  friend class CholeskyFactor;
  friend CholeskyFactor cholesky(const SymMatrix&, double);
};

/// Lower-triangular L with L*L^T = A + jitter*I.
class CholeskyFactor {
 public:
  std::size_t order() const noexcept { return lower_.order_; }
  /// Jitter actually added to the diagonal (after any escalation).
  double jitter() const noexcept { return jitter_; }

  /// L(i, j) for j <= i; zero above the diagonal.
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return j > i ? 0.0 : lower_.data_[SymMatrix::index(i, j)];
  }

  /// Solves L y = b in place.
  void forward_substitute(std::span<double> b) const;
  /// Solves L^T x = y in place.
  void back_substitute(std::span<double> y) const;

 private:
  SymMatrix lower_;
  double jitter_ = 0.0;

  friend CholeskyFactor cholesky(const SymMatrix&, double);
};

/// Factorizes A + jitter*I. On failure the jitter is raised to
/// max(jitter, 1e-10 * mean diagonal) and escalated x10 up to three more
/// times (1e-10 .. 1e-7 of the mean diagonal when starting from zero).
/// Throws NotPositiveDefinite when every attempt fails.
CholeskyFactor cholesky(const SymMatrix& a, double jitter = 0.0);

/// x with (L L^T) x = b. Throws DimensionMismatch.
std::vector<double> solve_spd(const CholeskyFactor& factor, std::span<const double> b);

/// Counter-based generator: the n-th output is a pure function of
/// (seed, stream_id, n), so forks are independent of evaluation order.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;
  /// Standard normal via the Marsaglia polar method (no spare caching).
  double normal() noexcept;

  /// Child stream keyed by `key`; does not advance this stream.
  RngStream fork(std::uint64_t key) const noexcept;
  RngStream fork(std::string_view key) const noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// `count` standard normals from a copy of `stream`.
std::vector<double> rng_normal(RngStream stream, std::size_t count);

std::uint64_t mix64(std::uint64_t x) noexcept;
/// FNV-1a, stable across platforms.
std::uint64_t hash_string(std::string_view s) noexcept;

}  // namespace gnsspred
