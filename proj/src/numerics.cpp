#include "gnsspred/numerics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "gnsspred/error.hpp"

namespace gnsspred {

namespace {

// Dot product of two contiguous ranges, four independent accumulators so the
// compiler can keep several FMA pipes busy without reassociating.
double dot(const double* a, const double* b, std::size_t n) noexcept {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < n; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

double SymMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double SymMatrix::mean_diagonal() const noexcept {
  if (order_ == 0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < order_; ++i) s += data_[index(i, i)];
  return s / static_cast<double>(order_);
}

namespace {

// Row-oriented (Cholesky-Crout) factorization into `out`; false on a
// non-positive pivot.
bool factorize(const SymMatrix& a, double jitter, std::vector<double>& out) {
  const std::size_t n = a.order();
  out.assign(n * (n + 1) / 2, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* li = out.data() + i * (i + 1) / 2;
    const auto ai = a.row(i);
    for (std::size_t j = 0; j < i; ++j) {
      const double* lj = out.data() + j * (j + 1) / 2;
      li[j] = (ai[j] - dot(li, lj, j)) / lj[j];
    }
    const double d = ai[i] + jitter - dot(li, li, i);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    li[i] = std::sqrt(d);
  }
  return true;
}

}  // namespace

CholeskyFactor cholesky(const SymMatrix& a, double jitter) {
  if (!(jitter >= 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite, fmt::format("negative jitter {}", jitter));
  }
  CholeskyFactor f;
  f.lower_.order_ = a.order();
  if (factorize(a, jitter, f.lower_.data_)) {
    f.jitter_ = jitter;
    return f;
  }
  double escalated = std::max(jitter, 1e-10 * std::abs(a.mean_diagonal()));
  if (escalated == 0.0) escalated = 1e-10;
  for (int attempt = 0; attempt < 4; ++attempt, escalated *= 10.0) {
    if (factorize(a, escalated, f.lower_.data_)) {
      f.jitter_ = escalated;
      return f;
    }
  }
  throw Error(ErrorCode::NotPositiveDefinite,
              fmt::format("matrix of order {} not positive definite after jitter {:.3g}",
                          a.order(), escalated / 10.0));
}

void CholeskyFactor::forward_substitute(std::span<double> b) const {
  const std::size_t n = order();
  const double* data = lower_.data_.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* li = data + i * (i + 1) / 2;
    b[i] = (b[i] - dot(li, b.data(), i)) / li[i];
  }
}

void CholeskyFactor::back_substitute(std::span<double> y) const {
  const std::size_t n = order();
  const double* data = lower_.data_.data();
  // Column-oriented sweep: L^T is upper, its column i is row i of L.
  for (std::size_t ii = n; ii-- > 0;) {
    const double* li = data + ii * (ii + 1) / 2;
    y[ii] /= li[ii];
    const double xi = y[ii];
    for (std::size_t k = 0; k < ii; ++k) y[k] -= li[k] * xi;
  }
}

std::vector<double> solve_spd(const CholeskyFactor& factor, std::span<const double> b) {
  if (b.size() != factor.order()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("right-hand side has {} entries, factor has order {}", b.size(),
                            factor.order()));
  }
  std::vector<double> x(b.begin(), b.end());
  factor.forward_substitute(x);
  factor.back_substitute(x);
  return x;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_string(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : seed_(seed), stream_id_(stream_id), key_(mix64(mix64(seed) ^ (stream_id * 0xD1B54A32D192ED03ULL + 1))) {}

std::uint64_t RngStream::next_u64() noexcept {
  const std::uint64_t n = counter_++;
  return mix64(key_ ^ mix64(n));
}

double RngStream::uniform() noexcept {
  // (k + 0.5) / 2^53 never hits 0 or 1.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() noexcept {
  while (true) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

RngStream RngStream::fork(std::uint64_t key) const noexcept {
  return RngStream(seed_, mix64(stream_id_ ^ mix64(key + 0x632BE59BD9B4E019ULL)));
}

RngStream RngStream::fork(std::string_view key) const noexcept {
  return fork(hash_string(key));
}

std::vector<double> rng_normal(RngStream stream, std::size_t count) {
  std::vector<double> out(count);
  for (auto& v : out) v = stream.normal();
  return out;
}

}  // namespace gnsspred
