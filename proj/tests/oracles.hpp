#pragma once

// Reference implementations used only by the tests. They are written
// independently of the library code (naive loops, dense storage, partial
// pivoting) so a shared bug cannot hide in both.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline std::vector<double> gauss_solve(Dense a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0) throw std::runtime_error("singular system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

// Gauss-Jordan inverse with partial pivoting.
inline Dense inverse(Dense a) {
  const std::size_t n = a.size();
  Dense inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double d = a[col][col];
    if (d == 0.0) throw std::runtime_error("singular matrix");
    for (std::size_t c = 0; c < n; ++c) {
      a[col][c] /= d;
      inv[col][c] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (std::size_t c = 0; c < n; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

inline double rmse(const std::vector<double>& p, const std::vector<double>& a) {
  long double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (long double)(p[i] - a[i]) * (p[i] - a[i]);
  return std::sqrt((double)(s / p.size()));
}

inline double mae(const std::vector<double>& p, const std::vector<double>& a) {
  long double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - a[i]);
  return (double)(s / p.size());
}

// Hyndman-Koehler scaling on the training window; returns NaN for a zero denominator.
inline double mase(const std::vector<double>& p, const std::vector<double>& a,
                   const std::vector<double>& train) {
  long double d = 0;
  for (std::size_t i = 1; i < train.size(); ++i) d += std::fabs(train[i] - train[i - 1]);
  d /= (train.size() - 1);
  if (d == 0) return std::nan("");
  return mae(p, a) / (double)d;
}

inline double se(double a, double b, double l, double s2) {
  return s2 * std::exp(-(a - b) * (a - b) / (2 * l * l));
}

// K*^T (K + noise I)^-1 y through an explicit inverse.
inline std::vector<double> gp_mean(const std::vector<double>& t, const std::vector<double>& y,
                                   const std::vector<double>& q, double l, double s2,
                                   double noise) {
  const std::size_t n = t.size();
  Dense k(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) k[i][j] = se(t[i], t[j], l, s2) + (i == j ? noise : 0.0);
  const Dense kinv = inverse(k);
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w[i] += kinv[i][j] * y[j];
  std::vector<double> out;
  for (double x : q) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += se(x, t[i], l, s2) * w[i];
    out.push_back(s);
  }
  return out;
}

}  // namespace oracle
