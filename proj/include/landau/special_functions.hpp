#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace landau {

inline constexpr double pi = std::numbers::pi;

/// Real number held as sign and log-magnitude. Used where values underflow
/// double precision (Toeplitz eigenvalues, large-k moments).
struct LogReal {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

  static LogReal from_value(double v) {
    if (v == 0.0) return {};
    return {std::log(std::abs(v)), v > 0 ? 1 : -1};
  }
};

namespace detail {

// Rescaling threshold for the weighted recurrences. Powers of two keep the
// rescale exact.
inline constexpr double kRescaleAbove = 0x1p300;
inline constexpr double kRescaleBy = 0x1p-600;
inline constexpr int kRescaleExp = 600;

inline double signed_exp(double mantissa, double log_scale) {
  if (mantissa == 0.0) return 0.0;
  double r = std::exp(std::log(std::abs(mantissa)) + log_scale);
  return mantissa < 0 ? -r : r;
}

inline const std::array<double, 257>& log_factorial_table() {
  static const std::array<double, 257> table = [] {
    std::array<double, 257> t{};
    t[0] = 0.0;
    for (int i = 1; i <= 256; ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  return table;
}

}  // namespace detail

/// ln(n!). Exact cumulative sum for n <= 256, Stirling series above.
inline double log_factorial(int n) {
  if (n < 0) throw std::invalid_argument("log_factorial: n must be nonnegative");
  if (n <= 256) return detail::log_factorial_table()[n];
  const double x = n;
  const double x2 = x * x;
  return x * std::log(x) - x + 0.5 * std::log(2.0 * pi * x) + 1.0 / (12.0 * x) -
         1.0 / (360.0 * x * x2) + 1.0 / (1260.0 * x * x2 * x2) - 1.0 / (1680.0 * x * x2 * x2 * x2);
}

/// Physicists' Hermite polynomial. Small-degree convenience; throws
/// std::overflow_error once the value leaves the double range.
inline double hermite_poly(int q, double x) {
  if (q < 0) throw std::invalid_argument("hermite_poly: degree must be nonnegative");
  double prev = 1.0;
  if (q == 0) return prev;
  double cur = 2.0 * x;
  for (int n = 1; n < q; ++n) {
    double next = 2.0 * x * cur - 2.0 * n * prev;
    prev = cur;
    cur = next;
  }
  if (!std::isfinite(cur)) throw std::overflow_error("hermite_poly: value exceeds double range");
  return cur;
}

/// psi_0..psi_qmax at x, the L2-normalized Hermite functions.
inline std::vector<double> hermite_fn_all(int qmax, double x) {
  if (qmax < 0) throw std::invalid_argument("hermite_fn_all: degree must be nonnegative");
  std::vector<double> out(qmax + 1);
  double log_scale = -0.25 * std::log(pi) - 0.5 * x * x;
  double prev = 0.0, cur = 1.0;
  out[0] = detail::signed_exp(cur, log_scale);
  for (int n = 0; n < qmax; ++n) {
    double next = std::sqrt(2.0 / (n + 1)) * x * cur - std::sqrt(double(n) / (n + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > detail::kRescaleAbove) {
      cur *= detail::kRescaleBy;
      prev *= detail::kRescaleBy;
      log_scale += detail::kRescaleExp * std::numbers::ln2;
    }
    out[n + 1] = detail::signed_exp(cur, log_scale);
  }
  return out;
}

inline double hermite_fn(int q, double x) {
  if (q < 0) throw std::invalid_argument("hermite_fn: degree must be nonnegative");
  double log_scale = -0.25 * std::log(pi) - 0.5 * x * x;
  double prev = 0.0, cur = 1.0;
  for (int n = 0; n < q; ++n) {
    double next = std::sqrt(2.0 / (n + 1)) * x * cur - std::sqrt(double(n) / (n + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > detail::kRescaleAbove) {
      cur *= detail::kRescaleBy;
      prev *= detail::kRescaleBy;
      log_scale += detail::kRescaleExp * std::numbers::ln2;
    }
  }
  return detail::signed_exp(cur, log_scale);
}

/// Generalized Laguerre polynomial L_q^(nu)(xi).
inline double laguerre(int q, double nu, double xi) {
  if (q < 0) throw std::invalid_argument("laguerre: degree must be nonnegative");
  double prev = 1.0;
  if (q == 0) return prev;
  double cur = 1.0 + nu - xi;
  for (int n = 1; n < q; ++n) {
    double next = ((2.0 * n + 1.0 + nu - xi) * cur - (n + nu) * prev) / (n + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Same polynomial as a sign and log-magnitude, for large degrees.
inline LogReal laguerre_log(int q, double nu, double xi) {
  if (q < 0) throw std::invalid_argument("laguerre_log: degree must be nonnegative");
  double log_scale = 0.0;
  double prev = 1.0;
  double cur = q == 0 ? 1.0 : 1.0 + nu - xi;
  for (int n = 1; n < q; ++n) {
    double next = ((2.0 * n + 1.0 + nu - xi) * cur - (n + nu) * prev) / (n + 1);
    prev = cur;
    cur = next;
    if (std::abs(cur) > detail::kRescaleAbove) {
      cur *= detail::kRescaleBy;
      prev *= detail::kRescaleBy;
      log_scale += detail::kRescaleExp * std::numbers::ln2;
    }
  }
  if (cur == 0.0) return {};
  return {std::log(std::abs(cur)) + log_scale, cur > 0 ? 1 : -1};
}

/// L_q^(nu)(xi) e^{-xi/2}, finite for large q.
inline double laguerre_weighted(int q, double nu, double xi) {
  if (q < 0) throw std::invalid_argument("laguerre_weighted: degree must be nonnegative");
  if (xi < 0) throw std::invalid_argument("laguerre_weighted: argument must be nonnegative");
  double log_scale = -0.5 * xi;
  double prev = 1.0;
  double cur = q == 0 ? 1.0 : 1.0 + nu - xi;
  for (int n = 1; n < q; ++n) {
    double next = ((2.0 * n + 1.0 + nu - xi) * cur - (n + nu) * prev) / (n + 1);
    prev = cur;
    cur = next;
    if (std::abs(cur) > detail::kRescaleAbove) {
      cur *= detail::kRescaleBy;
      prev *= detail::kRescaleBy;
      log_scale += detail::kRescaleExp * std::numbers::ln2;
    }
  }
  return detail::signed_exp(cur, log_scale);
}

/// Normalized Laguerre functions
///   g_l(u) = sqrt(l!/(l+m)!) u^{m/2} e^{-u/2} L_l^(m)(u),  l = 0..lmax,
/// written into out[0..lmax]. These are the radial parts of the Wigner
/// kernels; the recurrence never forms the factorials or the polynomial.
inline void laguerre_fn_normalized(int lmax, int m, double u, std::span<double> out) {
  if (lmax < 0) return;
  if (u < 0) throw std::invalid_argument("laguerre_fn_normalized: argument must be nonnegative");
  if (m > 0 && u == 0.0) {
    for (int l = 0; l <= lmax; ++l) out[l] = 0.0;
    return;
  }
  double log_scale = (m > 0 ? 0.5 * m * std::log(u) : 0.0) - 0.5 * u - 0.5 * log_factorial(m);
  double prev = 0.0, cur = 1.0;
  out[0] = detail::signed_exp(cur, log_scale);
  for (int l = 0; l < lmax; ++l) {
    double next = ((2.0 * l + m + 1.0 - u) * cur - std::sqrt(double(l) * (l + m)) * prev) /
                  std::sqrt((l + 1.0) * (l + m + 1.0));
    prev = cur;
    cur = next;
    if (std::abs(cur) > detail::kRescaleAbove) {
      cur *= detail::kRescaleBy;
      prev *= detail::kRescaleBy;
      log_scale += detail::kRescaleExp * std::numbers::ln2;
    }
    out[l + 1] = detail::signed_exp(cur, log_scale);
  }
}

inline double laguerre_fn_normalized(int l, int m, double u) {
  std::vector<double> buf(l + 1);
  laguerre_fn_normalized(l, m, u, buf);
  return buf[l];
}

/// pi^{-n} exp(-|w|^2) on R^{2n}.
inline double gaussian_G(int n, std::span<const double> w) {
  if (n <= 0) throw std::invalid_argument("gaussian_G: dimension must be positive");
  if (w.size() != static_cast<std::size_t>(2 * n))
    throw std::invalid_argument("gaussian_G: argument length must be 2n");
  double s = 0.0;
  for (double v : w) s += v * v;
  return std::exp(-s - n * std::log(pi));
}

}  // namespace landau
