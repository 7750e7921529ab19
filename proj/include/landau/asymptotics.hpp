#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "landau/special_functions.hpp"
#include "landau/symbol.hpp"

namespace landau {

/// Leading terms of ln nu_k for a weight supported on a set of the given
/// logarithmic capacity: -k ln k + (1 + ln(b cap^2 / 2)) k.
inline double predict_compact(double k, double b, double cap) {
  if (!(b > 0) || !(cap > 0)) throw std::invalid_argument("predict_compact: b and cap must be positive");
  return -k * std::log(k) + (1.0 + std::log(b * cap * cap / 2.0)) * k;
}

/// mu = gamma (2/b)^beta for the weight exp(-gamma |x|^{2 beta}).
inline double exp_weight_mu(double gamma, double beta, double b) { return gamma * std::pow(2.0 / b, beta); }

namespace detail {

/// Count of j with 1 <= j < bound, robust to bound being an integer up to rounding.
inline int strict_index_count(double bound) {
  const double r = std::round(bound);
  const int n = std::abs(bound - r) < 1e-9 ? static_cast<int>(r) - 1 : static_cast<int>(std::floor(bound));
  return std::max(0, n);
}

/// Newton solve of h(d) = 0 from d = 0, keeping 1 + d > 0.
template <class H, class DH>
double newton_offset(H h, DH dh, const char* who) {
  double d = 0.0;
  for (int it = 0; it < 100; ++it) {
    double next = d - h(d) / dh(d);
    if (next <= -1.0) next = 0.5 * (d - 1.0);
    if (std::abs(next - d) <= 1e-16 * (1.0 + std::abs(d)) || next == d) return next;
    d = next;
  }
  throw std::runtime_error(std::string(who) + ": Newton iteration did not converge");
}

inline double binom(int n, int k) { return std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k)); }

/// Taylor coefficients c_1..c_n of a smooth scalar function at 0 from
/// central differences at steps {1e-2, 5e-3, 2.5e-3}, Richardson-extrapolated
/// twice (errors in h^2 and h^4 removed).
inline std::vector<double> taylor_coefficients(const std::function<double(double)>& f, int n,
                                               double h0 = 1e-2) {
  std::vector<double> out;
  for (int j = 1; j <= n; ++j) {
    double d[3];
    for (int level = 0; level < 3; ++level) {
      const double h = h0 / (1 << level);
      double acc = 0.0;
      for (int i = 0; i <= j; ++i) acc += (i % 2 ? -1.0 : 1.0) * binom(j, i) * f((0.5 * j - i) * h);
      d[level] = acc / std::pow(h, j);
    }
    const double r1 = (4.0 * d[1] - d[0]) / 3.0, r2 = (4.0 * d[2] - d[1]) / 3.0;
    out.push_back((16.0 * r2 - r1) / 15.0 * std::exp(-log_factorial(j)));
  }
  return out;
}

// Offsets d = s/s(0) - 1 are solved for directly, and F, G are evaluated
// minus their eps = 0 values, so differences of tiny eps steps keep full
// precision.

inline double offset_small_beta(double eps, double beta, double mu) {
  // s = 1 + d:  d + eps beta mu (1 + d)^beta = 0
  return newton_offset([&](double d) { return d + eps * beta * mu * std::pow(1.0 + d, beta); },
                       [&](double d) { return 1.0 + eps * beta * beta * mu * std::pow(1.0 + d, beta - 1.0); },
                       "small_beta_coefficients");
}

inline double offset_large_beta(double eps, double beta, double mu) {
  // s = s0 (1 + d), beta mu s0^beta = 1:  (1 + d)^beta - 1 + eps s0 (1 + d) = 0
  const double s0 = std::pow(beta * mu, -1.0 / beta);
  return newton_offset([&](double d) { return std::expm1(beta * std::log1p(d)) + eps * s0 * (1.0 + d); },
                       [&](double d) { return beta * std::pow(1.0 + d, beta - 1.0) + eps * s0; }, "large_beta_coefficients");
}

}  // namespace detail

/// s(eps) solving s = 1 - eps beta mu s^beta.
inline double implicit_root_small_beta(double eps, double beta, double mu) {
  return 1.0 + detail::offset_small_beta(eps, beta, mu);
}

/// s(eps) solving beta mu s^beta = 1 - eps s.
inline double implicit_root_large_beta(double eps, double beta, double mu) {
  return std::pow(beta * mu, -1.0 / beta) * (1.0 + detail::offset_large_beta(eps, beta, mu));
}

/// f_j, 1 <= j < 1/(1 - beta), Taylor coefficients of f(eps) = F(s(eps); eps),
/// F(s; eps) = s - ln s + eps mu s^beta.
inline std::vector<double> small_beta_coefficients(double beta, double mu) {
  if (!(beta > 0) || !(beta < 1)) throw std::invalid_argument("small_beta_coefficients: beta must lie in (0, 1)");
  if (!(mu > 0)) throw std::invalid_argument("small_beta_coefficients: mu must be positive");
  const int n = detail::strict_index_count(1.0 / (1.0 - beta));
  auto f_minus_one = [&](double eps) {
    const double d = detail::offset_small_beta(eps, beta, mu);
    return (d - std::log1p(d)) + eps * mu * std::pow(1.0 + d, beta);
  };
  return detail::taylor_coefficients(f_minus_one, n);
}

/// g_j, 1 <= j < beta/(beta - 1), Taylor coefficients of g(eps) = G(s(eps); eps),
/// G(s; eps) = mu s^beta - ln s + eps s.
inline std::vector<double> large_beta_coefficients(double beta, double mu) {
  if (!(beta > 1)) throw std::invalid_argument("large_beta_coefficients: beta must exceed 1");
  if (!(mu > 0)) throw std::invalid_argument("large_beta_coefficients: mu must be positive");
  const int n = detail::strict_index_count(beta / (beta - 1.0));
  const double s0 = std::pow(beta * mu, -1.0 / beta);
  auto g_minus_g0 = [&](double eps) {
    const double d = detail::offset_large_beta(eps, beta, mu);
    return std::expm1(beta * std::log1p(d)) / beta - std::log1p(d) + eps * s0 * (1.0 + d);
  };
  return detail::taylor_coefficients(g_minus_g0, n);
}

namespace detail {

inline double predict_exp_with(double k, double beta, double mu, const std::vector<double>& c) {
  if (beta < 1.0) {
    double r = 0.0;
    for (std::size_t j = 1; j <= c.size(); ++j) r -= c[j - 1] * std::pow(k, (beta - 1.0) * j + 1.0);
    return r;
  }
  if (beta == 1.0) return -std::log1p(mu) * k;
  double r = -((beta - 1.0) / beta) * k * std::log(k) + ((beta - 1.0 - std::log(mu * beta)) / beta) * k;
  for (std::size_t j = 1; j <= c.size(); ++j) r -= c[j - 1] * std::pow(k, (1.0 / beta - 1.0) * j + 1.0);
  return r;
}

}  // namespace detail

/// Leading terms of ln nu_k for the weight exp(-gamma |x|^{2 beta}), without
/// the O(ln k) remainder.
inline double predict_exp(double k, double beta, double mu) {
  if (!(beta > 0)) throw std::invalid_argument("predict_exp: beta must be positive");
  if (!(mu > 0)) throw std::invalid_argument("predict_exp: mu must be positive");
  std::vector<double> c;
  if (beta < 1.0) c = small_beta_coefficients(beta, mu);
  if (beta > 1.0) c = large_beta_coefficients(beta, mu);
  return detail::predict_exp_with(k, beta, mu, c);
}

/// Semiclassical count: half the phase-space measure of {+-v > lambda}.
inline double predict_counting(double lambda, const Symbol2D& v, Sign sign = Sign::plus) {
  if (!(lambda > 0)) throw std::invalid_argument("predict_counting: lambda must be positive");
  return phase_space_volume(v, lambda, sign);
}

struct AsymptoticModel {
  enum class Kind { compact, exp_small_beta, exp_beta_one, exp_large_beta, counting };
  Kind kind = Kind::compact;
  double b = 1.0, capacity = 1.0;
  double beta = 1.0, mu = 1.0;
  std::vector<double> coeffs;
  std::function<double(double)> volume;

  static AsymptoticModel compact(double b, double cap) {
    if (!(b > 0) || !(cap > 0)) throw std::invalid_argument("AsymptoticModel: b and capacity must be positive");
    AsymptoticModel m;
    m.kind = Kind::compact;
    m.b = b;
    m.capacity = cap;
    return m;
  }

  /// Model for exp(-gamma |x|^{2 beta}) at field b.
  static AsymptoticModel exp_weight(double gamma, double beta, double b) {
    if (!(gamma > 0) || !(beta > 0) || !(b > 0))
      throw std::invalid_argument("AsymptoticModel: gamma, beta and b must be positive");
    AsymptoticModel m;
    m.b = b;
    m.beta = beta;
    m.mu = exp_weight_mu(gamma, beta, b);
    if (beta < 1.0) {
      m.kind = Kind::exp_small_beta;
      m.coeffs = small_beta_coefficients(beta, m.mu);
    } else if (beta == 1.0) {
      m.kind = Kind::exp_beta_one;
    } else {
      m.kind = Kind::exp_large_beta;
      m.coeffs = large_beta_coefficients(beta, m.mu);
    }
    return m;
  }

  static AsymptoticModel counting(std::function<double(double)> vol) {
    AsymptoticModel m;
    m.kind = Kind::counting;
    m.volume = std::move(vol);
    return m;
  }

  bool is_log_eigenvalue_model() const { return kind != Kind::counting; }

  /// ln nu_k prediction, or the count at threshold x for the counting model.
  double operator()(double x) const {
    switch (kind) {
      case Kind::compact: return predict_compact(x, b, capacity);
      case Kind::exp_small_beta:
      case Kind::exp_beta_one:
      case Kind::exp_large_beta: return detail::predict_exp_with(x, beta, mu, coeffs);
      case Kind::counting: return volume(x);
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind) {
      case Kind::compact: return "compact";
      case Kind::exp_small_beta: return "exp_small_beta";
      case Kind::exp_beta_one: return "exp_beta_one";
      case Kind::exp_large_beta: return "exp_large_beta";
      case Kind::counting: return "counting";
    }
    return "";
  }
};

struct ResidualReport {
  int k_lo = 0, k_hi = 0;
  std::vector<int> ks;
  std::vector<double> log_eigs, model, residuals;  // residual = ln nu_k - model(k)
  double max_abs_over_k = 0.0;
  double max_abs_over_ln_k = 0.0;
};

/// Residuals of ln nu_k against a log-eigenvalue model for k in [k_lo, k_hi];
/// eigs[k] is indexed from k = 0.
inline ResidualReport compare_series(const std::vector<LogReal>& eigs, const AsymptoticModel& model, int k_lo,
                                     int k_hi) {
  if (!model.is_log_eigenvalue_model()) throw std::invalid_argument("compare_series: counting models are not per-index");
  if (k_lo < 2 || k_hi < k_lo) throw std::invalid_argument("compare_series: need 2 <= k_lo <= k_hi");
  if (k_hi >= static_cast<int>(eigs.size())) throw std::invalid_argument("compare_series: k_hi beyond the spectrum");
  ResidualReport r;
  r.k_lo = k_lo;
  r.k_hi = k_hi;
  for (int k = k_lo; k <= k_hi; ++k) {
    const LogReal& e = eigs[k];
    if (e.sign <= 0) throw std::domain_error("compare_series: nonpositive eigenvalue at k = " + std::to_string(k));
    const double m = model(k), res = e.log_abs - m;
    r.ks.push_back(k);
    r.log_eigs.push_back(e.log_abs);
    r.model.push_back(m);
    r.residuals.push_back(res);
    r.max_abs_over_k = std::max(r.max_abs_over_k, std::abs(res) / k);
    r.max_abs_over_ln_k = std::max(r.max_abs_over_ln_k, std::abs(res) / std::log(static_cast<double>(k)));
  }
  return r;
}

inline ResidualReport compare_series(const std::vector<double>& eigs, const AsymptoticModel& model, int k_lo,
                                     int k_hi) {
  std::vector<LogReal> l;
  l.reserve(eigs.size());
  for (double v : eigs) l.push_back(LogReal::from_value(v));
  return compare_series(l, model, k_lo, k_hi);
}

}  // namespace landau
