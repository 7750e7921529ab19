#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "landau/quadrature.hpp"
#include "landau/special_functions.hpp"

namespace landau {

using cplx = std::complex<double>;

/// Real radial factor Phi_{k,l}(r) of the Wigner kernel, so that
/// Psi_{k,l}(r cos t, r sin t) = e^{-i(k-l)t} Phi_{k,l}(r). Symmetric in (k, l).
///
/// The phase sign follows the integral definition of W(u, v) (checked by
/// wigner_numeric): W(psi_0, psi_1) is proportional to x + i xi. The
/// textbook two-branch formula with (x + i xi)^{k-l} for k >= l is the
/// complex conjugate of this.
inline double wigner_radial(int k, int l, double r) {
  if (k < 0 || l < 0) throw std::invalid_argument("wigner_radial: indices must be nonnegative");
  const int lo = std::min(k, l), m = std::abs(k - l);
  const double g = laguerre_fn_normalized(lo, m, 2.0 * r * r);
  return (lo % 2 ? -g : g) / pi;
}

/// Psi_{k,l}(x, xi) = W(psi_k, psi_l)(x, xi).
inline cplx wigner_eval(int k, int l, double x, double xi) {
  const double r = std::hypot(x, xi);
  const double phi = wigner_radial(k, l, r);
  if (k == l) return {phi, 0.0};
  const double theta = std::atan2(xi, x);
  const double a = static_cast<double>(l - k) * theta;
  return {phi * std::cos(a), phi * std::sin(a)};
}

/// Psi_k = Psi_{k,k} = (1/pi)(-1)^k L_k(2s) e^{-s}, s = x^2 + xi^2.
inline double wigner_diag(int k, double x, double xi) { return wigner_radial(k, k, std::hypot(x, xi)); }

/// All Psi_{k,l}(x, xi) for k, l < n, written row-major into out (n*n).
inline void wigner_table(int n, double x, double xi, std::vector<cplx>& out, std::vector<double>& scratch) {
  out.assign(static_cast<std::size_t>(n) * n, cplx{});
  scratch.resize(n);
  const double u = 2.0 * (x * x + xi * xi);
  const double theta = std::atan2(xi, x);
  for (int m = 0; m < n; ++m) {
    laguerre_fn_normalized(n - 1 - m, m, u, scratch);
    const double c = std::cos(m * theta), s = std::sin(m * theta);
    for (int l = 0; l + m < n; ++l) {
      const double phi = (l % 2 ? -scratch[l] : scratch[l]) / pi;
      const int k = l + m;
      out[static_cast<std::size_t>(k) * n + l] = {phi * c, -phi * s};
      out[static_cast<std::size_t>(l) * n + k] = {phi * c, phi * s};
    }
  }
}

/// Brute-force Wigner transform
///   (2 pi)^{-1} int e^{i y xi} u(x - y/2) conj(v(x + y/2)) dy
/// by Gauss-Hermite in z = y/2, which centres the Gaussian envelope of
/// u(x - z) v(x + z) at z = 0.
template <class U, class V>
cplx wigner_numeric(U&& u, V&& v, double x, double xi, int order = 120) {
  const auto& rule = cached_gauss_hermite(order);
  cplx acc{};
  for (int i = 0; i < rule.order; ++i) {
    const double z = rule.nodes[i];
    const cplx val = cplx(u(x - z)) * std::conj(cplx(v(x + z)));
    acc += rule.scaled_weights[i] * std::polar(1.0, 2.0 * z * xi) * val;
  }
  return acc / pi;
}

/// (G_1 * Psi_k)(x, xi) = (2 pi k!)^{-1} (s/2)^k e^{-s/2}.
inline double husimi_diag(int k, double x, double xi) {
  if (k < 0) throw std::invalid_argument("husimi_diag: k must be nonnegative");
  const double s = x * x + xi * xi;
  if (s == 0.0) return k == 0 ? 1.0 / (2.0 * pi) : 0.0;
  return std::exp(k * std::log(0.5 * s) - 0.5 * s - log_factorial(k)) / (2.0 * pi);
}

/// Convolution of G_1 with Psi_k by quadrature. The product of the two
/// Gaussians is exp(-2|z - w/2|^2 - |w|^2/2), so the rule is centred at w/2
/// and scaled by 1/sqrt(2).
inline double husimi_numeric(int k, double x, double xi, int order = 80,
                             const std::function<double(int, double, double)>& diag = wigner_diag) {
  const auto& rule = cached_gauss_hermite(order);
  auto f = [&](double zx, double zy) {
    const double dx = x - zx, dy = xi - zy;
    return std::exp(-(dx * dx + dy * dy)) / pi * diag(k, zx, zy);
  };
  return integrate_r2(f, rule, {0.5 * x, 0.5 * xi}, 1.0 / std::sqrt(2.0));
}

/// Unitary 2-D Fourier transform of Psi_k at w by quadrature, against the
/// closed form ((-1)^k / 2) Psi_k(w / 2).
inline std::pair<double, double> wigner_fourier_check(
    int k, std::array<double, 2> w, int order = 0,
    const std::function<double(int, double, double)>& diag = wigner_diag) {
  if (k < 0 || k > 64) throw std::invalid_argument("wigner_fourier_check: k must lie in [0, 64]");
  if (order <= 0) order = std::max(100, 2 * k + 60);
  const auto& rule = cached_gauss_hermite(order);
  // Psi_k is even, so only the cosine part survives.
  auto f = [&](double zx, double zy) { return std::cos(w[0] * zx + w[1] * zy) * diag(k, zx, zy); };
  const double lhs = integrate_r2(f, rule) / (2.0 * pi);
  const double rhs = (k % 2 ? -0.5 : 0.5) * diag(k, 0.5 * w[0], 0.5 * w[1]);
  return {lhs, rhs};
}

/// <Psi_{k,l}, Psi_{k2,l2}> over R^2 by tensor Gauss-Hermite.
inline cplx moyal_pairing(int k, int l, int k2, int l2, int order = 80) {
  return integrate_r2(
      [&](double x, double xi) { return wigner_eval(k, l, x, xi) * std::conj(wigner_eval(k2, l2, x, xi)); },
      cached_gauss_hermite(order));
}

}  // namespace landau
