#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "landau/operators.hpp"
#include "landau/special_functions.hpp"
#include "landau/symbol.hpp"
#include "landau/wigner.hpp"

namespace landau {

/// Psi_{k,l}(x, xi) provider, so a suite can run against a modified kernel.
using WignerKernel = std::function<cplx(int, int, double, double)>;

inline cplx reference_kernel(int k, int l, double x, double xi) { return wigner_eval(k, l, x, xi); }

/// Kernel with the phase sign flipped on the k < l branch.
inline cplx phase_fault_kernel(int k, int l, double x, double xi) {
  const cplx v = wigner_eval(k, l, x, xi);
  return k < l ? std::conj(v) : v;
}

struct SuiteResult {
  std::string name;
  int checks = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = true;
  std::string note;

  double worst_ratio = 0.0;  // max over checks of error / its tolerance

  void record(double err) { record(err, tolerance); }
  void record(double err, double tol) {
    ++checks;
    if (std::isnan(err)) err = INFINITY;
    max_error = std::max(max_error, err);
    worst_ratio = std::max(worst_ratio, err / tol);
    if (!(err < tol)) passed = false;
  }
};

struct VerifyOptions {
  WignerKernel kernel = reference_kernel;
  int order = 0;  // quadrature override for the kernel suites
};

namespace verify {

inline SuiteResult wigner(const VerifyOptions& o) {
  SuiteResult r{"wigner", 0, 0.0, 1e-9, true, "closed form vs brute-force transform, k, l <= 5"};
  for (int k = 0; k <= 5; ++k)
    for (int l = 0; l <= 5; ++l)
      for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) {
          const double x = -3.0 + i, xi = -3.0 + j;
          const cplx num = wigner_numeric([&](double t) { return hermite_fn(k, t); },
                                          [&](double t) { return hermite_fn(l, t); }, x, xi,
                                          o.order > 0 ? o.order : 120);
          r.record(std::abs(o.kernel(k, l, x, xi) - num));
        }
  return r;
}

inline SuiteResult moyal(const VerifyOptions& o) {
  SuiteResult r{"moyal", 0, 0.0, 1e-9, true, "<Psi_kl, Psi_k'l'> = delta delta / 2 pi, indices <= 3"};
  const auto& rule = cached_gauss_hermite(o.order > 0 ? o.order : 60);
  const int n = 4;
  std::vector<std::vector<cplx>> vals(n * n, std::vector<cplx>(static_cast<std::size_t>(rule.order) * rule.order));
  for (int a = 0; a < n * n; ++a)
    for (int i = 0; i < rule.order; ++i)
      for (int j = 0; j < rule.order; ++j)
        vals[a][static_cast<std::size_t>(i) * rule.order + j] = o.kernel(a / n, a % n, rule.nodes[i], rule.nodes[j]);
  for (int a = 0; a < n * n; ++a)
    for (int c = 0; c < n * n; ++c) {
      cplx acc{};
      for (int i = 0; i < rule.order; ++i)
        for (int j = 0; j < rule.order; ++j) {
          const std::size_t idx = static_cast<std::size_t>(i) * rule.order + j;
          acc += rule.scaled_weights[i] * rule.scaled_weights[j] * vals[a][idx] * std::conj(vals[c][idx]);
        }
      r.record(std::abs(acc - (a == c ? 1.0 / (2.0 * pi) : 0.0)));
    }
  return r;
}

inline SuiteResult husimi(const VerifyOptions& o) {
  SuiteResult r{"husimi", 0, 0.0, 1e-8, true, "G_1 * Psi_k closed form vs quadrature, k <= 8"};
  auto diag = [&](int k, double x, double xi) { return o.kernel(k, k, x, xi).real(); };
  for (int k = 0; k <= 8; ++k)
    for (double x : {-2.0, 0.0, 0.7, 2.5})
      for (double xi : {-1.5, 0.0, 1.0})
        r.record(std::abs(husimi_numeric(k, x, xi, o.order > 0 ? o.order : 80, diag) - husimi_diag(k, x, xi)));
  return r;
}

/// F[Psi_kl](w) = ((-1)^l (-i)^{k-l} / 2) conj(Psi_lk(w / 2)), F unitary with e^{-i w.z}.
inline SuiteResult fourier(const VerifyOptions& o) {
  SuiteResult r{"fourier", 0, 0.0, 1e-8, true, "Fourier transform of Psi_kl, k, l <= 4, |w| <= 4"};
  const auto& rule = cached_gauss_hermite(o.order > 0 ? o.order : 100);
  const std::vector<std::array<double, 2>> ws{{0.0, 0.0}, {1.0, 0.5}, {-2.0, 1.5}, {0.0, 4.0}, {2.5, -2.5}};
  for (int k = 0; k <= 4; ++k)
    for (int l = 0; l <= 4; ++l)
      for (const auto& w : ws) {
        cplx lhs{};
        for (int i = 0; i < rule.order; ++i)
          for (int j = 0; j < rule.order; ++j) {
            const double zx = rule.nodes[i], zy = rule.nodes[j];
            lhs += rule.scaled_weights[i] * rule.scaled_weights[j] * std::polar(1.0, -(w[0] * zx + w[1] * zy)) *
                   o.kernel(k, l, zx, zy);
          }
        lhs /= 2.0 * pi;
        const cplx pre = (l % 2 ? -0.5 : 0.5) * std::pow(cplx(0.0, -1.0), k - l);
        const cplx rhs = pre * std::conj(o.kernel(l, k, 0.5 * w[0], 0.5 * w[1]));
        r.record(std::abs(lhs - rhs));
      }
  return r;
}

inline SuiteResult symplectic(const VerifyOptions&) {
  SuiteResult r{"symplectic", 0, 0.0, 1e-12, true,
                "symplectic map defect (1e-14) and Landau symbol identity (1e-12 relative)"};
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> N(0.0, 1.5);
  for (double b : {0.5, 1.0, 2.0}) {
    r.record(symplectic_map_defect(b), 1e-14);
    for (int i = 0; i < 100; ++i) {
      const Point4 p{N(rng), N(rng), N(rng), N(rng)};
      auto [lhs, rhs] = landau_symbol_check(b, p);
      r.record(std::abs(lhs - rhs) / std::max(1e-300, std::abs(rhs)));
    }
  }
  return r;
}

inline SuiteResult hilbert_schmidt(const VerifyOptions&) {
  SuiteResult r{"hilbert-schmidt", 0, 0.0, 1e-6, true, "truncated matrix norm vs symbol norm"};
  const auto one = hilbert_schmidt_check(level_kernel_symbol(0, 2 * pi), 8);
  r.record(std::abs(one.matrix_norm_sq - 1.0));
  r.record(std::abs(one.symbol_norm_sq_scaled - 1.0));
  const auto g = hilbert_schmidt_check(Symbol2D::radial(RadialProfile::make_gaussian(0.5)), 48);
  r.record(std::abs(g.matrix_norm_sq - g.symbol_norm_sq_scaled));
  return r;
}

inline SuiteResult second_derivative_identity(const VerifyOptions&) {
  SuiteResult r{"level-shift", 0, 0.0, 1e-7, true, "(1 + Delta/2b) zeta on level 0 vs zeta on level 1, k <= 10"};
  for (double b : {1.0, 2.0}) {
    const auto zeta = Symbol2D::radial(RadialProfile::make_gaussian(0.25));
    const auto lhs = toeplitz_radial_eigs(level_lift(zeta, b, 1).profile, 0, b, 11);
    const auto rhs = toeplitz_radial_eigs(zeta.profile, 1, b, 11);
    for (int k = 0; k <= 10; ++k) r.record(std::abs(lhs[k] - rhs[k]) / std::abs(rhs[k]));
  }
  return r;
}

inline SuiteResult banded(const VerifyOptions&) {
  SuiteResult r{"banded", 0, 0.0, 1e-9, true, "angular modes |m| <= K give bandwidth K"};
  r.record([] {
    const auto b = banded_structure_check(Symbol2D::radial(RadialProfile::make_gaussian(0.5)), 12);
    return b.max_outside / b.max_inside;
  }());
  auto g = [](double rr) { return cplx(0.5 * rr * std::exp(-rr * rr / 2), 0.0); };
  auto zero = [](double) { return cplx{}; };
  const auto mode1 = Symbol2D::angular_fourier(1, {g, zero, g}, Symbol2D::Decay::schwartz);
  const auto b1 = banded_structure_check(mode1, 12);
  r.record(b1.max_outside / b1.max_inside);
  // mode m needs a radial factor of order r^m to stay smooth at the origin
  auto g2 = [](double rr) { return cplx(0.5 * rr * rr * std::exp(-rr * rr / 2), 0.0); };
  const auto mode2 = Symbol2D::angular_fourier(2, {g2, zero, zero, zero, g2}, Symbol2D::Decay::schwartz);
  const auto b2 = banded_structure_check(mode2, 12);
  r.record(b2.max_outside / b2.max_inside);
  return r;
}

inline SuiteResult positivity(const VerifyOptions&) {
  SuiteResult r{"positivity", 0, 0.0, 0.5, true, "Laguerre-coefficient positivity criteria (pass/fail as 0/1)"};
  auto flag = [&](bool ok) { r.record(ok ? 0.0 : 1.0); };
  flag(positivity_laguerre_weyl(RadialProfile::make_gaussian(1.0, 1.0 / pi), 16).all_nonneg);
  flag(positivity_laguerre_weyl(level_kernel_symbol(1, -2 * pi).profile, 8).first_negative == 1);
  flag(positivity_laguerre_antiwick(RadialProfile::make_custom([](double s) { return 1.0 - s; }), 4).first_negative == 0);
  flag(positivity_laguerre_antiwick(RadialProfile::make_disk(1.0), 16).all_nonneg);
  return r;
}

inline SuiteResult radial(const VerifyOptions&) {
  SuiteResult r{"radial", 0, 0.0, 1e-9, true, "weyl_matrix diagonal vs radial formula and Fourier route, N = 16"};
  for (const auto& p : {RadialProfile::make_gaussian(0.3), RadialProfile::make_laguerre_mix({0.4, -0.2, 0.1})}) {
    const auto mu = weyl_radial_eigs(p, 16);
    const auto via_f = weyl_radial_eigs_fourier(radial_fourier_transform(p), 16);
    const auto t = weyl_matrix(Symbol2D::radial(p), 16);
    for (int k = 0; k < 16; ++k)
      for (int l = 0; l < 16; ++l) r.record(std::abs(t.entries(k, l) - (k == l ? mu[k] : 0.0)));
    for (int k = 0; k < 16; ++k) r.record(std::abs(mu[k] - via_f[k]));
  }
  return r;
}

}  // namespace verify

struct SuiteEntry {
  std::string name;
  std::function<SuiteResult(const VerifyOptions&)> run;
};

inline std::vector<SuiteEntry> verify_suites() {
  return {{"wigner", verify::wigner},         {"moyal", verify::moyal},
          {"husimi", verify::husimi},         {"fourier", verify::fourier},
          {"symplectic", verify::symplectic}, {"hilbert-schmidt", verify::hilbert_schmidt},
          {"level-shift", verify::second_derivative_identity},
          {"banded", verify::banded},         {"positivity", verify::positivity},
          {"radial", verify::radial}};
}

/// Runs every suite whose name equals filter (all when filter is empty).
inline std::vector<SuiteResult> run_verify(const VerifyOptions& opt, const std::string& filter = "") {
  std::vector<SuiteResult> out;
  for (const auto& s : verify_suites()) {
    if (!filter.empty() && s.name != filter) continue;
    try {
      out.push_back(s.run(opt));
    } catch (const std::exception& e) {
      SuiteResult r{s.name, 0, INFINITY, 0.0, false, std::string("exception: ") + e.what()};
      r.worst_ratio = INFINITY;
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace landau
