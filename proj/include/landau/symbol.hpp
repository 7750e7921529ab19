#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "landau/quadrature.hpp"
#include "landau/special_functions.hpp"
#include "landau/wigner.hpp"

namespace landau {

/// Radial function R(s) of s = x^2 + xi^2. The value at s is
/// amplitude * base(argument_scale * s).
struct RadialProfile {
  enum class Kind {
    gaussian,        // e^{-a s}
    power,           // (1 + s)^{-gamma/2}
    disk_indicator,  // 1 on [0, c]
    exp_beta,        // e^{-gamma s^beta}
    laguerre_mix,    // sum c_k (-1)^k L_k(2s) e^{-s}
    tabulated,       // piecewise linear on grid, zero past the last node
    constant,        // 1
    poly_gaussian,   // (sum p_j s^j) e^{-a s}
    sum,             // sum w_i parts_i
    custom           // user evaluator
  };

  Kind kind = Kind::constant;
  double a = 0.0, gamma = 0.0, beta = 1.0, c = 0.0;
  std::vector<double> coeffs;
  std::vector<double> grid, values;
  std::vector<double> weights;
  std::vector<RadialProfile> parts;
  std::function<double(double)> fn;
  std::optional<double> custom_support;
  std::vector<double> custom_breaks;
  bool custom_schwartz = false;
  double amplitude = 1.0;
  double argument_scale = 1.0;

  static RadialProfile make_gaussian(double a, double amplitude = 1.0) {
    if (!(a > 0)) throw std::invalid_argument("gaussian profile: a must be positive");
    RadialProfile p;
    p.kind = Kind::gaussian;
    p.a = a;
    p.amplitude = amplitude;
    return p;
  }
  static RadialProfile make_power(double gamma, double amplitude = 1.0) {
    if (!(gamma > 0)) throw std::invalid_argument("power profile: gamma must be positive");
    RadialProfile p;
    p.kind = Kind::power;
    p.gamma = gamma;
    p.amplitude = amplitude;
    return p;
  }
  static RadialProfile make_disk(double c, double amplitude = 1.0) {
    if (!(c > 0)) throw std::invalid_argument("disk_indicator profile: c must be positive");
    RadialProfile p;
    p.kind = Kind::disk_indicator;
    p.c = c;
    p.amplitude = amplitude;
    return p;
  }
  static RadialProfile make_exp_beta(double gamma, double beta, double amplitude = 1.0) {
    if (!(gamma > 0) || !(beta > 0)) throw std::invalid_argument("exp_beta profile: gamma and beta must be positive");
    RadialProfile p;
    p.kind = Kind::exp_beta;
    p.gamma = gamma;
    p.beta = beta;
    p.amplitude = amplitude;
    return p;
  }
  static RadialProfile make_laguerre_mix(std::vector<double> coeffs, double amplitude = 1.0) {
    RadialProfile p;
    p.kind = Kind::laguerre_mix;
    p.coeffs = std::move(coeffs);
    p.amplitude = amplitude;
    return p;
  }
  static RadialProfile make_tabulated(std::vector<double> grid, std::vector<double> values) {
    if (grid.size() < 2 || grid.size() != values.size())
      throw std::invalid_argument("tabulated profile: need matching grid and values, at least 2 nodes");
    if (grid.front() < 0.0) throw std::invalid_argument("tabulated profile: grid must start at s >= 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("tabulated profile: grid must increase strictly");
    RadialProfile p;
    p.kind = Kind::tabulated;
    p.grid = std::move(grid);
    p.values = std::move(values);
    return p;
  }
  static RadialProfile make_constant(double value) {
    RadialProfile p;
    p.kind = Kind::constant;
    p.amplitude = value;
    return p;
  }
  static RadialProfile make_poly_gaussian(std::vector<double> poly, double a, double amplitude = 1.0) {
    if (!(a >= 0)) throw std::invalid_argument("poly_gaussian profile: a must be nonnegative");
    RadialProfile p;
    p.kind = Kind::poly_gaussian;
    p.coeffs = std::move(poly);
    p.a = a;
    p.amplitude = amplitude;
    return p;
  }
  static RadialProfile make_sum(std::vector<double> weights, std::vector<RadialProfile> parts) {
    if (weights.size() != parts.size()) throw std::invalid_argument("sum profile: weights and parts differ in length");
    RadialProfile p;
    p.kind = Kind::sum;
    p.weights = std::move(weights);
    p.parts = std::move(parts);
    return p;
  }
  static RadialProfile make_custom(std::function<double(double)> fn, std::optional<double> support = std::nullopt,
                                   std::vector<double> breaks = {}, bool schwartz = false) {
    RadialProfile p;
    p.kind = Kind::custom;
    p.fn = std::move(fn);
    p.custom_support = support;
    p.custom_breaks = std::move(breaks);
    p.custom_schwartz = schwartz;
    return p;
  }

  /// Copy with the argument rescaled: result(s) = this(factor * s).
  RadialProfile scaled_argument(double factor) const {
    RadialProfile p = *this;
    p.argument_scale *= factor;
    return p;
  }
  RadialProfile scaled(double factor) const {
    RadialProfile p = *this;
    p.amplitude *= factor;
    return p;
  }

  double operator()(double s) const { return amplitude * base(argument_scale * s); }

  /// Sign and log-magnitude of the value; exact in the exponent for the
  /// Gaussian-type kinds, so arguments far into the tail are safe.
  LogReal log_eval(double s) const {
    const double u = argument_scale * s;
    double la = 0.0;
    int sg = 1;
    if (amplitude == 0.0) return {};
    la = std::log(std::abs(amplitude));
    sg = amplitude > 0 ? 1 : -1;
    switch (kind) {
      case Kind::gaussian:
        return {la - a * u, sg};
      case Kind::exp_beta:
        return {la - gamma * std::pow(u, beta), sg};
      case Kind::power:
        return {la - 0.5 * gamma * std::log1p(u), sg};
      case Kind::poly_gaussian: {
        const double pv = horner(u);
        if (pv == 0.0) return {};
        return {la + std::log(std::abs(pv)) - a * u, pv > 0 ? sg : -sg};
      }
      default: {
        LogReal v = LogReal::from_value(base(u));
        if (v.sign == 0) return {};
        return {la + v.log_abs, sg * v.sign};
      }
    }
  }

  /// End of the support in s, when it is bounded.
  std::optional<double> support_end() const {
    switch (kind) {
      case Kind::disk_indicator:
        return c / argument_scale;
      case Kind::tabulated:
        return grid.back() / argument_scale;
      case Kind::custom:
        if (custom_support) return *custom_support / argument_scale;
        return std::nullopt;
      case Kind::sum: {
        double end = 0.0;
        for (const auto& p : parts) {
          auto e = p.support_end();
          if (!e) return std::nullopt;
          end = std::max(end, *e / argument_scale);
        }
        return end;
      }
      default:
        return std::nullopt;
    }
  }

  bool compact_support() const { return support_end().has_value(); }

  /// Points in s where the profile or its derivative jumps.
  std::vector<double> breakpoints() const {
    std::vector<double> out;
    switch (kind) {
      case Kind::disk_indicator:
        out.push_back(c);
        break;
      case Kind::tabulated:
        out = grid;
        break;
      case Kind::custom:
        out = custom_breaks;
        if (custom_support) out.push_back(*custom_support);
        break;
      case Kind::sum:
        for (const auto& p : parts)
          for (double t : p.breakpoints()) out.push_back(t);
        break;
      default:
        break;
    }
    for (double& t : out) t /= argument_scale;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// True when the profile and all derivatives decay faster than any power.
  bool schwartz() const {
    switch (kind) {
      case Kind::gaussian:
      case Kind::exp_beta:
      case Kind::laguerre_mix:
        return true;
      case Kind::poly_gaussian:
        return a > 0;
      case Kind::custom:
        return custom_schwartz;
      case Kind::sum:
        return std::all_of(parts.begin(), parts.end(), [](const RadialProfile& p) { return p.schwartz(); });
      default:
        return false;
    }
  }

  std::string kind_name() const {
    switch (kind) {
      case Kind::gaussian: return "gaussian";
      case Kind::power: return "power";
      case Kind::disk_indicator: return "disk_indicator";
      case Kind::exp_beta: return "exp_beta";
      case Kind::laguerre_mix: return "laguerre_mix";
      case Kind::tabulated: return "tabulated";
      case Kind::constant: return "constant";
      case Kind::poly_gaussian: return "poly_gaussian";
      case Kind::sum: return "sum";
      case Kind::custom: return "custom";
    }
    return "unknown";
  }

 private:
  double horner(double u) const {
    double pv = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) pv = pv * u + *it;
    return pv;
  }

  double base(double u) const {
    switch (kind) {
      case Kind::gaussian:
        return std::exp(-a * u);
      case Kind::power:
        return std::pow(1.0 + u, -0.5 * gamma);
      case Kind::disk_indicator:
        return u <= c ? 1.0 : 0.0;
      case Kind::exp_beta:
        return std::exp(-gamma * std::pow(u, beta));
      case Kind::laguerre_mix: {
        double acc = 0.0;
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
          if (coeffs[k] == 0.0) continue;
          const double v = laguerre_weighted(static_cast<int>(k), 0.0, 2.0 * u);
          acc += (k % 2 ? -coeffs[k] : coeffs[k]) * v;
        }
        return acc;
      }
      case Kind::tabulated: {
        if (u <= grid.front()) return values.front();
        if (u > grid.back()) return 0.0;
        auto it = std::upper_bound(grid.begin(), grid.end(), u);
        const std::size_t i = static_cast<std::size_t>(it - grid.begin());
        if (i >= grid.size()) return values.back();
        const double w = (u - grid[i - 1]) / (grid[i] - grid[i - 1]);
        return (1.0 - w) * values[i - 1] + w * values[i];
      }
      case Kind::constant:
        return 1.0;
      case Kind::poly_gaussian:
        return horner(u) * std::exp(-a * u);
      case Kind::sum: {
        double acc = 0.0;
        for (std::size_t i = 0; i < parts.size(); ++i) acc += weights[i] * parts[i](u);
        return acc;
      }
      case Kind::custom:
        return fn(u);
    }
    return 0.0;
  }
};

/// Real symbol on R^2 in the variables (x, xi).
struct Symbol2D {
  enum class Structure { radial, angular_fourier, generic };
  enum class Decay { schwartz, power, compact, bounded };

  Structure structure = Structure::generic;
  Decay decay = Decay::bounded;
  double decay_gamma = 0.0;
  RadialProfile profile;
  int modes_K = 0;
  /// Radial coefficient functions F_k(r), k = -K..K at index k + K.
  std::vector<std::function<cplx(double)>> modes;
  std::function<double(double, double)> fn;

  static Symbol2D radial(RadialProfile p) {
    Symbol2D s;
    s.structure = Structure::radial;
    if (p.kind == RadialProfile::Kind::power) {
      s.decay = Decay::power;
      s.decay_gamma = p.gamma;
    } else if (p.compact_support()) {
      s.decay = Decay::compact;
    } else if (p.schwartz()) {
      s.decay = Decay::schwartz;
    }
    s.profile = std::move(p);
    return s;
  }

  /// F(r cos t, r sin t) = sum_k F_k(r) e^{ikt}; F_{-k} must be conj(F_k)
  /// for the symbol to be real.
  static Symbol2D angular_fourier(int K, std::vector<std::function<cplx(double)>> modes, Decay decay) {
    if (K < 0 || modes.size() != static_cast<std::size_t>(2 * K + 1))
      throw std::invalid_argument("angular_fourier: need 2K+1 mode functions");
    Symbol2D s;
    s.structure = Structure::angular_fourier;
    s.modes_K = K;
    s.modes = std::move(modes);
    s.decay = decay;
    return s;
  }

  static Symbol2D generic(std::function<double(double, double)> f, Decay decay) {
    Symbol2D s;
    s.structure = Structure::generic;
    s.fn = std::move(f);
    s.decay = decay;
    return s;
  }

  double operator()(double x, double xi) const {
    switch (structure) {
      case Structure::radial:
        return profile(x * x + xi * xi);
      case Structure::angular_fourier: {
        const double r = std::hypot(x, xi), t = std::atan2(xi, x);
        cplx acc{};
        for (int k = -modes_K; k <= modes_K; ++k) acc += modes[k + modes_K](r) * std::polar(1.0, k * t);
        return acc.real();
      }
      case Structure::generic:
        return fn(x, xi);
    }
    return 0.0;
  }

  bool is_radial() const { return structure == Structure::radial; }
};

// ---------------------------------------------------------------------------
// Symplectic change of variables. Points on R^4 are ordered (x, y, xi, eta).

using Point4 = std::array<double, 4>;

inline void require_positive_field(double b) {
  if (!(b > 0)) throw std::invalid_argument("field strength b must be positive");
}

/// S_b, the linear symplectic map that carries H_0 to a harmonic oscillator
/// in the first pair of variables.
inline Point4 symplectic_map(double b, const Point4& p) {
  require_positive_field(b);
  const double rb = std::sqrt(b);
  const auto [x, y, xi, eta] = p;
  return {(x - eta) / rb, (xi - y) / rb, 0.5 * rb * (xi + y), -0.5 * rb * (eta + x)};
}

inline Point4 symplectic_map_inverse(double b, const Point4& p) {
  require_positive_field(b);
  const double rb = std::sqrt(b);
  const auto [x, y, xi, eta] = p;
  return {0.5 * (rb * x - 2.0 * eta / rb), 0.5 * (2.0 * xi / rb - rb * y), 0.5 * (rb * y + 2.0 * xi / rb),
          0.5 * (-2.0 * eta / rb - rb * x)};
}

inline Eigen::Matrix4d symplectic_map_matrix(double b) {
  Eigen::Matrix4d m;
  for (int j = 0; j < 4; ++j) {
    Point4 e{};
    e[j] = 1.0;
    const Point4 col = symplectic_map(b, e);
    for (int i = 0; i < 4; ++i) m(i, j) = col[i];
  }
  return m;
}

inline Eigen::Matrix4d symplectic_form() {
  Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
  j.block<2, 2>(0, 2) = Eigen::Matrix2d::Identity();
  j.block<2, 2>(2, 0) = -Eigen::Matrix2d::Identity();
  return j;
}

/// max |M^T J M - J| for the matrix of S_b.
inline double symplectic_map_defect(double b) {
  const Eigen::Matrix4d m = symplectic_map_matrix(b), j = symplectic_form();
  return (m.transpose() * j * m - j).cwiseAbs().maxCoeff();
}

/// Free Landau Hamiltonian symbol (xi + b y/2)^2 + (eta - b x/2)^2.
inline double landau_hamiltonian_symbol(double b, const Point4& p) {
  const auto [x, y, xi, eta] = p;
  const double u = xi + 0.5 * b * y, v = eta - 0.5 * b * x;
  return u * u + v * v;
}

/// (H0(S_b(p)), b(x^2 + xi^2)); the two agree identically.
inline std::pair<double, double> landau_symbol_check(double b, const Point4& p) {
  return {landau_hamiltonian_symbol(b, symplectic_map(b, p)), b * (p[0] * p[0] + p[2] * p[2])};
}

// ---------------------------------------------------------------------------
// Four-dimensional symbols.

enum class Frame { lab, pulled_back };

struct SeparableTerm {
  double coeff;
  Symbol2D first;   // in (x, xi)
  Symbol2D second;  // in (y, eta)
};

/// Symbol V on R^4. Separable terms always describe the pulled-back symbol
/// V_b = V o S_b as sum c A(x, xi) B(y, eta); the frame records whether
/// the terms were specified as V = (sum c A (x) B) o S_b^{-1} (lab) or
/// as V_b directly, which store the same data. Generic symbols carry an
/// evaluator of V in lab coordinates.
struct Symbol4D {
  bool separable = true;
  std::vector<SeparableTerm> terms;
  Frame frame = Frame::lab;
  double field_b = 1.0;
  std::function<double(const Point4&)> generic_lab;

  static Symbol4D make_separable(double b, std::vector<SeparableTerm> terms, Frame frame = Frame::lab) {
    require_positive_field(b);
    Symbol4D v;
    v.separable = true;
    v.terms = std::move(terms);
    v.frame = frame;
    v.field_b = b;
    return v;
  }
  static Symbol4D make_generic(double b, std::function<double(const Point4&)> f) {
    require_positive_field(b);
    Symbol4D v;
    v.separable = false;
    v.generic_lab = std::move(f);
    v.field_b = b;
    return v;
  }
  static Symbol4D zero(double b) { return make_separable(b, {}); }

  /// V_b(p) = V(S_b(p)).
  double eval_pulled(const Point4& p) const {
    if (!separable) return generic_lab(symplectic_map(field_b, p));
    double acc = 0.0;
    for (const auto& t : terms) acc += t.coeff * t.first(p[0], p[2]) * t.second(p[1], p[3]);
    return acc;
  }

  /// V(p) in lab coordinates.
  double eval_lab(const Point4& p) const {
    if (!separable) return generic_lab(p);
    return eval_pulled(symplectic_map_inverse(field_b, p));
  }

  Symbol4D negated() const {
    Symbol4D v = *this;
    if (separable) {
      for (auto& t : v.terms) t.coeff = -t.coeff;
    } else {
      auto f = generic_lab;
      v.generic_lab = [f](const Point4& p) { return -f(p); };
    }
    return v;
  }
};

// ---------------------------------------------------------------------------
// Reductions and transforms.

/// int F Psi_q over R^2. Radial symbols reduce to a half-line integral,
/// (-1)^q int R(s) L_q(2s) e^{-s} ds; other symbols use tensor Gauss-Hermite.
inline double pair_with_level(const Symbol2D& f, int q, int order = 0) {
  if (q < 0) throw std::invalid_argument("pair_with_level: q must be nonnegative");
  if (f.is_radial()) {
    const auto& p = f.profile;
    // L_q(2s) e^{-s} = laguerre_weighted(q, 0, 2s); in t = 2s the measure is dt/2
    const auto breaks = p.breakpoints();
    std::vector<double> bt;
    for (double s : breaks) bt.push_back(2.0 * s);
    const double t_max = p.support_end() ? 2.0 * *p.support_end() : 4.0 * q + 200.0;
    auto rule = sqrt_panel_rule(t_max, 0.25, bt);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = rule.nodes[i];
      acc += rule.weights[i] * p(0.5 * t) * laguerre_weighted(q, 0.0, t);
    }
    return (q % 2 ? -0.5 : 0.5) * acc;
  }
  if (order <= 0) order = 2 * q + 80;
  return integrate_r2([&](double x, double xi) { return f(x, xi) * wigner_diag(q, x, xi); },
                      cached_gauss_hermite(order));
}

/// v_{b,q}(y, eta) = int V_b(x, y, xi, eta) Psi_q(x, xi) dx dxi.
inline Symbol2D reduce_to_level(const Symbol4D& v, int q, int order = 0) {
  if (q < 0) throw std::invalid_argument("reduce_to_level: q must be nonnegative");
  if (v.separable) {
    std::vector<double> w;
    std::vector<Symbol2D> seconds;
    bool all_radial = true;
    for (const auto& t : v.terms) {
      w.push_back(t.coeff * pair_with_level(t.first, q, order));
      seconds.push_back(t.second);
      all_radial = all_radial && t.second.is_radial();
    }
    if (all_radial) {
      std::vector<RadialProfile> parts;
      for (const auto& s : seconds) parts.push_back(s.profile);
      return Symbol2D::radial(RadialProfile::make_sum(w, parts));
    }
    return Symbol2D::generic(
        [w, seconds](double y, double eta) {
          double acc = 0.0;
          for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * seconds[i](y, eta);
          return acc;
        },
        Symbol2D::Decay::bounded);
  }
  if (order <= 0) order = 2 * q + 80;
  const Symbol4D vv = v;
  return Symbol2D::generic(
      [vv, q, order](double y, double eta) {
        return integrate_r2(
            [&](double x, double xi) { return vv.eval_pulled({x, y, xi, eta}) * wigner_diag(q, x, xi); },
            cached_gauss_hermite(order));
      },
      Symbol2D::Decay::bounded);
}

namespace detail {

/// e^{-x} I_0(x) for x >= 0.
inline double bessel_i0e(double x) {
  if (x < 500.0) return std::cyl_bessel_i(0.0, x) * std::exp(-x);
  // asymptotic series; terms shrink fast for x this large
  double term = 1.0, acc = 1.0;
  for (int k = 1; k < 12; ++k) {
    term *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
    acc += term;
  }
  return acc / std::sqrt(2.0 * pi * x);
}

/// (R * G_1) at |w|^2 = s in polar form,
///   int_0^inf 2 rho R(rho^2) e^{-(r - rho)^2} I0e(2 r rho) d rho,  r = sqrt(s).
inline double radial_gaussian_convolution(const RadialProfile& p, double s) {
  const double r = std::sqrt(s);
  const double half_width = 9.0;
  double lo = std::max(0.0, r - half_width), hi = r + half_width;
  if (auto e = p.support_end()) hi = std::min(hi, std::sqrt(*e));
  if (!(hi > lo)) return 0.0;
  std::vector<double> cuts{lo};
  for (double t : p.breakpoints()) {
    const double rho = std::sqrt(t);
    if (rho > lo && rho < hi) cuts.push_back(rho);
  }
  if (r > lo && r < hi) cuts.push_back(r);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  auto f = [&](double rho) {
    const double d = r - rho;
    return 2.0 * rho * p(rho * rho) * std::exp(-d * d) * bessel_i0e(2.0 * r * rho);
  };
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double w = cuts[i + 1] - cuts[i];
    if (w <= 0) continue;
    acc += integrate_interval(f, cuts[i], cuts[i + 1], 20, std::max(1, static_cast<int>(std::ceil(w / 0.25))));
  }
  return acc;
}

/// Polynomial coefficients (in s) of sum c_k (-1)^k L_k(2s).
inline std::vector<double> laguerre_mix_polynomial(const std::vector<double>& c) {
  std::vector<double> poly(c.size(), 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] == 0.0) continue;
    const double sk = k % 2 ? -c[k] : c[k];
    // L_k(2s) = sum_j binom(k, j) (-2s)^j / j!
    for (std::size_t j = 0; j <= k; ++j) {
      const double lb = log_factorial(static_cast<int>(k)) - log_factorial(static_cast<int>(j)) -
                        log_factorial(static_cast<int>(k - j)) - log_factorial(static_cast<int>(j)) +
                        static_cast<double>(j) * std::log(2.0);
      poly[j] += sk * (j % 2 ? -1.0 : 1.0) * std::exp(lb);
    }
  }
  return poly;
}

}  // namespace detail

/// Anti-Wick to Weyl conversion, F * G_1 with G_1 = pi^{-1} e^{-|z|^2}.
inline Symbol2D antiwick_to_weyl(const Symbol2D& f) {
  using K = RadialProfile::Kind;
  if (f.is_radial()) {
    const RadialProfile& p = f.profile;
    switch (p.kind) {
      case K::constant:
        return f;
      case K::gaussian: {
        const double a = p.a * p.argument_scale;
        return Symbol2D::radial(RadialProfile::make_gaussian(a / (1.0 + a), p.amplitude / (1.0 + a)));
      }
      case K::laguerre_mix:
        if (p.argument_scale == 1.0) {
          // Psi_k * G_1 = (2 pi k!)^{-1} (s/2)^k e^{-s/2}
          std::vector<double> poly(p.coeffs.size());
          for (std::size_t k = 0; k < poly.size(); ++k)
            poly[k] = p.coeffs[k] * std::exp(-log_factorial(static_cast<int>(k)) - (k + 1.0) * std::log(2.0));
          return Symbol2D::radial(RadialProfile::make_poly_gaussian(poly, 0.5, p.amplitude));
        }
        break;
      case K::sum: {
        std::vector<RadialProfile> parts;
        for (const auto& q : p.parts)
          parts.push_back(antiwick_to_weyl(Symbol2D::radial(q.scaled_argument(p.argument_scale))).profile);
        std::vector<double> w = p.weights;
        for (double& x : w) x *= p.amplitude;
        return Symbol2D::radial(RadialProfile::make_sum(w, parts));
      }
      default:
        break;
    }
    const RadialProfile src = p;
    auto out = RadialProfile::make_custom(
        [src](double s) { return detail::radial_gaussian_convolution(src, s); }, std::nullopt, {},
        src.compact_support() || src.schwartz());
    Symbol2D res = Symbol2D::radial(out);
    if (p.kind == K::power) {
      res.decay = Symbol2D::Decay::power;
      res.decay_gamma = p.gamma;
    }
    return res;
  }
  const Symbol2D src = f;
  return Symbol2D::generic(
      [src](double x, double xi) {
        return integrate_r2([&](double zx, double zy) { return src(x - zx, xi - zy) / pi; }, cached_gauss_hermite(60));
      },
      f.decay == Symbol2D::Decay::compact ? Symbol2D::Decay::schwartz : f.decay);
}

/// omega(x, y) = vt(-sqrt(b) y, -sqrt(b) x).
inline Symbol2D to_toeplitz_frame(const Symbol2D& vt, double b) {
  require_positive_field(b);
  if (vt.is_radial()) {
    Symbol2D s = vt;
    s.profile = vt.profile.scaled_argument(b);
    return s;
  }
  const double rb = std::sqrt(b);
  return Symbol2D::generic([vt, rb](double x, double y) { return vt(-rb * y, -rb * x); }, vt.decay);
}

/// Inverse of to_toeplitz_frame: vt(x, y) = omega(-y / sqrt(b), -x / sqrt(b)).
inline Symbol2D from_toeplitz_frame(const Symbol2D& omega, double b) {
  require_positive_field(b);
  if (omega.is_radial()) {
    Symbol2D s = omega;
    s.profile = omega.profile.scaled_argument(1.0 / b);
    return s;
  }
  const double rb = std::sqrt(b);
  return Symbol2D::generic([omega, rb](double x, double y) { return omega(-y / rb, -x / rb); }, omega.decay);
}

namespace detail {

/// Radial Laplacian of p(s) e^{-a s}: 4[s(p'' - 2a p' + a^2 p) + p' - a p] e^{-a s}.
inline std::vector<double> laplacian_poly_gaussian(const std::vector<double>& p, double a) {
  const std::size_t n = p.size();
  if (n == 0) return {};
  std::vector<double> d1(n, 0.0), d2(n, 0.0), out(n + 1, 0.0);
  for (std::size_t j = 1; j < n; ++j) d1[j - 1] = j * p[j];
  for (std::size_t j = 2; j < n; ++j) d2[j - 2] = j * (j - 1.0) * p[j];
  for (std::size_t j = 0; j < n; ++j) {
    const double inner = d2[j] - 2.0 * a * d1[j] + a * a * p[j];
    out[j + 1] += 4.0 * inner;
    out[j] += 4.0 * (d1[j] - a * p[j]);
  }
  while (out.size() > 1 && out.back() == 0.0) out.pop_back();
  return out;
}

}  // namespace detail

/// L_r(-Delta/(2b)) applied to a radial Gaussian-type profile, as an exact
/// poly_gaussian. r = 0 returns the input unchanged.
inline Symbol2D level_lift(const Symbol2D& zeta, double b, int r) {
  require_positive_field(b);
  if (r < 0 || r > 4) throw std::invalid_argument("level_lift: r must lie in [0, 4]");
  if (r == 0) return zeta;
  if (!zeta.is_radial()) throw std::invalid_argument("level_lift: symbol must be radial");
  using K = RadialProfile::Kind;
  const RadialProfile& p = zeta.profile;
  std::vector<double> poly;
  double a = 0.0;
  switch (p.kind) {
    case K::constant:
      return zeta;
    case K::gaussian:
      poly = {1.0};
      a = p.a * p.argument_scale;
      break;
    case K::poly_gaussian: {
      // rescale the argument into the polynomial
      poly = p.coeffs;
      double f = 1.0;
      for (double& c : poly) {
        c *= f;
        f *= p.argument_scale;
      }
      a = p.a * p.argument_scale;
      break;
    }
    case K::laguerre_mix: {
      poly = detail::laguerre_mix_polynomial(p.coeffs);
      double f = 1.0;
      for (double& c : poly) {
        c *= f;
        f *= p.argument_scale;
      }
      a = p.argument_scale;
      break;
    }
    default:
      throw std::invalid_argument("level_lift: unsupported profile kind " + p.kind_name());
  }
  // L_r(-x) = sum_j binom(r, j) x^j / j!, with x = Delta/(2b)
  std::vector<double> total(poly.size() + r, 0.0), term = poly;
  for (int j = 0; j <= r; ++j) {
    const double coef = std::exp(log_factorial(r) - log_factorial(j) - log_factorial(r - j) - log_factorial(j)) /
                        std::pow(2.0 * b, j);
    for (std::size_t i = 0; i < term.size(); ++i) total[i] += coef * term[i];
    term = detail::laplacian_poly_gaussian(term, a);
  }
  return Symbol2D::radial(RadialProfile::make_poly_gaussian(total, a, p.amplitude));
}

/// Radial part of the unitary 2-D Fourier transform,
///   Fhat(rho) = int_0^inf R(r^2) J_0(rho r) r dr,
/// returned as a profile in s = rho^2.
inline RadialProfile radial_fourier_transform(const RadialProfile& p) {
  using K = RadialProfile::Kind;
  switch (p.kind) {
    case K::gaussian: {
      const double a = p.a * p.argument_scale;
      return RadialProfile::make_gaussian(1.0 / (4.0 * a), p.amplitude / (2.0 * a));
    }
    case K::laguerre_mix:
      if (p.argument_scale == 1.0) {
        std::vector<double> c = p.coeffs;
        for (std::size_t k = 0; k < c.size(); ++k) c[k] *= (k % 2 ? -0.5 : 0.5);
        return RadialProfile::make_laguerre_mix(c, p.amplitude).scaled_argument(0.25);
      }
      break;
    case K::sum: {
      std::vector<RadialProfile> parts;
      for (const auto& q : p.parts) parts.push_back(radial_fourier_transform(q.scaled_argument(p.argument_scale)));
      std::vector<double> w = p.weights;
      for (double& x : w) x *= p.amplitude;
      return RadialProfile::make_sum(w, parts);
    }
    default:
      break;
  }
  if (!p.compact_support() && !p.schwartz())
    throw std::invalid_argument("radial_fourier_transform: numeric path needs compact support or fast decay");
  const RadialProfile src = p;
  double r_max = src.support_end() ? std::sqrt(*src.support_end()) : 0.0;
  if (!src.support_end()) {
    r_max = 1.0;
    while (std::abs(src(r_max * r_max)) > 1e-18 * std::max(1.0, std::abs(src(0.0))) && r_max < 1e4) r_max *= 1.25;
  }
  std::vector<double> cuts{0.0};
  for (double t : src.breakpoints())
    if (std::sqrt(t) < r_max) cuts.push_back(std::sqrt(t));
  cuts.push_back(r_max);
  return RadialProfile::make_custom(
      [src, cuts](double s) {
        const double rho = std::sqrt(s);
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
          const double w = cuts[i + 1] - cuts[i];
          const int panels = std::max(1, static_cast<int>(std::ceil(w * (1.0 + rho) / 0.5)));
          acc += integrate_interval(
              [&](double r) { return src(r * r) * std::cyl_bessel_j(0.0, rho * r) * r; }, cuts[i], cuts[i + 1], 20,
              panels);
        }
        return acc;
      },
      std::nullopt, {}, false);
}

// ---------------------------------------------------------------------------
// Phase-space volumes.

enum class Sign { plus, minus };

inline double sign_value(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }

/// (2 pi)^{-1} |{ +-F > lambda }| for radial F. Super-level sets of a
/// radial symbol are unions of annuli, found by bisection in s on every
/// sign change of +-R(s) - lambda.
inline double phase_space_volume(const RadialProfile& p, double lambda, Sign sign) {
  if (!(lambda > 0)) throw std::invalid_argument("phase_space_volume: lambda must be positive");
  const double sg = sign_value(sign);
  auto g = [&](double s) { return sg * p(s) - lambda; };
  if (p.kind == RadialProfile::Kind::constant)
    return g(0.0) > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  double s_end;
  if (auto e = p.support_end()) {
    s_end = *e;
  } else {
    s_end = 1.0;
    while (g(s_end) > 0 && s_end < 1e300) s_end *= 2.0;
    if (g(s_end) > 0) return std::numeric_limits<double>::infinity();
    s_end *= 4.0;
  }
  // sample in sqrt(s), which resolves oscillating Laguerre-type profiles
  const int n = 8192;
  std::vector<double> nodes;
  for (int i = 0; i <= n; ++i) {
    const double u = std::sqrt(s_end) * i / n;
    nodes.push_back(u * u);
  }
  for (double t : p.breakpoints())
    if (t > 0 && t < s_end) {
      nodes.push_back(t);
      nodes.push_back(std::nextafter(t, 1e308));
    }
  std::sort(nodes.begin(), nodes.end());
  auto bisect = [&](double lo, double hi) {
    const bool lo_in = g(lo) > 0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      ((g(mid) > 0) == lo_in ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  double measure = 0.0;
  bool inside = g(nodes[0]) > 0;
  double start = nodes[0];
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const bool now = g(nodes[i]) > 0;
    if (now != inside) {
      const double x = bisect(nodes[i - 1], nodes[i]);
      if (inside) measure += x - start;
      else start = x;
      inside = now;
    }
  }
  if (inside) measure += nodes.back() - start;
  // area = pi * measure in s, times (2 pi)^{-1}
  return 0.5 * measure;
}

/// Volume for a general symbol: radial symbols go to the exact path,
/// others are counted on a square grid of the given cell size over
/// [-extent, extent]^2.
inline double phase_space_volume(const Symbol2D& f, double lambda, Sign sign, double extent = 10.0,
                                 double cell = 0.01) {
  if (f.is_radial()) return phase_space_volume(f.profile, lambda, sign);
  if (!(lambda > 0)) throw std::invalid_argument("phase_space_volume: lambda must be positive");
  const double sg = sign_value(sign);
  const int n = static_cast<int>(std::ceil(2.0 * extent / cell));
  long count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = -extent + (i + 0.5) * cell, xi = -extent + (j + 0.5) * cell;
      if (sg * f(x, xi) > lambda) ++count;
    }
  return count * cell * cell / (2.0 * pi);
}

struct LogSlopeReport {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  bool satisfied = false;
  std::vector<double> lambdas;
  std::vector<double> log_slopes;
};

/// Empirical bounds on -lambda f'(lambda) / f(lambda) over a log grid,
/// derivative by centred differences in ln lambda.
inline LogSlopeReport log_slope_bounds(const std::function<double(double)>& volume, double lambda_lo,
                                             double lambda_hi, int points = 50, double h = 1e-4) {
  if (!(lambda_lo > 0) || !(lambda_hi > lambda_lo) || points < 2)
    throw std::invalid_argument("log_slope_bounds: need 0 < lo < hi and at least 2 points");
  LogSlopeReport rep;
  rep.gamma1 = std::numeric_limits<double>::infinity();
  rep.gamma2 = -std::numeric_limits<double>::infinity();
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double ll = std::log(lambda_lo) + (std::log(lambda_hi) - std::log(lambda_lo)) * i / (points - 1);
    const double lam = std::exp(ll);
    const double f0 = volume(lam);
    if (!(f0 > 0) || !std::isfinite(f0)) throw std::domain_error("log_slope_bounds: volume must be positive and finite");
    if (f0 > prev * (1.0 + 1e-12)) throw std::domain_error("log_slope_bounds: volume is not monotone");
    prev = f0;
    const double fp = volume(std::exp(ll + h)), fm = volume(std::exp(ll - h));
    const double slope = -(fp - fm) / (2.0 * h) / f0;
    rep.lambdas.push_back(lam);
    rep.log_slopes.push_back(slope);
    rep.gamma1 = std::min(rep.gamma1, slope);
    rep.gamma2 = std::max(rep.gamma2, slope);
  }
  rep.satisfied = rep.gamma1 > 0 && std::isfinite(rep.gamma2) && rep.gamma1 <= rep.gamma2;
  return rep;
}

}  // namespace landau
