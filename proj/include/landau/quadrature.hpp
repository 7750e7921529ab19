#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "landau/special_functions.hpp"

namespace landau {

enum class RuleKind { gauss_hermite, gauss_laguerre, gauss_legendre };

/// Gauss rule. `weights` are the classical weights for the rule's weight
/// function; `scaled_weights` have the weight function divided out at the
/// node, so sum(scaled_weights[i] * f(nodes[i])) approximates the plain
/// integral of f. `log_weights` stays finite where `weights` underflow.
struct QuadratureRule {
  RuleKind kind = RuleKind::gauss_legendre;
  double alpha = 0.0;
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> log_weights;
  std::vector<double> scaled_weights;
};

namespace detail {

inline Eigen::VectorXd tridiagonal_eigenvalues(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("tridiagonal eigensolver failed");
  return solver.eigenvalues();
}

// ln of sum_{k<n} psi_k(x)^2 for the normalized Hermite functions.
inline double hermite_log_sum_squares(int n, double x, double* ratio_out = nullptr) {
  double log_scale = -0.25 * std::log(pi) - 0.5 * x * x;
  double prev = 0.0, cur = 1.0, sum = 1.0;
  for (int k = 0; k + 1 < n; ++k) {
    double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
    sum += cur * cur;
    if (std::abs(cur) > kRescaleAbove) {
      cur *= kRescaleBy;
      prev *= kRescaleBy;
      sum *= kRescaleBy * kRescaleBy;
      log_scale += kRescaleExp * std::numbers::ln2;
    }
  }
  if (ratio_out) {
    // psi_n / psi_{n-1}, used by the Newton polish
    double next = std::sqrt(2.0 / n) * x * cur - std::sqrt(double(n - 1) / n) * prev;
    *ratio_out = next / cur;
  }
  return std::log(sum) + 2.0 * log_scale;
}

// Orthonormal Laguerre polynomials p_k for weight t^alpha e^{-t}:
// returns ln sum_{k<n} p_k(t)^2 and optionally p_n / p_{n-1}.
inline double laguerre_log_sum_squares(int n, double alpha, double t, double* ratio_out = nullptr) {
  double log_scale = -0.5 * std::lgamma(alpha + 1.0);
  double prev = 0.0, cur = 1.0, sum = 1.0;
  for (int k = 0; k + 1 < n; ++k) {
    double a = 2.0 * k + alpha + 1.0;
    double b_k = std::sqrt(k * (k + alpha));
    double b_k1 = std::sqrt((k + 1.0) * (k + 1.0 + alpha));
    double next = ((t - a) * cur - b_k * prev) / b_k1;
    prev = cur;
    cur = next;
    sum += cur * cur;
    if (std::abs(cur) > kRescaleAbove) {
      cur *= kRescaleBy;
      prev *= kRescaleBy;
      sum *= kRescaleBy * kRescaleBy;
      log_scale += kRescaleExp * std::numbers::ln2;
    }
  }
  if (ratio_out) {
    int k = n - 1;
    double a = 2.0 * k + alpha + 1.0;
    double next = ((t - a) * cur - std::sqrt(k * (k + alpha)) * prev) / std::sqrt((k + 1.0) * (k + 1.0 + alpha));
    *ratio_out = next / cur;
  }
  return std::log(sum) + 2.0 * log_scale;
}

}  // namespace detail

inline QuadratureRule gauss_hermite(int order) {
  if (order < 1 || order > 2000) throw std::invalid_argument("gauss_hermite: order must be in [1, 2000]");
  const int n = order;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(k / 2.0);
  Eigen::VectorXd ev = n == 1 ? Eigen::VectorXd::Zero(1) : detail::tridiagonal_eigenvalues(diag, sub);

  QuadratureRule r;
  r.kind = RuleKind::gauss_hermite;
  r.order = n;
  r.nodes.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = ev(i);
    for (int it = 0; it < 3 && n > 1; ++it) {
      double ratio;
      detail::hermite_log_sum_squares(n, x, &ratio);
      // psi_n' = sqrt(2n) psi_{n-1} - x psi_n
      double dx = ratio / (std::sqrt(2.0 * n) - x * ratio);
      if (!std::isfinite(dx)) break;
      x -= dx;
    }
    r.nodes[i] = x;
  }
  // exact symmetry so odd integrands vanish identically
  for (int i = 0; i < n / 2; ++i) {
    double m = 0.5 * (r.nodes[n - 1 - i] - r.nodes[i]);
    r.nodes[i] = -m;
    r.nodes[n - 1 - i] = m;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;

  r.weights.resize(n);
  r.log_weights.resize(n);
  r.scaled_weights.resize(n);
  for (int i = 0; i <= (n - 1) / 2; ++i) {
    double x = r.nodes[i];
    double log_scaled = -detail::hermite_log_sum_squares(n, x);
    for (int j : {i, n - 1 - i}) {
      r.scaled_weights[j] = std::exp(log_scaled);
      r.log_weights[j] = log_scaled - x * x;
      r.weights[j] = std::exp(r.log_weights[j]);
    }
  }
  return r;
}

inline QuadratureRule gauss_laguerre(int order, double alpha = 0.0) {
  if (!(alpha > -1.0)) throw std::invalid_argument("gauss_laguerre: alpha must exceed -1");
  if (order < 1 || order > 2000) throw std::invalid_argument("gauss_laguerre: order must be in [1, 2000]");
  const int n = order;
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + alpha + 1.0;
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(k * (k + alpha));
  Eigen::VectorXd ev = n == 1 ? diag : detail::tridiagonal_eigenvalues(diag, sub);

  QuadratureRule r;
  r.kind = RuleKind::gauss_laguerre;
  r.alpha = alpha;
  r.order = n;
  r.nodes.resize(n);
  r.weights.resize(n);
  r.log_weights.resize(n);
  r.scaled_weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = ev(i);
    for (int it = 0; it < 3; ++it) {
      double ratio;
      detail::laguerre_log_sum_squares(n, alpha, t, &ratio);
      // t p_n' = n p_n + sqrt(n(n+alpha)) p_{n-1}
      double dt = t * ratio / (n * ratio + std::sqrt(n * (n + alpha)));
      if (!std::isfinite(dt) || t - dt <= 0.0) break;
      t -= dt;
    }
    r.nodes[i] = t;
    // Christoffel numbers: the classical weight is 1 / sum p_k(t)^2
    r.log_weights[i] = -detail::laguerre_log_sum_squares(n, alpha, t);
    r.weights[i] = std::exp(r.log_weights[i]);
    r.scaled_weights[i] = std::exp(r.log_weights[i] - alpha * std::log(t) + t);
  }
  return r;
}

/// Gauss-Legendre on [-1, 1].
inline QuadratureRule gauss_legendre(int order) {
  if (order < 1 || order > 2000) throw std::invalid_argument("gauss_legendre: order must be in [1, 2000]");
  const int n = order;
  QuadratureRule r;
  r.kind = RuleKind::gauss_legendre;
  r.order = n;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  r.scaled_weights = r.weights;
  r.log_weights.resize(n);
  for (int i = 0; i < n; ++i) r.log_weights[i] = std::log(r.weights[i]);
  return r;
}

namespace detail {

template <class Build>
const QuadratureRule& cached_rule(std::map<std::pair<int, double>, std::unique_ptr<QuadratureRule>>& cache,
                                  std::shared_mutex& mutex, int order, double alpha, Build build) {
  {
    std::shared_lock lock(mutex);
    auto it = cache.find({order, alpha});
    if (it != cache.end()) return *it->second;
  }
  auto rule = std::make_unique<QuadratureRule>(build());
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.try_emplace({order, alpha}, std::move(rule));
  return *it->second;
}

}  // namespace detail

/// Memoized rules; references stay valid for the program lifetime.
inline const QuadratureRule& cached_gauss_hermite(int order) {
  static std::map<std::pair<int, double>, std::unique_ptr<QuadratureRule>> cache;
  static std::shared_mutex mutex;
  return detail::cached_rule(cache, mutex, order, 0.0, [&] { return gauss_hermite(order); });
}

inline const QuadratureRule& cached_gauss_laguerre(int order, double alpha = 0.0) {
  static std::map<std::pair<int, double>, std::unique_ptr<QuadratureRule>> cache;
  static std::shared_mutex mutex;
  return detail::cached_rule(cache, mutex, order, alpha, [&] { return gauss_laguerre(order, alpha); });
}

inline const QuadratureRule& cached_gauss_legendre(int order) {
  static std::map<std::pair<int, double>, std::unique_ptr<QuadratureRule>> cache;
  static std::shared_mutex mutex;
  return detail::cached_rule(cache, mutex, order, 0.0, [&] { return gauss_legendre(order); });
}

/// Tensor-product estimate of the integral of f over R^2. The Gaussian
/// weight is divided out, so f carries its own decay. `center` and `scale`
/// map the rule nodes z to center + scale * z.
template <class F>
auto integrate_r2(F&& f, const QuadratureRule& rule, std::array<double, 2> center = {0.0, 0.0},
                  double scale = 1.0) {
  using R = std::decay_t<decltype(f(0.0, 0.0))>;
  // Nodes are summed in mirrored pairs so that integrands odd about the
  // centre cancel exactly.
  const int n = rule.order;
  const auto& w = rule.scaled_weights;
  auto row = [&](double x) {
    R acc{};
    for (int j = 0; j < n / 2; ++j)
      acc += w[j] * (f(x, center[1] + scale * rule.nodes[j]) + f(x, center[1] + scale * rule.nodes[n - 1 - j]));
    if (n % 2) acc += w[n / 2] * f(x, center[1] + scale * rule.nodes[n / 2]);
    return acc;
  };
  R acc{};
  for (int i = 0; i < n / 2; ++i)
    acc += w[i] * (row(center[0] + scale * rule.nodes[i]) + row(center[0] + scale * rule.nodes[n - 1 - i]));
  if (n % 2) acc += w[n / 2] * row(center[0] + scale * rule.nodes[n / 2]);
  return acc * (scale * scale);
}

template <class F>
auto integrate_r4(F&& f, const QuadratureRule& rule, double scale = 1.0) {
  using R = std::decay_t<decltype(f(0.0, 0.0, 0.0, 0.0))>;
  R acc{};
  const int n = rule.order;
  const auto& w = rule.scaled_weights;
  std::vector<double> z(rule.nodes);
  for (double& v : z) v *= scale;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      R inner{};
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) inner += w[c] * w[d] * f(z[a], z[b], z[c], z[d]);
      acc += w[a] * w[b] * inner;
    }
  const double s2 = scale * scale;
  return acc * (s2 * s2);
}

/// Integral over [0, inf) using a Gauss-Laguerre rule with the weight
/// t^alpha e^{-t} divided out.
template <class F>
double integrate_halfline(F&& f, const QuadratureRule& rule) {
  if (rule.kind != RuleKind::gauss_laguerre)
    throw std::invalid_argument("integrate_halfline: rule must be Gauss-Laguerre");
  double acc = 0.0;
  for (int i = 0; i < rule.order; ++i) acc += rule.scaled_weights[i] * f(rule.nodes[i]);
  return acc;
}

/// Composite Gauss-Legendre on [a, b] with equal panels.
template <class F>
auto integrate_interval(F&& f, double a, double b, int order = 20, int panels = 1) {
  using R = std::decay_t<decltype(f(0.0))>;
  const auto& gl = cached_gauss_legendre(order);
  R acc{};
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    R part{};
    for (int i = 0; i < order; ++i) part += gl.weights[i] * f(mid + 0.5 * h * gl.nodes[i]);
    acc += part * (0.5 * h);
  }
  return acc;
}

/// Half-line integral that switches to a finite-interval Gauss-Legendre
/// rule when the integrand is supported in [0, support_end].
template <class F>
double integrate_halfline_auto(F&& f, std::optional<double> support_end, int order = 400) {
  if (support_end) {
    if (*support_end <= 0.0) return 0.0;
    int panels = std::max(1, static_cast<int>(std::ceil(*support_end / 2.0)));
    return integrate_interval(f, 0.0, *support_end, 32, panels);
  }
  return integrate_halfline(f, cached_gauss_laguerre(order));
}

/// Nodes and weights of a composite rule on [0, t_max] that is
/// Gauss-Legendre in u = sqrt(t). Panels never straddle a breakpoint.
/// Suited to oscillatory Laguerre integrands whose local wavelength in u
/// is roughly constant.
struct PanelRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline PanelRule sqrt_panel_rule(double t_max, double max_panel_u, std::vector<double> breakpoints_t = {},
                                 int order = 20) {
  std::vector<double> cuts{0.0};
  std::sort(breakpoints_t.begin(), breakpoints_t.end());
  for (double t : breakpoints_t)
    if (t > 0.0 && t < t_max) cuts.push_back(std::sqrt(t));
  cuts.push_back(std::sqrt(t_max));
  const auto& gl = cached_gauss_legendre(order);
  PanelRule r;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c], b = cuts[c + 1];
    if (b <= a) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel_u)));
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = a + (p + 0.5) * h;
      for (int i = 0; i < order; ++i) {
        const double u = mid + 0.5 * h * gl.nodes[i];
        r.nodes.push_back(u * u);
        r.weights.push_back(gl.weights[i] * 0.5 * h * 2.0 * u);
      }
    }
  }
  return r;
}

struct AdaptiveOptions {
  double rel_tol = 1e-14;
  int initial_panels = 32;
  int scan_points = 2048;
  int max_depth = 30;
};

/// Integral of exp(log_f(t)) * sign over [a, b] where log_f returns a
/// LogReal. The integrand is rescaled by its scanned peak, integrated by
/// adaptive Gauss-Legendre (one panel vs two halves), and the result is
/// returned in log form, so magnitudes far outside double range are fine.
/// `breakpoints` are forced panel edges.
template <class LogF>
LogReal integrate_log_adaptive(LogF&& log_f, double a, double b, std::vector<double> breakpoints = {},
                               const AdaptiveOptions& opt = {}) {
  if (!(b > a)) return {};
  double peak = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= opt.scan_points; ++i) {
    LogReal v = log_f(a + (b - a) * i / opt.scan_points);
    if (v.sign != 0) peak = std::max(peak, v.log_abs);
  }
  for (double t : breakpoints)
    if (t > a && t < b) {
      LogReal v = log_f(t);
      if (v.sign != 0) peak = std::max(peak, v.log_abs);
    }
  if (!std::isfinite(peak)) return {};

  auto f = [&](double t) {
    LogReal v = log_f(t);
    return v.sign == 0 ? 0.0 : v.sign * std::exp(v.log_abs - peak);
  };
  const auto& gl = cached_gauss_legendre(20);
  auto panel = [&](double lo, double hi) {
    double s = 0.0;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int i = 0; i < gl.order; ++i) s += gl.weights[i] * f(mid + half * gl.nodes[i]);
    return s * half;
  };

  std::vector<double> edges{a};
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double t : breakpoints)
    if (t > a && t < b) edges.push_back(t);
  edges.push_back(b);
  std::vector<std::pair<double, double>> panels;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const int m = std::max(1, static_cast<int>(opt.initial_panels * (edges[e + 1] - edges[e]) / (b - a)) + 1);
    for (int p = 0; p < m; ++p)
      panels.emplace_back(edges[e] + (edges[e + 1] - edges[e]) * p / m,
                          edges[e] + (edges[e + 1] - edges[e]) * (p + 1) / m);
  }
  double magnitude = 0.0;
  for (auto [lo, hi] : panels) magnitude += std::abs(panel(lo, hi));
  const double abs_tol = opt.rel_tol * std::max(magnitude, std::numeric_limits<double>::min());

  // Values handed over in log form carry an absolute error of a few ulp of
  // log_abs, i.e. a relative error growing with |peak|. Refining below that
  // floor only chases noise.
  const double rel = std::max(opt.rel_tol, 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(peak)));
  long budget = 200000;

  double total = 0.0;
  struct Item {
    double lo, hi, whole;
    int depth;
  };
  std::vector<Item> stack;
  for (auto [lo, hi] : panels) stack.push_back({lo, hi, panel(lo, hi), 0});
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (it.lo + it.hi);
    const double left = panel(it.lo, mid), right = panel(mid, it.hi);
    const double tol = std::max(abs_tol, rel * magnitude) * (it.hi - it.lo) / (b - a);
    const double err = std::abs(left + right - it.whole);
    if (err <= tol || err <= rel * (std::abs(left) + std::abs(right)) || it.depth >= opt.max_depth || --budget < 0) {
      total += left + right;
    } else {
      stack.push_back({it.lo, mid, left, it.depth + 1});
      stack.push_back({mid, it.hi, right, it.depth + 1});
    }
  }
  if (total == 0.0) return {};
  return {peak + std::log(std::abs(total)), total > 0 ? 1 : -1};
}

}  // namespace landau
