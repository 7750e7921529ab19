#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "landau/quadrature.hpp"
#include "landau/special_functions.hpp"
#include "landau/symbol.hpp"
#include "landau/wigner.hpp"

namespace landau {

/// Quadrature did not converge to the requested accuracy.
struct AccuracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class BasisKind { hermite, landau };

struct TruncatedOperator {
  BasisKind basis = BasisKind::hermite;
  int N = 0;           // hermite basis size
  int Q = 0, K = 0;    // landau levels x radial indices
  double b = 1.0;
  Eigen::MatrixXcd entries;
  std::string symbol_id;
  int quadrature_order = 0;
  /// Largest |coupling| on the truncation boundary, times 10.
  double trust_threshold = 0.0;
  std::vector<std::string> warnings;

  int dim() const { return static_cast<int>(entries.rows()); }
  /// Row/column of phi_{k,q} in the landau basis.
  int index(int q, int k) const { return q * K + k; }
};

namespace detail {

// Work is split into a fixed number of chunks and summed in chunk order,
// so results do not depend on the thread count.
inline constexpr int kChunks = 8;

template <class Acc, class Work>
Acc chunked_sum(int n, const Acc& zero, Work&& work) {
  std::vector<std::future<Acc>> parts;
  for (int c = 0; c < kChunks; ++c) {
    const int lo = n * c / kChunks, hi = n * (c + 1) / kChunks;
    parts.push_back(std::async(std::launch::async, [lo, hi, &zero, &work] {
      Acc acc = zero;
      work(lo, hi, acc);
      return acc;
    }));
  }
  Acc total = zero;
  for (auto& p : parts) total += p.get();
  return total;
}

inline Eigen::MatrixXcd weyl_matrix_at_order(const Symbol2D& v, int N, int order) {
  const auto& rule = cached_gauss_hermite(order);
  const int n = rule.order;
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(N, N);
  return chunked_sum(n, zero, [&](int lo, int hi, Eigen::MatrixXcd& acc) {
    std::vector<cplx> tab;
    std::vector<double> scratch;
    for (int i = lo; i < hi; ++i)
      for (int j = 0; j < n; ++j) {
        const double x = rule.nodes[i], xi = rule.nodes[j];
        const double f = v(x, xi) * rule.scaled_weights[i] * rule.scaled_weights[j];
        if (f == 0.0) continue;
        wigner_table(N, x, xi, tab, scratch);
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l) acc(k, l) += f * std::conj(tab[static_cast<std::size_t>(k) * N + l]);
      }
  });
}

}  // namespace detail

/// Matrix of op^w(v) in the Hermite basis, M_{kl} = <v, Psi_{k,l}>.
/// With verify, the matrix is recomputed at twice the order and an
/// AccuracyError is raised if the two disagree beyond tol * max|M|.
inline TruncatedOperator weyl_matrix(const Symbol2D& v, int N, int order = 0, bool verify = true,
                                     double tol = 1e-9) {
  if (N <= 0 || N > 256) throw std::invalid_argument("weyl_matrix: N must lie in [1, 256]");
  if (order <= 0) {
    order = N + 60;
    // a Laguerre mixture carries its own polynomial degree
    if (v.is_radial() && v.profile.kind == RadialProfile::Kind::laguerre_mix)
      order = std::max(order, 2 * (N + static_cast<int>(v.profile.coeffs.size())) + 40);
  }
  TruncatedOperator t;
  t.basis = BasisKind::hermite;
  t.N = N;
  t.quadrature_order = order;
  t.entries = detail::weyl_matrix_at_order(v, N, order);
  if (verify) {
    const Eigen::MatrixXcd fine = detail::weyl_matrix_at_order(v, N, 2 * order);
    const double scale = std::max(1e-300, fine.cwiseAbs().maxCoeff());
    const double diff = (fine - t.entries).cwiseAbs().maxCoeff();
    if (diff > tol * scale)
      throw AccuracyError("weyl_matrix: order " + std::to_string(order) + " vs " + std::to_string(2 * order) +
                          " differ by " + std::to_string(diff / scale) + " (relative)");
    t.entries = fine;
    t.quadrature_order = 2 * order;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Radial fast paths.

namespace detail {

/// Upper end of the t-range needed for sum_k f(t) L_k(t) e^{-t/2}, k < K,
/// given the profile argument map s = factor * t.
inline double laguerre_range(const RadialProfile& p, double factor, int K) {
  double t_max = 4.0 * K + 60.0 * std::cbrt(static_cast<double>(K)) + 100.0;
  if (auto e = p.support_end()) return std::min(t_max, *e / factor);
  if (p.schwartz()) {
    const double ref = std::max(1e-300, std::abs(p(0.0)));
    // last scanned point still above the tail floor; isolated zeros of the
    // profile must not end the scan
    double last = 1.0;
    for (double t = 1.0; t < t_max; t *= 1.05) {
      const LogReal v = p.log_eval(factor * t);
      if (v.sign != 0 && v.log_abs - std::log(ref) >= -45.0) last = t;
    }
    t_max = std::min(t_max, std::max(1.2 * last, 10.0));
  }
  return t_max;
}

/// acc[k] = sum_i w_i f(t_i) L_k(t_i) e^{-t_i/2}, k < K, where f is the
/// profile evaluated at factor * t.
inline std::vector<double> laguerre_moments(const RadialProfile& p, double factor, int K) {
  const double t_max = laguerre_range(p, factor, K);
  std::vector<double> bt;
  for (double s : p.breakpoints()) bt.push_back(s / factor);
  const double panel_u = std::min(0.25, pi / std::sqrt(K + 1.0));
  const PanelRule rule = sqrt_panel_rule(t_max, panel_u, bt);
  const int n = static_cast<int>(rule.nodes.size());
  const std::vector<double> zero(K, 0.0);
  struct Acc {
    std::vector<double> v;
    Acc& operator+=(const Acc& o) {
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
      return *this;
    }
  };
  Acc total = chunked_sum(n, Acc{zero}, [&](int lo, int hi, Acc& acc) {
    for (int i = lo; i < hi; ++i) {
      const double t = rule.nodes[i];
      const double f = rule.weights[i] * p(factor * t);
      if (f == 0.0) continue;
      double log_scale = -0.5 * t;
      double mult = std::exp(log_scale);
      double prev = 1.0, cur = 1.0;
      acc.v[0] += f * mult;
      for (int k = 0; k + 1 < K; ++k) {
        const double next = ((2.0 * k + 1.0 - t) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
        if (std::abs(cur) > kRescaleAbove) {
          cur *= kRescaleBy;
          prev *= kRescaleBy;
          log_scale += kRescaleExp * std::numbers::ln2;
          mult = std::exp(log_scale);
        }
        acc.v[k + 1] += f * cur * mult;
      }
    }
  });
  return total.v;
}

}  // namespace detail

/// Weyl eigenvalues of a radial symbol,
///   mu_k = ((-1)^k / 2) int_0^inf R(t/2) L_k(t) e^{-t/2} dt,  k < K.
inline std::vector<double> weyl_radial_eigs(const RadialProfile& profile, int K) {
  if (K <= 0) throw std::invalid_argument("weyl_radial_eigs: K must be positive");
  if (profile.kind == RadialProfile::Kind::constant) return std::vector<double>(K, profile.amplitude);
  std::vector<double> m = detail::laguerre_moments(profile, 0.5, K);
  for (int k = 0; k < K; ++k) m[k] *= (k % 2 ? -0.5 : 0.5);
  return m;
}

/// The same eigenvalues from the radial Fourier profile,
///   mu_k = int_0^inf Rhat(2t) L_k(t) e^{-t/2} dt.
inline std::vector<double> weyl_radial_eigs_fourier(const RadialProfile& profile_hat, int K) {
  if (K <= 0) throw std::invalid_argument("weyl_radial_eigs_fourier: K must be positive");
  if (profile_hat.kind == RadialProfile::Kind::constant && profile_hat.amplitude == 0.0)
    return std::vector<double>(K, 0.0);
  return detail::laguerre_moments(profile_hat, 2.0, K);
}

namespace detail {

/// (1/k!) int_0^inf R(factor t) t^k e^{-t} P(t)^2 dt in log form, where the
/// optional P is a Laguerre polynomial L_deg^(alpha).
inline LogReal gamma_moment(const RadialProfile& p, double factor, int power, int deg, double alpha,
                            double log_prefactor) {
  double t_end = power + 2.0 * deg + 50.0 * std::sqrt(power + 2.0 * deg + 1.0) + 100.0;
  if (auto e = p.support_end()) t_end = std::min(t_end, *e / factor);
  if (!(t_end > 0)) return {};
  std::vector<double> bt;
  for (double s : p.breakpoints())
    if (s / factor < t_end) bt.push_back(s / factor);
  auto log_f = [&](double t) -> LogReal {
    if (t == 0.0 && power > 0) return {};
    LogReal r = p.log_eval(factor * t);
    if (r.sign == 0) return {};
    double la = r.log_abs + (power > 0 ? power * std::log(t) : 0.0) - t + log_prefactor;
    if (deg > 0) {
      LogReal l = laguerre_log(deg, alpha, t);
      if (l.sign == 0) return {};
      la += 2.0 * l.log_abs;
    }
    return {la, r.sign};
  };
  // the Laguerre factor has deg zeros, so the initial mesh must resolve them
  AdaptiveOptions opt;
  opt.initial_panels = std::max(32, 8 * deg);
  return integrate_log_adaptive(log_f, 0.0, t_end, bt, opt);
}

}  // namespace detail

/// Anti-Wick eigenvalues of a radial symbol in log form,
///   mu_k = (1/k!) int_0^inf R(2t) t^k e^{-t} dt.
inline std::vector<LogReal> antiwick_radial_eigs_log(const RadialProfile& profile, int K) {
  if (K <= 0) throw std::invalid_argument("antiwick_radial_eigs: K must be positive");
  std::vector<LogReal> out(K);
  for (int k = 0; k < K; ++k) {
    if (profile.kind == RadialProfile::Kind::constant) {
      out[k] = LogReal::from_value(profile.amplitude);
      continue;
    }
    out[k] = detail::gamma_moment(profile, 2.0, k, 0, 0.0, -log_factorial(k));
  }
  return out;
}

inline std::vector<double> antiwick_radial_eigs(const RadialProfile& profile, int K) {
  std::vector<double> out;
  for (const LogReal& v : antiwick_radial_eigs_log(profile, K)) out.push_back(v.value());
  return out;
}

/// Diagonal of the Toeplitz operator p_q zeta p_q in its eigenbasis,
///   nu_k = <zeta phi_{k,q}, phi_{k,q}>
///        = (q!/k!) int_0^inf zeta(2t/b) t^{k-q} [L_q^{(k-q)}(t)]^2 e^{-t} dt,
/// with k and q exchanged when k < q. Log form.
inline std::vector<LogReal> toeplitz_radial_eigs_log(const RadialProfile& zeta, int q, double b, int K) {
  if (q < 0) throw std::invalid_argument("toeplitz_radial_eigs: q must be nonnegative");
  require_positive_field(b);
  if (K <= 0) throw std::invalid_argument("toeplitz_radial_eigs: K must be positive");
  std::vector<LogReal> out(K);
  for (int k = 0; k < K; ++k) {
    const int hi = std::max(k, q), lo = std::min(k, q);
    if (zeta.kind == RadialProfile::Kind::constant) {
      out[k] = LogReal::from_value(zeta.amplitude);
      continue;
    }
    out[k] = detail::gamma_moment(zeta, 2.0 / b, hi - lo, lo, hi - lo, log_factorial(lo) - log_factorial(hi));
  }
  return out;
}

inline std::vector<double> toeplitz_radial_eigs(const RadialProfile& zeta, int q, double b, int K) {
  std::vector<double> out;
  for (const LogReal& v : toeplitz_radial_eigs_log(zeta, q, b, K)) out.push_back(v.value());
  return out;
}

// ---------------------------------------------------------------------------
// Landau-basis assembly.

/// scale * Psi_q as a radial symbol.
inline Symbol2D level_kernel_symbol(int q, double scale = 1.0) {
  if (q < 0) throw std::invalid_argument("level_kernel_symbol: q must be nonnegative");
  std::vector<double> c(q + 1, 0.0);
  c[q] = scale / pi;
  return Symbol2D::radial(RadialProfile::make_laguerre_mix(c));
}

/// Weyl matrix through the fastest exact route: diagonal from the radial
/// formula for radial symbols, quadrature otherwise.
inline Eigen::MatrixXcd weyl_block(const Symbol2D& v, int N) {
  if (v.is_radial()) {
    const auto mu = weyl_radial_eigs(v.profile, N);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(N, N);
    for (int k = 0; k < N; ++k) m(k, k) = mu[k];
    return m;
  }
  return weyl_matrix(v, N, 0, false).entries;
}

namespace detail {

inline cplx i_power(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

inline Eigen::MatrixXcd coupling_separable(const Symbol4D& V, int Q, int K, bool with_phases) {
  const int D = Q * K;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(D, D);
  for (const auto& term : V.terms) {
    const Eigen::MatrixXcd wa = weyl_block(term.first, Q);
    const Eigen::MatrixXcd wb = weyl_block(term.second, K);
    for (int q = 0; q < Q; ++q)
      for (int r = 0; r < Q; ++r) {
        if (wa(q, r) == cplx{}) continue;
        for (int k = 0; k < K; ++k)
          for (int l = 0; l < K; ++l) {
            if (wb(k, l) == cplx{}) continue;
            const cplx ph = with_phases ? i_power(k - l - q + r) : cplx{1.0, 0.0};
            m(q * K + k, r * K + l) += term.coeff * ph * wa(q, r) * wb(k, l);
          }
      }
  }
  return m;
}

inline Eigen::MatrixXcd coupling_generic(const Symbol4D& V, int Q, int K, bool with_phases, int order) {
  const int D = Q * K;
  const auto& rq = cached_gauss_hermite(order > 0 ? order : Q + 30);
  const auto& rk = cached_gauss_hermite(order > 0 ? order : K + 30);
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(D, D);
  Eigen::MatrixXcd m = chunked_sum(rq.order, zero, [&](int lo, int hi, Eigen::MatrixXcd& acc) {
    std::vector<cplx> ta, tb;
    std::vector<double> sa, sb;
    Eigen::VectorXcd u(D);
    for (int i = lo; i < hi; ++i)
      for (int j = 0; j < rq.order; ++j) {
        const double x = rq.nodes[i], xi = rq.nodes[j];
        wigner_table(Q, x, xi, ta, sa);
        const double wx = rq.scaled_weights[i] * rq.scaled_weights[j];
        for (int a = 0; a < rk.order; ++a)
          for (int c = 0; c < rk.order; ++c) {
            const double y = rk.nodes[a], eta = rk.nodes[c];
            const double f = wx * rk.scaled_weights[a] * rk.scaled_weights[c] * V.eval_pulled({x, y, xi, eta});
            if (f == 0.0) continue;
            wigner_table(K, y, eta, tb, sb);
            for (int q = 0; q < Q; ++q)
              for (int r = 0; r < Q; ++r) {
                const cplx fa = f * std::conj(ta[static_cast<std::size_t>(q) * Q + r]);
                for (int k = 0; k < K; ++k)
                  for (int l = 0; l < K; ++l)
                    acc(q * K + k, r * K + l) += fa * std::conj(tb[static_cast<std::size_t>(k) * K + l]);
              }
          }
      }
  });
  if (with_phases)
    for (int q = 0; q < Q; ++q)
      for (int r = 0; r < Q; ++r)
        for (int k = 0; k < K; ++k)
          for (int l = 0; l < K; ++l) m(q * K + k, r * K + l) *= i_power(k - l - q + r);
  return m;
}

}  // namespace detail

/// diag(Lambda_q) +- M in the basis phi_{k,q}, Lambda_q = b(2q + 1), with
/// couplings m_{k,l;q,r} = i^{k-l-q+r} <V_b, Psi_{q,r} (x) Psi_{k,l}>.
/// Separable symbols factor into two Weyl matrices; generic symbols use
/// 4-D quadrature and are limited to Q*K <= 48.
inline TruncatedOperator assemble_HV(const Symbol4D& V, int Q, int K, Sign sign, bool with_phases = true,
                                     int generic_order = 0) {
  if (Q <= 0 || K <= 0) throw std::invalid_argument("assemble_HV: Q and K must be positive");
  TruncatedOperator t;
  t.basis = BasisKind::landau;
  t.Q = Q;
  t.K = K;
  t.b = V.field_b;
  Eigen::MatrixXcd m;
  if (V.separable) {
    m = detail::coupling_separable(V, Q, K, with_phases);
  } else {
    if (Q * K > 48) throw std::invalid_argument("assemble_HV: generic symbols need Q*K <= 48");
    m = detail::coupling_generic(V, Q, K, with_phases, generic_order);
    t.quadrature_order = generic_order;
  }
  double boundary = 0.0;
  for (int q = 0; q < Q; ++q)
    for (int k = 0; k < K; ++k)
      for (int r = 0; r < Q; ++r)
        for (int l = 0; l < K; ++l)
          if (q == Q - 1 || r == Q - 1 || k == K - 1 || l == K - 1)
            boundary = std::max(boundary, std::abs(m(q * K + k, r * K + l)));
  t.trust_threshold = 10.0 * boundary;
  const double sg = sign_value(sign);
  t.entries = sg * m;
  for (int q = 0; q < Q; ++q)
    for (int k = 0; k < K; ++k) t.entries(q * K + k, q * K + k) += V.field_b * (2.0 * q + 1.0);
  if (t.trust_threshold > 1e-6 * V.field_b)
    t.warnings.push_back("truncation: boundary couplings reach " + std::to_string(boundary) +
                         "; eigenvalues within " + std::to_string(t.trust_threshold) +
                         " of a Landau level are not counted");
  return t;
}

// ---------------------------------------------------------------------------
// Spectra.

struct GapWindow {
  int level;
  bool plus;  // I_q^+ = (Lambda_q, Lambda_{q+1}); otherwise I_q^- = (Lambda_{q-1}, Lambda_q)
  double lo, hi;
};

struct SpectrumReport {
  std::vector<double> eigenvalues;
  std::vector<std::pair<double, int>> clusters;  // value, multiplicity
  BasisKind basis = BasisKind::hermite;
  int N = 0, Q = 0, K = 0;
  double b = 1.0;
  double cluster_tol = 0.0;
  double exclusion = 0.0;
  std::vector<double> levels;
  std::vector<GapWindow> windows;
  std::vector<int> gap_counts;  // parallel to windows
  std::vector<std::string> warnings;

  int count_minus(int q) const { return find(q, false); }
  int count_plus(int q) const { return find(q, true); }

 private:
  int find(int q, bool plus) const {
    for (std::size_t i = 0; i < windows.size(); ++i)
      if (windows[i].level == q && windows[i].plus == plus) return gap_counts[i];
    throw std::out_of_range("SpectrumReport: no such window");
  }
};

/// Number of eigenvalues inside (lo, hi) that keep a distance above
/// `exclusion` from every level.
inline int count_in_window(const std::vector<double>& eigs, double lo, double hi, const std::vector<double>& levels,
                           double exclusion) {
  int n = 0;
  for (double e : eigs) {
    if (!(e > lo && e < hi)) continue;
    bool near = false;
    for (double l : levels) near = near || std::abs(e - l) <= exclusion;
    if (!near) ++n;
  }
  return n;
}

inline SpectrumReport eig_hermitian(const TruncatedOperator& t) {
  const Eigen::MatrixXcd& m = t.entries;
  if (m.rows() != m.cols()) throw std::invalid_argument("eig_hermitian: matrix must be square");
  const double norm = m.rows() ? m.cwiseAbs().maxCoeff() : 0.0;
  const double asym = m.rows() ? (m - m.adjoint()).cwiseAbs().maxCoeff() : 0.0;
  if (asym > 1e-10 * std::max(1.0, norm)) throw std::invalid_argument("eig_hermitian: matrix is not Hermitian");
  SpectrumReport rep;
  rep.basis = t.basis;
  rep.N = t.N;
  rep.Q = t.Q;
  rep.K = t.K;
  rep.b = t.b;
  rep.warnings = t.warnings;
  if (m.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("eig_hermitian: eigensolver failed");
    const Eigen::VectorXd ev = es.eigenvalues();
    rep.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end());
  }
  double spec_norm = 0.0;
  for (double e : rep.eigenvalues) spec_norm = std::max(spec_norm, std::abs(e));
  rep.cluster_tol = 1e-10 * std::max(spec_norm, 1e-300);
  for (double e : rep.eigenvalues) {
    if (!rep.clusters.empty() && e - rep.clusters.back().first <= rep.cluster_tol) {
      ++rep.clusters.back().second;
    } else {
      rep.clusters.emplace_back(e, 1);
    }
  }
  if (t.basis == BasisKind::landau) {
    rep.exclusion = std::max(rep.cluster_tol, t.trust_threshold);
    for (int q = 0; q <= t.Q; ++q) rep.levels.push_back(t.b * (2.0 * q + 1.0));
    for (int q = 0; q < t.Q; ++q) {
      const double lo = q == 0 ? -std::numeric_limits<double>::infinity() : rep.levels[q - 1];
      rep.windows.push_back({q, false, lo, rep.levels[q]});
      rep.windows.push_back({q, true, rep.levels[q], rep.levels[q + 1]});
    }
    for (const auto& w : rep.windows)
      rep.gap_counts.push_back(count_in_window(rep.eigenvalues, w.lo, w.hi, rep.levels, rep.exclusion));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Diagnostics.

struct BandReport {
  double max_inside = 0.0;
  double max_outside = 0.0;
};

/// Largest entry of weyl_matrix(v, N) inside and outside the band |k - l| <= width.
inline BandReport banded_structure_check(const Symbol2D& v, int N, int width = -1, int order = 0) {
  if (width < 0) width = v.structure == Symbol2D::Structure::angular_fourier ? v.modes_K : 0;
  const auto t = weyl_matrix(v, N, order, false);
  BandReport r;
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l) {
      const double a = std::abs(t.entries(k, l));
      if (std::abs(k - l) <= width) r.max_inside = std::max(r.max_inside, a);
      else r.max_outside = std::max(r.max_outside, a);
    }
  return r;
}

struct PositivityReport {
  std::vector<double> coefficients;
  bool all_nonneg = true;
  int first_negative = -1;
};

inline PositivityReport make_positivity_report(std::vector<double> c) {
  PositivityReport r;
  double scale = 0.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * scale;
  for (std::size_t k = 0; k < c.size(); ++k)
    if (c[k] < -tol) {
      r.all_nonneg = false;
      r.first_negative = static_cast<int>(k);
      break;
    }
  r.coefficients = std::move(c);
  return r;
}

/// Signs of c_k = <R(./2), (-1)^k L_k e^{-t/2}> = 2 mu_k^w.
inline PositivityReport positivity_laguerre_weyl(const RadialProfile& p, int K) {
  auto mu = weyl_radial_eigs(p, K);
  for (double& v : mu) v *= 2.0;
  return make_positivity_report(std::move(mu));
}

/// Signs of the anti-Wick moments (1/k!) int R(2t) t^k e^{-t} dt.
inline PositivityReport positivity_laguerre_antiwick(const RadialProfile& p, int K) {
  return make_positivity_report(antiwick_radial_eigs(p, K));
}

struct HilbertSchmidtReport {
  double matrix_norm_sq = 0.0;
  double symbol_norm_sq_scaled = 0.0;
};

/// sum |M_{kl}|^2 over the N x N truncation against (2 pi)^{-1} ||F||^2.
inline HilbertSchmidtReport hilbert_schmidt_check(const Symbol2D& f, int N, int order = 0) {
  HilbertSchmidtReport r;
  const auto t = f.is_radial() ? weyl_block(f, N) : weyl_matrix(f, N, order, false).entries;
  r.matrix_norm_sq = t.cwiseAbs2().sum();
  double norm_sq;
  if (f.is_radial()) {
    // ||F||^2 = pi int R(s)^2 ds
    const auto& p = f.profile;
    std::vector<double> bt = p.breakpoints();
    const double s_max = p.support_end() ? *p.support_end() : detail::laguerre_range(p, 1.0, 1) * 4.0;
    auto rule = sqrt_panel_rule(s_max, 0.1, bt);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double v = p(rule.nodes[i]);
      acc += rule.weights[i] * v * v;
    }
    norm_sq = pi * acc;
  } else {
    norm_sq = integrate_r2([&](double x, double xi) { const double v = f(x, xi); return v * v; },
                           cached_gauss_hermite(order > 0 ? order : 120));
  }
  r.symbol_norm_sq_scaled = norm_sq / (2.0 * pi);
  return r;
}

// ---------------------------------------------------------------------------
// Prescribed gap eigenvalues.

struct PredictedEigenvalue {
  int q;
  int k;
  double value;
};

struct GapConstruction {
  Symbol4D V;
  std::vector<PredictedEigenvalue> predicted;
};

/// V = (2 pi)^2 sum_q sum_{k < m_q} c1_q c2_k (Psi_q (x) Psi_k) o S_b^{-1}.
/// H_0 - op^w(V) then has eigenvalues Lambda_q - c1_q c2_k below each level.
inline GapConstruction construct_gap_potential(double b, const std::vector<int>& m, const std::vector<double>& c1,
                                      const std::vector<double>& c2) {
  require_positive_field(b);
  int m_max = 0;
  for (int v : m) {
    if (v < 0) throw std::invalid_argument("construct_gap_potential: multiplicities must be nonnegative");
    m_max = std::max(m_max, v);
  }
  if (c1.size() < m.size()) throw std::invalid_argument("construct_gap_potential: need one c1 value per level");
  if (static_cast<int>(c2.size()) < m_max) throw std::invalid_argument("construct_gap_potential: need c2 values for every index");
  for (int k = 0; k < m_max; ++k) {
    if (!(c2[k] > 0 && c2[k] < 1)) throw std::invalid_argument("construct_gap_potential: c2 values must lie in (0, 1)");
    if (k > 0 && !(c2[k] < c2[k - 1])) throw std::invalid_argument("construct_gap_potential: c2 must decrease strictly");
  }
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < m.size(); ++q) {
    if (m[q] == 0) continue;
    if (!(c1[q] > 0) || (q > 0 && !(c1[q] < 2.0 * b)))
      throw std::invalid_argument("construct_gap_potential: c1 values must lie in (0, 2b)");
    if (!(c1[q] < prev)) throw std::invalid_argument("construct_gap_potential: c1 must decrease strictly");
    prev = c1[q];
  }
  GapConstruction out;
  std::vector<SeparableTerm> terms;
  const double four_pi2 = 4.0 * pi * pi;
  for (std::size_t q = 0; q < m.size(); ++q)
    for (int k = 0; k < m[q]; ++k) {
      const double c = c1[q] * c2[k];
      terms.push_back({four_pi2 * c, level_kernel_symbol(static_cast<int>(q)), level_kernel_symbol(k)});
      out.predicted.push_back({static_cast<int>(q), k, b * (2.0 * q + 1.0) - c});
    }
  out.V = Symbol4D::make_separable(b, std::move(terms), Frame::lab);
  return out;
}

// ---------------------------------------------------------------------------
// Eigenvalue sandwich between a Landau cluster and a Toeplitz spectrum.

/// The symbol 2 pi (Psi_q (x) v) o S_b^{-1}, with v built from a
/// nonnegative radial zeta: omega = D_{b,r} zeta, vt(x, y) = omega(-y/sqrt b,
/// x/sqrt b), v = vt * G_1.
inline Symbol4D sandwich_fixture(const Symbol2D& zeta, double b, int q, int r) {
  const Symbol2D omega = level_lift(zeta, b, r);
  const Symbol2D vt = from_toeplitz_frame(omega, b);
  const Symbol2D v = antiwick_to_weyl(vt);
  return Symbol4D::make_separable(b, {{2.0 * pi, level_kernel_symbol(q), v}}, Frame::lab);
}

struct SandwichReport {
  std::vector<double> cluster_offsets;  // +-(lambda_k - Lambda_q), non-increasing
  std::vector<double> toeplitz;         // nu_k(p_r zeta p_r), non-increasing
  int k_lo = 0, k_hi = 0;
  std::vector<double> eps_by_shift;  // smallest eps for each k0 = 0..max_shift
  int k0 = -1;                       // smallest shift with eps <= target
  double eps = std::numeric_limits<double>::infinity();
  bool holds = false;
  bool vacuous = false;
};

/// Smallest eps such that nu_{k+k0}/(1+eps) <= d_k <= nu_{k-k0}/(1-eps) for
/// all k in [k_lo, k_hi].
inline double sandwich_eps(const std::vector<double>& d, const std::vector<double>& nu, int k0, int k_lo, int k_hi) {
  double eps = 0.0;
  for (int k = k_lo; k <= k_hi; ++k) {
    if (k - k0 < 0 || k + k0 >= static_cast<int>(nu.size()) || k >= static_cast<int>(d.size()))
      return std::numeric_limits<double>::infinity();
    if (!(d[k] > 0)) return std::numeric_limits<double>::infinity();
    eps = std::max(eps, nu[k + k0] / d[k] - 1.0);
    eps = std::max(eps, 1.0 - nu[k - k0] / d[k]);
  }
  return eps;
}

inline SandwichReport birman_sandwich_check(const Symbol4D& V, const RadialProfile& zeta, int q, int r,
                                            double eps_target, int K, int k_lo, int k_hi, int max_shift = 3,
                                            Sign sign = Sign::plus, int Q = 0) {
  if (!(eps_target > 0 && eps_target < 1)) throw std::invalid_argument("birman_sandwich_check: eps must lie in (0, 1)");
  if (k_lo < 0 || k_hi < k_lo) throw std::invalid_argument("birman_sandwich_check: bad k-range");
  SandwichReport rep;
  rep.k_lo = k_lo;
  rep.k_hi = k_hi;
  if (V.separable && V.terms.empty()) {
    rep.vacuous = true;
    rep.holds = true;
    rep.eps = 0.0;
    rep.k0 = 0;
    return rep;
  }
  if (k_hi + max_shift >= K) throw std::invalid_argument("birman_sandwich_check: spectral window unresolved at truncation K");
  if (Q <= 0) Q = q + 2;
  const auto t = assemble_HV(V, Q, K, sign);
  const auto spec = eig_hermitian(t);
  const double level = V.field_b * (2.0 * q + 1.0);
  const double sg = sign_value(sign);
  for (double e : spec.eigenvalues) {
    const double d = sg * (e - level);
    if (d > spec.exclusion && d < 2.0 * V.field_b) rep.cluster_offsets.push_back(d);
  }
  std::sort(rep.cluster_offsets.rbegin(), rep.cluster_offsets.rend());
  rep.toeplitz = toeplitz_radial_eigs(zeta, r, V.field_b, K);
  std::sort(rep.toeplitz.rbegin(), rep.toeplitz.rend());
  for (int k0 = 0; k0 <= max_shift; ++k0) {
    const double e = sandwich_eps(rep.cluster_offsets, rep.toeplitz, k0, k_lo, k_hi);
    rep.eps_by_shift.push_back(e);
    if (e < rep.eps) {
      rep.eps = e;
    }
    if (rep.k0 < 0 && e <= eps_target) rep.k0 = k0;
  }
  rep.holds = rep.k0 >= 0;
  if (rep.holds) rep.eps = rep.eps_by_shift[rep.k0];
  return rep;
}

}  // namespace landau
