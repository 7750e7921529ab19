#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <future>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace landau {

using point2 = std::complex<double>;

/// Compact planar set with membership and nearest-point projection.
struct CompactSet {
  enum class Kind { disk, segment, polygon, union_of };
  Kind kind = Kind::disk;
  point2 center{};
  double radius = 1.0;
  point2 a{}, b{};
  std::vector<point2> vertices;
  std::vector<CompactSet> parts;

  static CompactSet disk(point2 c, double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("CompactSet: disk radius must be positive");
    CompactSet s;
    s.kind = Kind::disk;
    s.center = c;
    s.radius = r;
    return s;
  }
  static CompactSet segment(point2 p, point2 q) {
    if (!(std::abs(q - p) > 0.0)) throw std::invalid_argument("CompactSet: degenerate segment");
    CompactSet s;
    s.kind = Kind::segment;
    s.a = p;
    s.b = q;
    return s;
  }
  static CompactSet polygon(std::vector<point2> v) {
    if (v.size() < 3) throw std::invalid_argument("CompactSet: polygon needs at least 3 vertices");
    CompactSet s;
    s.kind = Kind::polygon;
    s.vertices = std::move(v);
    if (!(std::abs(s.signed_area()) > 0.0)) throw std::invalid_argument("CompactSet: polygon has zero area");
    return s;
  }
  static CompactSet union_of(std::vector<CompactSet> parts) {
    if (parts.empty()) throw std::invalid_argument("CompactSet: empty union");
    CompactSet s;
    s.kind = Kind::union_of;
    s.parts = std::move(parts);
    return s;
  }

  double signed_area() const {
    double A = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      const point2 p = vertices[i], q = vertices[(i + 1) % vertices.size()];
      A += p.real() * q.imag() - q.real() * p.imag();
    }
    return 0.5 * A;
  }

  /// Axis-aligned bounding box as (lower-left, upper-right).
  std::pair<point2, point2> bounds() const {
    switch (kind) {
      case Kind::disk: return {center - point2(radius, radius), center + point2(radius, radius)};
      case Kind::segment:
        return {{std::min(a.real(), b.real()), std::min(a.imag(), b.imag())},
                {std::max(a.real(), b.real()), std::max(a.imag(), b.imag())}};
      case Kind::polygon: {
        point2 lo = vertices[0], hi = vertices[0];
        for (auto v : vertices) {
          lo = {std::min(lo.real(), v.real()), std::min(lo.imag(), v.imag())};
          hi = {std::max(hi.real(), v.real()), std::max(hi.imag(), v.imag())};
        }
        return {lo, hi};
      }
      case Kind::union_of: {
        auto [lo, hi] = parts[0].bounds();
        for (const auto& p : parts) {
          auto [l, h] = p.bounds();
          lo = {std::min(lo.real(), l.real()), std::min(lo.imag(), l.imag())};
          hi = {std::max(hi.real(), h.real()), std::max(hi.imag(), h.imag())};
        }
        return {lo, hi};
      }
    }
    return {};
  }

  double diameter_scale() const {
    auto [lo, hi] = bounds();
    return std::max(std::abs(hi - lo), 1e-300);
  }

  bool has_interior() const {
    switch (kind) {
      case Kind::segment: return false;
      case Kind::union_of:
        return std::any_of(parts.begin(), parts.end(), [](const CompactSet& p) { return p.has_interior(); });
      default: return true;
    }
  }

  bool contains(point2 p, double tol = -1.0) const {
    if (tol < 0.0) tol = 1e-12 * diameter_scale();
    switch (kind) {
      case Kind::disk: return std::abs(p - center) <= radius + tol;
      case Kind::union_of:
        return std::any_of(parts.begin(), parts.end(), [&](const CompactSet& s) { return s.contains(p, tol); });
      case Kind::polygon:
        if (inside_polygon(p)) return true;
        [[fallthrough]];
      case Kind::segment: return std::abs(project(p) - p) <= tol;
    }
    return false;
  }

  point2 project(point2 p) const {
    switch (kind) {
      case Kind::disk: {
        const point2 d = p - center;
        const double r = std::abs(d);
        // the slack keeps projected points fixed under rounding
        return r <= radius * (1.0 + 1e-14) ? p : center + d * (radius / r);
      }
      case Kind::segment: return snap(p, closest_on_segment(p, a, b));
      case Kind::polygon: {
        if (inside_polygon(p)) return p;
        point2 best = vertices[0];
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < vertices.size(); ++i) {
          const point2 c = closest_on_segment(p, vertices[i], vertices[(i + 1) % vertices.size()]);
          if (std::abs(c - p) < bd) {
            bd = std::abs(c - p);
            best = c;
          }
        }
        return snap(p, best);
      }
      case Kind::union_of: {
        point2 best{};
        double bd = std::numeric_limits<double>::infinity();
        for (const auto& s : parts) {
          const point2 c = s.project(p);
          if (std::abs(c - p) < bd) {
            bd = std::abs(c - p);
            best = c;
          }
        }
        return best;
      }
    }
    return p;
  }

  template <class Rng>
  point2 sample_uniform(Rng& rng) const {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    switch (kind) {
      case Kind::segment: return a + U(rng) * (b - a);
      case Kind::union_of: {
        std::uniform_int_distribution<std::size_t> pick(0, parts.size() - 1);
        return parts[pick(rng)].sample_uniform(rng);
      }
      default: {
        auto [lo, hi] = bounds();
        for (int tries = 0; tries < 100000; ++tries) {
          const point2 p(lo.real() + U(rng) * (hi.real() - lo.real()), lo.imag() + U(rng) * (hi.imag() - lo.imag()));
          if (kind == Kind::disk ? std::abs(p - center) <= radius : inside_polygon(p)) return p;
        }
        throw std::runtime_error("CompactSet: rejection sampling failed");
      }
    }
  }

  template <class Rng>
  point2 sample_boundary(Rng& rng) const {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    switch (kind) {
      case Kind::disk: return center + std::polar(radius, 2.0 * M_PI * U(rng));
      case Kind::segment:  // arcsine law, denser near the ends
        return a + 0.5 * (1.0 - std::cos(M_PI * U(rng))) * (b - a);
      case Kind::polygon: {
        double per = 0.0;
        for (std::size_t i = 0; i < vertices.size(); ++i) per += std::abs(vertices[(i + 1) % vertices.size()] - vertices[i]);
        double t = U(rng) * per;
        for (std::size_t i = 0; i < vertices.size(); ++i) {
          const point2 p = vertices[i], q = vertices[(i + 1) % vertices.size()];
          const double len = std::abs(q - p);
          if (t <= len) return p + (t / len) * (q - p);
          t -= len;
        }
        return vertices.back();
      }
      case Kind::union_of: {
        std::uniform_int_distribution<std::size_t> pick(0, parts.size() - 1);
        return parts[pick(rng)].sample_boundary(rng);
      }
    }
    return {};
  }

 private:
  // points already on an edge stay put, so projection is idempotent
  point2 snap(point2 p, point2 c) const { return std::abs(c - p) <= 1e-14 * diameter_scale() ? p : c; }

  static point2 closest_on_segment(point2 p, point2 s, point2 e) {
    const point2 d = e - s;
    const double t = std::clamp(((p - s) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
    return s + t * d;
  }

  bool inside_polygon(point2 p) const {
    bool in = false;
    for (std::size_t i = 0, j = vertices.size() - 1; i < vertices.size(); j = i++) {
      const point2 vi = vertices[i], vj = vertices[j];
      if ((vi.imag() > p.imag()) != (vj.imag() > p.imag()) &&
          p.real() < (vj.real() - vi.real()) * (p.imag() - vi.imag()) / (vj.imag() - vi.imag()) + vi.real())
        in = !in;
    }
    return in;
  }
};

struct FeketeResult {
  int j = 0;
  std::vector<point2> points;
  double log_energy = -std::numeric_limits<double>::infinity();  // sum_{k<l} ln|w_k - w_l|
  double delta_j = 0.0;                                          // exp(2 log_energy / (j(j-1)))
  int iterations = 0;
  int restart = -1;
};

inline double log_energy(const std::vector<point2>& w) {
  double e = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k)
    for (std::size_t l = k + 1; l < w.size(); ++l) e += std::log(std::abs(w[k] - w[l]));
  return e;
}

struct FeketeOptions {
  int max_iterations = 5000;
  double rel_tol = 1e-10;
};

namespace detail {

inline bool lex_less(const std::vector<point2>& x, const std::vector<point2>& y) {
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(), [](point2 p, point2 q) {
    return p.real() != q.real() ? p.real() < q.real() : p.imag() < q.imag();
  });
}

inline bool better(const FeketeResult& x, const FeketeResult& y) {
  if (x.log_energy != y.log_energy) return x.log_energy > y.log_energy;
  return lex_less(x.points, y.points);
}

inline FeketeResult fekete_single(const CompactSet& K, int j, std::uint64_t seed, int restart,
                                  const FeketeOptions& opt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  std::mt19937_64 rng(seq);
  std::vector<point2> w(j);
  for (auto& p : w) p = restart == 0 ? K.sample_boundary(rng) : K.sample_uniform(rng);

  const double scale = K.diameter_scale();
  double e = log_energy(w);
  // a coincident pair in the start would give -inf; resample until finite
  for (int tries = 0; !std::isfinite(e) && tries < 100; ++tries) {
    for (auto& p : w) p = K.sample_uniform(rng);
    e = log_energy(w);
  }
  if (!std::isfinite(e)) throw std::runtime_error("fekete_optimize: could not draw distinct starting points");

  std::vector<point2> g(j), trial(j);
  double step = 0.1 * scale * scale / j;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    for (int k = 0; k < j; ++k) {
      point2 s{};
      for (int l = 0; l < j; ++l)
        if (l != k) s += 1.0 / std::conj(w[k] - w[l]);  // (w_k - w_l) / |w_k - w_l|^2
      g[k] = s;
    }
    bool accepted = false;
    double e_new = e;
    for (int halvings = 0; halvings < 60; ++halvings) {
      for (int k = 0; k < j; ++k) trial[k] = K.project(w[k] + step * g[k]);
      e_new = log_energy(trial);
      if (std::isfinite(e_new) && e_new > e) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const double change = std::abs(e_new - e) / std::max(1.0, std::abs(e));
    w.swap(trial);
    e = e_new;
    step *= 1.5;
    if (change < opt.rel_tol) break;
  }
  FeketeResult r;
  r.j = j;
  r.points = std::move(w);
  r.log_energy = e;
  r.delta_j = std::exp(2.0 * e / (static_cast<double>(j) * (j - 1)));
  r.iterations = it;
  r.restart = restart;
  return r;
}

}  // namespace detail

/// Maximizes sum_{k<l} ln|w_k - w_l| over j points of K by projected
/// gradient ascent; restart 0 starts on the boundary, the rest uniformly.
inline FeketeResult fekete_optimize(const CompactSet& K, int j, int restarts, std::uint64_t seed,
                                    const FeketeOptions& opt = {}) {
  if (j < 2) throw std::invalid_argument("fekete_optimize: j must be at least 2");
  if (restarts < 1) throw std::invalid_argument("fekete_optimize: restarts must be positive");
  std::vector<std::future<FeketeResult>> jobs;
  for (int r = 0; r < restarts; ++r)
    jobs.push_back(std::async(std::launch::async, [&, r] { return detail::fekete_single(K, j, seed, r, opt); }));
  FeketeResult best;
  for (auto& f : jobs) {
    FeketeResult r = f.get();
    if (best.j == 0 || detail::better(r, best)) best = std::move(r);
  }
  return best;
}

struct CapacityEstimate {
  double estimate = 0.0;          // (Delta_j / j^j)^{1/(j(j-1))} at j_max
  double lower_cert = 0.0;        // NaN when suppressed
  bool certified = false;
  std::vector<int> js;
  std::vector<FeketeResult> runs;  // parallel to js
};

/// ln of the normalized estimate (Delta_j / j^j)^{1/(j(j-1))}, with
/// ln Delta_j = 2 log_energy.
inline double log_capacity_estimate(const FeketeResult& r) {
  const double j = r.j;
  return (2.0 * r.log_energy - j * std::log(j)) / (j * (j - 1.0));
}

inline double log_capacity_lower_bound(const FeketeResult& r) {
  const double j = r.j;
  const double c = 4.0 * std::exp(-1.0) * std::log(j) + 4.0;
  return (2.0 * r.log_energy - j * std::log(c) - j * std::log(j)) / (j * (j - 1.0));
}

inline CapacityEstimate capacity_estimate(const CompactSet& K, int j_max, int restarts = 8, std::uint64_t seed = 0,
                                          const FeketeOptions& opt = {}) {
  if (j_max < 8) throw std::invalid_argument("capacity_estimate: j_max must be at least 8");
  CapacityEstimate out;
  for (int j = 8; j < j_max; j *= 2) out.js.push_back(j);
  out.js.push_back(j_max);
  for (int j : out.js) out.runs.push_back(fekete_optimize(K, j, restarts, seed, opt));
  const auto& last = out.runs.back();
  out.estimate = std::exp(log_capacity_estimate(last));
  // the upper bound on Delta_j behind the certificate needs a connected set
  out.certified = K.kind != CompactSet::Kind::union_of;
  out.lower_cert = out.certified ? std::exp(log_capacity_lower_bound(last)) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace landau
