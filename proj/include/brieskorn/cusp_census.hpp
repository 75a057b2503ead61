#pragma once
// Cusp counting through the trigonometric reduction of the critical value curves.
//
// Along C_k the image P_k(θ) = P(C_k(θ)) has
//   dP_k/dθ = -2 exp(i (p-1)(q-1)θ / (2r)) Φ(θ),
//   Φ(θ) = (-1)^k |μ| ((q-1)/r) A sin(nθ + c'_k) + ((p-1)/r) B sin(mθ),
// so cusps on C_k are the simple zeros of Φ, or of the normalized
//   T(θ; |μ|) = (-1)^k |μ| sin(nθ + c'_k) + C sin(mθ),   C = (p-1)B / ((q-1)A).

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "brieskorn/angles.hpp"
#include "brieskorn/polar_mixed.hpp"
#include "brieskorn/roots.hpp"
#include "brieskorn/singular_locus.hpp"

namespace brieskorn {

struct CensusParams {
  int p = 2, q = 2, r = 1;
  // m = m_num / den, n = n_num / den
  int m_num = 0, n_num = 0, den = 2;
  double m = 0.0, n = 0.0;
  double c_const = 1.0;
  double radius_u = 0.0, radius_v = 0.0;
  std::vector<double> c_prime;  // ((p+1)/2) c_k, one per circle

  static CensusParams make(const DeformationParams& prm) {
    CensusParams c;
    c.p = prm.p;
    c.q = prm.q;
    c.r = circle_count(prm.p, prm.q);
    c.den = 2 * c.r;
    c.m_num = (prm.p - 1) * (prm.q + 1);
    c.n_num = (prm.p + 1) * (prm.q - 1);
    c.m = static_cast<double>(c.m_num) / c.den;
    c.n = static_cast<double>(c.n_num) / c.den;
    c.radius_u = brieskorn::radius_u(prm.p);
    c.radius_v = brieskorn::radius_v(prm.q);
    c.c_const = (prm.p - 1) * c.radius_v / ((prm.q - 1) * c.radius_u);
    for (const auto& spec : singular_circles(prm)) c.c_prime.push_back((prm.p + 1) / 2.0 * spec.phase);
    return c;
  }
};

namespace detail {

inline double sign_k(int k) { return k % 2 == 0 ? 1.0 : -1.0; }

}  // namespace detail

/// d^order T / dθ^order on circle k.
inline double big_t(const DeformationParams& prm, const CensusParams& cp, int k, double theta,
                    int order = 0) {
  const double shift = order * kPi / 2.0;
  return detail::sign_k(k) * prm.mu_abs * std::pow(cp.n, order) *
             std::sin(cp.n * theta + cp.c_prime[k] + shift) +
         cp.c_const * std::pow(cp.m, order) * std::sin(cp.m * theta + shift);
}

/// d^order Φ / dθ^order on circle k.
inline double big_phi(const DeformationParams& prm, int k, double theta, int order = 0) {
  const auto cp = CensusParams::make(prm);
  if (k < 0 || k >= cp.r) throw std::invalid_argument("circle index out of range");
  return (prm.q - 1) * cp.radius_u / cp.r * big_t(prm, cp, k, theta, order);
}

/// The critical value curve P_k(θ).
inline std::complex<double> critical_value(const DeformationParams& prm, int k, double theta) {
  const auto specs = singular_circles(prm);
  const auto pt = point_on_circle_lifted(specs.at(static_cast<std::size_t>(k)), theta);
  return eval_qr(prm, pt.z).complex();
}

struct CircleCensus {
  int k = 0;
  std::vector<double> cusp_thetas;      // simple zeros of Φ in [0, 2π), sorted
  std::vector<double> multiple_thetas;  // zeros with vanishing slope
  bool identically_zero = false;        // T ≡ 0 on this circle

  int count() const { return static_cast<int>(cusp_thetas.size()); }
};

struct CuspCensus {
  std::vector<CircleCensus> per_circle;
  int total = 0;
  int bound_low = 0;   // (p+1)(q-1)
  int bound_high = 0;  // (p-1)(q+1)
  bool excellent = false;
};

/// Slope threshold below which a zero of T counts as multiple.
inline double multiple_root_threshold(const DeformationParams& prm, const CensusParams& cp) {
  return 1e-7 * (prm.mu_abs * cp.n + cp.c_const * cp.m);
}

inline CircleCensus census_on_circle(const DeformationParams& prm, const CensusParams& cp, int k) {
  CircleCensus out;
  out.k = k;
  if (cp.m_num == cp.n_num) {
    // T = Im[((-1)^k |μ| e^{i c'_k} + C) e^{i nθ}]
    const auto amp = detail::sign_k(k) * std::polar(prm.mu_abs, cp.c_prime[k]) + cp.c_const;
    if (std::abs(amp) < 1e-12 * (prm.mu_abs + cp.c_const)) {
      out.identically_zero = true;
      return out;
    }
  }
  RootOptions opt;
  opt.grid = std::max(512, 64 * static_cast<int>(std::ceil(cp.m + cp.n)));
  opt.depth = 2;
  opt.xtol = 1e-13;
  opt.tangent_tol = [&](int d) {
    return 1e-12 * (prm.mu_abs * std::pow(cp.n, d) + cp.c_const * std::pow(cp.m, d));
  };
  // The zero set is 2π-periodic (T itself may be antiperiodic). The window is
  // shifted off θ = 0, where roots sit for real μ and would straddle the ends.
  auto f = [&](int d, double th) { return big_t(prm, cp, k, th, d); };
  const double off = kScanOffset * kTwoPi / opt.grid;
  const auto raw = isolate_roots(f, -off, kTwoPi - off, opt);
  const double slope_tol = multiple_root_threshold(prm, cp);
  std::vector<double> seen;
  for (double x : raw) {
    const double th = wrap_angle(x);
    bool dup = false;
    for (double y : seen)
      if (circular_distance(th, y) < 1e-10) dup = true;
    if (dup) continue;
    seen.push_back(th);
    if (std::abs(big_t(prm, cp, k, th, 1)) < slope_tol) out.multiple_thetas.push_back(th);
    else out.cusp_thetas.push_back(th);
  }
  std::sort(out.cusp_thetas.begin(), out.cusp_thetas.end());
  std::sort(out.multiple_thetas.begin(), out.multiple_thetas.end());
  return out;
}

inline CuspCensus count_cusps(const DeformationParams& prm) {
  const auto cp = CensusParams::make(prm);
  CuspCensus out;
  out.bound_low = (prm.p + 1) * (prm.q - 1);
  out.bound_high = (prm.p - 1) * (prm.q + 1);
  if (out.bound_low > out.bound_high) std::swap(out.bound_low, out.bound_high);
  out.excellent = true;
  for (int k = 0; k < cp.r; ++k) {
    auto c = census_on_circle(prm, cp, k);
    out.total += c.count();
    if (c.identically_zero || !c.multiple_thetas.empty()) out.excellent = false;
    out.per_circle.push_back(std::move(c));
  }
  return out;
}

/// The cusp count rose with |μ| for p > q.
struct MonotonicityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Transition {
  double mu_star = 0.0;
  int count_before = 0;
  int count_after = 0;
};

struct SweepSample {
  double mu_abs = 0.0;
  int count = 0;
  bool excellent = true;
  bool identically_zero = false;
};

struct SweepResult {
  std::vector<SweepSample> grid;
  std::vector<Transition> transitions;
  bool monotonicity_checked = false;  // only for p > q
};

struct SweepOptions {
  double bisect_tol = 1e-9;
  double settle = 1e-6;        // relative offset at which the count after a transition is read
  bool check_monotone = true;  // ignored unless p > q
};

/// Log-spaced |μ| sweep at fixed arg μ; every change of the total count is
/// bracketed and bisected. Throws MonotonicityViolation if the count grows for p > q.
inline SweepResult sweep_transitions(int p, int q, double mu_arg, double lo, double hi, int steps,
                                     const SweepOptions& opt = {}) {
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi))
    throw std::invalid_argument("|mu| range must satisfy 0 < lo < hi");
  if (steps < 2) throw std::invalid_argument("sweep needs at least 2 grid points");
  auto census_at = [&](double m) { return count_cusps(DeformationParams::make(p, q, m, mu_arg)); };
  // Distinct zeros, simple or not: stable up to the transition itself, where
  // merging roots briefly look multiple and drop out of the cusp count.
  auto count_at = [&](double m) {
    int n = 0;
    for (const auto& pc : census_at(m).per_circle)
      n += pc.count() + static_cast<int>(pc.multiple_thetas.size());
    return n;
  };

  SweepResult out;
  out.monotonicity_checked = p > q && opt.check_monotone;
  const double ratio = std::log(hi / lo);
  for (int i = 0; i < steps; ++i) {
    const double m = i + 1 == steps ? hi : lo * std::exp(ratio * i / (steps - 1));
    const auto c = census_at(m);
    bool zero = false;
    for (const auto& pc : c.per_circle) zero = zero || pc.identically_zero;
    out.grid.push_back({m, c.total, c.excellent, zero});
  }

  const SweepSample* prev = nullptr;
  for (const auto& cur : out.grid) {
    if (cur.identically_zero) continue;
    if (prev && prev->count != cur.count) {
      // peel off transitions one at a time, left to right
      double left = prev->mu_abs;
      int c_left = prev->count;
      for (int guard = 0; guard < 64 && c_left != cur.count; ++guard) {
        double a = left, b = cur.mu_abs;
        while (b - a > opt.bisect_tol * std::max(1.0, a)) {
          const double mid = 0.5 * (a + b);
          if (count_at(mid) == c_left) a = mid;
          else b = mid;
        }
        // read the new count just past the merge, where near-coincident roots
        // are resolved again (a triple root stays unresolved for ~1e-7 relative)
        const double probe = std::min(b * (1.0 + opt.settle), cur.mu_abs);
        const int c_right = count_at(probe);
        out.transitions.push_back({0.5 * (a + b), c_left, c_right});
        if (probe >= cur.mu_abs) break;
        left = probe;
        c_left = c_right;
      }
    }
    prev = &cur;
  }

  if (out.monotonicity_checked) {
    for (const auto& t : out.transitions)
      if (t.count_after > t.count_before)
        throw MonotonicityViolation("cusp count rises from " + std::to_string(t.count_before) +
                                    " to " + std::to_string(t.count_after) + " at |mu| = " +
                                    std::to_string(t.mu_star));
  }
  return out;
}

/// z^p + w^q + a conj(z) + b conj(w) with exactly one of a, b zero.
struct DegenerateCensus {
  bool excellent = false;
  bool swapped = false;             // a = 0, so the roles of (p, a) and (q, b) were exchanged
  int total = 0;
  std::vector<double> cusp_thetas;  // on the circle (A e^{iθ}, 0)
  std::string verdict;
};

inline DegenerateCensus degenerate_census(int p, int q, std::complex<double> a,
                                          std::complex<double> b) {
  if (p < 2 || q < 2) throw std::invalid_argument("exponents must satisfy p >= 2 and q >= 2");
  const bool a0 = std::abs(a) == 0.0, b0 = std::abs(b) == 0.0;
  if (a0 == b0)
    throw std::invalid_argument(a0 ? "both linear coefficients are zero"
                                   : "neither linear coefficient is zero");
  DegenerateCensus out;
  out.swapped = a0;
  const int pp = a0 ? q : p;
  const int qq = a0 ? p : q;
  if (qq >= 3) {
    out.verdict = "not excellent: the exponent of the variable without a linear term is at least 3";
    return out;
  }
  // zeros of sin((pp+1)θ/2) in [0, 2π)
  for (int j = 0; j <= pp; ++j) out.cusp_thetas.push_back(kTwoPi * j / (pp + 1));
  out.total = pp + 1;
  out.excellent = true;
  out.verdict = "excellent";
  return out;
}

/// h(θ) = e^{2iθ} + 2 e^{-iθ}, the deltoid-like curve with three cusps.
inline std::complex<double> h_curve(double theta) {
  return std::polar(1.0, 2.0 * theta) + 2.0 * std::polar(1.0, -theta);
}

/// For p = q = 2: P_0(θ) = scale · e^{i rotation} · h(θ + shift).
struct ClosedCurve {
  std::complex<double> K;  // |μ| e^{-3i arg μ} + 1
  double scale = 0.0;      // |K| / 4
  double rotation = 0.0;   // -arg K / 3
  double shift = 0.0;      // 2 arg K / 3
  std::vector<double> cusp_thetas;
  double max_residual = 0.0;  // max |P_0 - transformed h| on the check grid
  bool degenerate = false;    // K = 0
};

inline std::complex<double> closed_curve_k(const DeformationParams& prm) {
  return std::polar(prm.mu_abs, -3.0 * prm.mu_arg) + 1.0;
}

inline ClosedCurve closed_curve(const DeformationParams& prm, int check_samples = 1024) {
  if (prm.p != 2 || prm.q != 2) throw std::invalid_argument("closed curve form needs p = q = 2");
  ClosedCurve out;
  out.K = closed_curve_k(prm);
  if (std::abs(out.K) < 1e-12 * (1.0 + prm.mu_abs)) {
    out.degenerate = true;
    return out;
  }
  const double ak = std::arg(out.K);
  out.scale = std::abs(out.K) / 4.0;
  out.rotation = -ak / 3.0;
  out.shift = 2.0 * ak / 3.0;
  for (int j = 0; j < 3; ++j) out.cusp_thetas.push_back(wrap_angle(kTwoPi * j / 3.0 - out.shift));
  std::sort(out.cusp_thetas.begin(), out.cusp_thetas.end());
  const auto rot = std::polar(out.scale, out.rotation);
  for (int i = 0; i < check_samples; ++i) {
    const double th = kTwoPi * i / check_samples;
    const auto diff = critical_value(prm, 0, th) - rot * h_curve(th + out.shift);
    out.max_residual = std::max(out.max_residual, std::abs(diff));
  }
  return out;
}

}  // namespace brieskorn
