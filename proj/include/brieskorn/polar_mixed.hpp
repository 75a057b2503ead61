#pragma once
// Evaluation of P(u, v; mu) = mu (u^p + conj(u)) + v^q + conj(v) and its
// partial derivatives in the polar chart (r1, th1, r2, th2).
//
// P splits into four terms of the shape  c * r^a * exp(i (b th + phase)),
// so every partial derivative is a closed form:
//   d^i/dr^i d^j/dth^j  ->  c * a(a-1)...(a-i+1) r^(a-i) * (i b)^j * exp(i (b th + phase)).

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "brieskorn/angles.hpp"

namespace brieskorn {

/// The member of the family under study: exponents p, q and mu in polar form.
struct DeformationParams {
  int p = 2;
  int q = 2;
  double mu_abs = 1.0;
  double mu_arg = 0.0;  // canonical, in [0, 2π)

  /// Validating constructor; canonicalizes arg mu.
  static DeformationParams make(int p, int q, double mu_abs, double mu_arg) {
    if (p < 2 || q < 2)
      throw std::invalid_argument("exponents must satisfy p >= 2 and q >= 2 (got p=" +
                                  std::to_string(p) + ", q=" + std::to_string(q) + ")");
    if (!(mu_abs > 0.0) || !std::isfinite(mu_abs))
      throw std::invalid_argument("|mu| must be a finite positive number");
    if (!std::isfinite(mu_arg)) throw std::invalid_argument("arg mu must be finite");
    return DeformationParams{p, q, mu_abs, wrap_angle(mu_arg)};
  }

  std::complex<double> mu() const { return std::polar(mu_abs, mu_arg); }
};

/// A point of C^2 in polar coordinates u = r1 e^{i th1}, v = r2 e^{i th2}.
struct PolarPoint {
  double r1 = 0.0;
  double th1 = 0.0;
  double r2 = 0.0;
  double th2 = 0.0;

  std::complex<double> u() const { return std::polar(r1, th1); }
  std::complex<double> v() const { return std::polar(r2, th2); }
};

/// A point (Q, R) of the target plane.
struct PlanePoint {
  double x = 0.0;
  double y = 0.0;

  friend PlanePoint operator+(PlanePoint a, PlanePoint b) { return {a.x + b.x, a.y + b.y}; }
  friend PlanePoint operator-(PlanePoint a, PlanePoint b) { return {a.x - b.x, a.y - b.y}; }
  friend PlanePoint operator*(double s, PlanePoint a) { return {s * a.x, s * a.y}; }
  std::complex<double> complex() const { return {x, y}; }
};

/// Multi-index of a partial derivative in (r1, th1, r2, th2).
struct Derivative {
  int r1 = 0;
  int th1 = 0;
  int r2 = 0;
  int th2 = 0;

  int order() const { return r1 + th1 + r2 + th2; }
  int& operator[](int i) { return i == 0 ? r1 : i == 1 ? th1 : i == 2 ? r2 : th2; }
  int operator[](int i) const { return i == 0 ? r1 : i == 1 ? th1 : i == 2 ? r2 : th2; }

  /// Unit multi-index along coordinate i (0..3).
  static Derivative along(int i) {
    Derivative d;
    d[i] = 1;
    return d;
  }
  static Derivative along(int i, int j) {
    Derivative d;
    ++d[i];
    ++d[j];
    return d;
  }
  static Derivative along(int i, int j, int k) {
    Derivative d;
    ++d[i];
    ++d[j];
    ++d[k];
    return d;
  }
};

inline constexpr int kMaxDerivativeOrder = 3;

enum class TermKind { MuPower, MuConjugate, VPower, VConjugate };

/// One summand  coeff * r^power * exp(i (freq * th + phase))  of P, where
/// (r, th) is (r1, th1) for the u-terms and (r2, th2) for the v-terms.
struct PolarTerm {
  TermKind kind;
  double coeff;
  int power;
  int freq;
  double phase;
  bool on_u;

  PlanePoint partial(const PolarPoint& z, const Derivative& d) const {
    const int dr = on_u ? d.r1 : d.r2;
    const int dth = on_u ? d.th1 : d.th2;
    const int other = on_u ? d.r2 + d.th2 : d.r1 + d.th1;
    if (other != 0) return {};
    double falling = 1.0;
    for (int i = 0; i < dr; ++i) falling *= static_cast<double>(power - i);
    if (falling == 0.0) return {};
    const double r = on_u ? z.r1 : z.r2;
    const double th = on_u ? z.th1 : z.th2;
    // (i b)^j e^{iX} = b^j e^{i (X + j π/2)}
    const double mag = coeff * falling * std::pow(r, power - dr) * std::pow(freq, dth);
    const double arg = freq * th + phase + dth * (kPi / 2.0);
    return {mag * std::cos(arg), mag * std::sin(arg)};
  }
};

/// The four summands of P for the given parameters.
inline std::array<PolarTerm, 4> polar_terms(const DeformationParams& prm) {
  return {{
      {TermKind::MuPower, prm.mu_abs, prm.p, prm.p, prm.mu_arg, true},
      {TermKind::MuConjugate, prm.mu_abs, 1, -1, prm.mu_arg, true},
      {TermKind::VPower, 1.0, prm.q, prm.q, 0.0, false},
      {TermKind::VConjugate, 1.0, 1, -1, 0.0, false},
  }};
}

/// (Q, R) at z.
inline PlanePoint eval_qr(const DeformationParams& prm, const PolarPoint& z) {
  PlanePoint out;
  for (const auto& t : polar_terms(prm)) out = out + t.partial(z, Derivative{});
  return out;
}

/// Exact partial derivative (dQ, dR) of total order <= 3.
inline PlanePoint partial(const DeformationParams& prm, const PolarPoint& z, const Derivative& d) {
  if (d.r1 < 0 || d.th1 < 0 || d.r2 < 0 || d.th2 < 0)
    throw std::invalid_argument("negative derivative multi-index");
  if (d.order() > kMaxDerivativeOrder)
    throw std::invalid_argument("derivative order " + std::to_string(d.order()) +
                                " exceeds the supported maximum of 3");
  PlanePoint out;
  for (const auto& t : polar_terms(prm)) out = out + t.partial(z, d);
  return out;
}

// Finite-difference schedule, indexed by derivative order (1..3).
inline double fd_default_step(int order) {
  switch (order) {
    case 0:
    case 1: return 1e-5;
    case 2: return 1e-4;
    default: return 1e-3;
  }
}

/// Relative tolerance |fd - exact| / (1 + |exact|) expected at the default step.
inline double fd_tolerance(int order) {
  switch (order) {
    case 0:
    case 1: return 1e-7;
    case 2: return 1e-5;
    default: return 1e-3;
  }
}

namespace detail {

inline PlanePoint fd_recursive(const DeformationParams& prm, PolarPoint z, Derivative d,
                               double h) {
  int axis = -1;
  for (int i = 0; i < 4; ++i)
    if (d[i] > 0) {
      axis = i;
      break;
    }
  if (axis < 0) return eval_qr(prm, z);
  --d[axis];
  auto shifted = [&](double delta) {
    PolarPoint w = z;
    switch (axis) {
      case 0: w.r1 += delta; break;
      case 1: w.th1 += delta; break;
      case 2: w.r2 += delta; break;
      default: w.th2 += delta; break;
    }
    return fd_recursive(prm, w, d, h);
  };
  const PlanePoint plus = shifted(h);
  const PlanePoint minus = shifted(-h);
  return (1.0 / (2.0 * h)) * (plus - minus);
}

}  // namespace detail

/// Nested central differences of eval_qr; truncation error O(step^2).
inline PlanePoint fd_partial(const DeformationParams& prm, const PolarPoint& z, const Derivative& d,
                             double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  if (d.r1 < 0 || d.th1 < 0 || d.r2 < 0 || d.th2 < 0)
    throw std::invalid_argument("negative derivative multi-index");
  return detail::fd_recursive(prm, z, d, step);
}

}  // namespace brieskorn
