#pragma once
// The singular set of P in closed form. It lies on the torus |u| = A, |v| = B
// with p A^{p-1} = q B^{q-1} = 1 and splits into r = gcd(p-1, q-1) circles
//   C_k(θ) = (A e^{i((q-1)θ/r + c_k)}, B e^{i(p-1)θ/r}),  c_k = (2πk - 2 arg μ)/(p-1).

#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "brieskorn/angles.hpp"
#include "brieskorn/polar_mixed.hpp"

namespace brieskorn {

struct SingularCircleSpec {
  DeformationParams params;
  int k = 0;
  int r = 1;
  double radius_u = 0.0;  // A
  double radius_v = 0.0;  // B
  double phase = 0.0;     // c_k

  /// d(arg u)/dθ and d(arg v)/dθ along the circle.
  double rate_u() const { return static_cast<double>(params.q - 1) / r; }
  double rate_v() const { return static_cast<double>(params.p - 1) / r; }
};

inline int circle_count(int p, int q) { return std::gcd(p - 1, q - 1); }
inline double radius_u(int p) { return std::pow(static_cast<double>(p), -1.0 / (p - 1)); }
inline double radius_v(int q) { return std::pow(static_cast<double>(q), -1.0 / (q - 1)); }

inline std::vector<SingularCircleSpec> singular_circles(const DeformationParams& prm) {
  const int r = circle_count(prm.p, prm.q);
  std::vector<SingularCircleSpec> out;
  out.reserve(static_cast<std::size_t>(r));
  for (int k = 0; k < r; ++k) {
    out.push_back({prm, k, r, radius_u(prm.p), radius_v(prm.q),
                   (-2.0 * prm.mu_arg + kTwoPi * k) / (prm.p - 1)});
  }
  return out;
}

/// A point of C_k. `z` holds canonical angles for evaluation; Θ1..Θ4 and κ
/// are built from the lifted arguments (q-1)θ/r + c_k and (p-1)θ/r, which keeps
/// them continuous in θ along the circle.
struct SingularPoint {
  SingularCircleSpec spec;
  double theta = 0.0;
  PolarPoint z;
  double arg_u = 0.0;  // lifted arg u0
  double arg_v = 0.0;  // lifted arg v0
  std::array<double, 4> big_theta{};
  int kappa = 0;

  const DeformationParams& params() const { return spec.params; }
  double t1() const { return big_theta[0]; }
  double t2() const { return big_theta[1]; }
  double t3() const { return big_theta[2]; }
  double t4() const { return big_theta[3]; }
  /// (-1)^κ
  double kappa_sign() const { return (kappa % 2 == 0) ? 1.0 : -1.0; }
};

inline constexpr double kArgumentResidualTol = 1e-9;

/// Point at circle parameter θ without reducing θ mod 2π. Used for scans over
/// the closed interval [0, 2π]; Θ's at θ and θ + 2π may differ by multiples of π.
inline SingularPoint point_on_circle_lifted(const SingularCircleSpec& spec, double theta) {
  const auto& prm = spec.params;
  SingularPoint pt;
  pt.spec = spec;
  pt.theta = theta;
  pt.arg_u = spec.rate_u() * theta + spec.phase;
  pt.arg_v = spec.rate_v() * theta;
  pt.z = {spec.radius_u, wrap_angle(pt.arg_u), spec.radius_v, wrap_angle(pt.arg_v)};
  const double p = prm.p, q = prm.q;
  pt.big_theta = {(p + 1.0) / 2.0 * pt.arg_u, (p - 1.0) / 2.0 * pt.arg_u + prm.mu_arg,
                  (q + 1.0) / 2.0 * pt.arg_v, (q - 1.0) / 2.0 * pt.arg_v};
  const double residual = (p - 1.0) / 2.0 * pt.arg_u + prm.mu_arg - (q - 1.0) / 2.0 * pt.arg_v;
  const double kappa = std::round(residual / kPi);
  if (std::abs(residual - kappa * kPi) > kArgumentResidualTol * std::max(1.0, std::abs(residual)))
    throw std::logic_error("singular point violates the argument relation (residual " +
                           std::to_string(residual) + ")");
  pt.kappa = static_cast<int>(kappa);
  return pt;
}

inline SingularPoint point_on_circle(const SingularCircleSpec& spec, double theta) {
  return point_on_circle_lifted(spec, wrap_angle(theta));
}

/// Gradients of Q and R at a singular point, in (r1, th1, r2, th2).
struct GradientQuad {
  std::array<double, 4> q{};  // k1..k4
  std::array<double, 4> r{};  // k̂1..k̂4
  bool r_active = false;      // Q-gradient vanishes (cos Θ2 = 0); R normalizes instead

  double q_norm() const { return std::hypot(q[0], q[1], std::hypot(q[2], q[3])); }
  double r_norm() const { return std::hypot(r[0], r[1], std::hypot(r[2], r[3])); }
};

inline GradientQuad gradient_quad(const SingularPoint& pt, double cos_tol = 1e-9) {
  const auto& prm = pt.params();
  const double A = pt.z.r1, B = pt.z.r2, m = prm.mu_abs;
  const double c1 = std::cos(pt.t1()), s1 = std::sin(pt.t1());
  const double c2 = std::cos(pt.t2()), s2 = std::sin(pt.t2());
  const double c3 = std::cos(pt.t3()), s3 = std::sin(pt.t3());
  const double c4 = std::cos(pt.t4()), s4 = std::sin(pt.t4());
  GradientQuad g;
  g.q = {2.0 * m * c1 * c2, -2.0 * m * A * s1 * c2, 2.0 * c3 * c4, -2.0 * B * s3 * c4};
  g.r = {2.0 * m * c1 * s2, -2.0 * m * A * s1 * s2, 2.0 * c3 * s4, -2.0 * B * s3 * s4};
  g.r_active = std::abs(c2) < cos_tol;
  return g;
}

/// Path t -> (a t^{(p-1)q}, b t^{p(q-1)}) of linear deformations, all of which
/// reduce to the same mu through c1(t) = c1 t^q, c2(t) = c2 t^p.
struct DeformationPath {
  std::complex<double> a, b;
  std::complex<double> c1, c2;
  int p = 2, q = 2;

  std::complex<double> coeff_u(double t) const { return a * std::pow(t, (p - 1) * q); }
  std::complex<double> coeff_v(double t) const { return b * std::pow(t, p * (q - 1)); }
  std::complex<double> c1_at(double t) const { return c1 * std::pow(t, q); }
  std::complex<double> c2_at(double t) const { return c2 * std::pow(t, p); }
};

struct CoefficientReduction {
  DeformationParams params;
  std::complex<double> c1, c2;
  std::complex<double> target_scale;  // b conj(c2): f = target_scale * P
  DeformationPath path;
};

/// A root c of c^n = coeff * conj(c): |c| = |coeff|^{1/(n-1)}, arg c = (arg coeff + 2πj)/(n+1).
inline std::complex<double> conjugate_root(std::complex<double> coeff, int n, int branch = 0) {
  const double mag = std::pow(std::abs(coeff), 1.0 / (n - 1));
  return std::polar(mag, (std::arg(coeff) + kTwoPi * branch) / (n + 1));
}

/// Reduce z^p + w^q + a conj(z) + b conj(w) to P(u, v; mu) with z = c1 u, w = c2 v.
/// `branch_u`, `branch_v` pick the root of c^p = a conj(c), c^q = b conj(c); 0 is principal.
inline CoefficientReduction mu_from_coefficients(std::complex<double> a, std::complex<double> b,
                                                 int p, int q, int branch_u = 0,
                                                 int branch_v = 0) {
  if (p < 2 || q < 2) throw std::invalid_argument("exponents must satisfy p >= 2 and q >= 2");
  if (std::abs(a) == 0.0 || std::abs(b) == 0.0)
    throw std::invalid_argument("reduction to mu needs a != 0 and b != 0");
  const auto c1 = conjugate_root(a, p, branch_u);
  const auto c2 = conjugate_root(b, q, branch_v);
  const auto mu = a * std::conj(c1) / (b * std::conj(c2));
  CoefficientReduction out;
  out.params = DeformationParams::make(p, q, std::abs(mu), std::arg(mu));
  out.c1 = c1;
  out.c2 = c2;
  out.target_scale = b * std::conj(c2);
  out.path = DeformationPath{a, b, c1, c2, p, q};
  return out;
}

}  // namespace brieskorn
