#pragma once
// Fold / cusp classification of singular points of P via Levine's criterion.
//
// At a singular point z0 one target coordinate F (Q, or R when cos Θ2 = 0)
// has nonzero gradient g. The source coordinate with the largest usable
// gradient entry (the "pivot") is replaced by g·x, and the other target
// coordinate is sheared, Ĝ = G - sF, so that its gradient vanishes. Then
//   H = Hessian of Ĝ on the three non-pivot coordinates (= on ker dF),
//   M = the 4x3 block of second partials (all rows, non-pivot columns),
// and z0 is a fold iff rank H = 3, a cusp iff rank M = 3, rank H = 2 and the
// nested third derivative along the singular curve is nonzero.
//
// Every quantity exists twice: as the closed forms in Θ1..Θ4, κ, and as the
// matrix assembled from exact partial derivatives of Q and R. Decisions use
// the closed forms; the assembled matrices give the signature and rank M.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "brieskorn/polar_mixed.hpp"
#include "brieskorn/roots.hpp"
#include "brieskorn/singular_locus.hpp"

namespace brieskorn {

/// Zero-test bands. All are multiplied by `factor`.
struct Tolerances {
  double k1 = 1e-8;         // |k1| vs |(k1..k4)|
  double det = 1e-8;        // |det H| vs ||H||_F^{3/2}
  double third = 1e-8;      // absolute
  double angle = 1e-9;      // |cos Θ2|, |sin Θ1|
  double phi = 1e-8;        // |φ| vs (p-1 + q-1)
  double rank = 1e-8;       // singular values vs the largest
  double signature = 1e-8;  // eigenvalues vs the largest in magnitude
  double cubic = 1e-6;      // fiber cubic vs the sum of its terms
  double factor = 1.0;

  static Tolerances scaled(double f) {
    Tolerances t;
    t.factor = f;
    return t;
  }
  double k1_tol() const { return k1 * factor; }
  double det_tol() const { return det * factor; }
  double third_tol() const { return third * factor; }
  double angle_tol() const { return angle * factor; }
  double phi_tol(int p, int q) const { return phi * factor * (p - 1 + q - 1); }
  double rank_tol() const { return rank * factor; }
  double signature_tol() const { return signature * factor; }
  double cubic_tol() const { return cubic * factor; }
};

enum class Branch { K1Nonzero, K1NonzeroDegenerateTheta, K1ZeroCosTheta2Nonzero, CosTheta2Zero };
enum class Kind { IndefiniteFold, DefiniteFold, Cusp, Degenerate };

inline std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::K1Nonzero: return "K1Nonzero";
    case Branch::K1NonzeroDegenerateTheta: return "K1NonzeroDegenerateTheta";
    case Branch::K1ZeroCosTheta2Nonzero: return "K1ZeroCosTheta2Nonzero";
    case Branch::CosTheta2Zero: return "CosTheta2Zero";
  }
  return "?";
}

inline std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::IndefiniteFold: return "IndefiniteFold";
    case Kind::DefiniteFold: return "DefiniteFold";
    case Kind::Cusp: return "Cusp";
    case Kind::Degenerate: return "Degenerate";
  }
  return "?";
}

/// A closed form was requested outside the branch where it is valid.
struct BranchMismatch : std::logic_error {
  using std::logic_error::logic_error;
};

inline Branch dispatch_branch(const SingularPoint& pt, const Tolerances& tol = {}) {
  if (std::abs(std::cos(pt.t2())) < tol.angle_tol()) return Branch::CosTheta2Zero;
  const auto g = gradient_quad(pt);
  if (std::abs(g.q[0]) < tol.k1_tol() * g.q_norm()) return Branch::K1ZeroCosTheta2Nonzero;
  // R̂_{θ'1θ'1} = 4(p-1)|μ|^3 |u0| sin Θ1 cos Θ2 / k1^2
  if (std::abs(std::sin(pt.t1())) < tol.angle_tol()) return Branch::K1NonzeroDegenerateTheta;
  return Branch::K1Nonzero;
}

struct Shear {
  double s = 0.0;
  bool swap_roles = false;  // R normalizes and Q is the zero-gradient function; no shear
};

/// s = tan Θ2 such that R̂ = R - sQ has zero gradient at z0.
inline Shear shear_constant(const SingularPoint& pt, Branch branch, const Tolerances& tol = {}) {
  const double c2 = std::cos(pt.t2());
  const bool small = std::abs(c2) < tol.angle_tol();
  if (branch == Branch::CosTheta2Zero) {
    if (!small) throw BranchMismatch("cos Θ2 is not zero; the target swap does not apply");
    return {0.0, true};
  }
  if (small) throw BranchMismatch("cos Θ2 vanishes; tan Θ2 shear is undefined");
  return {std::tan(pt.t2()), false};
}

inline Shear shear_constant(const SingularPoint& pt, const Tolerances& tol = {}) {
  return shear_constant(pt, dispatch_branch(pt, tol), tol);
}

/// The six second-derivative letters of R̂ at z0:
/// A = R̂_{r1r1}/k1², B = R̂_{r1θ1}/k1, C = R̂_{θ1θ1}, D = R̂_{r2r2}, E = R̂_{r2θ2}, F = R̂_{θ2θ2}.
struct HessianEntries {
  double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;
};

inline HessianEntries hessian_entries(const SingularPoint& pt, const Tolerances& tol = {}) {
  const auto& prm = pt.params();
  const auto g = gradient_quad(pt);
  const double c2 = std::cos(pt.t2());
  if (std::abs(c2) < tol.angle_tol() || std::abs(g.q[0]) < tol.k1_tol() * g.q_norm())
    throw BranchMismatch("hessian_entries needs k1 != 0");
  const double p = prm.p, q = prm.q, m = prm.mu_abs;
  const double ru = pt.z.r1, rv = pt.z.r2, k1 = g.q[0], ks = pt.kappa_sign();
  const double s1 = std::sin(pt.t1()), c1 = std::cos(pt.t1());
  const double s3 = std::sin(pt.t3()), c3 = std::cos(pt.t3());
  HessianEntries h;
  h.a = p * (p - 1) * m * std::pow(ru, p - 2) * s1 / (k1 * k1 * c2);
  h.b = (p - 1) * m * c1 / (k1 * c2);
  h.c = -(p - 1) * m * ru * s1 / c2;
  h.d = ks * q * (q - 1) * std::pow(rv, q - 2) * s3 / c2;
  h.e = ks * (q - 1) * c3 / c2;
  h.f = -ks * (q - 1) * rv * s3 / c2;
  return h;
}

/// The 3x3 Hessian in (θ'1, r'2, θ'2) assembled from the letters and the gradient.
inline Eigen::Matrix3d hessian_from_entries(const HessianEntries& h, const GradientQuad& g) {
  const double k2 = g.q[1], k3 = g.q[2], k4 = g.q[3];
  const double x = k2 * h.a - h.b;
  Eigen::Matrix3d H;
  H << k2 * k2 * h.a - 2 * k2 * h.b + h.c, k3 * x, k4 * x,  //
      k3 * x, k3 * k3 * h.a + h.d, k3 * k4 * h.a + h.e,      //
      k4 * x, k3 * k4 * h.a + h.e, k4 * k4 * h.a + h.f;
  return H;
}

/// φ(z0) = (-1)^κ (p-1)|v0| sin Θ3 + (q-1)|μ||u0| sin Θ1; det H vanishes exactly where φ does.
inline double phi(const SingularPoint& pt) {
  const auto& prm = pt.params();
  return pt.kappa_sign() * (prm.p - 1) * pt.z.r2 * std::sin(pt.t3()) +
         (prm.q - 1) * prm.mu_abs * pt.z.r1 * std::sin(pt.t1());
}

/// φ'(z0) = (-1)^κ (q-1)|μ||u0| sin Θ1 sin Θ3 - (p-1)|v0| cos² Θ3 (the k1 = 0 branch).
inline double phi_prime(const SingularPoint& pt) {
  const auto& prm = pt.params();
  const double c3 = std::cos(pt.t3());
  return pt.kappa_sign() * (prm.q - 1) * prm.mu_abs * pt.z.r1 * std::sin(pt.t1()) *
             std::sin(pt.t3()) -
         (prm.p - 1) * pt.z.r2 * c3 * c3;
}

/// d^order φ / dθ^order along the circle through `pt` (θ the circle parameter).
inline double phi_along(const SingularPoint& pt, int order) {
  const auto& prm = pt.params();
  const double w1 = (prm.p + 1) / 2.0 * pt.spec.rate_u();
  const double w3 = (prm.q + 1) / 2.0 * pt.spec.rate_v();
  const double shift = order * kPi / 2.0;
  return pt.kappa_sign() * (prm.p - 1) * pt.z.r2 * std::pow(w3, order) *
             std::sin(pt.t3() + shift) +
         (prm.q - 1) * prm.mu_abs * pt.z.r1 * std::pow(w1, order) * std::sin(pt.t1() + shift);
}

/// Upper bound of |d^order φ / dθ^order| along a circle.
inline double phi_along_scale(const SingularCircleSpec& spec, int order) {
  const auto& prm = spec.params;
  const double w1 = (prm.p + 1) / 2.0 * spec.rate_u();
  const double w3 = (prm.q + 1) / 2.0 * spec.rate_v();
  return (prm.p - 1) * spec.radius_v * std::pow(w3, order) +
         (prm.q - 1) * prm.mu_abs * spec.radius_u * std::pow(w1, order);
}

/// Closed-form determinant of the branch's 3x3 Hessian. NaN when no closed
/// form applies (cos Θ2 = 0 and k̂1 = 0 together).
inline double det_H(const SingularPoint& pt, Branch branch, const Tolerances& tol = {}) {
  const auto& prm = pt.params();
  const double p = prm.p, q = prm.q, m = prm.mu_abs;
  const auto g = gradient_quad(pt);
  const double ph = phi(pt);
  const double c2 = std::cos(pt.t2()), s1 = std::sin(pt.t1());
  switch (branch) {
    case Branch::K1Nonzero:
    case Branch::K1NonzeroDegenerateTheta: {
      const double k1 = g.q[0];
      return -4.0 * (p - 1) * (q - 1) * m * m * ph / (k1 * k1 * c2);
    }
    case Branch::K1ZeroCosTheta2Nonzero: {
      // det = R̂_{r'1r'1} (R̂_{r'2r'2} R̂_{θ'2θ'2} - R̂_{r'2θ'2}²), expanded with k2² = 4|μ|²|u0|² cos²Θ2
      const double ru = pt.z.r1;
      const double r11 = p * (p - 1) * m * std::pow(ru, p - 2) * s1 / c2;
      return -(q - 1) * s1 * ph * r11 / (m * ru * c2 * c2);
    }
    case Branch::CosTheta2Zero: {
      const double kh1 = g.r[0];
      if (std::abs(kh1) < tol.k1_tol() * g.r_norm()) return std::numeric_limits<double>::quiet_NaN();
      return 4.0 * (p - 1) * (q - 1) * m * m * std::sin(pt.t2()) * ph / (kh1 * kh1);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline double det_H(const SingularPoint& pt, const Tolerances& tol = {}) {
  return det_H(pt, dispatch_branch(pt, tol), tol);
}

inline int best_pivot(const std::array<double, 4>& g) {
  int best = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(g[i]) > std::abs(g[best])) best = i;
  return best;
}

/// Hessians and normalized coordinates built from exact partials of Q and R.
struct HessianBundle {
  Branch branch = Branch::K1Nonzero;
  Shear shear;
  int pivot = 0;                            // source coordinate replaced by g·x
  std::array<int, 4> order{0, 1, 2, 3};     // primed coordinates: pivot first
  std::array<double, 4> gradient{};         // of the normalizing function
  std::optional<HessianEntries> entries;    // closed-form letters (k1 != 0 only)
  Eigen::Matrix4d primed;                   // Hessian of Ĝ in primed coordinates, pivot first
  Eigen::Matrix3d H;
  Eigen::Matrix<double, 4, 3> M;
  double det_closed = 0.0;
  double det_assembled = 0.0;
};

namespace detail {

inline void full_hessians(const DeformationParams& prm, const PolarPoint& z, Eigen::Matrix4d& hq,
                          Eigen::Matrix4d& hr) {
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      const auto d = partial(prm, z, Derivative::along(i, j));
      hq(i, j) = hq(j, i) = d.x;
      hr(i, j) = hr(j, i) = d.y;
    }
}

}  // namespace detail

enum class Normalize { Branch, Q, R };

/// `normalize` picks the function whose gradient defines the primed
/// coordinates; Branch uses Q, or R when cos Θ2 = 0.
inline HessianBundle hessian_bundle(const SingularPoint& pt, const Tolerances& tol = {},
                                    double shear_offset = 0.0, int pivot_override = -1,
                                    Normalize normalize = Normalize::Branch) {
  const auto& prm = pt.params();
  HessianBundle b;
  b.branch = dispatch_branch(pt, tol);
  b.det_closed = det_H(pt, b.branch, tol);

  std::array<double, 4> gq{}, gr{};
  for (int i = 0; i < 4; ++i) {
    const auto d = partial(prm, pt.z, Derivative::along(i));
    gq[i] = d.x;
    gr[i] = d.y;
  }
  Eigen::Matrix4d hq, hr;
  detail::full_hessians(prm, pt.z, hq, hr);

  const bool swap = normalize == Normalize::Branch ? b.branch == Branch::CosTheta2Zero
                                                   : normalize == Normalize::R;
  const auto& gF = swap ? gr : gq;
  const auto& gG = swap ? gq : gr;
  const Eigen::Matrix4d& hF = swap ? hr : hq;
  const Eigen::Matrix4d& hG = swap ? hq : hr;

  switch (b.branch) {
    case Branch::K1Nonzero:
    case Branch::K1NonzeroDegenerateTheta: b.pivot = 0; break;
    case Branch::K1ZeroCosTheta2Nonzero: b.pivot = 1; break;
    case Branch::CosTheta2Zero: {
      double norm = 0.0;
      for (double x : gF) norm += x * x;
      b.pivot = 0;
      if (std::abs(gF[0]) < tol.k1_tol() * std::sqrt(norm)) {
        for (int i = 1; i < 4; ++i)
          if (std::abs(gF[i]) > std::abs(gF[b.pivot])) b.pivot = i;
      }
      break;
    }
  }
  if (normalize != Normalize::Branch) b.pivot = best_pivot(gF);
  if (pivot_override >= 0) b.pivot = pivot_override;
  b.gradient = gF;
  b.shear.swap_roles = swap;
  b.shear.s = gG[b.pivot] / gF[b.pivot] + shear_offset;
  if (!swap && (b.branch == Branch::K1Nonzero || b.branch == Branch::K1NonzeroDegenerateTheta))
    b.entries = hessian_entries(pt, tol);

  const Eigen::Matrix4d hhat = hG - b.shear.s * hF;

  // x = J x' with x'_pivot = g·x and x'_j = x_j otherwise
  Eigen::Matrix4d J = Eigen::Matrix4d::Identity();
  for (int j = 0; j < 4; ++j) J(b.pivot, j) = -gF[j] / gF[b.pivot];
  J(b.pivot, b.pivot) = 1.0 / gF[b.pivot];
  const Eigen::Matrix4d natural = J.transpose() * hhat * J;

  int next = 1;
  b.order[0] = b.pivot;
  for (int i = 0; i < 4; ++i)
    if (i != b.pivot) b.order[next++] = i;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) b.primed(i, j) = natural(b.order[i], b.order[j]);
  b.H = b.primed.block<3, 3>(1, 1);
  b.M = b.primed.block<4, 3>(0, 1);
  // det H = -det[[0, g^T], [g, Hess Ĝ]] / g_pivot^2. Same value as H.determinant(),
  // without the cancellation among entries of size 1/g_pivot^2.
  Eigen::Matrix<double, 5, 5> bordered = Eigen::Matrix<double, 5, 5>::Zero();
  for (int i = 0; i < 4; ++i) {
    bordered(0, i + 1) = bordered(i + 1, 0) = gF[i];
    for (int j = 0; j < 4; ++j) bordered(i + 1, j + 1) = hhat(i, j);
  }
  b.det_assembled = -bordered.determinant() / (gF[b.pivot] * gF[b.pivot]);
  return b;
}

/// Factor taking det H in the coordinates of `from` to those of `to`. With
/// the same normalizing function only the pivot moves: (g[p_from] / g[p_to])².
/// Swapping Q and R scales Ĝ by -1/σ on the same fiber, σ = g_to / g_from.
inline double det_scale(const HessianBundle& from, const HessianBundle& to) {
  const double pivot = std::pow(to.gradient[from.pivot] / to.gradient[to.pivot], 2);
  if (from.shear.swap_roles == to.shear.swap_roles) {
    return std::pow(from.gradient[from.pivot] / to.gradient[to.pivot], 2);
  }
  const double sigma = to.gradient[from.pivot] / from.gradient[from.pivot];
  return -pivot / (sigma * sigma * sigma);
}

/// Hessian in (θ''1, r''2, θ''2), the basis where the null direction of H is
/// the last coordinate at a cusp: θ'1 = θ''1 - ℓ1 r''2 - ℓ2 θ''2.
inline Eigen::Matrix3d null_adapted_hessian(const Eigen::Matrix3d& H) {
  const double l1 = H(0, 1) / H(0, 0), l2 = H(0, 2) / H(0, 0);
  Eigen::Matrix3d T = Eigen::Matrix3d::Identity();
  T(0, 1) = -l1;
  T(0, 2) = -l2;
  return T.transpose() * H * T;
}

/// Closed-form diagonal of that Hessian at a point with φ = 0, k1 != 0:
/// (R̂_{θ'1θ'1}, -4(p-1)²|μ|² / (k1² R̂_{θ'1θ'1}), 0).
inline std::array<double, 3> cusp_hessian_diagonal(const SingularPoint& pt) {
  const auto& prm = pt.params();
  const double k1 = gradient_quad(pt).q[0];
  const double m = prm.mu_abs, p = prm.p;
  const double r11 = 4.0 * (p - 1) * m * m * m * pt.z.r1 * std::sin(pt.t1()) *
                     std::cos(pt.t2()) / (k1 * k1);
  return {r11, -4.0 * (p - 1) * (p - 1) * m * m / (k1 * k1 * r11), 0.0};
}

/// Derivatives with respect to θ1 of a function restricted to the singular
/// curve through a point, r1 and r2 held fixed and θ2 = ((p-1)/(q-1)) θ1 + const.
struct CurveJet {
  double d1 = 0, d2 = 0, d3 = 0;
};

/// Jet of  wR·R + wQ·Q  along the singular curve at pt.
inline CurveJet curve_jet(const SingularPoint& pt, double wR, double wQ) {
  const auto& prm = pt.params();
  const double lam = static_cast<double>(prm.p - 1) / (prm.q - 1);
  auto along = [&](int n) {
    // (∂θ1 + λ ∂θ2)^n
    double sum = 0.0, binom = 1.0;
    for (int j = 0; j <= n; ++j) {
      Derivative d;
      d.th1 = n - j;
      d.th2 = j;
      const auto v = partial(prm, pt.z, d);
      sum += binom * std::pow(lam, j) * (wR * v.y + wQ * v.x);
      binom = binom * (n - j) / (j + 1);
    }
    return sum;
  };
  return {along(1), along(2), along(3)};
}

/// c(θ1) = cos((p+1)θ1/2) cos((p-1)θ1/2 + arg μ) = (cos(pθ1 + arg μ) + cos(θ1 - arg μ)) / 2
/// and its first two derivatives, at θ1 = arg u0.
inline std::array<double, 3> curve_weight(const SingularPoint& pt) {
  const auto& prm = pt.params();
  const double p = prm.p, a = p * pt.arg_u + prm.mu_arg, b = pt.arg_u - prm.mu_arg;
  return {0.5 * (std::cos(a) + std::cos(b)), -0.5 * (p * std::sin(a) + std::sin(b)),
          -0.5 * (p * p * std::cos(a) + std::cos(b))};
}

/// (32|μ|²/k1²)((q-1)/(p-1))³ d/dθ1( c d/dθ1( c df/dθ1 ) ) for the jet of f.
inline double nested_operator(const SingularPoint& pt, const CurveJet& jet) {
  const auto& prm = pt.params();
  const auto [c, c1, c2] = curve_weight(pt);
  const double k1 = gradient_quad(pt).q[0];
  const double ratio = static_cast<double>(prm.q - 1) / (prm.p - 1);
  const double pre = 32.0 * prm.mu_abs * prm.mu_abs / (k1 * k1) * ratio * ratio * ratio;
  return pre * ((c1 * c1 + c * c2) * jet.d1 + 3.0 * c * c1 * jet.d2 + c * c * jet.d3);
}

/// Third-order cusp test, applied to R̂ = R - sQ restricted to the singular curve.
inline double third_derivative(const SingularPoint& pt, const Tolerances& tol = {},
                               double shear_offset = 0.0) {
  const auto branch = dispatch_branch(pt, tol);
  if (branch != Branch::K1Nonzero && branch != Branch::K1NonzeroDegenerateTheta)
    throw BranchMismatch("third derivative test needs k1 != 0 (branch " +
                         std::string(to_string(branch)) + ")");
  const auto& prm = pt.params();
  if (std::abs(phi(pt)) > tol.phi_tol(prm.p, prm.q))
    throw BranchMismatch("third derivative test only applies where φ = 0");
  const double s = std::tan(pt.t2()) + shear_offset;
  return nested_operator(pt, curve_jet(pt, 1.0, -s));
}

/// Cubic coefficient of the zero-gradient function Ĝ along the null direction
/// of H, on the fiber of the normalizing function F:
///   D³Ĝ[v,v,v] - 3 D²F[v,v] D²Ĝ[v,∇F] / |∇F|²,  v the unit null vector in (r1, θ1, r2, θ2).
/// Needs no closed form, so it covers every branch.
struct FiberCubic {
  double value = 0.0;
  double scale = 0.0;  // sum of the magnitudes of the contributing terms
  Eigen::Vector4d null_dir = Eigen::Vector4d::Zero();
};

inline FiberCubic fiber_cubic(const SingularPoint& pt, const HessianBundle& b) {
  const auto& prm = pt.params();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(b.H);
  int idx = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(es.eigenvalues()[i]) < std::abs(es.eigenvalues()[idx])) idx = i;
  const Eigen::Vector3d n = es.eigenvectors().col(idx);
  Eigen::Vector4d v = Eigen::Vector4d::Zero();
  double dot = 0.0;
  for (int i = 1; i < 4; ++i) {
    v[b.order[i]] = n[i - 1];
    dot += b.gradient[b.order[i]] * n[i - 1];
  }
  v[b.pivot] = -dot / b.gradient[b.pivot];
  v.normalize();

  const bool swap = b.shear.swap_roles;
  auto split = [&](const PlanePoint& d, double& f, double& g) {
    f = swap ? d.y : d.x;
    g = swap ? d.x : d.y;
  };
  Eigen::Vector4d gF, gG;
  for (int i = 0; i < 4; ++i) split(partial(prm, pt.z, Derivative::along(i)), gF[i], gG[i]);
  const double s = gG[b.pivot] / gF[b.pivot];  // exact shear: ∇Ĝ = 0

  Eigen::Matrix4d hF, hG;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      double f, g;
      split(partial(prm, pt.z, Derivative::along(i, j)), f, g);
      hF(i, j) = hF(j, i) = f;
      hG(i, j) = hG(j, i) = g - s * f;
    }
  double cubic = 0.0, cubic_abs = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j)
      for (int k = j; k < 4; ++k) {
        double f, g;
        split(partial(prm, pt.z, Derivative::along(i, j, k)), f, g);
        // multiplicity of (i, j, k) among ordered triples
        const int mult = (i == j && j == k) ? 1 : (i == j || j == k) ? 3 : 6;
        const double term = mult * (g - s * f) * v[i] * v[j] * v[k];
        cubic += term;
        cubic_abs += std::abs(term);
      }
  const double curv = v.dot(hF * v) / gF.squaredNorm();
  const double bend = 3.0 * curv * v.dot(hG * gF);
  FiberCubic out;
  out.value = cubic - bend;
  out.scale = cubic_abs + std::abs(bend);
  out.null_dir = v;
  return out;
}

struct Signature {
  int pos = 0, neg = 0, zero = 0;
  bool mixed() const { return pos > 0 && neg > 0; }
  bool definite() const { return zero == 0 && (pos == 0 || neg == 0); }
};

inline Signature signature(const Eigen::Matrix3d& H, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H, Eigen::EigenvaluesOnly);
  const auto ev = es.eigenvalues();
  const double big = ev.cwiseAbs().maxCoeff();
  Signature s;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(ev[i]) <= rel_tol * big || big == 0.0) ++s.zero;
    else if (ev[i] > 0) ++s.pos;
    else ++s.neg;
  }
  return s;
}

inline int numerical_rank(const Eigen::Matrix<double, 4, 3>& M, double rel_tol) {
  Eigen::JacobiSVD<Eigen::Matrix<double, 4, 3>> svd(M);
  const auto sv = svd.singularValues();
  if (sv[0] == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > rel_tol * sv[0]) ++r;
  return r;
}

struct Diagnostics {
  double phi = 0.0;
  double phi_prime = std::numeric_limits<double>::quiet_NaN();  // k1 = 0 branch only
  double detH = 0.0;            // closed form (assembled when no closed form applies)
  double detH_assembled = 0.0;
  double detH_normalized = 0.0;  // in the well-conditioned coordinates; drives the fold test
  double det_tol = 0.0;
  double third = std::numeric_limits<double>::quiet_NaN();  // cusp candidates only
  double third_scale = std::numeric_limits<double>::quiet_NaN();  // fiber cubic only
  Signature hess_signature;
  int rankM = 0;
  Branch branch = Branch::K1Nonzero;
  double shear = 0.0;
};

struct Classification {
  Kind kind = Kind::Degenerate;
  Diagnostics diagnostics;
};

/// Fold if det H != 0, with the kind from the signature of H. On the φ = 0
/// locus, cusp if rank M = 3 and the third-order term is nonzero: the nested
/// third derivative when k1 != 0 (sin Θ1 = 0 included), the fiber cubic in the
/// other branches. Everything else is Degenerate.
///
/// The branch coordinates become ill-conditioned as k1 -> 0 or cos Θ2 -> 0, so
/// the fold test, signature and rank M use coordinates normalized by whichever
/// of Q, R has the larger gradient, pivoting on its largest entry. det H there
/// differs from the branch value by a nonzero factor.
inline Classification classify(const SingularPoint& pt, const Tolerances& tol = {},
                               double shear_offset = 0.0) {
  const auto& prm = pt.params();
  const auto b = hessian_bundle(pt, tol, shear_offset);
  const auto g = gradient_quad(pt);
  const auto wc = hessian_bundle(pt, tol, shear_offset, -1,
                                 g.r_norm() > g.q_norm() ? Normalize::R : Normalize::Q);

  Classification out;
  auto& dg = out.diagnostics;
  dg.branch = b.branch;
  dg.shear = b.shear.s;
  dg.phi = phi(pt);
  if (b.branch == Branch::K1ZeroCosTheta2Nonzero) dg.phi_prime = phi_prime(pt);
  dg.detH_assembled = b.det_assembled;
  dg.detH = std::isfinite(b.det_closed) ? b.det_closed : b.det_assembled;
  dg.detH_normalized = std::isfinite(b.det_closed) ? b.det_closed * det_scale(b, wc) : wc.det_assembled;
  dg.det_tol = tol.det_tol() * std::pow(wc.H.norm(), 1.5);
  dg.hess_signature = signature(wc.H, tol.signature_tol());
  dg.rankM = numerical_rank(wc.M, tol.rank_tol());

  if (std::abs(dg.detH_normalized) > dg.det_tol) {
    if (dg.hess_signature.zero > 0) out.kind = Kind::Degenerate;
    else out.kind = dg.hess_signature.mixed() ? Kind::IndefiniteFold : Kind::DefiniteFold;
    return out;
  }
  out.kind = Kind::Degenerate;
  if (std::abs(dg.phi) > tol.phi_tol(prm.p, prm.q) || dg.rankM < 3) return out;
  if (b.branch == Branch::K1Nonzero || b.branch == Branch::K1NonzeroDegenerateTheta) {
    dg.third = third_derivative(pt, tol, shear_offset);
    if (std::abs(dg.third) > tol.third_tol()) out.kind = Kind::Cusp;
    return out;
  }
  const auto fc = fiber_cubic(pt, wc);
  dg.third = fc.value;
  dg.third_scale = fc.scale;
  if (std::abs(fc.value) > tol.cubic_tol() * fc.scale) out.kind = Kind::Cusp;
  return out;
}

struct ClassifiedPoint {
  int k = 0;
  double theta = 0.0;
  Classification cls;
};

struct CircleScan {
  int k = 0;
  std::vector<ClassifiedPoint> samples;     // uniform θ grid
  std::vector<ClassifiedPoint> candidates;  // zeros of φ along the circle

  std::vector<double> cusp_thetas() const {
    std::vector<double> out;
    for (const auto& c : candidates)
      if (c.cls.kind == Kind::Cusp) out.push_back(c.theta);
    for (const auto& c : samples)
      if (c.cls.kind == Kind::Cusp) out.push_back(c.theta);
    std::sort(out.begin(), out.end());
    std::vector<double> uniq;
    for (double t : out)
      if (uniq.empty() || circular_distance(t, uniq.back()) > 1e-9) uniq.push_back(t);
    if (uniq.size() > 1 && circular_distance(uniq.front(), uniq.back()) <= 1e-9) uniq.pop_back();
    return uniq;
  }
};

/// Zeros of φ along C_k in [0, 2π), including tangential ones.
inline std::vector<double> phi_zeros(const SingularCircleSpec& spec, int grid = 0) {
  const auto& prm = spec.params;
  const double w1 = (prm.p + 1) / 2.0 * spec.rate_u();
  const double w3 = (prm.q + 1) / 2.0 * spec.rate_v();
  RootOptions opt;
  opt.grid = grid > 0 ? grid : 64 * static_cast<int>(std::ceil(w1 + w3) + 1);
  opt.depth = 2;
  opt.xtol = 1e-13;
  opt.tangent_tol = [&](int d) { return 1e-12 * phi_along_scale(spec, d); };
  auto f = [&](int d, double th) { return phi_along(point_on_circle_lifted(spec, th), d); };
  const double off = kScanOffset * kTwoPi / opt.grid;
  auto raw = isolate_roots(f, -off, kTwoPi - off, opt);
  std::vector<double> out;
  for (double x : raw) {
    const double w = wrap_angle(x);
    bool dup = false;
    for (double y : out)
      if (circular_distance(w, y) < 1e-10) dup = true;
    if (!dup) out.push_back(w);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<CircleScan> scan_singular_set(const DeformationParams& prm, int samples,
                                                 const Tolerances& tol = {}) {
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  std::vector<CircleScan> out;
  for (const auto& spec : singular_circles(prm)) {
    CircleScan sc;
    sc.k = spec.k;
    sc.samples.reserve(static_cast<std::size_t>(samples));
    for (int j = 0; j < samples; ++j) {
      const double th = kTwoPi * j / samples;
      sc.samples.push_back({spec.k, th, classify(point_on_circle(spec, th), tol)});
    }
    for (double th : phi_zeros(spec))
      sc.candidates.push_back({spec.k, th, classify(point_on_circle(spec, th), tol)});
    out.push_back(std::move(sc));
  }
  return out;
}

struct KindCounts {
  int indefinite_fold = 0, definite_fold = 0, cusp = 0, degenerate = 0;
  void add(Kind k) {
    switch (k) {
      case Kind::IndefiniteFold: ++indefinite_fold; break;
      case Kind::DefiniteFold: ++definite_fold; break;
      case Kind::Cusp: ++cusp; break;
      case Kind::Degenerate: ++degenerate; break;
    }
  }
};

struct ExcellenceReport {
  bool excellent = false;
  bool equal_exponent_boundary = false;  // p = q, |μ| = 1, sin c'_k = 0 for some k
  KindCounts counts;
  std::vector<ClassifiedPoint> violations;  // Degenerate or DefiniteFold
  std::vector<CircleScan> scans;
};

inline constexpr int kMinExcellenceSamples = 2 * 4096;

inline bool on_equal_exponent_boundary(const DeformationParams& prm) {
  if (prm.p != prm.q || std::abs(prm.mu_abs - 1.0) > 1e-12) return false;
  for (const auto& spec : singular_circles(prm))
    if (std::abs(std::sin((prm.p + 1) / 2.0 * spec.phase)) < 1e-9) return true;
  return false;
}

inline ExcellenceReport is_excellent(const DeformationParams& prm,
                                     int samples = kMinExcellenceSamples,
                                     const Tolerances& tol = {}) {
  if (samples < kMinExcellenceSamples)
    throw std::invalid_argument("excellence check needs at least 8192 samples per circle");
  ExcellenceReport rep;
  rep.scans = scan_singular_set(prm, samples, tol);
  rep.equal_exponent_boundary = on_equal_exponent_boundary(prm);
  for (const auto& sc : rep.scans) {
    for (const auto* group : {&sc.samples, &sc.candidates})
      for (const auto& cp : *group) {
        rep.counts.add(cp.cls.kind);
        if (cp.cls.kind == Kind::Degenerate || cp.cls.kind == Kind::DefiniteFold)
          rep.violations.push_back(cp);
      }
  }
  rep.excellent = rep.violations.empty();
  return rep;
}

}  // namespace brieskorn
