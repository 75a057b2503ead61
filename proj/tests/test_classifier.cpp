#include <gtest/gtest.h>

#include <random>

#include "brieskorn/acceptance.hpp"
#include "brieskorn/levine_classifier.hpp"
#include "oracles.hpp"

using namespace brieskorn;
using acceptance::detail::point_with_arg_u;
using acceptance::detail::random_branch_point;

namespace {

/// R̂ = R - sQ through the complex oracle, polar coordinates.
double r_hat(const DeformationParams& prm, double s, double r1, double t1, double r2, double t2) {
  const oracle::Map f{prm.p, prm.q, prm.mu()};
  const auto w = f(std::polar(r1, t1), std::polar(r2, t2));
  return w.imag() - s * w.real();
}

SingularPoint generic_point(std::mt19937_64& rng) {
  for (;;) {
    if (auto pt = random_branch_point(Branch::K1Nonzero, rng)) return *pt;
  }
}

}  // namespace

TEST(Classifier, LettersMatchFiniteDifferences) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 60; ++i) {
    const auto pt = generic_point(rng);
    const auto& prm = pt.params();
    const auto h = hessian_entries(pt);
    const double s = std::tan(pt.t2()), k1 = gradient_quad(pt).q[0];
    const auto z = pt.z;
    const double e = 1e-4;
    auto f = [&](double a, double b, double c, double d) {
      return r_hat(prm, s, z.r1 + a, z.th1 + b, z.r2 + c, z.th2 + d);
    };
    const double f0 = f(0, 0, 0, 0);
    const double r11 = (f(e, 0, 0, 0) - 2 * f0 + f(-e, 0, 0, 0)) / (e * e);
    const double r1t1 = (f(e, e, 0, 0) - f(e, -e, 0, 0) - f(-e, e, 0, 0) + f(-e, -e, 0, 0)) / (4 * e * e);
    const double t1t1 = (f(0, e, 0, 0) - 2 * f0 + f(0, -e, 0, 0)) / (e * e);
    const double r22 = (f(0, 0, e, 0) - 2 * f0 + f(0, 0, -e, 0)) / (e * e);
    const double r2t2 = (f(0, 0, e, e) - f(0, 0, e, -e) - f(0, 0, -e, e) + f(0, 0, -e, -e)) / (4 * e * e);
    const double t2t2 = (f(0, 0, 0, e) - 2 * f0 + f(0, 0, 0, -e)) / (e * e);
    const double scale = 1.0 + std::abs(s);
    EXPECT_NEAR(h.a * k1 * k1, r11, 1e-5 * scale * (1 + std::abs(r11)));
    EXPECT_NEAR(h.b * k1, r1t1, 1e-5 * scale * (1 + std::abs(r1t1)));
    EXPECT_NEAR(h.c, t1t1, 1e-5 * scale * (1 + std::abs(t1t1)));
    EXPECT_NEAR(h.d, r22, 1e-5 * scale * (1 + std::abs(r22)));
    EXPECT_NEAR(h.e, r2t2, 1e-5 * scale * (1 + std::abs(r2t2)));
    EXPECT_NEAR(h.f, t2t2, 1e-5 * scale * (1 + std::abs(t2t2)));
  }
}

TEST(Classifier, LetterIdentity) {
  // AC - B^2 = -(p-1)^2 |μ|^2 / (k1^2 cos^2 Θ2)
  std::mt19937_64 rng(32);
  for (int i = 0; i < 500; ++i) {
    const auto pt = generic_point(rng);
    const auto h = hessian_entries(pt);
    const double k1 = gradient_quad(pt).q[0], c2 = std::cos(pt.t2());
    const double p = pt.params().p, m = pt.params().mu_abs;
    const double want = -(p - 1) * (p - 1) * m * m / (k1 * k1 * c2 * c2);
    EXPECT_NEAR(h.a * h.c - h.b * h.b, want, 1e-9 * std::abs(want));
  }
}

TEST(Classifier, HessianIsSecondDerivativeOnGradientKernel) {
  // H is the Hessian of R̂ restricted to {k·dx = 0}, coordinates (θ1, r2, θ2)
  std::mt19937_64 rng(33);
  for (int i = 0; i < 60; ++i) {
    const auto pt = generic_point(rng);
    const auto& prm = pt.params();
    const auto g = gradient_quad(pt);
    const auto b = hessian_bundle(pt);
    const double s = std::tan(pt.t2());
    auto f = [&](const Eigen::Vector3d& y) {
      const double dr1 = -(g.q[1] * y[0] + g.q[2] * y[1] + g.q[3] * y[2]) / g.q[0];
      return r_hat(prm, s, pt.z.r1 + dr1, pt.z.th1 + y[0], pt.z.r2 + y[1], pt.z.th2 + y[2]);
    };
    // a unit step in θ1, r2, θ2 moves r1 by up to |k|/|k1|
    const double e = 1e-4 * std::min(1.0, std::abs(g.q[0]) / g.q_norm());
    Eigen::Matrix3d fd;
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 3; ++c) {
        Eigen::Vector3d ea = Eigen::Vector3d::Unit(a) * e, ec = Eigen::Vector3d::Unit(c) * e;
        fd(a, c) = (f(ea + ec) - f(ea - ec) - f(-ea + ec) + f(-ea - ec)) / (4 * e * e);
      }
    const Eigen::Matrix3d from_letters = hessian_from_entries(hessian_entries(pt), g);
    const double scale = 1.0 + b.H.norm();
    EXPECT_LT((fd - b.H).norm(), 1e-5 * scale * (1 + std::abs(s)));
    EXPECT_LT((from_letters - b.H).norm(), 1e-9 * scale);
  }
}

TEST(Classifier, ClosedFormDeterminantMatchesAssembly) {
  std::mt19937_64 rng(34);
  for (auto br : {Branch::K1Nonzero, Branch::K1NonzeroDegenerateTheta, Branch::K1ZeroCosTheta2Nonzero,
                  Branch::CosTheta2Zero}) {
    int seen = 0;
    for (int i = 0; i < 4000 && seen < 100; ++i) {
      const auto pt = random_branch_point(br, rng);
      if (!pt) continue;
      const auto b = hessian_bundle(*pt);
      if (!std::isfinite(b.det_closed)) continue;
      ++seen;
      EXPECT_NEAR(b.det_closed, b.det_assembled, 1e-7 * (1e-12 + std::abs(b.det_assembled)))
          << to_string(br);
      if (br == Branch::K1Nonzero) {
        EXPECT_NEAR(b.det_assembled, b.H.determinant(), 1e-6 * (1 + std::abs(b.det_assembled)));
      }
    }
    EXPECT_GT(seen, 20) << to_string(br);
  }
}

TEST(Classifier, ShearRemovesTheGradient) {
  std::mt19937_64 rng(35);
  for (int i = 0; i < 200; ++i) {
    const auto pt = generic_point(rng);
    const auto g = gradient_quad(pt);
    const auto sh = shear_constant(pt);
    EXPECT_FALSE(sh.swap_roles);
    for (int a = 0; a < 4; ++a) EXPECT_NEAR(g.r[a] - sh.s * g.q[a], 0.0, 1e-11 * (1 + g.r_norm()));
  }
}

TEST(Classifier, BranchMismatchIsReported) {
  std::mt19937_64 rng(36);
  const auto pt = generic_point(rng);
  EXPECT_THROW(shear_constant(pt, Branch::CosTheta2Zero), BranchMismatch);
  std::optional<SingularPoint> c0;
  while (!c0) c0 = random_branch_point(Branch::CosTheta2Zero, rng);
  EXPECT_THROW(shear_constant(*c0, Branch::K1Nonzero), BranchMismatch);
  EXPECT_TRUE(shear_constant(*c0).swap_roles);
  EXPECT_THROW(hessian_entries(*c0), BranchMismatch);
  EXPECT_THROW(third_derivative(*c0), BranchMismatch);
  std::optional<SingularPoint> k0;
  while (!k0) k0 = random_branch_point(Branch::K1ZeroCosTheta2Nonzero, rng);
  EXPECT_THROW(hessian_entries(*k0), BranchMismatch);
  EXPECT_THROW(third_derivative(*k0), BranchMismatch);
  if (std::abs(phi(pt)) > 1e-3) {
    EXPECT_THROW(third_derivative(pt), BranchMismatch);
  }
}

TEST(Classifier, DeterminantVanishesWithPhi) {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 300; ++i) {
    const auto pt = generic_point(rng);
    const auto& prm = pt.params();
    const double k1 = gradient_quad(pt).q[0];
    const double want = -4.0 * (prm.p - 1) * (prm.q - 1) * prm.mu_abs * prm.mu_abs * phi(pt) /
                        (k1 * k1 * std::cos(pt.t2()));
    EXPECT_NEAR(det_H(pt), want, 1e-12 * (1 + std::abs(want)));
  }
}

TEST(Classifier, PhiDerivativesAlongCircle) {
  const auto prm = DeformationParams::make(4, 3, 1.7, 0.9);
  const auto spec = singular_circles(prm)[0];
  for (double th : {0.3, 1.7, 4.0}) {
    for (int n = 0; n < 2; ++n) {
      const auto g = [&](double t) { return phi_along(point_on_circle_lifted(spec, t), n); };
      EXPECT_NEAR(oracle::diff(g, th, 1e-5), phi_along(point_on_circle_lifted(spec, th), n + 1),
                  1e-6 * phi_along_scale(spec, n + 1));
    }
    EXPECT_NEAR(phi_along(point_on_circle_lifted(spec, th), 0), phi(point_on_circle_lifted(spec, th)), 1e-14);
  }
}

TEST(Classifier, NestedOperatorIsLinear) {
  std::mt19937_64 rng(38);
  const auto pt = generic_point(rng);
  const double a = 0.7, b = -1.9;
  const auto j1 = curve_jet(pt, 1.0, 0.0), j2 = curve_jet(pt, 0.0, 1.0), j = curve_jet(pt, a, b);
  const double lhs = nested_operator(pt, j);
  const double rhs = a * nested_operator(pt, j1) + b * nested_operator(pt, j2);
  EXPECT_NEAR(lhs, rhs, 1e-10 * (1 + std::abs(lhs)));
}

TEST(Classifier, NestedOperatorMatchesNestedDifferences) {
  std::mt19937_64 rng(39);
  for (int i = 0; i < 20; ++i) {
    const auto pt = generic_point(rng);
    const auto& prm = pt.params();
    const double s = std::tan(pt.t2());
    const double lam = double(prm.p - 1) / (prm.q - 1);
    const double t0 = pt.z.th1;
    auto g = [&](double t) { return r_hat(prm, s, pt.z.r1, t, pt.z.r2, pt.z.th2 + lam * (t - t0)); };
    // the weight, in the lifted angle
    auto c = [&](double t) {
      const double au = pt.arg_u + (t - t0);
      return 0.5 * (std::cos(prm.p * au + prm.mu_arg) + std::cos(au - prm.mu_arg));
    };
    auto nested_at = [&](double h) {
      auto d1 = [&](double t) { return c(t) * oracle::diff(g, t, h); };
      auto d2 = [&](double t) { return c(t) * oracle::diff(d1, t, h); };
      return oracle::diff(d2, t0, h);
    };
    const double nested = (4.0 * nested_at(2e-3) - nested_at(4e-3)) / 3.0;  // Richardson
    const double k1 = oracle::diff([&](double r) { return oracle::Map{prm.p, prm.q, prm.mu()}(
                                                             std::polar(r, pt.z.th1), pt.z.v()).real(); },
                                   pt.z.r1, 1e-6);
    const double ratio = double(prm.q - 1) / (prm.p - 1);
    const double want = 32.0 * prm.mu_abs * prm.mu_abs / (k1 * k1) * ratio * ratio * ratio * nested;
    const double got = nested_operator(pt, curve_jet(pt, 1.0, -s));
    EXPECT_NEAR(got, want, 1e-4 * (1 + std::abs(want)));
  }
}

TEST(Classifier, CuspHessianDiagonal) {
  std::mt19937_64 rng(40);
  int cusps = 0;
  for (const auto& prm : {DeformationParams::make(2, 2, 0.8, 0.3), DeformationParams::make(3, 2, 1.4, 0.5),
                          DeformationParams::make(4, 3, 0.6, 2.2), DeformationParams::make(5, 3, 3.0, 1.0)}) {
    for (const auto& spec : singular_circles(prm))
      for (double th : phi_zeros(spec)) {
        const auto pt = point_on_circle(spec, th);
        if (dispatch_branch(pt) != Branch::K1Nonzero) continue;
        ++cusps;
        const auto b = hessian_bundle(pt);
        const auto adapted = null_adapted_hessian(b.H);
        const auto diag = cusp_hessian_diagonal(pt);
        const double scale = b.H.norm();
        EXPECT_NEAR(adapted(0, 0), diag[0], 1e-9 * std::max(scale, std::abs(diag[0])));
        EXPECT_LT(diag[0] * diag[1], 0.0);
        // null direction is the last coordinate: its row vanishes
        EXPECT_LT(adapted.row(2).norm(), 1e-7 * scale);
        EXPECT_NEAR(adapted(1, 1), diag[1], 1e-9 * std::max(scale, std::abs(diag[1])));
      }
  }
  EXPECT_GT(cusps, 5);
}

TEST(Classifier, ThirdDerivativeTracksPhiSlope) {
  // simple zero of φ along the circle: nonzero; zero at a tangential zero
  for (const auto& prm : {DeformationParams::make(2, 2, 0.8, 0.3), DeformationParams::make(4, 3, 0.6, 2.2)})
    for (const auto& spec : singular_circles(prm))
      for (double th : phi_zeros(spec)) {
        const auto pt = point_on_circle(spec, th);
        if (dispatch_branch(pt) != Branch::K1Nonzero) continue;
        EXPECT_GT(std::abs(phi_along(pt, 1)), 1e-6);
        EXPECT_GT(std::abs(third_derivative(pt)), 1e-6);
      }
  const auto crit = DeformationParams::make(3, 2, 1.5 * std::sqrt(3.0), 0.0);
  const auto cp = CensusParams::make(crit);
  const auto census = census_on_circle(crit, cp, 0);
  ASSERT_FALSE(census.multiple_thetas.empty());
  for (double th : census.multiple_thetas) {
    const auto pt = point_on_circle(singular_circles(crit)[0], th);
    EXPECT_LT(std::abs(phi_along(pt, 1)), 1e-6);
    EXPECT_EQ(classify(pt).kind, Kind::Degenerate);
  }
}

TEST(Classifier, CuspsHaveStationaryCriticalValues) {
  // the critical value curve stops at a cusp, and only there
  for (const auto& prm : {DeformationParams::make(2, 2, 0.8, 0.3), DeformationParams::make(3, 2, 1.4, 0.5),
                          DeformationParams::make(4, 3, 0.6, 2.2)}) {
    const oracle::Map f{prm.p, prm.q, prm.mu()};
    for (const auto& spec : singular_circles(prm)) {
      auto value = [&](double t) {
        const auto [u, v] = oracle::circle_point(prm.p, prm.q, prm.mu_arg, spec.k, t);
        return f(u, v);
      };
      for (double th : phi_zeros(spec)) {
        EXPECT_EQ(classify(point_on_circle(spec, th)).kind, Kind::Cusp);
        EXPECT_LT(std::abs(oracle::cdiff5(value, th, 1e-3)), 1e-9);
      }
      for (int j = 0; j < 64; ++j) {
        const double th = kTwoPi * (j + 0.5) / 64;
        const auto pt = point_on_circle(spec, th);
        if (std::abs(phi(pt)) < 1e-3) continue;
        EXPECT_EQ(classify(pt).kind, Kind::IndefiniteFold);
        EXPECT_GT(std::abs(oracle::cdiff5(value, th, 1e-3)), 1e-6);
      }
    }
  }
}

TEST(Classifier, ShearOffsetDoesNotChangeKind) {
  const auto prm = DeformationParams::make(3, 2, 1.4, 0.5);
  for (const auto& spec : singular_circles(prm)) {
    std::vector<double> ths = phi_zeros(spec);
    for (int j = 0; j < 128; ++j) ths.push_back(kTwoPi * j / 128);
    for (double th : ths) {
      const auto pt = point_on_circle(spec, th);
      EXPECT_EQ(classify(pt).kind, classify(pt, {}, 1e-6).kind) << th;
    }
  }
}

TEST(Classifier, ExampleEqualExponents) {
  const auto rep = is_excellent(DeformationParams::make(2, 2, 0.8, 0.3));
  EXPECT_TRUE(rep.excellent);
  EXPECT_FALSE(rep.equal_exponent_boundary);
  ASSERT_EQ(rep.scans.size(), 1u);
  EXPECT_EQ(rep.scans[0].cusp_thetas().size(), 3u);
  EXPECT_EQ(rep.counts.definite_fold, 0);
  EXPECT_EQ(rep.counts.degenerate, 0);
}

TEST(Classifier, ExampleBoundaryIsFlagged) {
  const auto rep = is_excellent(DeformationParams::make(2, 2, 1.0, 0.0));
  EXPECT_TRUE(rep.excellent);
  EXPECT_TRUE(rep.equal_exponent_boundary);
  EXPECT_EQ(rep.scans[0].cusp_thetas().size(), 3u);
}

TEST(Classifier, ExampleTransitionIsNotExcellent) {
  const auto rep = is_excellent(DeformationParams::make(3, 2, 1.5 * std::sqrt(3.0), 0.0));
  EXPECT_FALSE(rep.excellent);
  EXPECT_GT(rep.counts.degenerate, 0);
}

TEST(Classifier, ExcellenceNeedsEnoughSamples) {
  EXPECT_THROW(is_excellent(DeformationParams::make(2, 2, 0.8, 0.3), 1024), std::invalid_argument);
}

TEST(Classifier, ScaledTolerances) {
  const auto t = Tolerances::scaled(10.0);
  EXPECT_DOUBLE_EQ(t.det_tol(), 1e-7);
  EXPECT_DOUBLE_EQ(t.phi_tol(3, 2), 3e-7);
  const auto prm = DeformationParams::make(4, 3, 0.6, 2.2);
  const auto spec = singular_circles(prm)[0];
  for (int j = 0; j < 64; ++j) {
    const auto pt = point_on_circle(spec, kTwoPi * j / 64);
    EXPECT_EQ(classify(pt).kind, classify(pt, t).kind);
  }
}

namespace {

/// Third derivative of Ĝ along the fiber of F through pt, in the direction v,
/// from the complex map only. The fiber curve is found by Newton steps along ∇F.
double fiber_cubic_fd(const SingularPoint& pt, bool swap, const Eigen::Vector4d& v) {
  const auto& prm = pt.params();
  const oracle::Map f{prm.p, prm.q, prm.mu()};
  auto eval = [&](const Eigen::Vector4d& x) { return f(std::polar(x[0], x[1]), std::polar(x[2], x[3])); };
  auto F = [&](const Eigen::Vector4d& x) { const auto w = eval(x); return swap ? w.imag() : w.real(); };
  auto G = [&](const Eigen::Vector4d& x) { const auto w = eval(x); return swap ? w.real() : w.imag(); };
  const Eigen::Vector4d x0(pt.z.r1, pt.z.th1, pt.z.r2, pt.z.th2);
  auto grad = [&](auto fn, const Eigen::Vector4d& x) {
    Eigen::Vector4d g;
    for (int i = 0; i < 4; ++i) {
      const Eigen::Vector4d e = Eigen::Vector4d::Unit(i) * 1e-6;
      g[i] = (fn(x + e) - fn(x - e)) / 2e-6;
    }
    return g;
  };
  const Eigen::Vector4d gF = grad(F, x0), gG = grad(G, x0);
  int piv = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(gF[i]) > std::abs(gF[piv])) piv = i;
  const double s = gG[piv] / gF[piv];
  const double F0 = F(x0);
  auto on_fiber = [&](double t) {
    Eigen::Vector4d x = x0 + t * v;
    for (int it = 0; it < 8; ++it) x -= (F(x) - F0) / gF.squaredNorm() * gF;
    return G(x) - s * F(x);
  };
  auto d3 = [&](double h) {
    return (on_fiber(2 * h) - 2 * on_fiber(h) + 2 * on_fiber(-h) - on_fiber(-2 * h)) / (2 * h * h * h);
  };
  return (4.0 * d3(5e-3) - d3(1e-2)) / 3.0;
}

}  // namespace

TEST(Classifier, FiberCubicMatchesFiniteDifferences) {
  int checked = 0;
  for (const auto& prm : {DeformationParams::make(3, 3, 0.35, 0.0), DeformationParams::make(3, 3, 1.8, 0.0),
                          DeformationParams::make(2, 2, 0.8, 0.3), DeformationParams::make(4, 3, 0.6, 2.2),
                          DeformationParams::make(5, 3, 3.0, 1.0)})
    for (const auto& spec : singular_circles(prm))
      for (double th : phi_zeros(spec)) {
        const auto pt = point_on_circle(spec, th);
        const auto g = gradient_quad(pt);
        const auto b = hessian_bundle(pt, {}, 0.0, -1, g.r_norm() > g.q_norm() ? Normalize::R : Normalize::Q);
        const auto fc = fiber_cubic(pt, b);
        const double fd = fiber_cubic_fd(pt, b.shear.swap_roles, fc.null_dir);
        EXPECT_NEAR(fc.value, fd, 1e-4 * fc.scale) << to_string(b.branch);
        EXPECT_GT(std::abs(fc.value), 1e-3 * fc.scale);
        ++checked;
      }
  EXPECT_GT(checked, 20);
}

TEST(Classifier, FiberCubicAgreesWithNestedDerivative) {
  // both tests see the same cusps, and neither sees one at a tangential zero of φ
  for (const auto& prm : {DeformationParams::make(2, 2, 0.8, 0.3), DeformationParams::make(4, 3, 0.6, 2.2),
                          DeformationParams::make(5, 2, 2.0, 0.7)})
    for (const auto& spec : singular_circles(prm))
      for (double th : phi_zeros(spec)) {
        const auto pt = point_on_circle(spec, th);
        if (dispatch_branch(pt) != Branch::K1Nonzero) continue;
        const auto fc = fiber_cubic(pt, hessian_bundle(pt));
        EXPECT_GT(std::abs(fc.value), 1e-3 * fc.scale);
        EXPECT_GT(std::abs(third_derivative(pt)), 1e-6);
      }
  const auto crit = DeformationParams::make(3, 2, 1.5 * std::sqrt(3.0), 0.0);
  const auto census = census_on_circle(crit, CensusParams::make(crit), 0);
  ASSERT_FALSE(census.multiple_thetas.empty());
  for (double th : census.multiple_thetas) {
    const auto pt = point_on_circle(singular_circles(crit)[0], th);
    const auto fc = fiber_cubic(pt, hessian_bundle(pt, {}, 0.0, best_pivot(hessian_bundle(pt).gradient)));
    EXPECT_LT(std::abs(fc.value), 1e-6 * fc.scale);
  }
}

TEST(Classifier, CuspsWhereCosTheta2Vanishes) {
  const auto prm = DeformationParams::make(3, 3, 0.35, 0.0);
  int swapped = 0;
  for (const auto& spec : singular_circles(prm))
    for (double th : phi_zeros(spec)) {
      const auto pt = point_on_circle(spec, th);
      const auto c = classify(pt);
      EXPECT_EQ(c.kind, Kind::Cusp) << th;
      if (c.diagnostics.branch == Branch::CosTheta2Zero) ++swapped;
    }
  EXPECT_EQ(swapped, 4);
}

TEST(Classifier, DeterminantScaleBetweenNormalizations) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 300; ++i) {
    const auto pt = generic_point(rng);
    const auto b = hessian_bundle(pt);
    for (auto norm : {Normalize::Q, Normalize::R})
      for (int piv = 0; piv < 4; ++piv) {
        const auto w = hessian_bundle(pt, {}, 0.0, piv, norm);
        const double want = w.det_assembled;
        EXPECT_NEAR(b.det_closed * det_scale(b, w), want, 1e-7 * std::abs(want)) << piv;
      }
  }
}
