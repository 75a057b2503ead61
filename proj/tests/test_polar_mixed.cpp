#include <gtest/gtest.h>

#include <random>

#include "brieskorn/polar_mixed.hpp"
#include "oracles.hpp"

using namespace brieskorn;

namespace {

struct Draw {
  DeformationParams prm;
  PolarPoint z;
};

Draw draw(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ex(2, 6);
  std::uniform_real_distribution<double> ang(-10.0, 10.0), rad(0.1, 1.8), lg(-2.0, 2.0);
  Draw d;
  d.prm = DeformationParams::make(ex(rng), ex(rng), std::exp(lg(rng)), ang(rng));
  d.z = {rad(rng), ang(rng), rad(rng), ang(rng)};
  return d;
}

}  // namespace

TEST(PolarMixed, MatchesComplexEvaluation) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const auto d = draw(rng);
    const oracle::Map f{d.prm.p, d.prm.q, d.prm.mu()};
    const auto want = f(d.z.u(), d.z.v());
    const auto got = eval_qr(d.prm, d.z).complex();
    EXPECT_NEAR(std::abs(got - want), 0.0, 1e-12 * (1.0 + std::abs(want)));
  }
}

TEST(PolarMixed, FirstPartialsMatchChainRule) {
  // ∂/∂r1 = e^{iθ1} ∂_u + e^{-iθ1} ∂_ū, ∂/∂θ1 = i u ∂_u - i ū ∂_ū, same for v
  std::mt19937_64 rng(12);
  for (int i = 0; i < 500; ++i) {
    const auto d = draw(rng);
    const auto u = d.z.u(), v = d.z.v();
    const auto mu = d.prm.mu();
    const oracle::cd I(0, 1);
    const auto fu = mu * double(d.prm.p) * std::pow(u, d.prm.p - 1), fub = mu;
    const auto fv = double(d.prm.q) * std::pow(v, d.prm.q - 1);
    const oracle::cd want[4] = {std::polar(1.0, d.z.th1) * fu + std::polar(1.0, -d.z.th1) * fub,
                                I * u * fu - I * std::conj(u) * fub,
                                std::polar(1.0, d.z.th2) * fv + std::polar(1.0, -d.z.th2),
                                I * v * fv - I * std::conj(v)};
    for (int a = 0; a < 4; ++a) {
      const auto got = partial(d.prm, d.z, Derivative::along(a)).complex();
      EXPECT_NEAR(std::abs(got - want[a]), 0.0, 1e-11 * (1.0 + std::abs(want[a]))) << "axis " << a;
    }
  }
}

TEST(PolarMixed, AllPartialsAgreeWithFiniteDifferences) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 40; ++i) {
    const auto d = draw(rng);
    for (int a = 0; a < 4; ++a) {
      for (int b = a; b < 4; ++b) {
        for (int c = b; c < 4; ++c) {
          for (const auto& der : {Derivative::along(a), Derivative::along(a, b), Derivative::along(a, b, c)}) {
            const auto exact = partial(d.prm, d.z, der);
            const auto fd = fd_partial(d.prm, d.z, der, fd_default_step(der.order()));
            const double err = std::abs(exact.complex() - fd.complex()) / (1.0 + std::abs(exact.complex()));
            EXPECT_LT(err, fd_tolerance(der.order())) << "order " << der.order();
          }
        }
      }
    }
  }
}

TEST(PolarMixed, OrderZeroIsEvaluation) {
  std::mt19937_64 rng(14);
  const auto d = draw(rng);
  const auto a = partial(d.prm, d.z, Derivative{});
  const auto b = eval_qr(d.prm, d.z);
  EXPECT_DOUBLE_EQ(a.x, b.x);
  EXPECT_DOUBLE_EQ(a.y, b.y);
}

TEST(PolarMixed, TermsSumToMap) {
  const auto prm = DeformationParams::make(3, 4, 0.7, 1.1);
  const PolarPoint z{0.8, 0.4, 1.2, -2.0};
  PlanePoint sum;
  for (const auto& t : polar_terms(prm)) sum = sum + t.partial(z, Derivative{});
  const auto want = eval_qr(prm, z);
  EXPECT_NEAR(sum.x, want.x, 1e-14);
  EXPECT_NEAR(sum.y, want.y, 1e-14);
}

TEST(PolarMixed, ArgumentIsCanonicalized) {
  const auto prm = DeformationParams::make(2, 3, 1.0, -0.5);
  EXPECT_NEAR(prm.mu_arg, kTwoPi - 0.5, 1e-15);
  EXPECT_NEAR(DeformationParams::make(2, 3, 1.0, 7.0).mu_arg, 7.0 - kTwoPi, 1e-15);
}

TEST(PolarMixed, RejectsInvalidParameters) {
  EXPECT_THROW(DeformationParams::make(1, 3, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(DeformationParams::make(3, 1, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(DeformationParams::make(3, 3, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(DeformationParams::make(3, 3, -1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(DeformationParams::make(3, 3, NAN, 0.0), std::invalid_argument);
  EXPECT_THROW(DeformationParams::make(3, 3, 1.0, INFINITY), std::invalid_argument);
}

TEST(PolarMixed, RejectsUnsupportedDerivatives) {
  const auto prm = DeformationParams::make(2, 2, 1.0, 0.0);
  const PolarPoint z{1, 0, 1, 0};
  Derivative four;
  four.r1 = 4;
  EXPECT_THROW(partial(prm, z, four), std::invalid_argument);
  Derivative neg;
  neg.th2 = -1;
  EXPECT_THROW(partial(prm, z, neg), std::invalid_argument);
  EXPECT_THROW(fd_partial(prm, z, Derivative::along(0), 0.0), std::invalid_argument);
}
