#pragma once
// End-to-end verification suites. Shared by the acceptance test binary and
// the `verify` subcommand; every suite is deterministic (fixed seeds).

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "brieskorn/cusp_census.hpp"
#include "brieskorn/levine_classifier.hpp"
#include "brieskorn/polar_mixed.hpp"
#include "brieskorn/render.hpp"
#include "brieskorn/singular_locus.hpp"

namespace brieskorn::acceptance {

struct SuiteResult {
  std::string name;
  int criterion = 0;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

/// Collects failures; keeps the first few messages.
struct Checker {
  int checks = 0;
  int failures = 0;
  std::string first;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    ++failures;
    if (failures <= 3) first += (first.empty() ? "" : "; ") + what;
  }
  bool ok() const { return failures == 0; }
  std::string summary(const std::string& good) const {
    if (ok()) return good + fmt(" (%d checks)", checks);
    return fmt("%d/%d checks failed: ", failures, checks) + first;
  }
};

/// Every angle of each list lies within tol (circularly) of one in the other.
inline bool same_angles(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  auto covered = [tol](const std::vector<double>& x, const std::vector<double>& y) {
    for (double t : x) {
      bool hit = false;
      for (double u : y) hit = hit || circular_distance(t, u) < tol;
      if (!hit) return false;
    }
    return true;
  };
  return covered(a, b) && covered(b, a);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// |μ| log-uniform in [0.2, 5], arg μ uniform; rejects maps whose census is not
/// excellent or changes within a relative 1e-3 of |μ|.
inline DeformationParams random_generic(int p, int q, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lg(std::log(0.2), std::log(5.0));
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  for (;;) {
    const double m = std::exp(lg(rng));
    const double a = ang(rng);
    const auto prm = DeformationParams::make(p, q, m, a);
    const auto c = count_cusps(prm);
    if (!c.excellent) continue;
    const auto lo = count_cusps(DeformationParams::make(p, q, m * (1 - 1e-3), a));
    const auto hi = count_cusps(DeformationParams::make(p, q, m * (1 + 1e-3), a));
    if (lo.total == c.total && hi.total == c.total && lo.excellent && hi.excellent) return prm;
  }
}

/// The fixed grid of maps used by the property suites; keeps the excellent ones.
inline std::vector<DeformationParams> property_grid() {
  std::vector<DeformationParams> out;
  for (int p : {2, 3, 4})
    for (int q : {2, 3})
      for (double m : {0.35, 0.9, 1.8, 4.5})
        for (double a : {0.0, 0.7, 2.3}) {
          const auto prm = DeformationParams::make(p, q, m, a);
          if (count_cusps(prm).excellent) out.push_back(prm);
        }
  return out;
}

/// Point of circle k whose lifted arg u is congruent to `arg_u` mod 2π.
inline SingularPoint point_with_arg_u(const SingularCircleSpec& spec, double arg_u, int wind) {
  const double rate = spec.rate_u();
  const double period = kTwoPi / rate;
  const double th = (arg_u - spec.phase) / rate + period * wind;
  return point_on_circle(spec, th);
}

/// A random singular point intended for `branch`; nullopt if the draw lands elsewhere.
inline std::optional<SingularPoint> random_branch_point(Branch branch, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick_p(2, 4), pick_q(2, 3), pick_i(0, 64);
  std::uniform_real_distribution<double> lg(std::log(0.2), std::log(5.0)), ang(0.0, kTwoPi);
  const int p = pick_p(rng), q = pick_q(rng);
  const auto prm = DeformationParams::make(p, q, std::exp(lg(rng)), ang(rng));
  const auto specs = singular_circles(prm);
  const auto& spec = specs[static_cast<std::size_t>(pick_i(rng)) % specs.size()];
  const int i = pick_i(rng), wind = pick_i(rng);
  SingularPoint pt;
  switch (branch) {
    case Branch::K1Nonzero: pt = point_on_circle(spec, ang(rng)); break;
    case Branch::K1NonzeroDegenerateTheta:  // sin Θ1 = 0
      pt = point_with_arg_u(spec, kTwoPi * i / (p + 1), wind);
      break;
    case Branch::K1ZeroCosTheta2Nonzero:  // cos Θ1 = 0
      pt = point_with_arg_u(spec, (kPi + kTwoPi * i) / (p + 1), wind);
      break;
    case Branch::CosTheta2Zero:
      pt = point_with_arg_u(spec, (kPi + kTwoPi * i - 2.0 * prm.mu_arg) / (p - 1), wind);
      break;
  }
  if (dispatch_branch(pt) != branch) return std::nullopt;
  return pt;
}

inline SuiteResult timed(std::string name, int criterion, const std::function<void(SuiteResult&)>& body) {
  SuiteResult r;
  r.name = std::move(name);
  r.criterion = criterion;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace detail

/// p = q = 2, μ = 0.8 e^{0.3i}: three cusps and the closed-form curve.
inline SuiteResult closed_curve_suite() {
  return detail::timed("closed-curve", 1, [](SuiteResult& r) {
    detail::Checker ck;
    const auto t0 = std::chrono::steady_clock::now();
    const auto prm = DeformationParams::make(2, 2, 0.8, 0.3);
    const auto census = count_cusps(prm);
    ck.expect(census.total == 3 && census.excellent, detail::fmt("cusp count %d", census.total));

    const auto curve = closed_curve(prm, 1024);
    ck.expect(!curve.degenerate, "K = 0");
    const auto rot = std::polar(curve.scale, curve.rotation);
    double worst = 0.0;
    const auto curves = critical_curves(prm, 1024);
    for (const auto& pt : curves.at(0).points) {
      const auto want = rot * h_curve(pt.theta + curve.shift);
      worst = std::max(worst, std::abs(pt.value.complex() - want));
    }
    ck.expect(worst < 1e-10, detail::fmt("rendered curve off by %.3g", worst));

    for (double th : census.per_circle.at(0).cusp_thetas) {
      const double s = wrap_angle(th + curve.shift);
      double best = kPi;
      for (int j = 0; j < 3; ++j) best = std::min(best, circular_distance(s, kTwoPi * j / 3.0));
      ck.expect(best < 1e-9, detail::fmt("cusp at %.12f maps %.3g away from h's cusps", th, best));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ck.expect(secs < 1.0, detail::fmt("took %.2f s", secs));
    r.passed = ck.ok();
    r.detail = ck.summary(detail::fmt("3 cusps, curve residual %.2g", worst));
  });
}

/// p = q ∈ {2, 3, 4}: p² - 1 cusps, (p² - 1)/r on each circle.
inline SuiteResult cusp_count_exact() {
  return detail::timed("cusp-count-exact", 2, [](SuiteResult& r) {
    detail::Checker ck;
    std::mt19937_64 rng(0x5eed0002);
    for (int p : {2, 3, 4})
      for (int i = 0; i < 5; ++i) {
        const auto prm = detail::random_generic(p, p, rng);
        const auto c = count_cusps(prm);
        const int want = p * p - 1, r_ = circle_count(p, p);
        ck.expect(c.total == want, detail::fmt("p=%d mu=%.6f@%.6f: %d cusps", p, prm.mu_abs, prm.mu_arg, c.total));
        ck.expect(static_cast<int>(c.per_circle.size()) == r_, "circle count");
        for (const auto& pc : c.per_circle)
          ck.expect(pc.count() == want / r_, detail::fmt("p=%d circle %d has %d", p, pc.k, pc.count()));
      }
    r.passed = ck.ok();
    r.detail = ck.summary("totals 3, 8, 15");
  });
}

/// Cusp count bounds and the |μ| -> 0, ∞ limit counts.
inline SuiteResult cusp_count_bounds() {
  return detail::timed("cusp-count-bounds", 3, [](SuiteResult& r) {
    detail::Checker ck;
    std::mt19937_64 rng(0x5eed0003);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi);
    const std::pair<int, int> pairs[] = {{3, 2}, {4, 2}, {4, 3}, {5, 3}};
    for (auto [p, q] : pairs) {
      const int lo = (p + 1) * (q - 1), hi = (p - 1) * (q + 1);
      for (int i = 0; i < 10; ++i) {
        const auto prm = detail::random_generic(p, q, rng);
        const int t = count_cusps(prm).total;
        ck.expect(t >= lo && t <= hi, detail::fmt("(%d,%d) mu=%.6f@%.6f: %d outside [%d,%d]", p, q,
                                                  prm.mu_abs, prm.mu_arg, t, lo, hi));
      }
      const double a = ang(rng);
      const int small = count_cusps(DeformationParams::make(p, q, 1e-4, a)).total;
      const int large = count_cusps(DeformationParams::make(p, q, 1e4, a)).total;
      ck.expect(small == hi, detail::fmt("(%d,%d) small |mu| gives %d", p, q, small));
      ck.expect(large == lo, detail::fmt("(%d,%d) large |mu| gives %d", p, q, large));
    }
    r.passed = ck.ok();
    r.detail = ck.summary("all totals within bounds, limits attained");
  });
}

/// p = 3, q = 2, arg μ = 0: one transition at 3√3/2, 6 -> 4.
inline SuiteResult transition_32() {
  return detail::timed("transition-32", 4, [](SuiteResult& r) {
    detail::Checker ck;
    const auto s = sweep_transitions(3, 2, 0.0, 0.1, 10.0, 200);
    const double want = 3.0 * std::sqrt(3.0) / 2.0;
    ck.expect(s.transitions.size() == 1, detail::fmt("%zu transitions", s.transitions.size()));
    double got = 0.0;
    if (!s.transitions.empty()) {
      const auto& t = s.transitions.front();
      got = t.mu_star;
      ck.expect(std::abs(t.mu_star - want) < 1e-6, detail::fmt("|mu|* = %.10f", t.mu_star));
      ck.expect(t.count_before == 6 && t.count_after == 4,
                detail::fmt("counts %d -> %d", t.count_before, t.count_after));
    }
    r.passed = ck.ok();
    r.detail = ck.summary(detail::fmt("|mu|* = %.10f (3sqrt3/2 = %.10f), 6 -> 4", got, want));
  });
}

/// p = 4, q = 2, arg μ = 0: last transition near 2.615, counts from 9 to 5.
inline SuiteResult transition_42() {
  return detail::timed("transition-42", 5, [](SuiteResult& r) {
    detail::Checker ck;
    const auto s = sweep_transitions(4, 2, 0.0, 0.1, 10.0, 200);
    ck.expect(!s.transitions.empty(), "no transitions");
    double last = 0.0;
    for (const auto& t : s.transitions) last = std::max(last, t.mu_star);
    ck.expect(std::abs(last - 2.615) < 1e-2, detail::fmt("largest transition at %.6f", last));
    ck.expect(s.grid.front().count == 9, detail::fmt("count %d at |mu| = 0.1", s.grid.front().count));
    ck.expect(s.grid.back().count == 5, detail::fmt("count %d at |mu| = 10", s.grid.back().count));
    r.passed = ck.ok();
    r.detail = ck.summary(detail::fmt("largest transition %.8f, 9 -> 5", last));
  });
}

/// No definite folds anywhere on the grid of excellent maps.
inline SuiteResult indefinite() {
  return detail::timed("indefinite", 6, [](SuiteResult& r) {
    detail::Checker ck;
    int maps = 0;
    long folds = 0;
    for (const auto& prm : detail::property_grid()) {
      const auto rep = is_excellent(prm);
      ck.expect(rep.excellent, detail::fmt("(%d,%d) mu=%.3f@%.3f: census excellent, classifier not",
                                           prm.p, prm.q, prm.mu_abs, prm.mu_arg));
      if (!rep.excellent) continue;
      ++maps;
      ck.expect(rep.counts.definite_fold == 0,
                detail::fmt("(%d,%d) mu=%.3f@%.3f: %d definite folds", prm.p, prm.q, prm.mu_abs,
                            prm.mu_arg, rep.counts.definite_fold));
      for (const auto& sc : rep.scans)
        for (const auto& cp : sc.samples) {
          if (cp.cls.kind != Kind::IndefiniteFold && cp.cls.kind != Kind::DefiniteFold) continue;
          ++folds;
          if (!cp.cls.diagnostics.hess_signature.mixed())
            ck.expect(false, detail::fmt("fold with unmixed signature at theta %.6f", cp.theta));
        }
    }
    ck.expect(maps >= 40, detail::fmt("only %d excellent maps in the grid", maps));
    r.passed = ck.ok();
    r.detail = ck.summary(detail::fmt("%d maps, %ld folds, all indefinite", maps, folds));
  });
}

/// Closed forms against assembled matrices, analytic partials against finite differences.
inline SuiteResult gradients() {
  return detail::timed("gradients", 7, [](SuiteResult& r) {
    detail::Checker ck;
    std::mt19937_64 rng(0x5eed0007);
    double worst_det = 0.0, worst_closed = 0.0;
    for (Branch b : {Branch::K1Nonzero, Branch::K1NonzeroDegenerateTheta,
                     Branch::K1ZeroCosTheta2Nonzero, Branch::CosTheta2Zero}) {
      int got = 0;
      for (int tries = 0; got < 100 && tries < 5000; ++tries) {
        const auto pt = detail::random_branch_point(b, rng);
        if (!pt) continue;
        const auto bundle = hessian_bundle(*pt);
        if (!std::isfinite(bundle.det_closed)) continue;  // cos Θ1 = cos Θ2 = 0 together
        ++got;
        const double e = detail::rel_err(bundle.det_closed, bundle.det_assembled);
        worst_det = std::max(worst_det, e);
        ck.expect(e < 1e-8, detail::fmt("%s det rel err %.3g", std::string(to_string(b)).c_str(), e));
      }
      ck.expect(got == 100, detail::fmt("%s: only %d points", std::string(to_string(b)).c_str(), got));
    }

    // gradient quad and Hessian letters against analytic partials
    for (int i = 0; i < 100; ++i) {
      auto pt = detail::random_branch_point(Branch::K1Nonzero, rng);
      if (!pt) {
        --i;
        continue;
      }
      const auto& prm = pt->params();
      const auto g = gradient_quad(*pt);
      for (int c = 0; c < 4; ++c) {
        const auto d = partial(prm, pt->z, Derivative::along(c));
        const double e = std::max(std::abs(d.x - g.q[c]), std::abs(d.y - g.r[c]));
        worst_closed = std::max(worst_closed, e);
        ck.expect(e < 1e-10, detail::fmt("gradient entry %d off by %.3g", c, e));
      }
      const double s = shear_constant(*pt).s, k1 = g.q[0];
      auto rhat = [&](int a, int b) {
        const auto d = partial(prm, pt->z, Derivative::along(a, b));
        return d.y - s * d.x;
      };
      const auto h = hessian_entries(*pt);
      const double pairs[6][2] = {{h.a * k1 * k1, rhat(0, 0)}, {h.b * k1, rhat(0, 1)}, {h.c, rhat(1, 1)},
                                  {h.d, rhat(2, 2)},         {h.e, rhat(2, 3)},     {h.f, rhat(3, 3)}};
      for (const auto& pr : pairs) {
        const double e = std::abs(pr[0] - pr[1]) / (1.0 + std::abs(pr[1]));
        worst_closed = std::max(worst_closed, e);
        ck.expect(e < 1e-10, detail::fmt("Hessian letter off by %.3g", e));
      }
    }

    // analytic against finite differences at arbitrary points
    std::uniform_real_distribution<double> rad(0.3, 1.2), ang(0.0, kTwoPi);
    std::uniform_int_distribution<int> pq(2, 5), idx(0, 3);
    double worst_fd[4] = {0, 0, 0, 0};
    for (int i = 0; i < 200; ++i) {
      const auto prm = DeformationParams::make(pq(rng), pq(rng), rad(rng) * 3, ang(rng));
      const PolarPoint z{rad(rng), ang(rng), rad(rng), ang(rng)};
      for (int order = 1; order <= 3; ++order) {
        Derivative d;
        for (int k = 0; k < order; ++k) ++d[idx(rng)];
        const auto ex = partial(prm, z, d);
        const auto fd = fd_partial(prm, z, d, fd_default_step(order));
        const double e = std::max(std::abs(ex.x - fd.x) / (1 + std::abs(ex.x)),
                                  std::abs(ex.y - fd.y) / (1 + std::abs(ex.y)));
        worst_fd[order] = std::max(worst_fd[order], e);
        ck.expect(e < fd_tolerance(order), detail::fmt("order %d FD mismatch %.3g", order, e));
      }
    }
    r.passed = ck.ok();
    r.detail = ck.summary(detail::fmt("det %.2g, closed forms %.2g, FD %.2g/%.2g/%.2g", worst_det,
                                      worst_closed, worst_fd[1], worst_fd[2], worst_fd[3]));
  });
}

/// Classifier cusps coincide with the zeros of Φ on every excellent grid map.
inline SuiteResult route_equivalence() {
  return detail::timed("route-equivalence", 8, [](SuiteResult& r) {
    detail::Checker ck;
    int maps = 0, cusps = 0;
    for (const auto& prm : detail::property_grid()) {
      const auto rep = is_excellent(prm);
      ck.expect(rep.excellent, detail::fmt("(%d,%d) mu=%.3f@%.3f: census excellent, classifier not",
                                           prm.p, prm.q, prm.mu_abs, prm.mu_arg));
      if (!rep.excellent) continue;
      ++maps;
      const auto census = count_cusps(prm);
      for (const auto& sc : rep.scans) {
        const auto lev = sc.cusp_thetas();
        const auto& phi0 = census.per_circle.at(static_cast<std::size_t>(sc.k)).cusp_thetas;
        const bool same = lev.size() == phi0.size() && detail::same_angles(lev, phi0, 1e-8);
        cusps += static_cast<int>(phi0.size());
        ck.expect(same, detail::fmt("(%d,%d) mu=%.3f@%.3f circle %d: %zu vs %zu cusps", prm.p, prm.q,
                                    prm.mu_abs, prm.mu_arg, sc.k, lev.size(), phi0.size()));
      }
    }
    ck.expect(maps >= 40, detail::fmt("only %d excellent maps in the grid", maps));
    r.passed = ck.ok();
    r.detail = ck.summary(detail::fmt("%d maps, %d cusps matched", maps, cusps));
  });
}

/// One linear coefficient zero.
inline SuiteResult ab_zero() {
  return detail::timed("ab-zero", 9, [](SuiteResult& r) {
    detail::Checker ck;
    const auto a = std::polar(1.3, 0.4);
    const auto c32 = degenerate_census(3, 2, a, 0.0);
    ck.expect(c32.excellent && c32.total == 4, detail::fmt("(3,2): %d cusps", c32.total));
    const auto c53 = degenerate_census(5, 3, a, 0.0);
    ck.expect(!c53.excellent, "(5,3) reported excellent");
    r.passed = ck.ok();
    r.detail = ck.summary("(3,2) has 4 cusps, (5,3) not excellent");
  });
}

/// Counts never increase with |μ| for p > q, and change by even steps.
inline SuiteResult monotone() {
  return detail::timed("monotone", 10, [](SuiteResult& r) {
    detail::Checker ck;
    const std::pair<int, int> pairs[] = {{3, 2}, {4, 2}, {5, 2}, {4, 3}};
    int transitions = 0;
    for (auto [p, q] : pairs)
      for (double a : {0.0, 0.4, 1.3, 2.9}) {
        SweepOptions opt;
        opt.check_monotone = false;  // checked here so that every sweep reports
        const auto s = sweep_transitions(p, q, a, 1e-2, 1e2, 200, opt);
        for (std::size_t i = 1; i < s.grid.size(); ++i)
          ck.expect(s.grid[i].count <= s.grid[i - 1].count,
                    detail::fmt("(%d,%d) arg %.2f: count rises %d -> %d at |mu| %.6f", p, q, a,
                                s.grid[i - 1].count, s.grid[i].count, s.grid[i].mu_abs));
        for (const auto& t : s.transitions) {
          ++transitions;
          ck.expect((t.count_before - t.count_after) % 2 == 0,
                    detail::fmt("(%d,%d) odd change %d -> %d", p, q, t.count_before, t.count_after));
          ck.expect(t.count_after <= t.count_before, "transition raises the count");
        }
      }
    r.passed = ck.ok();
    r.detail = ck.summary(detail::fmt("16 sweeps, %d transitions, all even drops", transitions));
  });
}

struct SuiteEntry {
  std::string_view name;
  SuiteResult (*run)();
};

inline const std::vector<SuiteEntry>& suites() {
  static const std::vector<SuiteEntry> all = {
      {"closed-curve", closed_curve_suite},     {"cusp-count-exact", cusp_count_exact},
      {"cusp-count-bounds", cusp_count_bounds}, {"transition-32", transition_32},
      {"transition-42", transition_42},         {"indefinite", indefinite},
      {"gradients", gradients},                 {"route-equivalence", route_equivalence},
      {"ab-zero", ab_zero},                     {"monotone", monotone},
  };
  return all;
}

/// Older names accepted on the command line.
inline std::string_view canonical_suite_name(std::string_view name) {
  if (name == "theorem13") return "closed-curve";
  return name;
}

inline bool is_suite_name(std::string_view name) {
  name = canonical_suite_name(name);
  if (name == "all") return true;
  for (const auto& s : suites())
    if (s.name == name) return true;
  return false;
}

/// Runs one suite by name, or every suite for "all".
inline std::vector<SuiteResult> run(std::string_view name) {
  if (!is_suite_name(name)) throw std::invalid_argument("unknown suite: " + std::string(name));
  name = canonical_suite_name(name);
  std::vector<SuiteResult> out;
  for (const auto& s : suites())
    if (name == "all" || s.name == name) out.push_back(s.run());
  return out;
}

inline std::string format_line(const SuiteResult& r) {
  return detail::fmt("%s [%d] %s: ", r.passed ? "PASS" : "FAIL", r.criterion, r.name.c_str()) +
         r.detail + detail::fmt(" (%.2fs)", r.seconds);
}

}  // namespace brieskorn::acceptance
