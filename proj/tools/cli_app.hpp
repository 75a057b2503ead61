#pragma once
// Command-line front end. Kept in a header so tests can drive it in-process.
//
// Exit codes: 0 success / excellent, 1 verification failed, 2 degenerate map
// or not excellent, 64 usage error, 74 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "brieskorn/acceptance.hpp"
#include "brieskorn/brieskorn.hpp"

namespace brieskorn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitDegenerate = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitIo = 74;
inline constexpr int kFormatVersion = 1;

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MapOptions {
  int p = 0, q = 0;
  double mu_abs = 1.0;
  std::optional<double> mu_arg;
  std::optional<double> mu_arg_deg;

  DeformationParams params() const {
    try {
      return DeformationParams::make(p, q, mu_abs, arg());
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  double arg() const {
    if (mu_arg_deg) return *mu_arg_deg * kPi / 180.0;
    return mu_arg.value_or(0.0);
  }
};

inline void add_map_options(CLI::App* sub, MapOptions& m, bool with_abs = true) {
  sub->add_option("--p", m.p, "exponent of u (>= 2)")->required();
  sub->add_option("--q", m.q, "exponent of v (>= 2)")->required();
  if (with_abs) sub->add_option("--mu-abs", m.mu_abs, "|mu| (> 0)")->required();
  auto* rad = sub->add_option("--mu-arg", m.mu_arg, "arg mu in radians");
  auto* deg = sub->add_option("--mu-arg-deg", m.mu_arg_deg, "arg mu in degrees");
  rad->excludes(deg);
}

inline std::string g17(double x) { return format_g17(x); }

inline Tolerances tolerances_from_env() {
  const char* s = std::getenv("BRIESKORN_TOL_SCALE");
  if (!s || !*s) return {};
  char* end = nullptr;
  const double f = std::strtod(s, &end);
  if (end == s || *end != '\0' || !(f > 0.0) || !std::isfinite(f))
    throw UsageError(std::string("BRIESKORN_TOL_SCALE must be a positive number, got '") + s + "'");
  return Tolerances::scaled(f);
}

inline json params_json(const DeformationParams& prm) {
  return {{"p", prm.p}, {"q", prm.q}, {"mu_abs", prm.mu_abs}, {"mu_arg", prm.mu_arg}};
}

inline json point_json(const ClassifiedPoint& cp) {
  const auto& d = cp.cls.diagnostics;
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  return {{"k", cp.k},
          {"theta", cp.theta},
          {"kind", std::string(to_string(cp.cls.kind))},
          {"branch", std::string(to_string(d.branch))},
          {"phi", d.phi},
          {"detH", num(d.detH)},
          {"third", num(d.third)},
          {"signature", {d.hess_signature.pos, d.hess_signature.neg, d.hess_signature.zero}},
          {"rankM", d.rankM}};
}

inline std::string point_line(const ClassifiedPoint& cp) {
  const auto& d = cp.cls.diagnostics;
  char buf[256];
  std::snprintf(buf, sizeof buf, "  %-3d %-20.15f %-15s phi=% .3e detH=% .3e third=% .3e sig=(%d,%d,%d) rankM=%d %s\n",
                cp.k, cp.theta, std::string(to_string(cp.cls.kind)).c_str(), d.phi, d.detH, d.third,
                d.hess_signature.pos, d.hess_signature.neg, d.hess_signature.zero, d.rankM,
                std::string(to_string(d.branch)).c_str());
  return buf;
}

inline int cmd_classify(const MapOptions& m, int samples, bool as_json, std::ostream& out) {
  const auto prm = m.params();
  if (samples < kMinExcellenceSamples)
    throw UsageError("--samples must be at least " + std::to_string(kMinExcellenceSamples));
  const auto rep = is_excellent(prm, samples, tolerances_from_env());

  std::vector<ClassifiedPoint> listed;  // φ-zero candidates, then off-locus violations
  int cusps = 0;
  for (const auto& sc : rep.scans) {
    cusps += static_cast<int>(sc.cusp_thetas().size());
    for (const auto& c : sc.candidates) listed.push_back(c);
    for (const auto& c : sc.samples)
      if (c.cls.kind == Kind::Degenerate || c.cls.kind == Kind::DefiniteFold) listed.push_back(c);
  }
  const auto& n = rep.counts;
  if (as_json) {
    json j = {{"format_version", kFormatVersion},
              {"command", "classify"},
              {"params", params_json(prm)},
              {"samples_per_circle", samples},
              {"excellent", rep.excellent},
              {"equal_exponent_boundary", rep.equal_exponent_boundary},
              {"cusps", cusps},
              {"counts",
               {{"IndefiniteFold", n.indefinite_fold},
                {"DefiniteFold", n.definite_fold},
                {"Cusp", n.cusp},
                {"Degenerate", n.degenerate}}},
              {"points", json::array()}};
    for (const auto& c : listed) j["points"].push_back(point_json(c));
    out << j.dump(2) << '\n';
  } else {
    out << "map: p=" << prm.p << " q=" << prm.q << " |mu|=" << g17(prm.mu_abs)
        << " arg mu=" << g17(prm.mu_arg) << "\n";
    out << "circles: " << rep.scans.size() << ", samples per circle: " << samples << "\n";
    out << "cusp candidates and violations:\n";
    out << "  k   theta                kind\n";
    for (const auto& c : listed) out << point_line(c);
    out << "summary: " << cusps << " Cusp, " << n.indefinite_fold << " IndefiniteFold, "
        << n.definite_fold << " DefiniteFold, " << n.degenerate << " Degenerate\n";
    if (rep.equal_exponent_boundary) out << "note: |mu| = 1 with sin c'_k = 0 (equal-exponent boundary)\n";
    out << (rep.excellent ? "excellent\n" : "not excellent\n");
  }
  return rep.excellent ? kExitOk : kExitDegenerate;
}

inline int cmd_count(const MapOptions& m, bool as_json, std::ostream& out) {
  const auto prm = m.params();
  const auto c = count_cusps(prm);
  if (as_json) {
    json j = {{"format_version", kFormatVersion},
              {"command", "count"},
              {"params", params_json(prm)},
              {"total", c.total},
              {"bounds", {c.bound_low, c.bound_high}},
              {"excellent", c.excellent},
              {"circles", json::array()}};
    for (const auto& pc : c.per_circle)
      j["circles"].push_back({{"k", pc.k},
                              {"cusp_thetas", pc.cusp_thetas},
                              {"multiple_thetas", pc.multiple_thetas},
                              {"identically_zero", pc.identically_zero}});
    out << j.dump(2) << '\n';
  } else {
    for (const auto& pc : c.per_circle) {
      out << "circle " << pc.k << ": " << pc.count() << " cusps";
      if (pc.identically_zero) out << " (Phi vanishes identically)";
      out << "\n";
      for (double th : pc.cusp_thetas) out << "  theta " << g17(th) << "\n";
      for (double th : pc.multiple_thetas) out << "  multiple zero at theta " << g17(th) << "\n";
    }
    out << "total: " << c.total << "\n";
    out << "bounds: [" << c.bound_low << ", " << c.bound_high << "]\n";
    out << (c.excellent ? "excellent\n" : "not excellent\n");
  }
  return c.excellent ? kExitOk : kExitDegenerate;
}

inline int cmd_sweep(const MapOptions& m, double lo, double hi, int steps, bool as_json,
                     std::ostream& out, std::ostream& err) {
  if (m.p < 2 || m.q < 2) throw UsageError("exponents must satisfy p >= 2 and q >= 2");
  SweepResult s;
  try {
    s = sweep_transitions(m.p, m.q, m.arg(), lo, hi, steps);
  } catch (const MonotonicityViolation& e) {
    err << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (as_json) {
    json j = {{"format_version", kFormatVersion},
              {"command", "sweep"},
              {"p", m.p},
              {"q", m.q},
              {"mu_arg", wrap_angle(m.arg())},
              {"range", {lo, hi}},
              {"steps", steps},
              {"monotonicity_checked", s.monotonicity_checked},
              {"transitions", json::array()}};
    for (const auto& t : s.transitions)
      j["transitions"].push_back(
          {{"mu_star", t.mu_star}, {"count_before", t.count_before}, {"count_after", t.count_after}});
    out << j.dump(2) << '\n';
  } else {
    out << "|mu|*                 before  after\n";
    for (const auto& t : s.transitions) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%-20.12f  %-6d  %d\n", t.mu_star, t.count_before, t.count_after);
      out << buf;
    }
    if (s.transitions.empty()) out << "(no transitions)\n";
    if (!s.monotonicity_checked) out << "note: monotonicity not asserted for p <= q\n";
  }
  return kExitOk;
}

struct RenderOptions {
  RenderSpec spec;
  std::string out_svg, out_csv;
};

inline int cmd_render(const MapOptions& m, const RenderOptions& r, bool as_json, std::ostream& out) {
  const auto prm = m.params();
  try {
    r.spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (r.out_svg.empty() && r.out_csv.empty()) throw UsageError("render needs --out-svg and/or --out-csv");
  const auto curves = critical_curves(prm, r.spec.samples);
  if (!r.out_csv.empty()) write_file_atomic(r.out_csv, curves_csv(curves));
  if (!r.out_svg.empty()) write_file_atomic(r.out_svg, curves_svg(curves, r.spec));
  int marks = 0;
  for (const auto& c : curves)
    for (const auto& p : c.points) marks += p.is_cusp ? 1 : 0;
  if (as_json) {
    out << json{{"format_version", kFormatVersion}, {"command", "render"}, {"params", params_json(prm)},
                {"samples", r.spec.samples}, {"circles", curves.size()}, {"cusp_marks", marks},
                {"svg", r.out_svg}, {"csv", r.out_csv}}
               .dump(2)
        << '\n';
  } else {
    out << "rendered " << curves.size() << " curve(s), " << marks << " cusp marks\n";
    if (!r.out_svg.empty()) out << "svg: " << r.out_svg << "\n";
    if (!r.out_csv.empty()) out << "csv: " << r.out_csv << "\n";
  }
  return kExitOk;
}

struct ReduceOptions {
  int p = 0, q = 0;
  double a_abs = 1.0, a_arg = 0.0, b_abs = 1.0, b_arg = 0.0;
  int branch_u = 0, branch_v = 0;
};

/// max |f(c1 u, c2 v) - b conj(c2) P(u, v)| over a fixed set of points.
inline double substitution_residual(const ReduceOptions& o, const CoefficientReduction& red) {
  const auto a = std::polar(o.a_abs, o.a_arg), b = std::polar(o.b_abs, o.b_arg);
  const auto mu = red.params.mu();
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto u = std::polar(0.3 + 0.02 * i, 0.7 * i), v = std::polar(1.1 - 0.015 * i, -1.3 * i);
    const auto z = red.c1 * u, w = red.c2 * v;
    const auto f = std::pow(z, o.p) + std::pow(w, o.q) + a * std::conj(z) + b * std::conj(w);
    const auto P = mu * (std::pow(u, o.p) + std::conj(u)) + std::pow(v, o.q) + std::conj(v);
    worst = std::max(worst, std::abs(f - red.target_scale * P) / (1.0 + std::abs(f)));
  }
  return worst;
}

inline int cmd_reduce(const ReduceOptions& o, bool as_json, std::ostream& out) {
  if (o.p < 2 || o.q < 2) throw UsageError("exponents must satisfy p >= 2 and q >= 2");
  if (o.a_abs < 0.0 || o.b_abs < 0.0) throw UsageError("coefficient moduli must be >= 0");
  const auto a = std::polar(o.a_abs, o.a_arg), b = std::polar(o.b_abs, o.b_arg);
  if (o.a_abs == 0.0 || o.b_abs == 0.0) {
    if (o.a_abs == 0.0 && o.b_abs == 0.0) throw UsageError("at most one of a, b may be zero");
    const auto d = degenerate_census(o.p, o.q, a, b);
    if (as_json) {
      out << json{{"format_version", kFormatVersion}, {"command", "reduce"}, {"degenerate_family", true},
                  {"swapped", d.swapped}, {"excellent", d.excellent}, {"total", d.total},
                  {"cusp_thetas", d.cusp_thetas}, {"verdict", d.verdict}}
                 .dump(2)
          << '\n';
    } else {
      out << "notice: a linear coefficient is zero; no reduction to mu, using the one-term family\n";
      out << "verdict: " << d.verdict << "\n";
      if (d.excellent) {
        out << "cusps: " << d.total << "\n";
        for (double th : d.cusp_thetas) out << "  theta " << g17(th) << "\n";
      }
    }
    return d.excellent ? kExitOk : kExitDegenerate;
  }
  const auto red = mu_from_coefficients(a, b, o.p, o.q, o.branch_u, o.branch_v);
  const double resid = substitution_residual(o, red);
  if (as_json) {
    out << json{{"format_version", kFormatVersion},
                {"command", "reduce"},
                {"degenerate_family", false},
                {"mu_abs", red.params.mu_abs},
                {"mu_arg", red.params.mu_arg},
                {"c1", {std::abs(red.c1), std::arg(red.c1)}},
                {"c2", {std::abs(red.c2), std::arg(red.c2)}},
                {"scale", {std::abs(red.target_scale), std::arg(red.target_scale)}},
                {"substitution_residual", resid}}
               .dump(2)
        << '\n';
  } else {
    out << "mu = " << g17(red.params.mu_abs) << " * exp(i " << g17(red.params.mu_arg) << ")\n";
    out << "z = c1 u, w = c2 v with c1 = " << g17(std::abs(red.c1)) << " * exp(i "
        << g17(std::arg(red.c1)) << "), c2 = " << g17(std::abs(red.c2)) << " * exp(i "
        << g17(std::arg(red.c2)) << ")\n";
    out << "f(c1 u, c2 v) = " << g17(std::abs(red.target_scale)) << " * exp(i "
        << g17(std::arg(red.target_scale)) << ") * P(u, v; mu)\n";
    out << "path: f_t = z^" << o.p << " + w^" << o.q << " + a t^" << (o.p - 1) * o.q
        << " conj(z) + b t^" << o.p * (o.q - 1) << " conj(w), t in (0, 1], with c1(t) = c1 t^" << o.q
        << ", c2(t) = c2 t^" << o.p << "\n";
    out << "substitution residual: " << g17(resid) << "\n";
  }
  return kExitOk;
}

inline int cmd_verify(const std::string& suite, bool as_json, std::ostream& out) {
  if (!acceptance::is_suite_name(suite)) throw UsageError("unknown suite: " + suite);
  const auto results = acceptance::run(suite);
  bool ok = true;
  json arr = json::array();
  for (const auto& r : results) {
    ok = ok && r.passed;
    if (as_json)
      arr.push_back({{"suite", r.name}, {"criterion", r.criterion}, {"passed", r.passed},
                     {"detail", r.detail}, {"seconds", r.seconds}});
    else
      out << acceptance::format_line(r) << "\n";
  }
  if (as_json)
    out << json{{"format_version", kFormatVersion}, {"command", "verify"}, {"passed", ok}, {"suites", arr}}
               .dump(2)
        << '\n';
  return ok ? kExitOk : kExitFailed;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fold and cusp analysis of P(u, v; mu) = mu (u^p + conj u) + v^q + conj v"};
  app.name("brieskorn");
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable output");

  MapOptions map;
  int samples = kMinExcellenceSamples;
  auto* classify = app.add_subcommand("classify", "classify every sampled singular point");
  add_map_options(classify, map);
  classify->add_option("--samples", samples, "samples per singular circle (>= 8192)");
  classify->add_flag("--json", as_json);

  auto* count = app.add_subcommand("count", "count cusps through the zeros of Phi");
  add_map_options(count, map);
  count->add_flag("--json", as_json);

  double lo = 0.1, hi = 10.0;
  int steps = 200;
  auto* sweep = app.add_subcommand("sweep", "locate cusp-count transitions in |mu|");
  add_map_options(sweep, map, false);
  sweep->add_option("--lo", lo, "smallest |mu|");
  sweep->add_option("--hi", hi, "largest |mu|");
  sweep->add_option("--steps", steps, "log-spaced grid points");
  sweep->add_flag("--json", as_json);

  RenderOptions ren;
  auto* render = app.add_subcommand("render", "write critical value curves as SVG and/or CSV");
  add_map_options(render, map);
  render->add_option("--samples", ren.spec.samples, "samples per circle (power of two >= 256)");
  render->add_option("--width", ren.spec.width, "SVG width in pixels");
  render->add_option("--height", ren.spec.height, "SVG height in pixels");
  render->add_option("--out-svg", ren.out_svg, "SVG output path");
  render->add_option("--out-csv", ren.out_csv, "CSV output path");
  render->add_flag("--json", as_json);

  ReduceOptions red;
  auto* reduce = app.add_subcommand("reduce", "reduce z^p + w^q + a conj z + b conj w to P(u, v; mu)");
  reduce->add_option("--p", red.p)->required();
  reduce->add_option("--q", red.q)->required();
  reduce->add_option("--a-abs", red.a_abs);
  reduce->add_option("--a-arg", red.a_arg);
  reduce->add_option("--b-abs", red.b_abs);
  reduce->add_option("--b-arg", red.b_arg);
  reduce->add_option("--branch-u", red.branch_u, "root of c^p = a conj(c) to use (0 = principal)");
  reduce->add_option("--branch-v", red.branch_v, "root of c^q = b conj(c) to use (0 = principal)");
  reduce->add_flag("--json", as_json);

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run an acceptance suite");
  verify->add_option("--suite", suite, "suite name or 'all'")->required();
  verify->add_flag("--json", as_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*classify) return cmd_classify(map, samples, as_json, out);
    if (*count) return cmd_count(map, as_json, out);
    if (*sweep) return cmd_sweep(map, lo, hi, steps, as_json, out, err);
    if (*render) return cmd_render(map, ren, as_json, out);
    if (*reduce) return cmd_reduce(red, as_json, out);
    if (*verify) return cmd_verify(suite, as_json, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace brieskorn::cli
