#pragma once
// Real-root isolation for smooth functions with cheap exact derivatives
// (finite trigonometric sums along a singular circle).
//
// Roots of the top derivative are found by a sign-change scan plus
// bisection; every lower derivative is monotone between consecutive roots of
// the one above it, so each of those pieces holds at most one root. This
// still separates roots that are much closer than the grid spacing, which
// happens near cusp-count transitions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace brieskorn {

struct RootOptions {
  int grid = 512;       // sign-change cells for the top derivative
  int depth = 2;        // highest derivative used to split the interval
  double xtol = 1e-13;  // bisection width
  // Absolute threshold per derivative order: a critical point where the
  // function is this small, and no neighbouring root was found, is reported
  // as a (tangential) root. Empty means never.
  std::function<double(int)> tangent_tol;
};

/// Start of a periodic scan window, in grid cells before 0.
inline constexpr double kScanOffset = 0.3819660112501051;

/// Bisection on [lo, hi] given f(lo) = flo and a sign change over the bracket.
template <class F>
double bisect(F&& f, double lo, double hi, double flo, double xtol) {
  for (int it = 0; it < 200 && hi - lo > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace detail {

template <class G>
std::vector<double> roots_on_pieces(G&& g, const std::vector<double>& nodes, double xtol,
                                    double tangent) {
  std::vector<double> found;
  const std::size_t n = nodes.size();
  std::vector<double> val(n);
  for (std::size_t i = 0; i < n; ++i) val[i] = g(nodes[i]);
  std::vector<char> piece_has_root(n > 0 ? n - 1 : 0, 0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double l = nodes[i], r = nodes[i + 1];
    if (val[i] == 0.0) {
      found.push_back(l);
      piece_has_root[i] = 1;
      if (i > 0) piece_has_root[i - 1] = 1;
      continue;
    }
    if (val[i + 1] == 0.0 || r <= l) continue;
    if ((val[i] < 0.0) != (val[i + 1] < 0.0)) {
      found.push_back(bisect(g, l, r, val[i], xtol));
      piece_has_root[i] = 1;
    }
  }
  if (n > 0 && val[n - 1] == 0.0) found.push_back(nodes[n - 1]);
  if (tangent > 0.0) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (std::abs(val[i]) <= tangent && !piece_has_root[i - 1] && !piece_has_root[i])
        found.push_back(nodes[i]);
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<double> out;
  for (double x : found)
    if (out.empty() || x - out.back() > 4.0 * xtol) out.push_back(x);
  return out;
}

}  // namespace detail

/// Roots of f(0, .) in [a, b]; f(d, x) must return the d-th derivative at x.
template <class F>
std::vector<double> isolate_roots(F&& f, double a, double b, const RootOptions& opt) {
  const int depth = std::max(0, opt.depth);
  auto tangent = [&](int d) { return opt.tangent_tol ? opt.tangent_tol(d) : 0.0; };

  std::vector<double> nodes;
  nodes.reserve(static_cast<std::size_t>(opt.grid) + 1);
  for (int i = 0; i <= opt.grid; ++i) nodes.push_back(a + (b - a) * i / opt.grid);
  auto top = [&](double x) { return f(depth, x); };
  std::vector<double> breaks = detail::roots_on_pieces(top, nodes, opt.xtol, tangent(depth));

  for (int d = depth - 1; d >= 0; --d) {
    nodes.clear();
    nodes.push_back(a);
    for (double x : breaks)
      if (x > a && x < b) nodes.push_back(x);
    nodes.push_back(b);
    auto g = [&](double x) { return f(d, x); };
    breaks = detail::roots_on_pieces(g, nodes, opt.xtol, tangent(d));
  }
  return breaks;
}

}  // namespace brieskorn
