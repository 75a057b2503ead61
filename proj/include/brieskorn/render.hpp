#pragma once
// Critical value curves P_k(θ) sampled for plotting, with CSV and SVG writers.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "brieskorn/cusp_census.hpp"
#include "brieskorn/polar_mixed.hpp"

namespace brieskorn {

struct RenderSpec {
  int samples = 1024;  // per circle, a power of two >= 256
  int width = 800;
  int height = 800;
  double margin = 0.05;  // fraction of the drawing size
  bool mark_cusps = true;
  double stroke_width = 1.5;

  void validate() const {
    if (samples < 256 || (samples & (samples - 1)) != 0)
      throw std::invalid_argument("samples must be a power of two >= 256");
    if (width < 64 || height < 64) throw std::invalid_argument("width and height must be >= 64");
    if (!(margin >= 0.0 && margin < 0.5)) throw std::invalid_argument("margin must be in [0, 0.5)");
    if (!(stroke_width > 0.0)) throw std::invalid_argument("stroke width must be positive");
  }
};

struct CurvePoint {
  double theta = 0.0;
  PlanePoint value;
  bool is_cusp = false;
};

struct CriticalCurve {
  int k = 0;
  std::vector<CurvePoint> points;  // θ_j = 2πj / samples
  std::vector<double> cusp_marks;  // exact cusp parameters (zeros of Φ)
};

/// Index of the sample nearest to θ on a uniform grid of n points.
inline std::size_t nearest_sample(double theta, std::size_t n) {
  const double cell = kTwoPi / static_cast<double>(n);
  return static_cast<std::size_t>(std::llround(wrap_angle(theta) / cell)) % n;
}

/// One curve per circle; each cusp flags the sample nearest to it.
inline std::vector<CriticalCurve> critical_curves(const DeformationParams& prm, int samples) {
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  const auto census = count_cusps(prm);
  const auto specs = singular_circles(prm);
  std::vector<CriticalCurve> out;
  for (const auto& spec : specs) {
    CriticalCurve c;
    c.k = spec.k;
    c.points.reserve(static_cast<std::size_t>(samples));
    for (int j = 0; j < samples; ++j) {
      const double th = kTwoPi * j / samples;
      const auto pt = point_on_circle_lifted(spec, th);
      c.points.push_back({th, eval_qr(prm, pt.z), false});
    }
    c.cusp_marks = census.per_circle[static_cast<std::size_t>(spec.k)].cusp_thetas;
    for (double th : c.cusp_marks) c.points[nearest_sample(th, c.points.size())].is_cusp = true;
    out.push_back(std::move(c));
  }
  return out;
}

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string curves_csv(const std::vector<CriticalCurve>& curves) {
  std::string s = "k,theta,re,im,is_cusp\n";
  for (const auto& c : curves)
    for (const auto& p : c.points) {
      s += std::to_string(c.k);
      s += ',' + format_g17(p.theta) + ',' + format_g17(p.value.x) + ',' + format_g17(p.value.y);
      s += p.is_cusp ? ",1\n" : ",0\n";
    }
  return s;
}

inline std::string curves_svg(const std::vector<CriticalCurve>& curves, const RenderSpec& spec) {
  spec.validate();
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& c : curves)
    for (const auto& p : c.points) {
      xmin = std::min(xmin, p.value.x);
      xmax = std::max(xmax, p.value.x);
      ymin = std::min(ymin, p.value.y);
      ymax = std::max(ymax, p.value.y);
    }
  if (!std::isfinite(xmin)) xmin = xmax = ymin = ymax = 0.0;
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
  const double inner_w = spec.width * (1.0 - 2.0 * spec.margin);
  const double inner_h = spec.height * (1.0 - 2.0 * spec.margin);
  const double scale = std::min(inner_w, inner_h) / span;
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  auto px = [&](double x) { return 0.5 * spec.width + scale * (x - cx); };
  auto py = [&](double y) { return 0.5 * spec.height - scale * (y - cy); };  // y up

  static const char* palette[] = {"#1f4e79", "#9c2a2a", "#2e6b30", "#6b4a8f", "#8a6d1d", "#2a7f86"};
  char buf[128];
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%d\" "
                "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                spec.width, spec.height, spec.width, spec.height);
  s += buf;
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& c : curves) {
    const char* color = palette[static_cast<std::size_t>(c.k) % 6];
    std::snprintf(buf, sizeof buf, "<path id=\"curve-%d\" fill=\"none\" stroke=\"%s\" stroke-width=\"%.3f\" d=\"",
                  c.k, color, spec.stroke_width);
    s += buf;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.4f %.4f ", i == 0 ? "M" : "L", px(c.points[i].value.x),
                    py(c.points[i].value.y));
      s += buf;
    }
    s += "Z\"/>\n";
  }
  if (spec.mark_cusps) {
    for (const auto& c : curves)
      for (const auto& p : c.points) {
        if (!p.is_cusp) continue;
        std::snprintf(buf, sizeof buf,
                      "<circle class=\"cusp\" data-k=\"%d\" cx=\"%.4f\" cy=\"%.4f\" r=\"%.3f\" "
                      "fill=\"black\"/>\n",
                      c.k, px(p.value.x), py(p.value.y), 2.5 * spec.stroke_width);
        s += buf;
      }
  }
  s += "</svg>\n";
  return s;
}

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Write through a sibling temp file and rename over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      std::error_code ignore;
      fs::remove(tmp, ignore);
      throw IoError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace brieskorn
