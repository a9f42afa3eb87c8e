#include "glyphmend/raster.hpp"

#include <algorithm>
#include <cmath>

namespace glyphmend {
namespace {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

Vec2 midpoint(const Vec2& a, const Vec2& b) {
  return {(a.x + b.x) * 0.5, (a.y + b.y) * 0.5};
}

// Appends a quadratic Bezier (anchor a, control c, anchor b) as line segments
// with chord error below `tolerance`.  The maximum deviation of the curve
// from its chord is |c - (a+b)/2| / 2, and uniform subdivision into n pieces
// divides it by n^2, so n = ceil(sqrt(dev / tolerance)) suffices.
void flatten_quadratic(const Vec2& a, const Vec2& c, const Vec2& b,
                       double tolerance,
                       std::vector<std::pair<double, double>>* out) {
  const double dx = c.x - 0.5 * (a.x + b.x);
  const double dy = c.y - 0.5 * (a.y + b.y);
  const double deviation = 0.5 * std::sqrt(dx * dx + dy * dy);
  int n = 1;
  if (deviation > tolerance) {
    n = static_cast<int>(std::ceil(std::sqrt(deviation / tolerance)));
  }
  for (int k = 1; k <= n; ++k) {
    const double t = static_cast<double>(k) / n;
    const double u = 1.0 - t;
    out->emplace_back(u * u * a.x + 2.0 * u * t * c.x + t * t * b.x,
                      u * u * a.y + 2.0 * u * t * c.y + t * t * b.y);
  }
}

// Converts one contour (cyclic TrueType point list) into a closed polyline.
std::vector<std::pair<double, double>> flatten_one(
    const std::vector<Vec2>& pts, const std::vector<bool>& on_curve,
    double tolerance) {
  std::vector<std::pair<double, double>> poly;
  const std::size_t n = pts.size();
  if (n == 0) return poly;
  if (n == 1) {
    poly.emplace_back(pts[0].x, pts[0].y);
    return poly;
  }

  // Pick a starting anchor: the first on-curve point, or the midpoint of the
  // first two points when every point is off-curve.
  std::size_t start = 0;
  bool found = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (on_curve[i]) {
      start = i;
      found = true;
      break;
    }
  }
  Vec2 anchor = found ? pts[start] : midpoint(pts[0], pts[1]);
  poly.emplace_back(anchor.x, anchor.y);

  bool have_control = false;
  Vec2 control;
  // Walk the full cycle, ending back at the starting anchor.
  const std::size_t first = found ? start + 1 : 1;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t i = (first + step) % n;
    const Vec2 p = pts[i];
    if (on_curve[i]) {
      if (have_control) {
        flatten_quadratic(anchor, control, p, tolerance, &poly);
        have_control = false;
      } else {
        poly.emplace_back(p.x, p.y);
      }
      anchor = p;
    } else {
      if (have_control) {
        const Vec2 implied = midpoint(control, p);
        flatten_quadratic(anchor, control, implied, tolerance, &poly);
        anchor = implied;
      }
      control = p;
      have_control = true;
    }
    if (!found && step + 1 == n) break;  // all-off-curve cycle ends below
  }
  // Close back to the starting anchor.
  const Vec2 close = {poly.front().first, poly.front().second};
  if (have_control) {
    flatten_quadratic(anchor, control, close, tolerance, &poly);
  } else if (anchor.x != close.x || anchor.y != close.y) {
    poly.emplace_back(close.x, close.y);
  }
  return poly;
}

}  // namespace

std::vector<std::vector<std::pair<double, double>>> flatten_contours(
    const GlyphSequence& seq, double scale, double tolerance) {
  std::vector<std::vector<std::pair<double, double>>> out;
  std::size_t i = 0;
  while (i < seq.points.size()) {
    const int cid = seq.points[i].contour_id;
    std::vector<Vec2> pts;
    std::vector<bool> on_curve;
    while (i < seq.points.size() && seq.points[i].contour_id == cid) {
      pts.push_back({seq.points[i].x * scale, seq.points[i].y * scale});
      on_curve.push_back(seq.points[i].flag != CurveFlag::kOffCurve);
      ++i;
    }
    // Drop an explicit closure duplicate so the cyclic walk sees each stored
    // point once; the wrap-around edge restores the closure.
    if (pts.size() >= 2 && pts.front().x == pts.back().x &&
        pts.front().y == pts.back().y) {
      pts.pop_back();
      on_curve.pop_back();
    }
    out.push_back(flatten_one(pts, on_curve, tolerance));
  }
  return out;
}

RasterImage rasterize(const GlyphSequence& seq, int size) {
  RasterImage img;
  img.width = size;
  img.height = size;
  img.pixels.assign(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0);
  if (seq.points.empty()) return img;

  struct Edge {
    double x0, y0, x1, y1;
    int direction;  // +1 when y increases along the edge, -1 otherwise
  };
  std::vector<Edge> edges;
  for (const auto& poly : flatten_contours(seq, static_cast<double>(size))) {
    for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
      const auto [x0, y0] = poly[k];
      const auto [x1, y1] = poly[k + 1];
      if (y0 == y1) continue;  // horizontal edges never cross a scanline center
      edges.push_back({x0, y0, x1, y1, y1 > y0 ? 1 : -1});
    }
  }
  if (edges.empty()) return img;

  struct Crossing {
    double x;
    int direction;
  };
  std::vector<Crossing> crossings;
  for (int row = 0; row < size; ++row) {
    const double yc = row + 0.5;
    crossings.clear();
    for (const Edge& e : edges) {
      const double ylo = std::min(e.y0, e.y1);
      const double yhi = std::max(e.y0, e.y1);
      if (yc < ylo || yc >= yhi) continue;  // half-open: vertex counted once
      const double t = (yc - e.y0) / (e.y1 - e.y0);
      crossings.push_back({e.x0 + t * (e.x1 - e.x0), e.direction});
    }
    std::sort(crossings.begin(), crossings.end(),
              [](const Crossing& a, const Crossing& b) { return a.x < b.x; });
    int winding = 0;
    for (std::size_t k = 0; k + 1 < crossings.size(); ++k) {
      winding += crossings[k].direction;
      if (winding == 0) continue;
      // Pixel centers i + 0.5 inside [crossings[k].x, crossings[k+1].x).
      int lo = static_cast<int>(std::ceil(crossings[k].x - 0.5));
      int hi = static_cast<int>(std::ceil(crossings[k + 1].x - 0.5)) - 1;
      lo = std::max(lo, 0);
      hi = std::min(hi, size - 1);
      for (int x = lo; x <= hi; ++x) {
        img.pixels[static_cast<std::size_t>(row) * size + x] = 1;
      }
    }
  }
  return img;
}

}  // namespace glyphmend
