#include "glyphmend/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace glyphmend {

double l1_distance(const RasterImage& a, const RasterImage& b) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("raster dimensions differ");
  }
  long long sum = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    sum += std::abs(static_cast<int>(a.pixels[i]) - static_cast<int>(b.pixels[i]));
  }
  return static_cast<double>(sum);
}

double l1_distance(const GlyphSequence& a, const GlyphSequence& b) {
  return l1_distance(rasterize(a), rasterize(b));
}

namespace {

// Directed Hausdorff h(A, B) = max over A of the min distance to B.
double directed(const std::vector<std::pair<double, double>>& a,
                const std::vector<std::pair<double, double>>& b) {
  double worst = 0.0;
  for (const auto& [ax, ay] : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [bx, by] : b) {
      const double dx = ax - bx;
      const double dy = ay - by;
      const double d = std::sqrt(dx * dx + dy * dy);
      if (d < best) best = d;
    }
    if (best > worst) worst = best;
  }
  return worst;
}

}  // namespace

double hausdorff(const std::vector<std::pair<double, double>>& a,
                 const std::vector<std::pair<double, double>>& b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("undefined for empty cloud");
  }
  return std::max(directed(a, b), directed(b, a));
}

std::vector<std::pair<double, double>> point_cloud(const GlyphSequence& seq) {
  std::vector<std::pair<double, double>> out;
  out.reserve(seq.points.size());
  for (const ControlPoint& p : seq.points) out.emplace_back(p.x, p.y);
  return out;
}

double hausdorff(const GlyphSequence& a, const GlyphSequence& b) {
  return hausdorff(point_cloud(a), point_cloud(b));
}

}  // namespace glyphmend
