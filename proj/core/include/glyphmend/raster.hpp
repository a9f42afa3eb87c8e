// Binary rasterization of glyph sequences on a fixed 250x250 grid.
//
// Contours are interpreted with TrueType quadratic semantics: on-curve
// points are anchors, off-curve points are Bezier controls, and two
// consecutive off-curve points imply an anchor at their midpoint.  The point
// list of a contour is treated as cyclic, so a contour without an explicit
// closure duplicate is still closed through the wrap-around edge (a straight
// segment when both wrap endpoints are on-curve).  The interior is filled
// with the nonzero winding rule.
#pragma once

#include <cstdint>
#include <vector>

#include "glyphmend/contour.hpp"

namespace glyphmend {

struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, 0 = background, 1 = filled

  bool at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)] != 0;
  }
  std::size_t filled_count() const {
    std::size_t n = 0;
    for (std::uint8_t p : pixels) n += p;
    return n;
  }
};

inline constexpr int kRasterSize = 250;

// Pixel (i, j) is filled when its center (i + 0.5, j + 0.5) in the
// [0, size] x [0, size] scaled glyph frame has nonzero winding number.
// Quadratic segments are flattened until the chord error is below 0.25 px.
// An empty sequence yields an all-background image.
RasterImage rasterize(const GlyphSequence& seq, int size = kRasterSize);

// Flattened closed polylines in pixel coordinates, one per contour; exposed
// for rendering, which strokes the same geometry the fill uses.
std::vector<std::vector<std::pair<double, double>>> flatten_contours(
    const GlyphSequence& seq, double scale, double tolerance = 0.25);

}  // namespace glyphmend
