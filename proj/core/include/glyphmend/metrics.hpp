// Quantitative glyph metrics: rasterized L1 distance and Hausdorff distance
// between control-point clouds.
#pragma once

#include <utility>
#include <vector>

#include "glyphmend/contour.hpp"
#include "glyphmend/raster.hpp"

namespace glyphmend {

// Sum of absolute per-pixel differences between the 250x250 binary
// rasterizations of the two sequences.
double l1_distance(const GlyphSequence& a, const GlyphSequence& b);
double l1_distance(const RasterImage& a, const RasterImage& b);

// Hausdorff distance between two point clouds:
//   H(A, B) = max(h(A, B), h(B, A)),  h(A, B) = max_{a in A} min_{b in B} |a - b|.
// Throws std::invalid_argument("undefined for empty cloud") when either
// cloud is empty.
double hausdorff(const std::vector<std::pair<double, double>>& a,
                 const std::vector<std::pair<double, double>>& b);

// Control-point coordinates of a sequence (flags and IDs ignored).
std::vector<std::pair<double, double>> point_cloud(const GlyphSequence& seq);

// Hausdorff between the control-point clouds of two sequences.
double hausdorff(const GlyphSequence& a, const GlyphSequence& b);

}  // namespace glyphmend
