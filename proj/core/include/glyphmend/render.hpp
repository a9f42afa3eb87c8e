// Qualitative rendering: draws contour outlines and control points with one
// color per contour ID, and writes standard BMP image files.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glyphmend/contour.hpp"

namespace glyphmend {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;  // row-major, row 0 at the top

  void fill(Rgb color) {
    for (Rgb& p : pixels) p = color;
  }
  void set(int x, int y, Rgb color) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x)] = color;
  }
};

struct RenderOptions {
  int size = 500;
  Rgb background{255, 255, 255};
  // One outline color per contour ID, cycled when contours exceed it.
  std::vector<Rgb> palette{{31, 119, 180},   // blue
                           {255, 127, 14},   // orange
                           {44, 160, 44},    // green
                           {214, 39, 40}};   // red
  Rgb on_curve_color{214, 39, 40};    // on-curve markers drawn red
  Rgb off_curve_color{31, 119, 180};  // off-curve markers drawn blue
  Rgb deleted_color{150, 150, 150};   // deleted points drawn gray
  int point_radius = 3;
  bool draw_points = true;
};

// Draws the glyph outlines (one palette color per contour ID) and control
//-point markers.  When `deleted` is given, those points are drawn in gray.
RgbImage render_glyph(const GlyphSequence& seq, const RenderOptions& options = {},
                      const std::vector<ControlPoint>* deleted = nullptr);

// Writes a 24-bit uncompressed BMP file.
void write_bmp(const RgbImage& image, const std::string& path);

}  // namespace glyphmend
