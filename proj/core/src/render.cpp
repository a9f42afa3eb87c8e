#include "glyphmend/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "glyphmend/raster.hpp"

namespace glyphmend {
namespace {

// Glyph coordinates have y increasing upward; image rows grow downward.
int flip_y(double y, int size) {
  return size - 1 - static_cast<int>(std::lround(y));
}

void draw_line(RgbImage* img, double x0, double y0, double x1, double y1,
               Rgb color) {
  const double dx = x1 - x0;
  const double dy = y1 - y0;
  const int steps =
      std::max(1, static_cast<int>(std::ceil(std::max(std::abs(dx), std::abs(dy)))));
  for (int k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    img->set(static_cast<int>(std::lround(x0 + t * dx)),
             flip_y(y0 + t * dy, img->height), color);
  }
}

void draw_disc(RgbImage* img, double cx, double cy, int radius, Rgb color) {
  const int x0 = static_cast<int>(std::lround(cx));
  const int y0 = flip_y(cy, img->height);
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) {
        img->set(x0 + dx, y0 + dy, color);
      }
    }
  }
}

}  // namespace

RgbImage render_glyph(const GlyphSequence& seq, const RenderOptions& options,
                      const std::vector<ControlPoint>* deleted) {
  RgbImage img;
  img.width = options.size;
  img.height = options.size;
  img.pixels.assign(
      static_cast<std::size_t>(options.size) * static_cast<std::size_t>(options.size),
      options.background);
  if (seq.points.empty() && (deleted == nullptr || deleted->empty())) {
    return img;
  }

  const double scale = static_cast<double>(options.size);
  const auto polylines = flatten_contours(seq, scale);

  // Contour IDs in order of appearance drive the palette.
  std::vector<int> contour_ids;
  for (const ControlPoint& p : seq.points) {
    if (contour_ids.empty() || contour_ids.back() != p.contour_id) {
      contour_ids.push_back(p.contour_id);
    }
  }
  for (std::size_t c = 0; c < polylines.size(); ++c) {
    const int cid = c < contour_ids.size() ? contour_ids[c] : static_cast<int>(c) + 1;
    const Rgb color =
        options.palette[static_cast<std::size_t>(std::max(cid - 1, 0)) %
                        options.palette.size()];
    const auto& poly = polylines[c];
    for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
      draw_line(&img, poly[k].first, poly[k].second, poly[k + 1].first,
                poly[k + 1].second, color);
    }
  }

  if (options.draw_points) {
    if (deleted != nullptr) {
      for (const ControlPoint& p : *deleted) {
        draw_disc(&img, p.x * scale, p.y * scale, options.point_radius,
                  options.deleted_color);
      }
    }
    for (const ControlPoint& p : seq.points) {
      const Rgb color = p.flag == CurveFlag::kOffCurve ? options.off_curve_color
                                                       : options.on_curve_color;
      draw_disc(&img, p.x * scale, p.y * scale, options.point_radius, color);
    }
  }
  return img;
}

void write_bmp(const RgbImage& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output image: " + path);
  }
  const int w = image.width;
  const int h = image.height;
  const std::uint32_t row_bytes = (static_cast<std::uint32_t>(w) * 3 + 3) & ~3u;
  const std::uint32_t payload = row_bytes * static_cast<std::uint32_t>(h);
  const std::uint32_t file_size = 54 + payload;

  unsigned char header[54] = {};
  header[0] = 'B';
  header[1] = 'M';
  const auto put32 = [&](int at, std::uint32_t v) {
    header[at] = static_cast<unsigned char>(v & 0xFF);
    header[at + 1] = static_cast<unsigned char>((v >> 8) & 0xFF);
    header[at + 2] = static_cast<unsigned char>((v >> 16) & 0xFF);
    header[at + 3] = static_cast<unsigned char>((v >> 24) & 0xFF);
  };
  put32(2, file_size);
  put32(10, 54);          // pixel data offset
  put32(14, 40);          // BITMAPINFOHEADER size
  put32(18, static_cast<std::uint32_t>(w));
  put32(22, static_cast<std::uint32_t>(h));
  header[26] = 1;         // planes
  header[28] = 24;        // bits per pixel
  put32(34, payload);
  out.write(reinterpret_cast<const char*>(header), sizeof(header));

  std::vector<unsigned char> row(row_bytes, 0);
  // BMP stores rows bottom-up.
  for (int y = h - 1; y >= 0; --y) {
    for (int x = 0; x < w; ++x) {
      const Rgb& p = image.pixels[static_cast<std::size_t>(y) * w + x];
      row[static_cast<std::size_t>(x) * 3] = p.b;
      row[static_cast<std::size_t>(x) * 3 + 1] = p.g;
      row[static_cast<std::size_t>(x) * 3 + 2] = p.r;
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
  if (!out) {
    throw std::runtime_error("failed writing image: " + path);
  }
}

}  // namespace glyphmend
