#include "glyphmend/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "glyphmend/rng.hpp"

namespace glyphmend {

namespace {

struct Pt {
  double x = 0.0;
  double y = 0.0;
};

struct Rec {
  Pt p;
  bool on = true;
};

double dist(const Pt& a, const Pt& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

Pt lerp(const Pt& a, const Pt& b, double t) {
  return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

std::vector<Rec> polygon_recs(const std::vector<Pt>& corners) {
  std::vector<Rec> out;
  out.reserve(corners.size());
  for (const Pt& c : corners) out.push_back({c, true});
  return out;
}

// Replace each corner v by [on-curve v+t toward prev, off-curve v,
// on-curve v+t toward next]: a quadratic fillet in outline form.
std::vector<Rec> rounded_recs(const std::vector<Pt>& corners, double round_frac) {
  const std::size_t n = corners.size();
  double min_edge = 1e9;
  for (std::size_t i = 0; i < n; ++i) {
    min_edge = std::min(min_edge, dist(corners[i], corners[(i + 1) % n]));
  }
  const double t = min_edge * round_frac;
  std::vector<Rec> out;
  out.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Pt& prev = corners[(i + n - 1) % n];
    const Pt& v = corners[i];
    const Pt& next = corners[(i + 1) % n];
    out.push_back({lerp(v, prev, t / std::max(dist(v, prev), 1e-9)), true});
    out.push_back({v, false});
    out.push_back({lerp(v, next, t / std::max(dist(v, next), 1e-9)), true});
  }
  return out;
}

// Insert evenly spaced on-curve points along straight (on-to-on) edges
// until the ring holds target_interior records.
void distribute(std::vector<Rec>& ring, int target_interior) {
  const int base = static_cast<int>(ring.size());
  int extra = target_interior - base;
  if (extra <= 0) return;

  struct Edge {
    std::size_t from;
    double length;
    int add = 0;
    double frac = 0.0;
  };
  std::vector<Edge> edges;
  double total = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const std::size_t j = (i + 1) % ring.size();
    if (ring[i].on && ring[j].on) {
      const double len = dist(ring[i].p, ring[j].p);
      if (len > 1e-9) {
        edges.push_back({i, len});
        total += len;
      }
    }
  }
  if (edges.empty() || total <= 0.0) return;

  int assigned = 0;
  for (Edge& e : edges) {
    const double exact = extra * e.length / total;
    e.add = static_cast<int>(std::floor(exact));
    e.frac = exact - std::floor(exact);
    assigned += e.add;
  }
  while (assigned < extra) {
    auto best = std::max_element(edges.begin(), edges.end(),
                                 [](const Edge& a, const Edge& b) { return a.frac < b.frac; });
    ++best->add;
    best->frac = -1.0;
    ++assigned;
  }

  std::vector<Rec> out;
  out.reserve(target_interior);
  for (std::size_t i = 0; i < ring.size(); ++i) {
    out.push_back(ring[i]);
    for (const Edge& e : edges) {
      if (e.from == i && e.add > 0) {
        const Pt a = ring[i].p;
        const Pt b = ring[(i + 1) % ring.size()].p;
        for (int k = 1; k <= e.add; ++k) {
          out.push_back({lerp(a, b, static_cast<double>(k) / (e.add + 1)), true});
        }
      }
    }
  }
  ring = std::move(out);
}

std::vector<ControlPoint> finish_contour(std::vector<Rec> ring, int contour_id) {
  std::vector<ControlPoint> pts;
  pts.reserve(ring.size() + 1);
  int pid = 0;
  auto push = [&](const Rec& r) {
    ControlPoint p;
    p.x = std::clamp(r.p.x, 0.0, 1.0);
    p.y = std::clamp(r.p.y, 0.0, 1.0);
    p.contour_id = contour_id;
    p.point_id = ++pid;
    p.flag = r.on ? CurveFlag::kOnCurve : CurveFlag::kOffCurve;
    pts.push_back(p);
  };
  for (const Rec& r : ring) push(r);
  push(ring.front());  // explicit closure duplicate
  return pts;
}

std::vector<Pt> map_unit(const std::vector<Pt>& unit, double cx, double cy,
                         double hx, double hy) {
  std::vector<Pt> out;
  out.reserve(unit.size());
  for (const Pt& p : unit) {
    out.push_back({cx + (p.x - 0.5) * 2.0 * hx, cy + (p.y - 0.5) * 2.0 * hy});
  }
  return out;
}

std::vector<Pt> rect_unit() {
  return {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
}

std::vector<Pt> el_unit(double a, double b) {
  return {{0, 0}, {1, 0}, {1, a}, {b, a}, {b, 1}, {0, 1}};
}

std::vector<Pt> tee_unit(double c1, double c2, double a) {
  return {{c1, 0}, {c2, 0}, {c2, 1 - a}, {1, 1 - a},
          {1, 1},  {0, 1},  {0, 1 - a},  {c1, 1 - a}};
}

std::vector<Pt> aitch_unit(double a, double m1, double m2) {
  return {{0, 0},     {a, 0},     {a, m1}, {1 - a, m1}, {1 - a, 0}, {1, 0},
          {1, 1},     {1 - a, 1}, {1 - a, m2}, {a, m2}, {a, 1},     {0, 1}};
}

enum class Family {
  kRect,
  kRoundedRect,
  kEl,
  kTee,
  kAitch,
  kRing,
  kRoundedRing,
  kDoubleRing,
  kWobble,
  kCount,
};

FontStyle family_style(Family f) {
  switch (f) {
    case Family::kRoundedRect:
    case Family::kRoundedRing:
      return FontStyle::kSerif;
    case Family::kRing:
    case Family::kDoubleRing:
      return FontStyle::kDisplay;
    case Family::kWobble:
      return FontStyle::kHandwriting;
    default:
      return FontStyle::kSansSerif;
  }
}

double in_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * draw_unit(rng);
}

GlyphSequence make_glyph(std::mt19937_64& rng, Family family,
                         const SynthOptions& opts) {
  const double cx = in_range(rng, 0.42, 0.58);
  const double cy = in_range(rng, 0.42, 0.58);
  const double hx = in_range(rng, 0.20, 0.38);
  const double hy = in_range(rng, 0.20, 0.38);

  // One stored-point target per contour, drawn so the corner structure
  // always fits and the cap is respected.
  auto draw_target = [&](int base) {
    const int lo = std::max(opts.min_points, base + 1);
    const int hi = std::max(lo, opts.max_points);
    return lo + static_cast<int>(draw_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
  };

  std::vector<std::vector<Rec>> rings;
  switch (family) {
    case Family::kRect:
      rings.push_back(polygon_recs(map_unit(rect_unit(), cx, cy, hx, hy)));
      break;
    case Family::kRoundedRect:
      rings.push_back(rounded_recs(map_unit(rect_unit(), cx, cy, hx, hy),
                                   in_range(rng, 0.15, 0.30)));
      break;
    case Family::kEl:
      rings.push_back(polygon_recs(map_unit(
          el_unit(in_range(rng, 0.3, 0.6), in_range(rng, 0.3, 0.6)), cx, cy, hx, hy)));
      break;
    case Family::kTee:
      rings.push_back(polygon_recs(map_unit(
          tee_unit(in_range(rng, 0.30, 0.45), in_range(rng, 0.55, 0.70),
                   in_range(rng, 0.25, 0.45)),
          cx, cy, hx, hy)));
      break;
    case Family::kAitch:
      rings.push_back(polygon_recs(map_unit(
          aitch_unit(in_range(rng, 0.22, 0.35), in_range(rng, 0.35, 0.45),
                     in_range(rng, 0.55, 0.65)),
          cx, cy, hx, hy)));
      break;
    case Family::kRing:
    case Family::kRoundedRing: {
      const double inner = in_range(rng, 0.40, 0.60);
      auto outer = map_unit(rect_unit(), cx, cy, hx, hy);
      auto hole = map_unit(rect_unit(), cx, cy, hx * inner, hy * inner);
      std::reverse(hole.begin(), hole.end());  // opposite winding: a hole
      if (family == Family::kRing) {
        rings.push_back(polygon_recs(outer));
        rings.push_back(polygon_recs(hole));
      } else {
        const double rf = in_range(rng, 0.15, 0.30);
        rings.push_back(rounded_recs(outer, rf));
        rings.push_back(rounded_recs(hole, rf));
      }
      break;
    }
    case Family::kDoubleRing: {
      auto outer = map_unit(rect_unit(), cx, cy, hx, hy);
      const double gap = in_range(rng, 0.08, 0.16);
      const double hw = (1.0 - 3.0 * gap) / 2.0;
      auto hole = [&](double x0) {
        std::vector<Pt> h = {{x0, gap}, {x0 + hw, gap}, {x0 + hw, 1 - gap}, {x0, 1 - gap}};
        h = map_unit(h, cx, cy, hx, hy);
        std::reverse(h.begin(), h.end());
        return h;
      };
      rings.push_back(polygon_recs(outer));
      rings.push_back(polygon_recs(hole(gap)));
      rings.push_back(polygon_recs(hole(2.0 * gap + hw)));
      break;
    }
    case Family::kWobble: {
      const int target = draw_target(7);
      const int m = target - 1;
      const double amp = in_range(rng, 0.05, 0.18);
      const double phase = in_range(rng, 0.0, 2.0 * std::numbers::pi);
      const int lobes = 2 + static_cast<int>(draw_below(rng, 3));
      std::vector<Pt> pts;
      pts.reserve(m);
      for (int k = 0; k < m; ++k) {
        const double th = 2.0 * std::numbers::pi * k / m;
        const double r = 1.0 + amp * std::sin(lobes * th + phase);
        pts.push_back({0.5 + 0.5 * r * std::cos(th), 0.5 + 0.5 * r * std::sin(th)});
      }
      rings.push_back(polygon_recs(map_unit(pts, cx, cy, hx / 1.2, hy / 1.2)));
      break;
    }
    case Family::kCount:
      break;
  }

  GlyphSequence glyph;
  int contour_id = 0;
  for (std::vector<Rec>& ring : rings) {
    if (family != Family::kWobble) {
      distribute(ring, draw_target(static_cast<int>(ring.size())) - 1);
    }
    auto pts = finish_contour(std::move(ring), ++contour_id);
    glyph.points.insert(glyph.points.end(), pts.begin(), pts.end());
  }
  return glyph;
}

}  // namespace

std::vector<FontRecord> synth_glyphs(int count, std::uint64_t seed,
                                     const SynthOptions& opts) {
  std::vector<FontRecord> fonts;
  fonts.reserve(static_cast<std::size_t>(std::max(count, 0)));
  int glyph_ordinal = 0;
  for (int fi = 0; fi < count; ++fi) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(fi)));
    FontRecord font;
    char id_buf[32];
    std::snprintf(id_buf, sizeof id_buf, "synth-%05d", fi);
    font.font_id = id_buf;
    for (int g = 0; g < opts.glyphs_per_font; ++g) {
      const auto family = static_cast<Family>(
          draw_below(rng, static_cast<std::uint64_t>(Family::kCount)));
      GlyphSequence glyph = make_glyph(rng, family, opts);
      glyph.font_id = font.font_id;
      glyph.glyph_label = std::string(1, static_cast<char>('A' + glyph_ordinal % 26));
      ++glyph_ordinal;
      if (g == 0) font.style = family_style(family);
      font.glyphs[glyph.glyph_label] = std::move(glyph);
    }
    fonts.push_back(std::move(font));
  }
  return fonts;
}

}  // namespace glyphmend
