#include "glyphmend/truetype.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace glyphmend {
namespace {

// Bounds-checked big-endian reads over the font byte buffer.
class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::uint8_t u8(std::size_t at) const {
    require(at, 1);
    return bytes_[at];
  }
  std::uint16_t u16(std::size_t at) const {
    require(at, 2);
    return static_cast<std::uint16_t>((bytes_[at] << 8) | bytes_[at + 1]);
  }
  std::int16_t i16(std::size_t at) const {
    return static_cast<std::int16_t>(u16(at));
  }
  std::uint32_t u32(std::size_t at) const {
    require(at, 4);
    return (static_cast<std::uint32_t>(bytes_[at]) << 24) |
           (static_cast<std::uint32_t>(bytes_[at + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes_[at + 2]) << 8) |
           static_cast<std::uint32_t>(bytes_[at + 3]);
  }
  std::size_t size() const { return bytes_.size(); }

 private:
  void require(std::size_t at, std::size_t n) const {
    if (at + n > bytes_.size() || at + n < at) {
      throw std::runtime_error("malformed font: read past end of file");
    }
  }
  const std::vector<std::uint8_t>& bytes_;
};

struct TableEntry {
  std::uint32_t offset = 0;
  std::uint32_t length = 0;
};

std::map<std::string, TableEntry> read_table_directory(const Reader& r) {
  const std::uint32_t version = r.u32(0);
  if (version == 0x4F54544Fu) {  // 'OTTO'
    throw std::runtime_error("unsupported font: CFF (cubic) outlines");
  }
  if (version == 0x74746366u) {  // 'ttcf'
    throw std::runtime_error("unsupported font: TrueType collection");
  }
  if (version != 0x00010000u && version != 0x74727565u) {  // 1.0 or 'true'
    throw std::runtime_error("malformed font: unrecognized sfnt version");
  }
  const std::uint16_t num_tables = r.u16(4);
  std::map<std::string, TableEntry> tables;
  for (std::uint16_t i = 0; i < num_tables; ++i) {
    const std::size_t rec = 12 + 16 * static_cast<std::size_t>(i);
    char tag[5] = {0};
    for (int k = 0; k < 4; ++k) {
      tag[k] = static_cast<char>(r.u8(rec + static_cast<std::size_t>(k)));
    }
    TableEntry entry;
    entry.offset = r.u32(rec + 8);
    entry.length = r.u32(rec + 12);
    if (static_cast<std::size_t>(entry.offset) + entry.length > r.size()) {
      throw std::runtime_error("malformed font: table extends past file end");
    }
    tables[tag] = entry;
  }
  return tables;
}

const TableEntry& required_table(const std::map<std::string, TableEntry>& t,
                                 const std::string& tag) {
  auto it = t.find(tag);
  if (it == t.end()) {
    throw std::runtime_error("malformed font: missing table " + tag);
  }
  return it->second;
}

// name table, record (platform 3, name ID 1) or (platform 1, name ID 1):
// font family, used only for style inference.
std::string read_family_name(const Reader& r,
                             const std::map<std::string, TableEntry>& tables) {
  auto it = tables.find("name");
  if (it == tables.end()) return "";
  const std::size_t base = it->second.offset;
  const std::uint16_t count = r.u16(base + 2);
  const std::size_t storage = base + r.u16(base + 4);
  for (std::uint16_t i = 0; i < count; ++i) {
    const std::size_t rec = base + 6 + 12 * static_cast<std::size_t>(i);
    const std::uint16_t platform = r.u16(rec);
    const std::uint16_t name_id = r.u16(rec + 6);
    const std::uint16_t length = r.u16(rec + 8);
    const std::size_t at = storage + r.u16(rec + 10);
    if (name_id != 1) continue;
    std::string out;
    if (platform == 1) {  // Mac Roman, one byte per char
      for (std::uint16_t k = 0; k < length; ++k) {
        out.push_back(static_cast<char>(r.u8(at + k)));
      }
      return out;
    }
    if (platform == 3 || platform == 0) {  // UTF-16BE; keep Latin-1 range
      for (std::uint16_t k = 0; k + 1 < length; k += 2) {
        const std::uint16_t cu = r.u16(at + k);
        out.push_back(cu < 256 ? static_cast<char>(cu) : '?');
      }
      return out;
    }
  }
  return "";
}

// cmap format 4 (segmented BMP) lookup.
std::uint32_t lookup_format4(const Reader& r, std::size_t sub,
                             std::uint32_t cp) {
  if (cp > 0xFFFF) return 0;
  const std::uint16_t c = static_cast<std::uint16_t>(cp);
  const std::uint16_t seg_count = r.u16(sub + 6) / 2;
  const std::size_t end_codes = sub + 14;
  const std::size_t start_codes = end_codes + 2 * seg_count + 2;
  const std::size_t id_deltas = start_codes + 2 * seg_count;
  const std::size_t id_range_offsets = id_deltas + 2 * seg_count;
  for (std::uint16_t seg = 0; seg < seg_count; ++seg) {
    if (r.u16(end_codes + 2 * seg) < c) continue;
    const std::uint16_t start = r.u16(start_codes + 2 * seg);
    if (start > c) return 0;
    const std::int16_t delta = r.i16(id_deltas + 2 * seg);
    const std::uint16_t range_offset = r.u16(id_range_offsets + 2 * seg);
    if (range_offset == 0) {
      return static_cast<std::uint16_t>(c + delta);
    }
    const std::size_t at =
        id_range_offsets + 2 * seg + range_offset + 2 * (c - start);
    const std::uint16_t raw = r.u16(at);
    if (raw == 0) return 0;
    return static_cast<std::uint16_t>(raw + delta);
  }
  return 0;
}

// cmap format 12 (segmented coverage) lookup.
std::uint32_t lookup_format12(const Reader& r, std::size_t sub,
                              std::uint32_t cp) {
  const std::uint32_t n_groups = r.u32(sub + 12);
  std::uint32_t lo = 0;
  std::uint32_t hi = n_groups;
  while (lo < hi) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    const std::size_t g = sub + 16 + 12 * static_cast<std::size_t>(mid);
    const std::uint32_t start = r.u32(g);
    const std::uint32_t end = r.u32(g + 4);
    if (cp < start) {
      hi = mid;
    } else if (cp > end) {
      lo = mid + 1;
    } else {
      return r.u32(g + 8) + (cp - start);
    }
  }
  return 0;
}

// Offset and length of the glyf entry for one glyph index; length 0 means an
// empty outline (e.g. space).
std::pair<std::uint32_t, std::uint32_t> glyf_entry(const FontFile& font,
                                                   std::uint32_t gid) {
  if (gid >= font.num_glyphs) {
    throw GlyphError(GlyphErrorKind::kAbsent, "glyph absent: index out of range");
  }
  const Reader r(font.bytes);
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  if (font.index_to_loc_format == 0) {
    begin = 2u * r.u16(font.loca_offset + 2 * gid);
    end = 2u * r.u16(font.loca_offset + 2 * (gid + 1));
  } else {
    begin = r.u32(font.loca_offset + 4 * gid);
    end = r.u32(font.loca_offset + 4 * (gid + 1));
  }
  if (end < begin || end > font.glyf_length) {
    throw GlyphError(GlyphErrorKind::kUnsupported,
                     "unsupported glyph: malformed loca entry");
  }
  return {font.glyf_offset + begin, end - begin};
}

// Simple-glyph flag bits.
constexpr std::uint8_t kOnCurveBit = 0x01;
constexpr std::uint8_t kXShort = 0x02;
constexpr std::uint8_t kYShort = 0x04;
constexpr std::uint8_t kRepeat = 0x08;
constexpr std::uint8_t kXSame = 0x10;  // or positive when kXShort
constexpr std::uint8_t kYSame = 0x20;  // or positive when kYShort

void read_simple_glyph(const Reader& r, std::size_t at, int contour_count,
                       RawOutline* out) {
  std::vector<std::size_t> ends(static_cast<std::size_t>(contour_count));
  std::size_t p = at + 10;
  for (int i = 0; i < contour_count; ++i) {
    ends[static_cast<std::size_t>(i)] = r.u16(p);
    p += 2;
  }
  for (std::size_t i = 1; i < ends.size(); ++i) {
    if (ends[i] <= ends[i - 1]) {
      throw GlyphError(GlyphErrorKind::kUnsupported,
                       "unsupported glyph: non-increasing contour ends");
    }
  }
  const std::size_t point_count = ends.empty() ? 0 : ends.back() + 1;
  const std::uint16_t instruction_length = r.u16(p);
  p += 2 + instruction_length;

  std::vector<std::uint8_t> flags;
  flags.reserve(point_count);
  while (flags.size() < point_count) {
    const std::uint8_t f = r.u8(p++);
    flags.push_back(f);
    if (f & kRepeat) {
      const std::uint8_t times = r.u8(p++);
      for (std::uint8_t k = 0; k < times && flags.size() < point_count; ++k) {
        flags.push_back(f);
      }
    }
  }

  std::vector<double> xs(point_count);
  std::vector<double> ys(point_count);
  double x = 0.0;
  for (std::size_t i = 0; i < point_count; ++i) {
    const std::uint8_t f = flags[i];
    if (f & kXShort) {
      const double d = r.u8(p++);
      x += (f & kXSame) ? d : -d;
    } else if (!(f & kXSame)) {
      x += r.i16(p);
      p += 2;
    }
    xs[i] = x;
  }
  double y = 0.0;
  for (std::size_t i = 0; i < point_count; ++i) {
    const std::uint8_t f = flags[i];
    if (f & kYShort) {
      const double d = r.u8(p++);
      y += (f & kYSame) ? d : -d;
    } else if (!(f & kYSame)) {
      y += r.i16(p);
      p += 2;
    }
    ys[i] = y;
  }

  std::size_t begin = 0;
  for (std::size_t c = 0; c < ends.size(); ++c) {
    std::vector<RawOutline::Point> contour;
    for (std::size_t i = begin; i <= ends[c]; ++i) {
      contour.push_back({xs[i], ys[i], (flags[i] & kOnCurveBit) != 0});
    }
    begin = ends[c] + 1;
    out->contours.push_back(std::move(contour));
  }
}

// Composite-glyph flag bits.
constexpr std::uint16_t kArgsAreWords = 0x0001;
constexpr std::uint16_t kArgsAreXY = 0x0002;
constexpr std::uint16_t kHaveScale = 0x0008;
constexpr std::uint16_t kMoreComponents = 0x0020;
constexpr std::uint16_t kHaveXYScale = 0x0040;
constexpr std::uint16_t kHaveTwoByTwo = 0x0080;

double f2dot14(std::int16_t raw) { return raw / 16384.0; }

void read_glyph_recursive(const FontFile& font, std::uint32_t gid, int depth,
                          RawOutline* out);

void read_composite_glyph(const FontFile& font, const Reader& r,
                          std::size_t at, int depth, RawOutline* out) {
  std::size_t p = at + 10;
  bool more = true;
  while (more) {
    const std::uint16_t flags = r.u16(p);
    const std::uint16_t component_gid = r.u16(p + 2);
    p += 4;
    double dx = 0.0;
    double dy = 0.0;
    if (flags & kArgsAreWords) {
      if (flags & kArgsAreXY) {
        dx = r.i16(p);
        dy = r.i16(p + 2);
      }
      p += 4;
    } else {
      if (flags & kArgsAreXY) {
        dx = static_cast<std::int8_t>(r.u8(p));
        dy = static_cast<std::int8_t>(r.u8(p + 1));
      }
      p += 2;
    }
    if (!(flags & kArgsAreXY)) {
      throw GlyphError(GlyphErrorKind::kUnsupported,
                       "unsupported glyph: point-matching component");
    }
    // Scale fields are tolerated only when they encode the identity.
    if (flags & kHaveScale) {
      const double s = f2dot14(r.i16(p));
      p += 2;
      if (s != 1.0) {
        throw GlyphError(GlyphErrorKind::kUnsupported,
                         "unsupported glyph: scaled component");
      }
    } else if (flags & kHaveXYScale) {
      const double sx = f2dot14(r.i16(p));
      const double sy = f2dot14(r.i16(p + 2));
      p += 4;
      if (sx != 1.0 || sy != 1.0) {
        throw GlyphError(GlyphErrorKind::kUnsupported,
                         "unsupported glyph: scaled component");
      }
    } else if (flags & kHaveTwoByTwo) {
      const double a = f2dot14(r.i16(p));
      const double b = f2dot14(r.i16(p + 2));
      const double c = f2dot14(r.i16(p + 4));
      const double d = f2dot14(r.i16(p + 6));
      p += 8;
      if (a != 1.0 || b != 0.0 || c != 0.0 || d != 1.0) {
        throw GlyphError(GlyphErrorKind::kUnsupported,
                         "unsupported glyph: transformed component");
      }
    }
    RawOutline component;
    read_glyph_recursive(font, component_gid, depth + 1, &component);
    for (auto& contour : component.contours) {
      for (auto& pt : contour) {
        pt.x += dx;
        pt.y += dy;
      }
      out->contours.push_back(std::move(contour));
    }
    more = (flags & kMoreComponents) != 0;
  }
}

void read_glyph_recursive(const FontFile& font, std::uint32_t gid, int depth,
                          RawOutline* out) {
  if (depth > 8) {
    throw GlyphError(GlyphErrorKind::kUnsupported,
                     "unsupported glyph: component nesting too deep");
  }
  const auto [offset, length] = glyf_entry(font, gid);
  if (length == 0) return;  // empty outline contributes nothing
  const Reader r(font.bytes);
  const std::int16_t contour_count = r.i16(offset);
  if (contour_count >= 0) {
    read_simple_glyph(r, offset, contour_count, out);
  } else {
    read_composite_glyph(font, r, offset, depth, out);
  }
}

}  // namespace

FontFile parse_font(std::vector<std::uint8_t> bytes) {
  FontFile font;
  font.bytes = std::move(bytes);
  const Reader r(font.bytes);
  const auto tables = read_table_directory(r);

  const TableEntry& head = required_table(tables, "head");
  font.units_per_em = r.u16(head.offset + 18);
  font.index_to_loc_format = r.i16(head.offset + 50);
  if (font.units_per_em <= 0.0) {
    throw std::runtime_error("malformed font: units-per-em is zero");
  }
  if (font.index_to_loc_format != 0 && font.index_to_loc_format != 1) {
    throw std::runtime_error("malformed font: unknown loca format");
  }

  const TableEntry& maxp = required_table(tables, "maxp");
  font.num_glyphs = r.u16(maxp.offset + 4);

  const TableEntry& loca = required_table(tables, "loca");
  font.loca_offset = loca.offset;
  font.loca_length = loca.length;
  const std::size_t entry_size = font.index_to_loc_format == 0 ? 2 : 4;
  if (loca.length < entry_size * (font.num_glyphs + 1)) {
    throw std::runtime_error("malformed font: loca table too short");
  }

  const TableEntry& glyf = required_table(tables, "glyf");
  font.glyf_offset = glyf.offset;
  font.glyf_length = glyf.length;

  const TableEntry& cmap = required_table(tables, "cmap");
  font.cmap_offset = cmap.offset;
  font.cmap_length = cmap.length;

  font.family_name = read_family_name(r, tables);
  return font;
}

FontFile load_font(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open font file: " + path);
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_font(std::move(bytes));
}

std::uint32_t glyph_index_for(const FontFile& font, std::uint32_t codepoint) {
  const Reader r(font.bytes);
  const std::size_t base = font.cmap_offset;
  const std::uint16_t num_subtables = r.u16(base + 2);
  // Prefer a Unicode full-repertoire format 12 subtable, then BMP format 4.
  std::size_t best = 0;
  int best_rank = 0;
  for (std::uint16_t i = 0; i < num_subtables; ++i) {
    const std::size_t rec = base + 4 + 8 * static_cast<std::size_t>(i);
    const std::uint16_t platform = r.u16(rec);
    const std::uint16_t encoding = r.u16(rec + 2);
    const std::size_t sub = base + r.u32(rec + 4);
    const std::uint16_t format = r.u16(sub);
    int rank = 0;
    if (format == 12 &&
        ((platform == 3 && encoding == 10) || platform == 0)) {
      rank = 3;
    } else if (format == 4 &&
               ((platform == 3 && encoding == 1) || platform == 0)) {
      rank = 2;
    } else if (format == 4 || format == 12) {
      rank = 1;
    }
    if (rank > best_rank) {
      best_rank = rank;
      best = sub;
    }
  }
  if (best_rank == 0) return 0;
  const std::uint16_t format = r.u16(best);
  if (format == 12) return lookup_format12(r, best, codepoint);
  return lookup_format4(r, best, codepoint);
}

RawOutline read_outline(const FontFile& font, std::uint32_t glyph_index) {
  RawOutline out;
  read_glyph_recursive(font, glyph_index, 0, &out);
  return out;
}

GlyphSequence outline_to_sequence(const RawOutline& outline,
                                  double units_per_em,
                                  const std::string& font_id,
                                  const std::string& glyph_label,
                                  const SequenceLimits& limits) {
  if (outline.contours.empty()) {
    throw GlyphError(GlyphErrorKind::kAbsent, "glyph absent: empty outline");
  }
  if (static_cast<int>(outline.contours.size()) > limits.max_contours) {
    throw GlyphError(GlyphErrorKind::kCapacity,
                     "capacity exceeded: " +
                         std::to_string(outline.contours.size()) +
                         " contours, cap is " +
                         std::to_string(limits.max_contours));
  }

  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  for (const auto& contour : outline.contours) {
    if (contour.empty()) {
      throw GlyphError(GlyphErrorKind::kUnsupported,
                       "unsupported glyph: empty contour");
    }
    if (static_cast<int>(contour.size()) + 1 > limits.max_points_per_contour) {
      throw GlyphError(GlyphErrorKind::kCapacity,
                       "capacity exceeded: contour of " +
                           std::to_string(contour.size() + 1) +
                           " points (with closure), cap is " +
                           std::to_string(limits.max_points_per_contour));
    }
    for (const auto& pt : contour) {
      min_x = std::min(min_x, pt.x / units_per_em);
      min_y = std::min(min_y, pt.y / units_per_em);
    }
  }
  // Translate only when the scaled bounding box dips below zero, so the
  // minimum maps to >= 0; then clamp to the unit square.
  const double shift_x = min_x < 0.0 ? -min_x : 0.0;
  const double shift_y = min_y < 0.0 ? -min_y : 0.0;
  const auto normalize = [&](double v, double shift) {
    return std::clamp(v / units_per_em + shift, 0.0, 1.0);
  };

  GlyphSequence seq;
  seq.font_id = font_id;
  seq.glyph_label = glyph_label;
  seq.corrupted = false;
  int contour_id = 0;
  for (const auto& contour : outline.contours) {
    ++contour_id;
    int point_id = 0;
    for (const auto& pt : contour) {
      ControlPoint cp;
      cp.x = normalize(pt.x, shift_x);
      cp.y = normalize(pt.y, shift_y);
      cp.contour_id = contour_id;
      cp.point_id = ++point_id;
      cp.flag = pt.on_curve ? CurveFlag::kOnCurve : CurveFlag::kOffCurve;
      seq.points.push_back(cp);
    }
    ControlPoint closure = seq.points[seq.points.size() - contour.size()];
    closure.point_id = ++point_id;
    seq.points.push_back(closure);
  }
  return seq;
}

GlyphSequence extract_glyph(const FontFile& font, std::uint32_t codepoint,
                            const std::string& font_id,
                            const std::string& glyph_label,
                            const SequenceLimits& limits) {
  const std::uint32_t gid = glyph_index_for(font, codepoint);
  if (gid == 0) {
    throw GlyphError(GlyphErrorKind::kAbsent, "glyph absent: unmapped codepoint");
  }
  const RawOutline outline = read_outline(font, gid);
  return outline_to_sequence(outline, font.units_per_em, font_id, glyph_label,
                             limits);
}

std::optional<FontStyle> infer_style(const std::string& family_name) {
  std::string lower;
  lower.reserve(family_name.size());
  for (char c : family_name) {
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  const auto has = [&](const char* needle) {
    return lower.find(needle) != std::string::npos;
  };
  if (has("mono")) return std::nullopt;  // monospace excluded from the corpus
  if (has("hand") || has("script") || has("cursive")) {
    return FontStyle::kHandwriting;
  }
  if (has("display") || has("decor") || has("poster")) {
    return FontStyle::kDisplay;
  }
  if (has("sans")) return FontStyle::kSansSerif;
  if (has("serif")) return FontStyle::kSerif;
  return FontStyle::kSansSerif;
}

FontRecord ingest_font(const FontFile& font, const std::string& font_id,
                       FontStyle style, const IngestOptions& options,
                       std::vector<IngestSkip>* skips) {
  FontRecord record;
  record.font_id = font_id;
  record.style = style;
  for (char c : options.charset) {
    const std::string label(1, c);
    try {
      GlyphSequence seq =
          extract_glyph(font, static_cast<unsigned char>(c), font_id, label,
                        options.limits);
      const auto violations = validate(seq, options.limits);
      if (!violations.empty()) {
        if (skips != nullptr) {
          skips->push_back({label, "validation: " + violations.front().rule +
                                       " (" + violations.front().detail + ")"});
        }
        continue;
      }
      record.glyphs.emplace(label, std::move(seq));
    } catch (const GlyphError& e) {
      if (skips != nullptr) skips->push_back({label, e.what()});
    }
  }
  return record;
}

}  // namespace glyphmend
