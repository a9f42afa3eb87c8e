// TrueType font ingest: parses binary sfnt containers and converts glyph
// outlines (quadratic, glyf table) into GlyphSequence values.
//
// Scope: simple glyphs and composite glyphs whose components are pure
// translations.  Hinting, kerning, CFF (cubic) outlines, and variable fonts
// are out of scope.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "glyphmend/contour.hpp"
#include "glyphmend/corpus.hpp"

namespace glyphmend {

// Why extraction failed for one glyph.  Ingest skips the glyph and records
// the reason; capacity overflows are expected for ornate outlines.
enum class GlyphErrorKind {
  kAbsent,     // no cmap entry / empty outline
  kUnsupported,  // composite with non-translational transform, malformed data
  kCapacity,   // more contours or points than SequenceLimits allows
};

class GlyphError : public std::runtime_error {
 public:
  GlyphError(GlyphErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  GlyphErrorKind kind() const { return kind_; }

 private:
  GlyphErrorKind kind_;
};

// A parsed font: raw bytes plus the table offsets needed for glyph lookup.
struct FontFile {
  std::vector<std::uint8_t> bytes;
  double units_per_em = 0.0;
  int index_to_loc_format = 0;  // 0 = 16-bit loca entries, 1 = 32-bit
  std::uint32_t num_glyphs = 0;
  std::uint32_t loca_offset = 0;
  std::uint32_t loca_length = 0;
  std::uint32_t glyf_offset = 0;
  std::uint32_t glyf_length = 0;
  std::uint32_t cmap_offset = 0;
  std::uint32_t cmap_length = 0;
  std::string family_name;  // name table entry 1, empty if unavailable
};

// Raw outline data in font units, before normalization.
struct RawOutline {
  struct Point {
    double x = 0.0;
    double y = 0.0;
    bool on_curve = true;
  };
  std::vector<std::vector<Point>> contours;
};

// Parses an sfnt container.  Throws std::runtime_error on malformed or
// non-TrueType (e.g. CFF) fonts.
FontFile parse_font(std::vector<std::uint8_t> bytes);
FontFile load_font(const std::string& path);

// Maps a Unicode codepoint to a glyph index via cmap (formats 4 and 12).
// Returns 0 (.notdef) when the codepoint is unmapped.
std::uint32_t glyph_index_for(const FontFile& font, std::uint32_t codepoint);

// Reads the outline of a glyph index, resolving translation-only composite
// references.  Throws GlyphError.
RawOutline read_outline(const FontFile& font, std::uint32_t glyph_index);

// Converts a raw outline to a GlyphSequence: coordinates divided by
// units-per-em, translated so the bounding-box minimum maps to >= 0, clamped
// to [0,1]; each contour's start point duplicated at its end; 1-based
// contour/point IDs in order of appearance.  Throws GlyphError on capacity.
GlyphSequence outline_to_sequence(const RawOutline& outline,
                                  double units_per_em,
                                  const std::string& font_id,
                                  const std::string& glyph_label,
                                  const SequenceLimits& limits = {});

// extract_glyph = cmap lookup + read_outline + outline_to_sequence.
GlyphSequence extract_glyph(const FontFile& font, std::uint32_t codepoint,
                            const std::string& font_id,
                            const std::string& glyph_label,
                            const SequenceLimits& limits = {});

// Style inference from the family name (keyword match).  Returns nullopt for
// monospace fonts, which the corpus excludes.
std::optional<FontStyle> infer_style(const std::string& family_name);

struct IngestOptions {
  std::string charset = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  SequenceLimits limits;
};

struct IngestSkip {
  std::string glyph_label;
  std::string reason;
};

// Extracts every charset glyph that parses cleanly; skipped glyphs (absent,
// unsupported, over capacity) are listed in `skips`.
FontRecord ingest_font(const FontFile& font, const std::string& font_id,
                       FontStyle style, const IngestOptions& options,
                       std::vector<IngestSkip>* skips = nullptr);

}  // namespace glyphmend
