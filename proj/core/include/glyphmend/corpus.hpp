#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "glyphmend/contour.hpp"

namespace glyphmend {

enum class FontStyle { kSerif, kSansSerif, kDisplay, kHandwriting };

const char* font_style_name(FontStyle style);
/// Case- and separator-insensitive ("Sans-Serif", "sans_serif", "SANSSERIF").
std::optional<FontStyle> parse_font_style(const std::string& name);

/// One font's worth of extracted glyphs, keyed by glyph label.
struct FontRecord {
  std::string font_id;
  FontStyle style = FontStyle::kSansSerif;
  std::map<std::string, GlyphSequence> glyphs;
};

/// Font-disjoint train/validation/test partition.
struct CorpusSplit {
  std::vector<FontRecord> train;
  std::vector<FontRecord> validation;
  std::vector<FontRecord> test;
};

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

/// Deterministic font-level shuffle by seed, then a cumulative-rounding cut
/// at the ratio boundaries. Every split with a positive ratio receives at
/// least one font (borrowed from the largest split when rounding leaves one
/// empty). Throws when ratios do not sum to 1 or there are fewer fonts than
/// positive-ratio splits.
CorpusSplit split_fonts(std::vector<FontRecord> fonts, const SplitRatios& ratios,
                        std::uint64_t seed);

/// Glyphs of all fonts flattened in font order, label order within a font.
std::vector<GlyphSequence> flatten_glyphs(const std::vector<FontRecord>& fonts);

// Corpus manifest: line-delimited {font_id, style, split, glyphs}.
struct ManifestEntry {
  std::string font_id;
  FontStyle style = FontStyle::kSansSerif;
  std::string split;
  int glyph_count = 0;
};

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

std::vector<ManifestEntry> manifest_for_split(const CorpusSplit& split);

/// font_id -> style lookup built from a manifest.
std::map<std::string, FontStyle> style_index(const std::vector<ManifestEntry>& entries);

}  // namespace glyphmend
