#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "glyphmend/contour.hpp"

namespace glyphmend {

// Canonical sequence file: line-delimited JSON, one glyph per line.
// Fields: font_id, glyph_label, corrupted, points (array of
// {x, y, contour, index, on_curve}). Coordinates round-trip exactly.
// Completion diagnostics, when present, ride along in a "completion"
// sidecar field. Corruption oracle data never appears here; it goes to a
// separate oracle file (see write_oracle).

std::string sequence_to_json_line(const GlyphSequence& seq);
GlyphSequence sequence_from_json_line(const std::string& line);

void write_sequences(const std::filesystem::path& path,
                     const std::vector<GlyphSequence>& seqs);
std::vector<GlyphSequence> read_sequences(const std::filesystem::path& path);

// Oracle sidecar: per line {font_id, glyph_label, mode, rate,
// deleted_indices, original_contour_sizes, deleted_points}. Line order
// matches the paired input/target files.
struct OracleRecord {
  std::string font_id;
  std::string glyph_label;
  CorruptionMeta meta;
};

std::string oracle_to_json_line(const GlyphSequence& corrupted);
OracleRecord oracle_from_json_line(const std::string& line);

void write_oracle(const std::filesystem::path& path,
                  const std::vector<GlyphSequence>& corrupted_seqs);
std::vector<OracleRecord> read_oracle(const std::filesystem::path& path);

}  // namespace glyphmend
