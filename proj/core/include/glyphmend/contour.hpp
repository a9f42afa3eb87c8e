#pragma once

#include <optional>
#include <string>
#include <vector>

namespace glyphmend {

/// State of one control point. On/off-curve follow TrueType outline
/// semantics; sos/eos are the sequence delimiters and never appear inside
/// a glyph's point list. Serializes as a 4-dimensional one-hot vector.
enum class CurveFlag : int {
  kOnCurve = 0,
  kOffCurve = 1,
  kSos = 2,
  kEos = 3,
};

inline bool is_special(CurveFlag f) {
  return f == CurveFlag::kSos || f == CurveFlag::kEos;
}

/// Capacity caps for one glyph. Defaults match the dataset limits used
/// throughout: at most 4 contours of at most 102 points each.
struct SequenceLimits {
  int max_contours = 4;
  int max_points_per_contour = 102;

  int contour_classes() const { return max_contours + 1; }
  int point_classes() const { return max_points_per_contour + 1; }
  int max_tokens() const { return max_contours * max_points_per_contour + 2; }
};

/// One 5-field contour record: normalized coordinates in [0,1], a contour
/// ID and point ID (1-based; -1 reserved for sos/eos records), and a flag.
struct ControlPoint {
  double x = 0.0;
  double y = 0.0;
  int contour_id = -1;
  int point_id = -1;
  CurveFlag flag = CurveFlag::kOnCurve;

  bool operator==(const ControlPoint&) const = default;
};

// Categorical class indices: the special ID -1 maps to class 0, real IDs
// map to themselves. 5 contour classes and 103 point classes by default.
inline int contour_class(int contour_id) { return contour_id < 0 ? 0 : contour_id; }
inline int point_class(int point_id) { return point_id < 0 ? 0 : point_id; }
inline int flag_class(CurveFlag f) { return static_cast<int>(f); }

enum class DeletionMode { kRandom, kBurst };

const char* deletion_mode_name(DeletionMode mode);
std::optional<DeletionMode> parse_deletion_mode(const std::string& name);

/// Oracle-only record of what a corruption pass removed. Never part of the
/// model input; persisted only in the separate oracle sidecar file.
struct CorruptionMeta {
  DeletionMode mode = DeletionMode::kRandom;
  double rate = 0.0;
  /// Flattened indices into the original point list, ascending.
  std::vector<int> deleted_indices;
  /// Sizes of the original (uncorrupted) contours, closure point included.
  std::vector<int> original_contour_sizes;
  /// The removed records, with their original IDs.
  std::vector<ControlPoint> deleted_points;
};

/// Diagnostics attached by the decoder when it had to repair its own
/// output (non-contiguous predicted IDs) or ran out of length budget.
struct CompletionMeta {
  bool unterminated = false;
  std::vector<int> raw_contour_ids;
  std::vector<int> raw_point_ids;
};

/// Ordered control points of one glyph plus provenance. Points are grouped
/// by contour, contour IDs ascending and contiguous from 1, point IDs
/// contiguous from 1 within each contour. For uncorrupted glyphs every
/// contour stores its start point again at the end (explicit closure).
struct GlyphSequence {
  std::string font_id;
  std::string glyph_label;
  std::vector<ControlPoint> points;
  bool corrupted = false;
  std::optional<CorruptionMeta> corruption;
  std::optional<CompletionMeta> completion;
};

/// A glyph framed for the model: one sos record, the interior points, one
/// eos record. Length is always interior count + 2.
struct TokenizedSequence {
  std::vector<ControlPoint> records;
};

struct Violation {
  std::string rule;    // e.g. "point-contiguity", "closure"
  std::size_t index;   // offending flattened point index
  std::string detail;
};

/// Checks every GlyphSequence invariant (closure only when corrupted is
/// false). Returns one descriptor per violation; empty means well-formed.
std::vector<Violation> validate(const GlyphSequence& seq,
                                const SequenceLimits& limits = {});

/// Remaps contour IDs to 1..C and point IDs to 1..n per contour, both
/// contiguous, preserving order, coordinates and flags. Idempotent.
GlyphSequence renumber(GlyphSequence seq);

/// Frames a glyph with sos/eos records. Special records carry coordinates
/// (0,0) and IDs -1 by convention. Throws std::length_error when the
/// interior exceeds limits.max_tokens() - 2.
TokenizedSequence tokenize(const GlyphSequence& seq,
                           const SequenceLimits& limits = {});

/// Strips the sos/eos frame. Throws std::invalid_argument when the record
/// list is not sos-led and eos-terminated or has specials in the interior.
GlyphSequence detokenize(const TokenizedSequence& tokens);

}  // namespace glyphmend
