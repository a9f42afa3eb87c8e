#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glyphmend/contour.hpp"

namespace glyphmend {

/// One deletion setup: mode, deletion rate r in [0,1), and the base seed.
struct CorruptionSpec {
  DeletionMode mode = DeletionMode::kRandom;
  double rate = 0.0;
  std::uint64_t seed = 0;
};

/// round(r*N), half away from zero. The number of points removed.
int deleted_count(double rate, int n);

// Both deletion operations remove exactly deleted_count(r, N) points from
// the flattened point list, renumber the survivors so contour and point IDs
// are contiguous again (no ID gap reveals the deletion sites), set
// corrupted = true and record what was removed in the oracle meta.
// Throws std::invalid_argument("rate too high ...") when no point would
// survive, and std::invalid_argument when seq is already corrupted.
//
// Drawing procedure (see rng.hpp for the primitive contract):
//   random: removed set = sample_without_replacement(rng, N, D)
//   burst:  center = draw_below(rng, N); window start = center - (D-1)/2,
//           clamped to [0, N-D]; removed = [start, start+D)
// where rng = std::mt19937_64(spec.seed). With D = 0 nothing is drawn.

GlyphSequence random_delete(const GlyphSequence& seq, const CorruptionSpec& spec);
GlyphSequence burst_delete(const GlyphSequence& seq, const CorruptionSpec& spec);

/// Dispatch on spec.mode.
GlyphSequence corrupt(const GlyphSequence& seq, const CorruptionSpec& spec);

/// Per-glyph engine seed used by corpus-level corruption:
/// mix_seed(spec seed, font_id + "/" + glyph_label + "/" + mode + "/" +
/// rate formatted with 6 decimals).
std::uint64_t corruption_stream_seed(const CorruptionSpec& spec,
                                     const std::string& font_id,
                                     const std::string& glyph_label);

struct CorruptPair {
  GlyphSequence input;   // corrupted, oracle meta attached
  GlyphSequence target;  // the untouched ground truth
};

struct CorpusCorruptionReport {
  struct Skip {
    std::string font_id;
    std::string glyph_label;
    double rate;
    std::string reason;
  };
  std::vector<Skip> skips;
};

/// One corrupted copy per (glyph, spec), deterministic per (glyph,
/// spec.seed). Glyphs a spec cannot corrupt (rate too high for their size)
/// are skipped and reported, not fatal.
std::vector<CorruptPair> corrupt_corpus(const std::vector<GlyphSequence>& glyphs,
                                        const std::vector<CorruptionSpec>& specs,
                                        CorpusCorruptionReport* report = nullptr);

}  // namespace glyphmend
