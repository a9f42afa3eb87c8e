#pragma once

#include <cstdint>
#include <vector>

#include "glyphmend/contour.hpp"
#include "glyphmend/corpus.hpp"

namespace glyphmend {

struct SynthOptions {
  int glyphs_per_font = 1;
  /// Stored contour length bounds, closure duplicate included.
  int min_points = 8;
  int max_points = 60;
  SequenceLimits limits;
};

/// Procedurally generated corpus: rectangles, L/T/H polygons, rings and
/// double rings (holes wound opposite to the outer contour), optional
/// rounded corners via off-curve points, and wobbly blobs. 1-3 contours per
/// glyph, every glyph closed and validation-clean. Deterministic per seed;
/// each font draws from mt19937_64(mix_seed(seed, font_index)).
std::vector<FontRecord> synth_glyphs(int count, std::uint64_t seed,
                                     const SynthOptions& opts = {});

}  // namespace glyphmend
