#include "glyphmend/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "glyphmend/rng.hpp"

namespace glyphmend {

namespace {

std::vector<int> contour_sizes(const GlyphSequence& seq) {
  std::vector<int> sizes;
  int last_id = 0;
  bool first = true;
  for (const ControlPoint& p : seq.points) {
    if (first || p.contour_id != last_id) {
      sizes.push_back(0);
      last_id = p.contour_id;
      first = false;
    }
    ++sizes.back();
  }
  return sizes;
}

GlyphSequence apply_deletion(const GlyphSequence& seq, const CorruptionSpec& spec,
                             std::vector<int> removed_sorted) {
  GlyphSequence out;
  out.font_id = seq.font_id;
  out.glyph_label = seq.glyph_label;
  out.corrupted = true;

  CorruptionMeta meta;
  meta.mode = spec.mode;
  meta.rate = spec.rate;
  meta.original_contour_sizes = contour_sizes(seq);
  meta.deleted_indices = removed_sorted;

  std::size_t next_removed = 0;
  out.points.reserve(seq.points.size() - removed_sorted.size());
  for (std::size_t i = 0; i < seq.points.size(); ++i) {
    if (next_removed < removed_sorted.size() &&
        static_cast<std::size_t>(removed_sorted[next_removed]) == i) {
      meta.deleted_points.push_back(seq.points[i]);
      ++next_removed;
    } else {
      out.points.push_back(seq.points[i]);
    }
  }
  out = renumber(std::move(out));
  out.corruption = std::move(meta);
  return out;
}

int checked_deleted_count(const GlyphSequence& seq, const CorruptionSpec& spec) {
  if (seq.corrupted) {
    throw std::invalid_argument("deletion input is already corrupted");
  }
  if (spec.rate < 0.0 || spec.rate >= 1.0) {
    throw std::invalid_argument("deletion rate must lie in [0,1)");
  }
  const int n = static_cast<int>(seq.points.size());
  const int d = deleted_count(spec.rate, n);
  if (n > 0 && d >= n) {
    throw std::invalid_argument("rate too high: would delete " + std::to_string(d) +
                                " of " + std::to_string(n) + " points");
  }
  return d;
}

}  // namespace

int deleted_count(double rate, int n) {
  return static_cast<int>(std::floor(rate * n + 0.5));
}

GlyphSequence random_delete(const GlyphSequence& seq, const CorruptionSpec& spec) {
  if (spec.mode != DeletionMode::kRandom) {
    throw std::invalid_argument("random_delete called with non-random spec");
  }
  const int n = static_cast<int>(seq.points.size());
  const int d = checked_deleted_count(seq, spec);
  std::vector<int> removed;
  if (d > 0) {
    std::mt19937_64 rng(spec.seed);
    removed = sample_without_replacement(rng, n, d);
    std::sort(removed.begin(), removed.end());
  }
  return apply_deletion(seq, spec, std::move(removed));
}

GlyphSequence burst_delete(const GlyphSequence& seq, const CorruptionSpec& spec) {
  if (spec.mode != DeletionMode::kBurst) {
    throw std::invalid_argument("burst_delete called with non-burst spec");
  }
  const int n = static_cast<int>(seq.points.size());
  const int d = checked_deleted_count(seq, spec);
  std::vector<int> removed;
  if (d > 0) {
    std::mt19937_64 rng(spec.seed);
    const int center = static_cast<int>(draw_below(rng, static_cast<std::uint64_t>(n)));
    int start = center - (d - 1) / 2;
    start = std::max(0, std::min(start, n - d));
    removed.resize(d);
    for (int i = 0; i < d; ++i) removed[i] = start + i;
  }
  return apply_deletion(seq, spec, std::move(removed));
}

GlyphSequence corrupt(const GlyphSequence& seq, const CorruptionSpec& spec) {
  return spec.mode == DeletionMode::kRandom ? random_delete(seq, spec)
                                            : burst_delete(seq, spec);
}

std::uint64_t corruption_stream_seed(const CorruptionSpec& spec,
                                     const std::string& font_id,
                                     const std::string& glyph_label) {
  char rate_buf[32];
  std::snprintf(rate_buf, sizeof rate_buf, "%.6f", spec.rate);
  const std::string key = font_id + "/" + glyph_label + "/" +
                          deletion_mode_name(spec.mode) + "/" + rate_buf;
  return mix_seed(spec.seed, key);
}

std::vector<CorruptPair> corrupt_corpus(const std::vector<GlyphSequence>& glyphs,
                                        const std::vector<CorruptionSpec>& specs,
                                        CorpusCorruptionReport* report) {
  std::vector<CorruptPair> pairs;
  pairs.reserve(glyphs.size() * specs.size());
  for (const CorruptionSpec& spec : specs) {
    for (const GlyphSequence& glyph : glyphs) {
      CorruptionSpec per_glyph = spec;
      per_glyph.seed = corruption_stream_seed(spec, glyph.font_id, glyph.glyph_label);
      try {
        CorruptPair pair{corrupt(glyph, per_glyph), glyph};
        pairs.push_back(std::move(pair));
      } catch (const std::exception& e) {
        if (report) {
          report->skips.push_back(
              {glyph.font_id, glyph.glyph_label, spec.rate, e.what()});
        }
      }
    }
  }
  return pairs;
}

}  // namespace glyphmend
