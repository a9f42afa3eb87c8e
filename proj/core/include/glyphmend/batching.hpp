// Batch preparation: numeric token records, teacher-forcing shifts, padding
// with masks, deterministic epoch shuffling, and the placeholder inputs used
// by the encoder-only baseline.
#pragma once

#include <cstdint>
#include <vector>

#include "glyphmend/contour.hpp"

namespace glyphmend {

// Flag class for baseline placeholder records: embeds as an all-zero flag
// one-hot (outside the code space), explicitly marking "missing here".
inline constexpr int kPlaceholderFlagClass = -1;

// Network-facing view of one record: raw coordinates plus categorical class
// indices (one-hot encoded inside the embedding).
struct TokenRecord {
  double x = 0.0;
  double y = 0.0;
  int contour = 0;  // 0..C_max (0 = sos/eos)
  int point = 0;    // 0..P_max (0 = sos/eos)
  int flag = 0;     // 0..3, or kPlaceholderFlagClass

  bool is_special() const {
    return flag == flag_class(CurveFlag::kSos) || flag == flag_class(CurveFlag::kEos);
  }
};

TokenRecord to_token(const ControlPoint& p);
std::vector<TokenRecord> to_tokens(const TokenizedSequence& seq);

// One training pair: the tokenized corrupted input and tokenized ground
// truth (both sos-led and eos-terminated).
struct SeqExample {
  std::vector<TokenRecord> encoder_input;
  std::vector<TokenRecord> target;
};

// Pairs aligned input/target sequence lists into examples.  Throws when the
// lists differ in length or (font_id, glyph_label) keys disagree on a line.
std::vector<SeqExample> make_examples(const std::vector<GlyphSequence>& inputs,
                                      const std::vector<GlyphSequence>& targets,
                                      const SequenceLimits& limits = {});

// A batch padded to its longest sequences, stored batch-major
// ([b * len + t]).  Mask value 1 marks a real position, 0 a pad.
//
// Teacher forcing: decoder_input is the target shifted right (sos-led,
// length |target| - 1) and decoder_target the target shifted left
// (eos-terminated), so decoder_target[t] == decoder_input[t + 1].
struct PaddedBatch {
  int size = 0;
  int encoder_len = 0;
  int decoder_len = 0;
  std::vector<TokenRecord> encoder_input;
  std::vector<std::uint8_t> encoder_mask;
  std::vector<TokenRecord> decoder_input;
  std::vector<TokenRecord> decoder_target;
  std::vector<std::uint8_t> decoder_mask;
};

PaddedBatch pad_batch(const std::vector<const SeqExample*>& examples);

// Deterministic per-epoch shuffle: example indices chunked into batches of
// at most batch_size, order derived from (seed, epoch).
std::vector<std::vector<std::size_t>> epoch_batches(std::size_t example_count,
                                                    std::size_t batch_size,
                                                    std::uint64_t seed,
                                                    std::uint64_t epoch);

// Baseline input: the ground-truth-length token list with surviving records
// at their original slots and placeholder records (coords (0,0),
// ground-truth contour/point IDs, all-zero flag) at deleted slots, framed by
// sos/eos.  Needs the oracle corruption meta; throws "oracle/meta mismatch"
// when survivor count or indices disagree with it.
std::vector<TokenRecord> make_placeheld_input(const GlyphSequence& corrupted,
                                              const CorruptionMeta& meta);

// Baseline batches align input and target position-by-position (same
// length); decoder_input stays empty and encoder/decoder lengths are equal.
struct BaselineExample {
  std::vector<TokenRecord> input;   // placeheld, sos/eos framed
  std::vector<TokenRecord> target;  // tokenized ground truth, same length
};

PaddedBatch pad_baseline_batch(const std::vector<const BaselineExample*>& examples);

}  // namespace glyphmend
