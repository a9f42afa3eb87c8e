// Autoregressive completion: greedy decoding of a corrupted glyph into a
// full contour sequence, plus assembly of raw predicted records into valid
// GlyphSequence values.
#pragma once

#include <string>
#include <vector>

#include "glyphmend/batching.hpp"
#include "glyphmend/contour.hpp"
#include "glyphmend/net/model.hpp"

namespace glyphmend {

// Builds a GlyphSequence from predicted interior records (hard argmax
// assembly).  Records are grouped by predicted contour ID in emission order
// (first appearance fixes contour order); when predicted IDs are not
// contiguous they are replaced by emission-order renumbering, with the raw
// predictions kept in CompletionMeta.  Degenerate outputs are repaired so
// the result always validates: a contour-class-0 record continues the
// previous contour, contours overflowing the point cap split, records
// overflowing the contour cap are dropped (flagged unterminated), and
// coordinates are clamped to [0,1].  The output keeps corrupted=true since
// closure is never force-repaired.
GlyphSequence assemble(const std::vector<TokenRecord>& records,
                       const std::string& font_id, const std::string& glyph_label,
                       bool unterminated, const SequenceLimits& limits = {});

// Greedy completion: the encoder consumes the tokenized corrupted sequence
// exactly once; decoding starts from sos, feeds each argmax-assembled record
// back, and stops at a predicted special flag (eos, or the degenerate sos)
// or when max_len is reached (flagged "unterminated" in the metadata).
template <typename Scalar>
GlyphSequence complete(const net::EncDecModel<Scalar>& model,
                       const GlyphSequence& corrupted,
                       const SequenceLimits& limits = {}) {
  const std::vector<TokenRecord> enc_tokens = to_tokens(tokenize(corrupted, limits));
  const net::ForwardCtx ctx;  // evaluation mode: deterministic
  const net::Mat<Scalar> memory =
      model.encode(enc_tokens.data(), enc_tokens.size(), nullptr, ctx, nullptr);

  std::vector<TokenRecord> decoded;
  TokenRecord sos;
  sos.flag = flag_class(CurveFlag::kSos);
  decoded.push_back(sos);

  const int max_interior = limits.max_tokens() - 2;
  bool unterminated = true;
  std::vector<TokenRecord> interior;
  while (static_cast<int>(interior.size()) < max_interior) {
    const net::HeadsOut<Scalar> out = model.decode(
        decoded.data(), decoded.size(), memory, nullptr, nullptr, ctx, nullptr);
    const Eigen::Index last = out.coords.rows() - 1;
    TokenRecord next;
    next.x = static_cast<double>(out.coords(last, 0));
    next.y = static_cast<double>(out.coords(last, 1));
    Eigen::Index arg = 0;
    out.contour_logits.row(last).maxCoeff(&arg);
    next.contour = static_cast<int>(arg);
    out.point_logits.row(last).maxCoeff(&arg);
    next.point = static_cast<int>(arg);
    out.flag_logits.row(last).maxCoeff(&arg);
    next.flag = static_cast<int>(arg);
    if (next.is_special()) {
      unterminated = false;
      break;
    }
    interior.push_back(next);
    decoded.push_back(next);
  }
  GlyphSequence result = assemble(interior, corrupted.font_id,
                                  corrupted.glyph_label, unterminated, limits);
  return result;
}

// Baseline completion: inserts placeholder records at the oracle-provided
// deleted slots, runs one forward pass, and assembles the per-position
// predictions.  Output length equals the ground-truth length by
// construction.  Throws on oracle/meta mismatch.
template <typename Scalar>
GlyphSequence complete_baseline(const net::EncoderOnlyModel<Scalar>& model,
                                const GlyphSequence& corrupted,
                                const CorruptionMeta& meta,
                                const SequenceLimits& limits = {}) {
  const std::vector<TokenRecord> input = make_placeheld_input(corrupted, meta);
  const net::ForwardCtx ctx;
  const net::HeadsOut<Scalar> out =
      model.forward(input.data(), input.size(), nullptr, ctx, nullptr);

  std::vector<TokenRecord> interior;
  // Positions 1 .. n-2 are the interior (0 is sos, n-1 is eos).
  for (std::size_t t = 1; t + 1 < input.size(); ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    TokenRecord rec;
    rec.x = static_cast<double>(out.coords(row, 0));
    rec.y = static_cast<double>(out.coords(row, 1));
    Eigen::Index arg = 0;
    out.contour_logits.row(row).maxCoeff(&arg);
    rec.contour = static_cast<int>(arg);
    out.point_logits.row(row).maxCoeff(&arg);
    rec.point = static_cast<int>(arg);
    out.flag_logits.row(row).maxCoeff(&arg);
    rec.flag = static_cast<int>(arg);
    // A predicted special flag cannot terminate a fixed-length
    // reconstruction; coerce it to on-curve and let assemble record raw IDs.
    if (rec.is_special()) rec.flag = flag_class(CurveFlag::kOnCurve);
    interior.push_back(rec);
  }
  return assemble(interior, corrupted.font_id, corrupted.glyph_label,
                  /*unterminated=*/false, limits);
}

}  // namespace glyphmend
