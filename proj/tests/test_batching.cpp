#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "glyphmend/batching.hpp"
#include "glyphmend/contour.hpp"
#include "glyphmend/corruption.hpp"
#include "glyphmend/rng.hpp"
#include "glyphmend/synth.hpp"

namespace {

using glyphmend::BaselineExample;
using glyphmend::ControlPoint;
using glyphmend::CurveFlag;
using glyphmend::GlyphSequence;
using glyphmend::PaddedBatch;
using glyphmend::SeqExample;
using glyphmend::TokenRecord;

GlyphSequence simple_glyph(int n, const char* label = "g") {
  GlyphSequence seq;
  seq.font_id = "f";
  seq.glyph_label = label;
  seq.corrupted = true;
  for (int i = 1; i <= n; ++i) {
    ControlPoint p;
    p.x = i / 100.0;
    p.y = 0.5;
    p.contour_id = 1;
    p.point_id = i;
    p.flag = i % 2 == 0 ? CurveFlag::kOffCurve : CurveFlag::kOnCurve;
    seq.points.push_back(p);
  }
  return seq;
}

}  // namespace

TEST_CASE("to_token maps IDs to class indices") {
  ControlPoint p;
  p.x = 0.25;
  p.y = 0.75;
  p.contour_id = 3;
  p.point_id = 17;
  p.flag = CurveFlag::kOffCurve;
  const TokenRecord t = glyphmend::to_token(p);
  CHECK(t.x == 0.25);
  CHECK(t.y == 0.75);
  CHECK(t.contour == 3);
  CHECK(t.point == 17);
  CHECK(t.flag == 1);
  CHECK_FALSE(t.is_special());

  ControlPoint sos;
  sos.contour_id = -1;
  sos.point_id = -1;
  sos.flag = CurveFlag::kSos;
  const TokenRecord s = glyphmend::to_token(sos);
  CHECK(s.contour == 0);  // special IDs collapse to class 0
  CHECK(s.point == 0);
  CHECK(s.flag == 2);
  CHECK(s.is_special());
}

TEST_CASE("to_tokens preserves the sos/eos frame") {
  const auto tokens = glyphmend::to_tokens(glyphmend::tokenize(simple_glyph(3)));
  REQUIRE(tokens.size() == 5);
  CHECK(tokens.front().flag == 2);
  CHECK(tokens.back().flag == 3);
  CHECK(tokens[1].contour == 1);
  CHECK(tokens[1].point == 1);
}

TEST_CASE("make_examples pairs aligned files and rejects misalignment") {
  GlyphSequence input = simple_glyph(4);
  GlyphSequence target = simple_glyph(6);
  target.corrupted = false;
  target.points.back().x = target.points.front().x;  // close it
  target.points.back().y = target.points.front().y;

  const auto examples = glyphmend::make_examples({input}, {target});
  REQUIRE(examples.size() == 1);
  CHECK(examples[0].encoder_input.size() == 6);  // 4 + frame
  CHECK(examples[0].target.size() == 8);         // 6 + frame

  CHECK_THROWS_AS((void)glyphmend::make_examples({input}, {}),
                  std::invalid_argument);
  GlyphSequence wrong = target;
  wrong.glyph_label = "other";
  CHECK_THROWS_AS((void)glyphmend::make_examples({input}, {wrong}),
                  std::invalid_argument);
}

TEST_CASE("pad_batch implements the teacher-forcing shift") {
  SeqExample ex;
  ex.encoder_input = glyphmend::to_tokens(glyphmend::tokenize(simple_glyph(2)));
  ex.target = glyphmend::to_tokens(glyphmend::tokenize(simple_glyph(4)));
  const PaddedBatch batch = glyphmend::pad_batch({&ex});
  CHECK(batch.size == 1);
  CHECK(batch.encoder_len == 4);
  CHECK(batch.decoder_len == 5);  // |target| - 1

  // decoder_input = target[0..n-2] (sos-led), decoder_target = target[1..]
  for (int t = 0; t < 5; ++t) {
    CHECK(batch.decoder_input[t].flag == ex.target[t].flag);
    CHECK(batch.decoder_target[t].flag == ex.target[t + 1].flag);
    CHECK(batch.decoder_input[t + 1].point ==
          batch.decoder_target[t].point);  // shifted views overlap
  }
  CHECK(batch.decoder_input[0].flag == 2);
  CHECK(batch.decoder_target[4].flag == 3);
  for (int t = 0; t < 5; ++t) CHECK(batch.decoder_mask[t] == 1);
  for (int t = 0; t < 4; ++t) CHECK(batch.encoder_mask[t] == 1);
}

TEST_CASE("pad_batch pads to the longest sequences with zeroed masks") {
  SeqExample small;
  small.encoder_input = glyphmend::to_tokens(glyphmend::tokenize(simple_glyph(2)));
  small.target = glyphmend::to_tokens(glyphmend::tokenize(simple_glyph(2)));
  SeqExample large;
  large.encoder_input = glyphmend::to_tokens(glyphmend::tokenize(simple_glyph(7)));
  large.target = glyphmend::to_tokens(glyphmend::tokenize(simple_glyph(9)));

  const PaddedBatch batch = glyphmend::pad_batch({&small, &large});
  CHECK(batch.size == 2);
  CHECK(batch.encoder_len == 9);
  CHECK(batch.decoder_len == 10);
  // Row 0 mask: 4 real encoder positions then pads.
  for (int t = 0; t < batch.encoder_len; ++t) {
    CHECK(batch.encoder_mask[t] == (t < 4 ? 1 : 0));
  }
  // Row 1 mask: all real.
  for (int t = 0; t < batch.encoder_len; ++t) {
    CHECK(batch.encoder_mask[batch.encoder_len + t] == 1);
  }
  for (int t = 0; t < batch.decoder_len; ++t) {
    CHECK(batch.decoder_mask[t] == (t < 3 ? 1 : 0));
  }
  // Pad records carry the eos flag so they stay in the embedding code space.
  CHECK(batch.decoder_target[5].flag == 3);
  CHECK(batch.decoder_target[5].x == 0.0);
}

TEST_CASE("epoch_batches partitions all examples deterministically") {
  const auto a = glyphmend::epoch_batches(23, 5, 7, 2);
  const auto b = glyphmend::epoch_batches(23, 5, 7, 2);
  const auto other_epoch = glyphmend::epoch_batches(23, 5, 7, 3);
  CHECK(a == b);
  CHECK(a != other_epoch);

  REQUIRE(a.size() == 5);  // ceil(23 / 5)
  std::set<std::size_t> seen;
  for (const auto& batch : a) {
    CHECK(batch.size() <= 5);
    for (std::size_t idx : batch) {
      CHECK(idx < 23);
      CHECK(seen.insert(idx).second);  // no duplicates across batches
    }
  }
  CHECK(seen.size() == 23);

  // The shuffle order follows the documented seed derivation.
  std::mt19937_64 rng(glyphmend::mix_seed(7, 2));
  const auto order = glyphmend::shuffled_indices(rng, 23);
  std::size_t k = 0;
  for (const auto& batch : a) {
    for (std::size_t idx : batch) {
      CHECK(idx == order[k]);
      ++k;
    }
  }
}

TEST_CASE("make_placeheld_input restores ground-truth slots with placeholders") {
  GlyphSequence original = simple_glyph(8);
  original.corrupted = false;
  const GlyphSequence corrupted = glyphmend::random_delete(
      original, {glyphmend::DeletionMode::kRandom, 0.3, 21});
  REQUIRE(corrupted.corruption.has_value());
  const auto& meta = *corrupted.corruption;
  const int deleted = static_cast<int>(meta.deleted_indices.size());
  REQUIRE(deleted > 0);

  const std::vector<TokenRecord> tokens =
      glyphmend::make_placeheld_input(corrupted, meta);
  REQUIRE(tokens.size() == original.points.size() + 2);
  CHECK(tokens.front().flag == 2);
  CHECK(tokens.back().flag == 3);

  std::size_t survivor = 0;
  for (std::size_t i = 0; i < original.points.size(); ++i) {
    const TokenRecord& tok = tokens[i + 1];
    const bool was_deleted =
        std::find(meta.deleted_indices.begin(), meta.deleted_indices.end(),
                  static_cast<int>(i)) != meta.deleted_indices.end();
    // Every slot carries the ground-truth IDs (indication comes from the
    // oracle, never from ID gaps).
    CHECK(tok.contour == original.points[i].contour_id);
    CHECK(tok.point == original.points[i].point_id);
    if (was_deleted) {
      CHECK(tok.x == 0.0);
      CHECK(tok.y == 0.0);
      CHECK(tok.flag == glyphmend::kPlaceholderFlagClass);
    } else {
      CHECK(tok.x == corrupted.points[survivor].x);
      CHECK(tok.flag ==
            glyphmend::flag_class(corrupted.points[survivor].flag));
      ++survivor;
    }
  }
  CHECK(survivor == corrupted.points.size());
}

TEST_CASE("make_placeheld_input rejects inconsistent oracle meta") {
  GlyphSequence original = simple_glyph(8);
  original.corrupted = false;
  const GlyphSequence corrupted = glyphmend::random_delete(
      original, {glyphmend::DeletionMode::kRandom, 0.3, 4});
  glyphmend::CorruptionMeta bad = *corrupted.corruption;
  bad.deleted_indices.push_back(3);  // count no longer matches
  CHECK_THROWS_WITH_AS(
      (void)glyphmend::make_placeheld_input(corrupted, bad),
      doctest::Contains("oracle/meta mismatch"), std::invalid_argument);

  glyphmend::CorruptionMeta out_of_range = *corrupted.corruption;
  out_of_range.deleted_indices.back() = 99;
  CHECK_THROWS_AS(
      (void)glyphmend::make_placeheld_input(corrupted, out_of_range),
      std::invalid_argument);
}

TEST_CASE("pad_baseline_batch aligns equal-length rows") {
  GlyphSequence original = simple_glyph(6);
  original.corrupted = false;
  const GlyphSequence corrupted = glyphmend::random_delete(
      original, {glyphmend::DeletionMode::kRandom, 0.3, 9});

  BaselineExample ex;
  ex.input = glyphmend::make_placeheld_input(corrupted, *corrupted.corruption);
  ex.target = glyphmend::to_tokens(glyphmend::tokenize(original));
  REQUIRE(ex.input.size() == ex.target.size());

  BaselineExample shorter;
  GlyphSequence original2 = simple_glyph(3);
  original2.corrupted = false;
  const GlyphSequence corrupted2 = glyphmend::random_delete(
      original2, {glyphmend::DeletionMode::kRandom, 0.3, 9});
  shorter.input =
      glyphmend::make_placeheld_input(corrupted2, *corrupted2.corruption);
  shorter.target = glyphmend::to_tokens(glyphmend::tokenize(original2));

  const PaddedBatch batch = glyphmend::pad_baseline_batch({&ex, &shorter});
  CHECK(batch.size == 2);
  CHECK(batch.encoder_len == 8);
  CHECK(batch.decoder_len == 8);  // positions align one-to-one
  for (int t = 0; t < 8; ++t) {
    CHECK(batch.encoder_mask[t] == 1);
    CHECK(batch.decoder_mask[t] == 1);
    CHECK(batch.encoder_mask[8 + t] == (t < 5 ? 1 : 0));
    CHECK(batch.decoder_mask[8 + t] == (t < 5 ? 1 : 0));
  }
  // Targets sit in decoder_target at the same positions as the input.
  CHECK(batch.decoder_target[0].flag == 2);
  CHECK(batch.decoder_target[1].point == 1);

  BaselineExample broken = ex;
  broken.target.pop_back();
  CHECK_THROWS_AS((void)glyphmend::pad_baseline_batch({&broken}),
                  std::invalid_argument);
}
