#include "glyphmend/batching.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "glyphmend/rng.hpp"

namespace glyphmend {

TokenRecord to_token(const ControlPoint& p) {
  TokenRecord t;
  t.x = p.x;
  t.y = p.y;
  t.contour = contour_class(p.contour_id);
  t.point = point_class(p.point_id);
  t.flag = flag_class(p.flag);
  return t;
}

std::vector<TokenRecord> to_tokens(const TokenizedSequence& seq) {
  std::vector<TokenRecord> out;
  out.reserve(seq.records.size());
  for (const ControlPoint& p : seq.records) out.push_back(to_token(p));
  return out;
}

std::vector<SeqExample> make_examples(const std::vector<GlyphSequence>& inputs,
                                      const std::vector<GlyphSequence>& targets,
                                      const SequenceLimits& limits) {
  if (inputs.size() != targets.size()) {
    throw std::invalid_argument("input/target files differ in length: " +
                                std::to_string(inputs.size()) + " vs " +
                                std::to_string(targets.size()));
  }
  std::vector<SeqExample> out;
  out.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].font_id != targets[i].font_id ||
        inputs[i].glyph_label != targets[i].glyph_label) {
      throw std::invalid_argument(
          "input/target mismatch at line " + std::to_string(i + 1) + ": " +
          inputs[i].font_id + "/" + inputs[i].glyph_label + " vs " +
          targets[i].font_id + "/" + targets[i].glyph_label);
    }
    SeqExample ex;
    ex.encoder_input = to_tokens(tokenize(inputs[i], limits));
    ex.target = to_tokens(tokenize(targets[i], limits));
    out.push_back(std::move(ex));
  }
  return out;
}

namespace {

// Content of padded positions; masked out of attention and loss, so the
// value only needs to be deterministic.
TokenRecord pad_record() {
  TokenRecord t;
  t.flag = flag_class(CurveFlag::kEos);
  return t;
}

}  // namespace

PaddedBatch pad_batch(const std::vector<const SeqExample*>& examples) {
  PaddedBatch batch;
  batch.size = static_cast<int>(examples.size());
  for (const SeqExample* ex : examples) {
    batch.encoder_len =
        std::max(batch.encoder_len, static_cast<int>(ex->encoder_input.size()));
    // Teacher forcing drops one position from each side of the target.
    batch.decoder_len =
        std::max(batch.decoder_len, static_cast<int>(ex->target.size()) - 1);
  }
  const std::size_t enc_total =
      static_cast<std::size_t>(batch.size) * static_cast<std::size_t>(batch.encoder_len);
  const std::size_t dec_total =
      static_cast<std::size_t>(batch.size) * static_cast<std::size_t>(batch.decoder_len);
  batch.encoder_input.assign(enc_total, pad_record());
  batch.encoder_mask.assign(enc_total, 0);
  batch.decoder_input.assign(dec_total, pad_record());
  batch.decoder_target.assign(dec_total, pad_record());
  batch.decoder_mask.assign(dec_total, 0);

  for (int b = 0; b < batch.size; ++b) {
    const SeqExample& ex = *examples[static_cast<std::size_t>(b)];
    const std::size_t enc_base =
        static_cast<std::size_t>(b) * static_cast<std::size_t>(batch.encoder_len);
    for (std::size_t t = 0; t < ex.encoder_input.size(); ++t) {
      batch.encoder_input[enc_base + t] = ex.encoder_input[t];
      batch.encoder_mask[enc_base + t] = 1;
    }
    const std::size_t dec_base =
        static_cast<std::size_t>(b) * static_cast<std::size_t>(batch.decoder_len);
    const std::size_t steps = ex.target.size() - 1;
    for (std::size_t t = 0; t < steps; ++t) {
      batch.decoder_input[dec_base + t] = ex.target[t];
      batch.decoder_target[dec_base + t] = ex.target[t + 1];
      batch.decoder_mask[dec_base + t] = 1;
    }
  }
  return batch;
}

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t example_count,
                                                    std::size_t batch_size,
                                                    std::uint64_t seed,
                                                    std::uint64_t epoch) {
  if (batch_size == 0) {
    throw std::invalid_argument("batch size must be at least 1");
  }
  std::mt19937_64 rng(mix_seed(seed, epoch));
  const std::vector<std::size_t> order = shuffled_indices(rng, example_count);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t at = 0; at < order.size(); at += batch_size) {
    const std::size_t end = std::min(at + batch_size, order.size());
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(at),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

std::vector<TokenRecord> make_placeheld_input(const GlyphSequence& corrupted,
                                              const CorruptionMeta& meta) {
  std::size_t original_len = 0;
  for (int size : meta.original_contour_sizes) {
    if (size <= 0) {
      throw std::invalid_argument("oracle/meta mismatch: non-positive contour size");
    }
    original_len += static_cast<std::size_t>(size);
  }
  if (corrupted.points.size() + meta.deleted_indices.size() != original_len) {
    throw std::invalid_argument(
        "oracle/meta mismatch: " + std::to_string(corrupted.points.size()) +
        " survivors + " + std::to_string(meta.deleted_indices.size()) +
        " deleted != " + std::to_string(original_len) + " original points");
  }
  std::vector<bool> deleted(original_len, false);
  for (int idx : meta.deleted_indices) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= original_len ||
        deleted[static_cast<std::size_t>(idx)]) {
      throw std::invalid_argument(
          "oracle/meta mismatch: bad deleted index " + std::to_string(idx));
    }
    deleted[static_cast<std::size_t>(idx)] = true;
  }

  // Original IDs at flattened position i follow from the contour sizes.
  std::vector<TokenRecord> out;
  out.reserve(original_len + 2);
  TokenRecord sos;
  sos.flag = flag_class(CurveFlag::kSos);
  out.push_back(sos);

  std::size_t i = 0;
  std::size_t survivor = 0;
  int contour_id = 0;
  for (int size : meta.original_contour_sizes) {
    ++contour_id;
    for (int point_id = 1; point_id <= size; ++point_id, ++i) {
      TokenRecord t;
      t.contour = contour_class(contour_id);
      t.point = point_class(point_id);
      if (deleted[i]) {
        t.x = 0.0;
        t.y = 0.0;
        t.flag = kPlaceholderFlagClass;
      } else {
        const ControlPoint& p = corrupted.points[survivor++];
        t.x = p.x;
        t.y = p.y;
        t.flag = flag_class(p.flag);
      }
      out.push_back(t);
    }
  }
  TokenRecord eos;
  eos.flag = flag_class(CurveFlag::kEos);
  out.push_back(eos);
  return out;
}

PaddedBatch pad_baseline_batch(const std::vector<const BaselineExample*>& examples) {
  PaddedBatch batch;
  batch.size = static_cast<int>(examples.size());
  for (const BaselineExample* ex : examples) {
    if (ex->input.size() != ex->target.size()) {
      throw std::invalid_argument("baseline input/target lengths differ");
    }
    batch.encoder_len =
        std::max(batch.encoder_len, static_cast<int>(ex->input.size()));
  }
  batch.decoder_len = batch.encoder_len;
  const std::size_t total =
      static_cast<std::size_t>(batch.size) * static_cast<std::size_t>(batch.encoder_len);
  batch.encoder_input.assign(total, pad_record());
  batch.encoder_mask.assign(total, 0);
  batch.decoder_target.assign(total, pad_record());
  batch.decoder_mask.assign(total, 0);

  for (int b = 0; b < batch.size; ++b) {
    const BaselineExample& ex = *examples[static_cast<std::size_t>(b)];
    const std::size_t base =
        static_cast<std::size_t>(b) * static_cast<std::size_t>(batch.encoder_len);
    for (std::size_t t = 0; t < ex.input.size(); ++t) {
      batch.encoder_input[base + t] = ex.input[t];
      batch.encoder_mask[base + t] = 1;
      batch.decoder_target[base + t] = ex.target[t];
      batch.decoder_mask[base + t] = 1;
    }
  }
  return batch;
}

}  // namespace glyphmend
