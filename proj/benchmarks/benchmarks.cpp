// Microbenchmarks for the hot paths: rasterization, Hausdorff distance,
// corruption, encoder forward, one training step, and greedy decoding.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <utility>
#include <vector>

#include "glyphmend/batching.hpp"
#include "glyphmend/corpus.hpp"
#include "glyphmend/corruption.hpp"
#include "glyphmend/infer.hpp"
#include "glyphmend/metrics.hpp"
#include "glyphmend/net/losses.hpp"
#include "glyphmend/net/model.hpp"
#include "glyphmend/net/trainer.hpp"
#include "glyphmend/raster.hpp"
#include "glyphmend/synth.hpp"

using namespace glyphmend;

namespace {

// Shared fixtures, built once: a small synthetic corpus and its corruptions.
const std::vector<GlyphSequence>& corpus() {
  static const std::vector<GlyphSequence> glyphs =
      flatten_glyphs(synth_glyphs(16, 42, SynthOptions{}));
  return glyphs;
}

const std::vector<GlyphSequence>& corrupted() {
  static const std::vector<GlyphSequence> inputs = [] {
    std::vector<GlyphSequence> out;
    for (const GlyphSequence& g : corpus()) {
      CorruptionSpec spec{DeletionMode::kRandom, 0.3, 0};
      spec.seed = corruption_stream_seed(spec, g.font_id, g.glyph_label);
      out.push_back(corrupt(g, spec));
    }
    return out;
  }();
  return inputs;
}

net::ModelConfig bench_config(int d_model, int layers, int heads) {
  net::ModelConfig cfg;
  cfg.d_model = d_model;
  cfg.layers = layers;
  cfg.heads = heads;
  cfg.dropout = 0.0;
  return cfg;
}

}  // namespace

static void BM_Rasterize(benchmark::State& state) {
  const GlyphSequence& glyph = corpus()[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(rasterize(glyph, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_Rasterize)->Arg(100)->Arg(250);

static void BM_L1Distance(benchmark::State& state) {
  const RasterImage a = rasterize(corpus()[0]);
  const RasterImage b = rasterize(corpus()[1]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(l1_distance(a, b));
  }
}
BENCHMARK(BM_L1Distance);

static void BM_Hausdorff(benchmark::State& state) {
  const auto a = point_cloud(corpus()[0]);
  const auto b = point_cloud(corpus()[1]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hausdorff(a, b));
  }
  state.SetLabel(std::to_string(a.size()) + "x" + std::to_string(b.size()) +
                 " points");
}
BENCHMARK(BM_Hausdorff);

static void BM_Corrupt(benchmark::State& state) {
  const GlyphSequence& glyph = corpus()[0];
  const CorruptionSpec spec{DeletionMode::kRandom, 0.3, 7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(corrupt(glyph, spec));
  }
}
BENCHMARK(BM_Corrupt);

static void BM_EncoderForward(benchmark::State& state) {
  net::EncDecModel<float> model;
  model.init(bench_config(static_cast<int>(state.range(0)), 2, 4), 1);
  const std::vector<SeqExample> examples = {SeqExample{
      to_tokens(tokenize(corrupted()[0])), to_tokens(tokenize(corpus()[0]))}};
  const net::ForwardCtx ctx;
  const auto& tokens = examples[0].encoder_input;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        model.encode(tokens.data(), tokens.size(), nullptr, ctx, nullptr));
  }
  state.SetLabel(std::to_string(tokens.size()) + " tokens");
}
BENCHMARK(BM_EncoderForward)->Arg(64)->Arg(128)->Arg(256);

static void BM_TrainStep(benchmark::State& state) {
  net::EncDecModel<float> model;
  model.init(bench_config(64, 2, 4), 1);
  std::vector<SeqExample> examples;
  for (std::size_t i = 0; i < 4; ++i) {
    examples.push_back(SeqExample{to_tokens(tokenize(corrupted()[i])),
                                  to_tokens(tokenize(corpus()[i]))});
  }
  std::vector<const SeqExample*> items;
  for (const SeqExample& e : examples) items.push_back(&e);
  const PaddedBatch batch = pad_batch(items);
  const net::LossDenominators denoms = net::loss_denominators(batch);
  net::ForwardCtx ctx;
  ctx.train = true;
  ctx.dropout = 0.0;
  for (auto _ : state) {
    model.zero_grad();
    net::LossBreakdown sum;
    for (int b = 0; b < batch.size; ++b) {
      sum += net::detail::encdec_item(model, batch, b, denoms, ctx, true);
    }
    benchmark::DoNotOptimize(sum.total());
  }
  state.SetLabel("batch of 4, forward+backward");
}
BENCHMARK(BM_TrainStep);

static void BM_GreedyDecode(benchmark::State& state) {
  net::EncDecModel<float> model;
  model.init(bench_config(static_cast<int>(state.range(0)), 2, 4), 1);
  const GlyphSequence& input = corrupted()[0];
  // A tight budget keeps the decode length identical across runs even for
  // an untrained model.
  SequenceLimits limits;
  limits.max_contours = 1;
  limits.max_points_per_contour = 50;
  std::size_t points = 0;
  for (auto _ : state) {
    const GlyphSequence pred = complete(model, input, limits);
    points = pred.points.size();
    benchmark::DoNotOptimize(pred);
  }
  state.SetLabel(std::to_string(points) + " points emitted");
}
BENCHMARK(BM_GreedyDecode)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
