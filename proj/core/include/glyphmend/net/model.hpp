// The contour-completion networks.
//
// EncDecModel: split four-group embedding, L encoder layers, L decoder
// layers with cross-attention, and four parallel prediction heads (coords,
// contour ID, point ID, flag).
//
// EncoderOnlyModel: the comparative baseline — the same embedding and heads
// around a 2L-layer self-attention stack, consuming inputs whose missing
// slots hold explicit placeholder records.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "glyphmend/batching.hpp"
#include "glyphmend/checkpoint.hpp"
#include "glyphmend/net/config.hpp"
#include "glyphmend/net/layers.hpp"

namespace glyphmend::net {

// Per-position head outputs for one sequence (rows = positions).
template <typename Scalar>
struct HeadsOut {
  Mat<Scalar> coords;          // (T, 2)
  Mat<Scalar> contour_logits;  // (T, contour_classes)
  Mat<Scalar> point_logits;    // (T, point_classes)
  Mat<Scalar> flag_logits;     // (T, flag_classes)
};

// Split four-group embedding: coordinates and the three one-hot groups each
// map to d_model/4 dimensions, concatenated in the fixed order
// (coords, contour, point, flag).
template <typename Scalar>
struct Embedding {
  ModelConfig cfg;
  Linear<Scalar> coord;    // 2 -> d/4
  Lookup<Scalar> contour;  // contour_classes -> d/4
  Lookup<Scalar> point;    // point_classes -> d/4
  Lookup<Scalar> flag;     // flag_classes -> d/4

  void init(const ModelConfig& config, std::mt19937_64& rng) {
    cfg = config;
    const int g = cfg.group();
    coord.init(2, g, rng);
    contour.init(cfg.contour_classes, g, rng);
    point.init(cfg.point_classes, g, rng);
    flag.init(cfg.flag_classes, g, rng);
  }

  struct Act {
    typename Linear<Scalar>::Act coord_act;
    typename Lookup<Scalar>::Act contour_act, point_act, flag_act;
    DropoutAct<Scalar> drop;
  };

  Mat<Scalar> forward(const TokenRecord* tokens, std::size_t count,
                      const ForwardCtx& ctx, Act* act) const {
    const Eigen::Index t = static_cast<Eigen::Index>(count);
    const int g = cfg.group();
    Mat<Scalar> coords(t, 2);
    std::vector<int> contour_ids(count), point_ids(count), flag_ids(count);
    for (std::size_t i = 0; i < count; ++i) {
      coords(static_cast<Eigen::Index>(i), 0) = static_cast<Scalar>(tokens[i].x);
      coords(static_cast<Eigen::Index>(i), 1) = static_cast<Scalar>(tokens[i].y);
      contour_ids[i] = tokens[i].contour;
      point_ids[i] = tokens[i].point;
      flag_ids[i] = tokens[i].flag;  // kPlaceholderFlagClass -> zero one-hot
    }
    Mat<Scalar> out(t, cfg.d_model);
    out.middleCols(0, g) =
        coord.forward(coords, act != nullptr ? &act->coord_act : nullptr);
    out.middleCols(g, g) = contour.forward(
        contour_ids, act != nullptr ? &act->contour_act : nullptr);
    out.middleCols(2 * g, g) =
        point.forward(point_ids, act != nullptr ? &act->point_act : nullptr);
    out.middleCols(3 * g, g) =
        flag.forward(flag_ids, act != nullptr ? &act->flag_act : nullptr);
    if (cfg.sinusoidal_position) {
      add_sinusoidal(&out);
    }
    return dropout_forward(out, ctx, act != nullptr ? &act->drop : nullptr);
  }

  void backward(const Mat<Scalar>& dy, Act& act) {
    const Mat<Scalar> d = dropout_backward(dy, act.drop);
    const int g = cfg.group();
    coord.backward(d.middleCols(0, g), act.coord_act);
    contour.backward(d.middleCols(g, g), act.contour_act);
    point.backward(d.middleCols(2 * g, g), act.point_act);
    flag.backward(d.middleCols(3 * g, g), act.flag_act);
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    coord.visit(prefix + ".coord", f);
    contour.visit(prefix + ".contour", f);
    point.visit(prefix + ".point", f);
    flag.visit(prefix + ".flag", f);
  }

 private:
  static void add_sinusoidal(Mat<Scalar>* x) {
    const Eigen::Index t = x->rows();
    const Eigen::Index d = x->cols();
    for (Eigen::Index pos = 0; pos < t; ++pos) {
      for (Eigen::Index i = 0; i + 1 < d; i += 2) {
        const double angle =
            static_cast<double>(pos) /
            std::pow(10000.0, static_cast<double>(i) / static_cast<double>(d));
        (*x)(pos, i) += static_cast<Scalar>(std::sin(angle));
        (*x)(pos, i + 1) += static_cast<Scalar>(std::cos(angle));
      }
    }
  }
};

// Four parallel affine heads, each reading its own quarter of the final
// state: dims [0, d/4) -> coords, [d/4, d/2) -> contour logits,
// [d/2, 3d/4) -> point logits, [3d/4, d) -> flag logits.
template <typename Scalar>
struct Heads {
  ModelConfig cfg;
  Linear<Scalar> coord, contour, point, flag;

  void init(const ModelConfig& config, std::mt19937_64& rng) {
    cfg = config;
    const int g = cfg.group();
    coord.init(g, 2, rng);
    contour.init(g, cfg.contour_classes, rng);
    point.init(g, cfg.point_classes, rng);
    flag.init(g, cfg.flag_classes, rng);
  }

  struct Act {
    typename Linear<Scalar>::Act coord_act, contour_act, point_act, flag_act;
  };

  HeadsOut<Scalar> forward(const Mat<Scalar>& state, Act* act) const {
    const int g = cfg.group();
    HeadsOut<Scalar> out;
    out.coords = coord.forward(state.middleCols(0, g),
                               act != nullptr ? &act->coord_act : nullptr);
    out.contour_logits = contour.forward(
        state.middleCols(g, g), act != nullptr ? &act->contour_act : nullptr);
    out.point_logits = point.forward(state.middleCols(2 * g, g),
                                     act != nullptr ? &act->point_act : nullptr);
    out.flag_logits = flag.forward(state.middleCols(3 * g, g),
                                   act != nullptr ? &act->flag_act : nullptr);
    return out;
  }

  Mat<Scalar> backward(const HeadsOut<Scalar>& dout, const Act& act) {
    const int g = cfg.group();
    Mat<Scalar> dstate(dout.coords.rows(), cfg.d_model);
    dstate.middleCols(0, g) = coord.backward(dout.coords, act.coord_act);
    dstate.middleCols(g, g) = contour.backward(dout.contour_logits, act.contour_act);
    dstate.middleCols(2 * g, g) = point.backward(dout.point_logits, act.point_act);
    dstate.middleCols(3 * g, g) = flag.backward(dout.flag_logits, act.flag_act);
    return dstate;
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    coord.visit(prefix + ".coord", f);
    contour.visit(prefix + ".contour", f);
    point.visit(prefix + ".point", f);
    flag.visit(prefix + ".flag", f);
  }
};

template <typename Scalar>
struct EncDecModel {
  ModelConfig cfg;
  Embedding<Scalar> enc_embed, dec_embed;
  std::vector<EncoderLayer<Scalar>> enc_layers;
  std::vector<DecoderLayer<Scalar>> dec_layers;
  Heads<Scalar> heads;
  // Performance contract: completion must encode exactly once per glyph;
  // tests assert on this counter.
  mutable long encode_calls = 0;

  void init(const ModelConfig& config, std::uint64_t seed) {
    config.validate();
    cfg = config;
    std::mt19937_64 rng(mix_seed(seed, fnv1a64("encdec-init")));
    enc_embed.init(cfg, rng);
    dec_embed.init(cfg, rng);
    enc_layers.assign(static_cast<std::size_t>(cfg.layers), {});
    for (auto& layer : enc_layers) layer.init(cfg.d_model, cfg.heads, cfg.ffn(), rng);
    dec_layers.assign(static_cast<std::size_t>(cfg.layers), {});
    for (auto& layer : dec_layers) layer.init(cfg.d_model, cfg.heads, cfg.ffn(), rng);
    heads.init(cfg, rng);
  }

  struct EncodeAct {
    typename Embedding<Scalar>::Act embed;
    std::vector<typename EncoderLayer<Scalar>::Act> layers;
  };

  // key_mask: 1 = real position, 0 = pad; nullptr means no padding.
  Mat<Scalar> encode(const TokenRecord* tokens, std::size_t count,
                     const std::vector<std::uint8_t>* key_mask,
                     const ForwardCtx& ctx, EncodeAct* act) const {
    ++encode_calls;
    Mat<Scalar> x =
        enc_embed.forward(tokens, count, ctx, act != nullptr ? &act->embed : nullptr);
    const Mat<Scalar> bias =
        key_mask != nullptr
            ? key_padding_bias<Scalar>(x.rows(), *key_mask)
            : full_attention_bias<Scalar>(x.rows(), x.rows());
    if (act != nullptr) act->layers.resize(enc_layers.size());
    for (std::size_t l = 0; l < enc_layers.size(); ++l) {
      x = enc_layers[l].forward(x, bias, ctx,
                                act != nullptr ? &act->layers[l] : nullptr);
    }
    return x;
  }

  void encode_backward(const Mat<Scalar>& dmemory, EncodeAct& act) {
    Mat<Scalar> d = dmemory;
    for (std::size_t l = enc_layers.size(); l-- > 0;) {
      d = enc_layers[l].backward(d, act.layers[l]);
    }
    enc_embed.backward(d, act.embed);
  }

  struct DecodeAct {
    typename Embedding<Scalar>::Act embed;
    std::vector<typename DecoderLayer<Scalar>::Act> layers;
    typename Heads<Scalar>::Act heads;
    Eigen::Index memory_rows = 0;
  };

  // Teacher-forcing / autoregressive decode over a token prefix.  Decoder
  // self-attention is causal (combined with dec_key_mask when given);
  // cross-attention may attend all unpadded memory positions.
  HeadsOut<Scalar> decode(const TokenRecord* tokens, std::size_t count,
                          const Mat<Scalar>& memory,
                          const std::vector<std::uint8_t>* enc_key_mask,
                          const std::vector<std::uint8_t>* dec_key_mask,
                          const ForwardCtx& ctx, DecodeAct* act) const {
    Mat<Scalar> x =
        dec_embed.forward(tokens, count, ctx, act != nullptr ? &act->embed : nullptr);
    const Mat<Scalar> self_bias = causal_bias<Scalar>(x.rows(), dec_key_mask);
    const Mat<Scalar> cross_bias =
        enc_key_mask != nullptr
            ? key_padding_bias<Scalar>(x.rows(), *enc_key_mask)
            : full_attention_bias<Scalar>(x.rows(), memory.rows());
    if (act != nullptr) {
      act->layers.resize(dec_layers.size());
      act->memory_rows = memory.rows();
    }
    for (std::size_t l = 0; l < dec_layers.size(); ++l) {
      x = dec_layers[l].forward(x, self_bias, memory, cross_bias, ctx,
                                act != nullptr ? &act->layers[l] : nullptr);
    }
    return heads.forward(x, act != nullptr ? &act->heads : nullptr);
  }

  // Backward through heads and the decoder stack; returns the gradient with
  // respect to the encoder memory (accumulated across layers).
  Mat<Scalar> decode_backward(const HeadsOut<Scalar>& dheads, DecodeAct& act) {
    Mat<Scalar> d = heads.backward(dheads, act.heads);
    Mat<Scalar> dmemory = Mat<Scalar>::Zero(act.memory_rows, cfg.d_model);
    for (std::size_t l = dec_layers.size(); l-- > 0;) {
      auto [dx, dm] = dec_layers[l].backward(d, act.layers[l]);
      d = std::move(dx);
      dmemory += dm;
    }
    dec_embed.backward(d, act.embed);
    return dmemory;
  }

  template <typename F>
  void for_each_param(F&& f) {
    enc_embed.visit("enc.embed", f);
    dec_embed.visit("dec.embed", f);
    for (std::size_t l = 0; l < enc_layers.size(); ++l) {
      enc_layers[l].visit("enc.layer" + std::to_string(l), f);
    }
    for (std::size_t l = 0; l < dec_layers.size(); ++l) {
      dec_layers[l].visit("dec.layer" + std::to_string(l), f);
    }
    heads.visit("heads", f);
  }

  void zero_grad() {
    for_each_param([](const std::string&, Param<Scalar>& p) { p.zero_grad(); });
  }

  std::size_t parameter_count() {
    std::size_t n = 0;
    for_each_param([&n](const std::string&, Param<Scalar>& p) {
      n += static_cast<std::size_t>(p.value.size());
    });
    return n;
  }
};

// The comparative baseline: embedding, a 2L-layer encoder stack, and the
// same four heads predicting every position of the placeheld input.
template <typename Scalar>
struct EncoderOnlyModel {
  ModelConfig cfg;
  Embedding<Scalar> embed;
  std::vector<EncoderLayer<Scalar>> layers;
  Heads<Scalar> heads;

  void init(const ModelConfig& config, std::uint64_t seed) {
    config.validate();
    cfg = config;
    std::mt19937_64 rng(mix_seed(seed, fnv1a64("encoder-only-init")));
    embed.init(cfg, rng);
    layers.assign(static_cast<std::size_t>(2 * cfg.layers), {});
    for (auto& layer : layers) layer.init(cfg.d_model, cfg.heads, cfg.ffn(), rng);
    heads.init(cfg, rng);
  }

  struct Act {
    typename Embedding<Scalar>::Act embed;
    std::vector<typename EncoderLayer<Scalar>::Act> layers;
    typename Heads<Scalar>::Act heads;
  };

  HeadsOut<Scalar> forward(const TokenRecord* tokens, std::size_t count,
                           const std::vector<std::uint8_t>* key_mask,
                           const ForwardCtx& ctx, Act* act) const {
    Mat<Scalar> x =
        embed.forward(tokens, count, ctx, act != nullptr ? &act->embed : nullptr);
    const Mat<Scalar> bias =
        key_mask != nullptr
            ? key_padding_bias<Scalar>(x.rows(), *key_mask)
            : full_attention_bias<Scalar>(x.rows(), x.rows());
    if (act != nullptr) act->layers.resize(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
      x = layers[l].forward(x, bias, ctx,
                            act != nullptr ? &act->layers[l] : nullptr);
    }
    return heads.forward(x, act != nullptr ? &act->heads : nullptr);
  }

  void backward(const HeadsOut<Scalar>& dheads, Act& act) {
    Mat<Scalar> d = heads.backward(dheads, act.heads);
    for (std::size_t l = layers.size(); l-- > 0;) {
      d = layers[l].backward(d, act.layers[l]);
    }
    embed.backward(d, act.embed);
  }

  template <typename F>
  void for_each_param(F&& f) {
    embed.visit("embed", f);
    for (std::size_t l = 0; l < layers.size(); ++l) {
      layers[l].visit("layer" + std::to_string(l), f);
    }
    heads.visit("heads", f);
  }

  void zero_grad() {
    for_each_param([](const std::string&, Param<Scalar>& p) { p.zero_grad(); });
  }

  std::size_t parameter_count() {
    std::size_t n = 0;
    for_each_param([&n](const std::string&, Param<Scalar>& p) {
      n += static_cast<std::size_t>(p.value.size());
    });
    return n;
  }
};

// --- Checkpoint bridging -------------------------------------------------

template <typename Model>
Checkpoint model_to_checkpoint(Model& model, const std::string& arch,
                               nlohmann::json extra_meta = {}) {
  Checkpoint ckpt;
  ckpt.meta = std::move(extra_meta);
  ckpt.meta["arch"] = arch;
  ckpt.meta["config"] = model.cfg;
  model.for_each_param([&ckpt](const std::string& name, auto& p) {
    TensorEntry t;
    t.name = name;
    t.rows = static_cast<std::size_t>(p.value.rows());
    t.cols = static_cast<std::size_t>(p.value.cols());
    t.data.reserve(static_cast<std::size_t>(p.value.size()));
    for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
        t.data.push_back(static_cast<double>(p.value(r, c)));
      }
    }
    ckpt.tensors.push_back(std::move(t));
  });
  return ckpt;
}

// Loads tensors by name into an already-constructed model.  Throws
// std::runtime_error when a tensor is missing or shaped differently.
template <typename Model>
void load_model_params(Model& model, const Checkpoint& ckpt) {
  std::size_t used = 0;
  model.for_each_param([&](const std::string& name, auto& p) {
    const TensorEntry* found = nullptr;
    for (const TensorEntry& t : ckpt.tensors) {
      if (t.name == name) {
        found = &t;
        break;
      }
    }
    if (found == nullptr) {
      throw std::runtime_error("checkpoint incompatible: missing tensor " + name);
    }
    if (static_cast<Eigen::Index>(found->rows) != p.value.rows() ||
        static_cast<Eigen::Index>(found->cols) != p.value.cols()) {
      throw std::runtime_error(
          "checkpoint incompatible: tensor " + name + " has shape " +
          std::to_string(found->rows) + "x" + std::to_string(found->cols) +
          ", model expects " + std::to_string(p.value.rows()) + "x" +
          std::to_string(p.value.cols()));
    }
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
        p.value(r, c) =
            static_cast<std::decay_t<decltype(p.value(r, c))>>(found->data[i++]);
      }
    }
    ++used;
  });
  (void)used;
}

}  // namespace glyphmend::net
