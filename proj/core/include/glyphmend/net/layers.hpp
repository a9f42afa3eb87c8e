// Transformer building blocks with explicit forward activations and
// hand-written backward passes.  Every forward takes an activation tape that
// backward consumes; gradients accumulate into Param::grad so one batch can
// run many forward/backward pairs before an optimizer step.
//
// Attention masks are passed as additive bias matrices: 0 where attention is
// allowed and -infinity where it is forbidden, which makes masking exact
// (masked weights are exp(-inf) = 0, and their gradients vanish identically).
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "glyphmend/net/common.hpp"

namespace glyphmend::net {

// Runtime switches for one forward pass.  Training mode draws dropout masks
// from `rng` through the shared draw_unit contract.
struct ForwardCtx {
  bool train = false;
  double dropout = 0.0;
  std::mt19937_64* rng = nullptr;
};

template <typename Scalar>
struct Linear {
  Param<Scalar> w;  // (in, out)
  Param<Scalar> b;  // (1, out)

  void init(int in, int out, std::mt19937_64& rng) {
    w.init_uniform(in, out, in, rng);
    b.init_uniform(1, out, in, rng);
  }

  struct Act {
    Mat<Scalar> x;
  };

  Mat<Scalar> forward(const Mat<Scalar>& x, Act* act) const {
    if (act != nullptr) act->x = x;
    Mat<Scalar> y = x * w.value;
    y.rowwise() += b.value.row(0);
    return y;
  }

  Mat<Scalar> backward(const Mat<Scalar>& dy, const Act& act) {
    w.grad.noalias() += act.x.transpose() * dy;
    b.grad.row(0) += dy.colwise().sum();
    return dy * w.value.transpose();
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".w", w);
    f(prefix + ".b", b);
  }
};

// Affine map of a one-hot class vector: row-select plus bias.  Class index
// -1 encodes the all-zero one-hot (used by baseline placeholder records), so
// only the bias contributes.
template <typename Scalar>
struct Lookup {
  Param<Scalar> w;  // (classes, out)
  Param<Scalar> b;  // (1, out)

  void init(int classes, int out, std::mt19937_64& rng) {
    w.init_uniform(classes, out, classes, rng);
    b.init_uniform(1, out, classes, rng);
  }

  struct Act {
    std::vector<int> classes;
  };

  Mat<Scalar> forward(const std::vector<int>& classes, Act* act) const {
    Mat<Scalar> y(static_cast<Eigen::Index>(classes.size()), w.value.cols());
    for (std::size_t i = 0; i < classes.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      y.row(row) = b.value.row(0);
      if (classes[i] >= 0) {
        if (classes[i] >= w.value.rows()) {
          throw std::out_of_range("class index " + std::to_string(classes[i]) +
                                  " out of range");
        }
        y.row(row) += w.value.row(classes[i]);
      }
    }
    if (act != nullptr) act->classes = classes;
    return y;
  }

  void backward(const Mat<Scalar>& dy, const Act& act) {
    b.grad.row(0) += dy.colwise().sum();
    for (std::size_t i = 0; i < act.classes.size(); ++i) {
      if (act.classes[i] >= 0) {
        w.grad.row(act.classes[i]) += dy.row(static_cast<Eigen::Index>(i));
      }
    }
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".w", w);
    f(prefix + ".b", b);
  }
};

template <typename Scalar>
struct LayerNorm {
  Param<Scalar> gamma;  // (1, d)
  Param<Scalar> beta;   // (1, d)

  void init(int d) {
    gamma.resize(1, d);
    gamma.value.setOnes();
    beta.resize(1, d);
  }

  struct Act {
    Mat<Scalar> xhat;              // normalized input
    Mat<Scalar> inv_std;           // (rows, 1)
  };

  Mat<Scalar> forward(const Mat<Scalar>& x, Act* act) const {
    const Eigen::Index rows = x.rows();
    const Eigen::Index d = x.cols();
    Mat<Scalar> xhat(rows, d);
    Mat<Scalar> inv_std(rows, 1);
    const Scalar eps = static_cast<Scalar>(1e-5);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Scalar mean = x.row(r).mean();
      const Scalar var =
          (x.row(r).array() - mean).square().sum() / static_cast<Scalar>(d);
      const Scalar inv = Scalar(1) / std::sqrt(var + eps);
      xhat.row(r) = (x.row(r).array() - mean) * inv;
      inv_std(r, 0) = inv;
    }
    Mat<Scalar> y = xhat;
    y.array().rowwise() *= gamma.value.row(0).array();
    y.rowwise() += beta.value.row(0);
    if (act != nullptr) {
      act->xhat = std::move(xhat);
      act->inv_std = std::move(inv_std);
    }
    return y;
  }

  Mat<Scalar> backward(const Mat<Scalar>& dy, const Act& act) {
    const Eigen::Index rows = dy.rows();
    const Eigen::Index d = dy.cols();
    gamma.grad.row(0) += (dy.array() * act.xhat.array()).colwise().sum().matrix();
    beta.grad.row(0) += dy.colwise().sum();

    Mat<Scalar> dxhat = dy;
    dxhat.array().rowwise() *= gamma.value.row(0).array();
    Mat<Scalar> dx(rows, d);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Scalar sum_d = dxhat.row(r).sum();
      const Scalar sum_dx =
          (dxhat.row(r).array() * act.xhat.row(r).array()).sum();
      dx.row(r) = (act.inv_std(r, 0) / static_cast<Scalar>(d)) *
                  (static_cast<Scalar>(d) * dxhat.row(r).array() - sum_d -
                   act.xhat.row(r).array() * sum_dx)
                      .matrix();
    }
    return dx;
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".gamma", gamma);
    f(prefix + ".beta", beta);
  }
};

// Inverted dropout: kept activations are scaled by 1/keep at train time so
// evaluation needs no rescaling.
template <typename Scalar>
struct DropoutAct {
  bool active = false;
  Mat<Scalar> mask;
};

template <typename Scalar>
Mat<Scalar> dropout_forward(const Mat<Scalar>& x, const ForwardCtx& ctx,
                            DropoutAct<Scalar>* act) {
  if (!ctx.train || ctx.dropout <= 0.0) {
    if (act != nullptr) act->active = false;
    return x;
  }
  if (ctx.rng == nullptr) {
    throw std::logic_error("training forward pass needs an rng for dropout");
  }
  const double keep = 1.0 - ctx.dropout;
  const Scalar scale = static_cast<Scalar>(1.0 / keep);
  Mat<Scalar> mask(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      mask(r, c) = draw_unit(*ctx.rng) < keep ? scale : Scalar(0);
    }
  }
  Mat<Scalar> y = x.cwiseProduct(mask);
  if (act != nullptr) {
    act->active = true;
    act->mask = std::move(mask);
  } else {
    throw std::logic_error("dropout at train time needs an activation tape");
  }
  return y;
}

template <typename Scalar>
Mat<Scalar> dropout_backward(const Mat<Scalar>& dy, const DropoutAct<Scalar>& act) {
  if (!act.active) return dy;
  return dy.cwiseProduct(act.mask);
}

// Additive attention bias: 0 = allowed, -inf = forbidden.
template <typename Scalar>
Mat<Scalar> full_attention_bias(Eigen::Index tq, Eigen::Index tk) {
  return Mat<Scalar>::Zero(tq, tk);
}

// Forbids attending to padded key positions (mask value 0 = pad).
template <typename Scalar>
Mat<Scalar> key_padding_bias(Eigen::Index tq, const std::vector<std::uint8_t>& key_mask) {
  Mat<Scalar> bias = Mat<Scalar>::Zero(tq, static_cast<Eigen::Index>(key_mask.size()));
  const Scalar neg_inf = -std::numeric_limits<Scalar>::infinity();
  for (std::size_t k = 0; k < key_mask.size(); ++k) {
    if (key_mask[k] == 0) {
      bias.col(static_cast<Eigen::Index>(k)).setConstant(neg_inf);
    }
  }
  return bias;
}

// Causal bias (strictly upper triangle forbidden), optionally combined with
// a key padding mask.
template <typename Scalar>
Mat<Scalar> causal_bias(Eigen::Index t, const std::vector<std::uint8_t>* key_mask = nullptr) {
  Mat<Scalar> bias = Mat<Scalar>::Zero(t, t);
  const Scalar neg_inf = -std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index q = 0; q < t; ++q) {
    for (Eigen::Index k = q + 1; k < t; ++k) bias(q, k) = neg_inf;
  }
  if (key_mask != nullptr) {
    for (std::size_t k = 0; k < key_mask->size(); ++k) {
      if ((*key_mask)[k] == 0) {
        bias.col(static_cast<Eigen::Index>(k)).setConstant(neg_inf);
      }
    }
  }
  return bias;
}

template <typename Scalar>
struct MultiHeadAttention {
  int heads = 1;
  int d_model = 0;
  Linear<Scalar> wq, wk, wv, wo;

  void init(int d, int n_heads, std::mt19937_64& rng) {
    d_model = d;
    heads = n_heads;
    wq.init(d, d, rng);
    wk.init(d, d, rng);
    wv.init(d, d, rng);
    wo.init(d, d, rng);
  }

  struct Act {
    typename Linear<Scalar>::Act qa, ka, va, oa;
    Mat<Scalar> q, k, v;              // projected (Tq, d), (Tk, d), (Tk, d)
    std::vector<Mat<Scalar>> attn;    // per head, post-softmax (Tq, Tk)
  };

  // q_input (Tq, d) attends over kv_input (Tk, d) under the additive bias.
  Mat<Scalar> forward(const Mat<Scalar>& q_input, const Mat<Scalar>& kv_input,
                      const Mat<Scalar>& bias, Act* act) const {
    const Eigen::Index tq = q_input.rows();
    const Eigen::Index tk = kv_input.rows();
    const Eigen::Index dh = d_model / heads;
    const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(dh));

    Mat<Scalar> q = wq.forward(q_input, act != nullptr ? &act->qa : nullptr);
    Mat<Scalar> k = wk.forward(kv_input, act != nullptr ? &act->ka : nullptr);
    Mat<Scalar> v = wv.forward(kv_input, act != nullptr ? &act->va : nullptr);

    Mat<Scalar> concat(tq, d_model);
    std::vector<Mat<Scalar>> attn_store;
    if (act != nullptr) attn_store.reserve(static_cast<std::size_t>(heads));
    for (int h = 0; h < heads; ++h) {
      const Eigen::Index off = static_cast<Eigen::Index>(h) * dh;
      Mat<Scalar> scores =
          (q.middleCols(off, dh) * k.middleCols(off, dh).transpose()) * scale;
      scores += bias;
      // Row softmax with max subtraction; -inf entries become exact zeros.
      // The exponential must go through scalar std::exp: Eigen's vectorized
      // exp clamps its argument and would turn exp(-inf) into a denormal
      // instead of +0.0, leaking mass through masked entries.
      for (Eigen::Index r = 0; r < tq; ++r) {
        const Scalar row_max = scores.row(r).maxCoeff();
        scores.row(r) = (scores.row(r).array() - row_max)
                            .unaryExpr([](Scalar v) { return std::exp(v); })
                            .matrix();
        const Scalar row_sum = scores.row(r).sum();
        scores.row(r) /= row_sum;
      }
      concat.middleCols(off, dh) = scores * v.middleCols(off, dh);
      if (act != nullptr) attn_store.push_back(std::move(scores));
    }
    if (act != nullptr) {
      act->q = std::move(q);
      act->k = std::move(k);
      act->v = std::move(v);
      act->attn = std::move(attn_store);
    }
    return wo.forward(concat, act != nullptr ? &act->oa : nullptr);
  }

  // Returns (d q_input, d kv_input).
  std::pair<Mat<Scalar>, Mat<Scalar>> backward(const Mat<Scalar>& dout, Act& act) {
    const Eigen::Index tq = act.q.rows();
    const Eigen::Index tk = act.k.rows();
    const Eigen::Index dh = d_model / heads;
    const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(dh));

    Mat<Scalar> dconcat = wo.backward(dout, act.oa);
    Mat<Scalar> dq = Mat<Scalar>::Zero(tq, d_model);
    Mat<Scalar> dk = Mat<Scalar>::Zero(tk, d_model);
    Mat<Scalar> dv = Mat<Scalar>::Zero(tk, d_model);
    for (int h = 0; h < heads; ++h) {
      const Eigen::Index off = static_cast<Eigen::Index>(h) * dh;
      const Mat<Scalar>& a = act.attn[static_cast<std::size_t>(h)];
      Mat<Scalar> da = dconcat.middleCols(off, dh) * act.v.middleCols(off, dh).transpose();
      dv.middleCols(off, dh).noalias() += a.transpose() * dconcat.middleCols(off, dh);
      // Softmax backward per row: ds = a * (da - sum(da * a)).  Masked
      // entries have a == 0, so their gradient is exactly zero.
      Mat<Scalar> ds(tq, tk);
      for (Eigen::Index r = 0; r < tq; ++r) {
        const Scalar dot = (da.row(r).array() * a.row(r).array()).sum();
        ds.row(r) = (a.row(r).array() * (da.row(r).array() - dot)).matrix();
      }
      dq.middleCols(off, dh).noalias() += ds * act.k.middleCols(off, dh) * scale;
      dk.middleCols(off, dh).noalias() += ds.transpose() * act.q.middleCols(off, dh) * scale;
    }
    Mat<Scalar> dq_input = wq.backward(dq, act.qa);
    Mat<Scalar> dkv_input = wk.backward(dk, act.ka);
    dkv_input += wv.backward(dv, act.va);
    return {std::move(dq_input), std::move(dkv_input)};
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    wq.visit(prefix + ".wq", f);
    wk.visit(prefix + ".wk", f);
    wv.visit(prefix + ".wv", f);
    wo.visit(prefix + ".wo", f);
  }
};

template <typename Scalar>
struct FeedForward {
  Linear<Scalar> lin1, lin2;

  void init(int d, int inner, std::mt19937_64& rng) {
    lin1.init(d, inner, rng);
    lin2.init(inner, d, rng);
  }

  struct Act {
    typename Linear<Scalar>::Act a1, a2;
    Mat<Scalar> pre;  // pre-ReLU activations
  };

  Mat<Scalar> forward(const Mat<Scalar>& x, Act* act) const {
    Mat<Scalar> h = lin1.forward(x, act != nullptr ? &act->a1 : nullptr);
    if (act != nullptr) act->pre = h;
    h = h.cwiseMax(Scalar(0));
    return lin2.forward(h, act != nullptr ? &act->a2 : nullptr);
  }

  Mat<Scalar> backward(const Mat<Scalar>& dy, const Act& act) {
    Mat<Scalar> dh = lin2.backward(dy, act.a2);
    dh = dh.cwiseProduct(
        (act.pre.array() > Scalar(0)).template cast<Scalar>().matrix());
    return lin1.backward(dh, act.a1);
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    lin1.visit(prefix + ".lin1", f);
    lin2.visit(prefix + ".lin2", f);
  }
};

// Post-norm encoder layer: x -> LN(x + Drop(SelfAttn(x))) -> LN(.. + Drop(FFN(..))).
template <typename Scalar>
struct EncoderLayer {
  MultiHeadAttention<Scalar> self_attn;
  FeedForward<Scalar> ffn;
  LayerNorm<Scalar> ln1, ln2;

  void init(int d, int heads, int inner, std::mt19937_64& rng) {
    self_attn.init(d, heads, rng);
    ffn.init(d, inner, rng);
    ln1.init(d);
    ln2.init(d);
  }

  struct Act {
    typename MultiHeadAttention<Scalar>::Act attn;
    DropoutAct<Scalar> drop1, drop2;
    typename LayerNorm<Scalar>::Act lna1, lna2;
    typename FeedForward<Scalar>::Act ff;
  };

  Mat<Scalar> forward(const Mat<Scalar>& x, const Mat<Scalar>& bias,
                      const ForwardCtx& ctx, Act* act) const {
    Mat<Scalar> a =
        self_attn.forward(x, x, bias, act != nullptr ? &act->attn : nullptr);
    Mat<Scalar> x1 = ln1.forward(
        x + dropout_forward(a, ctx, act != nullptr ? &act->drop1 : nullptr),
        act != nullptr ? &act->lna1 : nullptr);
    Mat<Scalar> f = ffn.forward(x1, act != nullptr ? &act->ff : nullptr);
    return ln2.forward(
        x1 + dropout_forward(f, ctx, act != nullptr ? &act->drop2 : nullptr),
        act != nullptr ? &act->lna2 : nullptr);
  }

  Mat<Scalar> backward(const Mat<Scalar>& dy, Act& act) {
    Mat<Scalar> d1 = ln2.backward(dy, act.lna2);
    Mat<Scalar> df = dropout_backward(d1, act.drop2);
    Mat<Scalar> dx1 = d1 + ffn.backward(df, act.ff);
    Mat<Scalar> d0 = ln1.backward(dx1, act.lna1);
    Mat<Scalar> da = dropout_backward(d0, act.drop1);
    auto [dq, dkv] = self_attn.backward(da, act.attn);
    return d0 + dq + dkv;
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    self_attn.visit(prefix + ".self", f);
    ffn.visit(prefix + ".ffn", f);
    ln1.visit(prefix + ".ln1", f);
    ln2.visit(prefix + ".ln2", f);
  }
};

// Post-norm decoder layer with masked self-attention and cross-attention
// over the encoder memory.
template <typename Scalar>
struct DecoderLayer {
  MultiHeadAttention<Scalar> self_attn;
  MultiHeadAttention<Scalar> cross_attn;
  FeedForward<Scalar> ffn;
  LayerNorm<Scalar> ln1, ln2, ln3;

  void init(int d, int heads, int inner, std::mt19937_64& rng) {
    self_attn.init(d, heads, rng);
    cross_attn.init(d, heads, rng);
    ffn.init(d, inner, rng);
    ln1.init(d);
    ln2.init(d);
    ln3.init(d);
  }

  struct Act {
    typename MultiHeadAttention<Scalar>::Act self, cross;
    DropoutAct<Scalar> drop1, drop2, drop3;
    typename LayerNorm<Scalar>::Act lna1, lna2, lna3;
    typename FeedForward<Scalar>::Act ff;
  };

  Mat<Scalar> forward(const Mat<Scalar>& x, const Mat<Scalar>& self_bias,
                      const Mat<Scalar>& memory, const Mat<Scalar>& cross_bias,
                      const ForwardCtx& ctx, Act* act) const {
    Mat<Scalar> a =
        self_attn.forward(x, x, self_bias, act != nullptr ? &act->self : nullptr);
    Mat<Scalar> x1 = ln1.forward(
        x + dropout_forward(a, ctx, act != nullptr ? &act->drop1 : nullptr),
        act != nullptr ? &act->lna1 : nullptr);
    Mat<Scalar> c = cross_attn.forward(x1, memory, cross_bias,
                                       act != nullptr ? &act->cross : nullptr);
    Mat<Scalar> x2 = ln2.forward(
        x1 + dropout_forward(c, ctx, act != nullptr ? &act->drop2 : nullptr),
        act != nullptr ? &act->lna2 : nullptr);
    Mat<Scalar> f = ffn.forward(x2, act != nullptr ? &act->ff : nullptr);
    return ln3.forward(
        x2 + dropout_forward(f, ctx, act != nullptr ? &act->drop3 : nullptr),
        act != nullptr ? &act->lna3 : nullptr);
  }

  // Returns (dx, dmemory).
  std::pair<Mat<Scalar>, Mat<Scalar>> backward(const Mat<Scalar>& dy, Act& act) {
    Mat<Scalar> d2 = ln3.backward(dy, act.lna3);
    Mat<Scalar> df = dropout_backward(d2, act.drop3);
    Mat<Scalar> dx2 = d2 + ffn.backward(df, act.ff);
    Mat<Scalar> d1 = ln2.backward(dx2, act.lna2);
    Mat<Scalar> dc = dropout_backward(d1, act.drop2);
    auto [dq_cross, dmemory] = cross_attn.backward(dc, act.cross);
    Mat<Scalar> dx1 = d1 + dq_cross;
    Mat<Scalar> d0 = ln1.backward(dx1, act.lna1);
    Mat<Scalar> da = dropout_backward(d0, act.drop1);
    auto [dq_self, dkv_self] = self_attn.backward(da, act.self);
    Mat<Scalar> dx = d0 + dq_self + dkv_self;
    return {std::move(dx), std::move(dmemory)};
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    self_attn.visit(prefix + ".self", f);
    cross_attn.visit(prefix + ".cross", f);
    ffn.visit(prefix + ".ffn", f);
    ln1.visit(prefix + ".ln1", f);
    ln2.visit(prefix + ".ln2", f);
    ln3.visit(prefix + ".ln3", f);
  }
};

}  // namespace glyphmend::net
