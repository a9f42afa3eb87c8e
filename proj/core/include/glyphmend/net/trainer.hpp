// Training loop: Adam, teacher forcing, per-epoch validation, early
// stopping on validation loss, best-checkpoint retention, and a line-
// delimited metrics log.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glyphmend/net/losses.hpp"
#include "glyphmend/net/model.hpp"

namespace glyphmend::net {

struct TrainConfig {
  int batch_size = 400;
  double learning_rate = 1e-4;
  int patience = 30;       // epochs without validation improvement
  int max_epochs = 1000;
  std::uint64_t seed = 0;
  double clip_norm = 1.0;  // global gradient-norm clip; <= 0 disables
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const {
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (patience < 1) throw std::invalid_argument("patience must be >= 1");
    if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
    if (!(learning_rate > 0.0)) {
      throw std::invalid_argument("learning_rate must be positive");
    }
  }
};

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"batch_size", c.batch_size},
                     {"learning_rate", c.learning_rate},
                     {"patience", c.patience},
                     {"max_epochs", c.max_epochs},
                     {"seed", c.seed},
                     {"clip_norm", c.clip_norm}};
}

inline void from_json(const nlohmann::json& j, TrainConfig& c) {
  c.batch_size = j.value("batch_size", c.batch_size);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.patience = j.value("patience", c.patience);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.seed = j.value("seed", c.seed);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
}

struct EpochMetrics {
  int epoch = 0;
  std::string phase;  // "train" or "val"
  LossBreakdown loss;
};

struct TrainResult {
  int epochs_run = 0;
  int best_epoch = 0;
  double best_val_loss = std::numeric_limits<double>::infinity();
  bool stopped_early = false;
  long clip_events = 0;  // batches where the gradient norm was clipped
  std::vector<EpochMetrics> log;
};

// Adam with bias correction; state laid out in for_each_param visit order.
template <typename Scalar, typename Model>
class Adam {
 public:
  explicit Adam(const TrainConfig& cfg) : cfg_(cfg) {}

  // Applies one update from the accumulated gradients; optionally scales
  // them first (gradient clipping).
  void step(Model& model, double grad_scale) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    std::size_t i = 0;
    model.for_each_param([&](const std::string&, Param<Scalar>& p) {
      if (i >= m_.size()) {
        m_.emplace_back(Mat<Scalar>::Zero(p.value.rows(), p.value.cols()));
        v_.emplace_back(Mat<Scalar>::Zero(p.value.rows(), p.value.cols()));
      }
      Mat<Scalar>& m = m_[i];
      Mat<Scalar>& v = v_[i];
      const Scalar b1 = static_cast<Scalar>(cfg_.beta1);
      const Scalar b2 = static_cast<Scalar>(cfg_.beta2);
      const Scalar scale = static_cast<Scalar>(grad_scale);
      m = b1 * m + (Scalar(1) - b1) * (p.grad * scale);
      v = (b2 * v.array() +
           (Scalar(1) - b2) * (p.grad.array() * scale).square())
              .matrix();
      const double lr = cfg_.learning_rate;
      for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
        for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
          const double mhat = static_cast<double>(m(r, c)) / bc1;
          const double vhat = static_cast<double>(v(r, c)) / bc2;
          p.value(r, c) -= static_cast<Scalar>(
              lr * mhat / (std::sqrt(vhat) + cfg_.epsilon));
        }
      }
      ++i;
    });
  }

 private:
  TrainConfig cfg_;
  std::vector<Mat<Scalar>> m_, v_;
  long t_ = 0;
};

template <typename Scalar, typename Model>
double global_grad_norm(Model& model) {
  double ss = 0.0;
  model.for_each_param([&ss](const std::string&, Param<Scalar>& p) {
    ss += static_cast<double>(
        p.grad.template cast<double>().array().square().sum());
  });
  return std::sqrt(ss);
}

template <typename Scalar, typename Model>
std::vector<Mat<Scalar>> snapshot_params(Model& model) {
  std::vector<Mat<Scalar>> values;
  model.for_each_param([&values](const std::string&, Param<Scalar>& p) {
    values.push_back(p.value);
  });
  return values;
}

template <typename Scalar, typename Model>
void restore_params(Model& model, const std::vector<Mat<Scalar>>& values) {
  std::size_t i = 0;
  model.for_each_param([&](const std::string&, Param<Scalar>& p) {
    p.value = values.at(i++);
  });
}

namespace detail {

// Runs one item of an encoder-decoder batch: teacher-forcing forward,
// batch-scaled loss, and (when training) backward accumulation.
template <typename Scalar>
LossBreakdown encdec_item(EncDecModel<Scalar>& model, const PaddedBatch& batch,
                          int b, const LossDenominators& denoms,
                          const ForwardCtx& ctx, bool do_backward) {
  const std::size_t enc_base = static_cast<std::size_t>(b) *
                               static_cast<std::size_t>(batch.encoder_len);
  const std::size_t dec_base = static_cast<std::size_t>(b) *
                               static_cast<std::size_t>(batch.decoder_len);
  const std::vector<std::uint8_t> enc_mask(
      batch.encoder_mask.begin() + static_cast<std::ptrdiff_t>(enc_base),
      batch.encoder_mask.begin() +
          static_cast<std::ptrdiff_t>(enc_base + batch.encoder_len));
  const std::vector<std::uint8_t> dec_mask(
      batch.decoder_mask.begin() + static_cast<std::ptrdiff_t>(dec_base),
      batch.decoder_mask.begin() +
          static_cast<std::ptrdiff_t>(dec_base + batch.decoder_len));

  typename EncDecModel<Scalar>::EncodeAct eact;
  typename EncDecModel<Scalar>::DecodeAct dact;
  const Mat<Scalar> memory = model.encode(
      batch.encoder_input.data() + enc_base,
      static_cast<std::size_t>(batch.encoder_len), &enc_mask, ctx,
      do_backward ? &eact : nullptr);
  const HeadsOut<Scalar> out = model.decode(
      batch.decoder_input.data() + dec_base,
      static_cast<std::size_t>(batch.decoder_len), memory, &enc_mask, &dec_mask,
      ctx, do_backward ? &dact : nullptr);

  HeadsOut<Scalar> grads;
  const LossBreakdown loss = item_loss(
      out, batch.decoder_target.data() + dec_base, batch.decoder_mask.data() + dec_base,
      static_cast<std::size_t>(batch.decoder_len), denoms,
      do_backward ? &grads : nullptr);
  if (do_backward) {
    const Mat<Scalar> dmemory = model.decode_backward(grads, dact);
    model.encode_backward(dmemory, eact);
  }
  return loss;
}

// One item of a baseline batch: same-position reconstruction.
template <typename Scalar>
LossBreakdown baseline_item(EncoderOnlyModel<Scalar>& model,
                            const PaddedBatch& batch, int b,
                            const LossDenominators& denoms,
                            const ForwardCtx& ctx, bool do_backward) {
  const std::size_t base = static_cast<std::size_t>(b) *
                           static_cast<std::size_t>(batch.encoder_len);
  const std::vector<std::uint8_t> mask(
      batch.encoder_mask.begin() + static_cast<std::ptrdiff_t>(base),
      batch.encoder_mask.begin() +
          static_cast<std::ptrdiff_t>(base + batch.encoder_len));

  typename EncoderOnlyModel<Scalar>::Act act;
  const HeadsOut<Scalar> out = model.forward(
      batch.encoder_input.data() + base,
      static_cast<std::size_t>(batch.encoder_len), &mask, ctx,
      do_backward ? &act : nullptr);

  HeadsOut<Scalar> grads;
  const LossBreakdown loss = item_loss(
      out, batch.decoder_target.data() + base, batch.decoder_mask.data() + base,
      static_cast<std::size_t>(batch.encoder_len), denoms,
      do_backward ? &grads : nullptr);
  if (do_backward) model.backward(grads, act);
  return loss;
}

inline void check_finite(const LossBreakdown& loss, int epoch, std::size_t batch_index) {
  const bool ok = std::isfinite(loss.contour) && std::isfinite(loss.point) &&
                  std::isfinite(loss.coord) && std::isfinite(loss.flag);
  if (!ok) {
    std::ostringstream msg;
    msg << "non-finite loss at epoch " << epoch << ", batch " << batch_index
        << ": contour=" << loss.contour << " point=" << loss.point
        << " coord=" << loss.coord << " flag=" << loss.flag;
    throw std::runtime_error(msg.str());
  }
}

inline void log_metrics(std::ostream* out, const EpochMetrics& m) {
  if (out == nullptr) return;
  nlohmann::json j{{"epoch", m.epoch},
                   {"phase", m.phase},
                   {"contour", m.loss.contour},
                   {"point", m.loss.point},
                   {"coord", m.loss.coord},
                   {"flag", m.loss.flag},
                   {"total", m.loss.total()}};
  (*out) << j.dump() << '\n';
}

// Shared epoch loop.  `run_batch(indices, train_mode)` returns the batch
// loss; examples_* give set sizes for shuffling.
template <typename Scalar, typename Model, typename RunBatch>
TrainResult train_loop(Model& model, std::size_t train_count,
                       std::size_t val_count, const TrainConfig& tc,
                       RunBatch&& run_batch, std::ostream* metrics,
                       std::ostream* progress) {
  tc.validate();
  if (train_count == 0) throw std::invalid_argument("empty training set");
  if (val_count == 0) throw std::invalid_argument("empty validation set");

  Adam<Scalar, Model> adam(tc);
  TrainResult result;
  std::vector<Mat<Scalar>> best_params = snapshot_params<Scalar>(model);
  int since_best = 0;

  for (int epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    // Training phase.
    LossBreakdown train_sum;
    double train_weight = 0.0;
    const auto batches =
        epoch_batches(train_count, static_cast<std::size_t>(tc.batch_size),
                      tc.seed, static_cast<std::uint64_t>(epoch));
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      model.zero_grad();
      const auto [loss, weight] = run_batch(batches[bi], epoch, true);
      check_finite(loss, epoch, bi);
      double scale = 1.0;
      if (tc.clip_norm > 0.0) {
        const double norm = global_grad_norm<Scalar>(model);
        if (norm > tc.clip_norm) {
          scale = tc.clip_norm / norm;
          ++result.clip_events;
        }
      }
      adam.step(model, scale);
      train_sum.contour += loss.contour * weight;
      train_sum.point += loss.point * weight;
      train_sum.coord += loss.coord * weight;
      train_sum.flag += loss.flag * weight;
      train_weight += weight;
    }
    LossBreakdown train_loss = train_sum;
    if (train_weight > 0.0) {
      train_loss.contour /= train_weight;
      train_loss.point /= train_weight;
      train_loss.coord /= train_weight;
      train_loss.flag /= train_weight;
    }
    result.log.push_back({epoch, "train", train_loss});
    log_metrics(metrics, result.log.back());

    // Validation phase: teacher forcing, dropout off, fixed order.
    LossBreakdown val_sum;
    double val_weight = 0.0;
    std::vector<std::size_t> val_indices(val_count);
    for (std::size_t i = 0; i < val_count; ++i) val_indices[i] = i;
    for (std::size_t at = 0; at < val_count;
         at += static_cast<std::size_t>(tc.batch_size)) {
      const std::size_t end =
          std::min(at + static_cast<std::size_t>(tc.batch_size), val_count);
      const std::vector<std::size_t> idx(val_indices.begin() + static_cast<std::ptrdiff_t>(at),
                                         val_indices.begin() + static_cast<std::ptrdiff_t>(end));
      const auto [loss, weight] = run_batch(idx, epoch, false);
      check_finite(loss, epoch, at);
      val_sum.contour += loss.contour * weight;
      val_sum.point += loss.point * weight;
      val_sum.coord += loss.coord * weight;
      val_sum.flag += loss.flag * weight;
      val_weight += weight;
    }
    LossBreakdown val_loss = val_sum;
    if (val_weight > 0.0) {
      val_loss.contour /= val_weight;
      val_loss.point /= val_weight;
      val_loss.coord /= val_weight;
      val_loss.flag /= val_weight;
    }
    result.log.push_back({epoch, "val", val_loss});
    log_metrics(metrics, result.log.back());

    result.epochs_run = epoch;
    if (progress != nullptr) {
      (*progress) << "epoch " << epoch << "  train " << std::fixed
                  << std::setprecision(4) << train_loss.total() << "  val "
                  << val_loss.total() << '\n';
      progress->flush();
    }

    if (val_loss.total() < result.best_val_loss) {
      result.best_val_loss = val_loss.total();
      result.best_epoch = epoch;
      best_params = snapshot_params<Scalar>(model);
      since_best = 0;
    } else {
      ++since_best;
      if (since_best >= tc.patience) {
        result.stopped_early = true;
        break;
      }
    }
  }
  restore_params(model, best_params);
  return result;
}

}  // namespace detail

// Trains the encoder-decoder model with teacher forcing.  Metrics (one JSON
// line per epoch and phase) go to `metrics`; human-readable progress lines
// to `progress`; both may be null.
template <typename Scalar>
TrainResult train_encdec(EncDecModel<Scalar>& model,
                         const std::vector<SeqExample>& train_set,
                         const std::vector<SeqExample>& val_set,
                         const TrainConfig& tc, std::ostream* metrics = nullptr,
                         std::ostream* progress = nullptr) {
  std::mt19937_64 dropout_rng(mix_seed(tc.seed, fnv1a64("dropout")));
  const auto run_batch = [&](const std::vector<std::size_t>& indices, int epoch,
                             bool training) {
    (void)epoch;
    const std::vector<SeqExample>& source = training ? train_set : val_set;
    std::vector<const SeqExample*> items;
    items.reserve(indices.size());
    for (std::size_t i : indices) items.push_back(&source[i]);
    const PaddedBatch batch = pad_batch(items);
    const LossDenominators denoms = loss_denominators(batch);
    ForwardCtx ctx;
    ctx.train = training;
    ctx.dropout = model.cfg.dropout;
    ctx.rng = &dropout_rng;
    LossBreakdown sum;
    for (int b = 0; b < batch.size; ++b) {
      sum += detail::encdec_item(model, batch, b, denoms, ctx, training);
    }
    return std::pair<LossBreakdown, double>(sum, static_cast<double>(denoms.tokens));
  };
  return detail::train_loop<Scalar>(model, train_set.size(), val_set.size(), tc,
                                    run_batch, metrics, progress);
}

// Trains the encoder-only baseline on placeheld inputs.
template <typename Scalar>
TrainResult train_baseline(EncoderOnlyModel<Scalar>& model,
                           const std::vector<BaselineExample>& train_set,
                           const std::vector<BaselineExample>& val_set,
                           const TrainConfig& tc, std::ostream* metrics = nullptr,
                           std::ostream* progress = nullptr) {
  std::mt19937_64 dropout_rng(mix_seed(tc.seed, fnv1a64("dropout")));
  const auto run_batch = [&](const std::vector<std::size_t>& indices, int epoch,
                             bool training) {
    (void)epoch;
    const std::vector<BaselineExample>& source = training ? train_set : val_set;
    std::vector<const BaselineExample*> items;
    items.reserve(indices.size());
    for (std::size_t i : indices) items.push_back(&source[i]);
    const PaddedBatch batch = pad_baseline_batch(items);
    const LossDenominators denoms = loss_denominators(batch);
    ForwardCtx ctx;
    ctx.train = training;
    ctx.dropout = model.cfg.dropout;
    ctx.rng = &dropout_rng;
    LossBreakdown sum;
    for (int b = 0; b < batch.size; ++b) {
      sum += detail::baseline_item(model, batch, b, denoms, ctx, training);
    }
    return std::pair<LossBreakdown, double>(sum, static_cast<double>(denoms.tokens));
  };
  return detail::train_loop<Scalar>(model, train_set.size(), val_set.size(), tc,
                                    run_batch, metrics, progress);
}

}  // namespace glyphmend::net
