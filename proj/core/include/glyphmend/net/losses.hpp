// The four-term training loss: contour cross-entropy, point cross-entropy,
// coordinate L1, and flag cross-entropy, summed unweighted.
//
// Every term is a mean over unmasked target positions of the whole batch
// (the coordinate term additionally excludes sos/eos positions and averages
// over both components), so padding never changes a loss value and gradient
// scale is independent of sequence length and batch composition.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "glyphmend/batching.hpp"
#include "glyphmend/net/model.hpp"

namespace glyphmend::net {

struct LossBreakdown {
  double contour = 0.0;
  double point = 0.0;
  double coord = 0.0;
  double flag = 0.0;

  double total() const { return contour + point + coord + flag; }

  LossBreakdown& operator+=(const LossBreakdown& o) {
    contour += o.contour;
    point += o.point;
    coord += o.coord;
    flag += o.flag;
    return *this;
  }
};

// Batch-global denominators, fixed by the target masks alone.
struct LossDenominators {
  std::size_t tokens = 0;        // unmasked target positions
  std::size_t coord_tokens = 0;  // unmasked, non-special target positions
};

// Counts denominators over a padded batch's decoder targets.
inline LossDenominators loss_denominators(const PaddedBatch& batch) {
  LossDenominators d;
  for (std::size_t i = 0; i < batch.decoder_mask.size(); ++i) {
    if (batch.decoder_mask[i] == 0) continue;
    ++d.tokens;
    if (!batch.decoder_target[i].is_special()) ++d.coord_tokens;
  }
  return d;
}

namespace detail {

// Numerically stable log-softmax cross-entropy for one row; also emits the
// gradient (softmax - onehot) scaled by `grad_scale` when grads != nullptr.
template <typename Scalar>
double ce_row(const Mat<Scalar>& logits, Eigen::Index row, int target_class,
              double grad_scale, Mat<Scalar>* grads) {
  const Eigen::Index classes = logits.cols();
  if (target_class < 0 || target_class >= classes) {
    throw std::out_of_range("target class out of range");
  }
  const Scalar row_max = logits.row(row).maxCoeff();
  double sum = 0.0;
  for (Eigen::Index c = 0; c < classes; ++c) {
    sum += std::exp(static_cast<double>(logits(row, c) - row_max));
  }
  const double log_sum = std::log(sum);
  const double loss =
      log_sum - static_cast<double>(logits(row, target_class) - row_max);
  if (grads != nullptr) {
    for (Eigen::Index c = 0; c < classes; ++c) {
      const double p =
          std::exp(static_cast<double>(logits(row, c) - row_max)) / sum;
      const double onehot = c == target_class ? 1.0 : 0.0;
      (*grads)(row, c) += static_cast<Scalar>((p - onehot) * grad_scale);
    }
  }
  return loss;
}

}  // namespace detail

// Loss contribution (and optional gradients) of one batch item.  `out` holds
// the model outputs for this item's target positions; `targets` and `mask`
// are that item's slices of the padded batch.  All sums are divided by the
// batch-global denominators so that summing item contributions yields the
// batch loss, and gradients are already scaled for a single backward pass.
template <typename Scalar>
LossBreakdown item_loss(const HeadsOut<Scalar>& out, const TokenRecord* targets,
                        const std::uint8_t* mask, std::size_t count,
                        const LossDenominators& denoms,
                        HeadsOut<Scalar>* grads) {
  LossBreakdown sums;
  if (grads != nullptr) {
    grads->coords = Mat<Scalar>::Zero(out.coords.rows(), out.coords.cols());
    grads->contour_logits =
        Mat<Scalar>::Zero(out.contour_logits.rows(), out.contour_logits.cols());
    grads->point_logits =
        Mat<Scalar>::Zero(out.point_logits.rows(), out.point_logits.cols());
    grads->flag_logits =
        Mat<Scalar>::Zero(out.flag_logits.rows(), out.flag_logits.cols());
  }
  if (denoms.tokens == 0) return sums;
  const double inv_tokens = 1.0 / static_cast<double>(denoms.tokens);
  const double inv_coords =
      denoms.coord_tokens > 0
          ? 1.0 / (2.0 * static_cast<double>(denoms.coord_tokens))
          : 0.0;

  for (std::size_t t = 0; t < count; ++t) {
    if (mask[t] == 0) continue;
    const TokenRecord& target = targets[t];
    const auto row = static_cast<Eigen::Index>(t);

    sums.contour += inv_tokens *
                    detail::ce_row(out.contour_logits, row, target.contour,
                                   inv_tokens,
                                   grads != nullptr ? &grads->contour_logits : nullptr);
    sums.point += inv_tokens *
                  detail::ce_row(out.point_logits, row, target.point, inv_tokens,
                                 grads != nullptr ? &grads->point_logits : nullptr);
    sums.flag += inv_tokens *
                 detail::ce_row(out.flag_logits, row, target.flag, inv_tokens,
                                grads != nullptr ? &grads->flag_logits : nullptr);

    if (!target.is_special() && denoms.coord_tokens > 0) {
      const double ex = static_cast<double>(out.coords(row, 0)) - target.x;
      const double ey = static_cast<double>(out.coords(row, 1)) - target.y;
      sums.coord += (std::abs(ex) + std::abs(ey)) * inv_coords;
      if (grads != nullptr) {
        const auto sign = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
        grads->coords(row, 0) += static_cast<Scalar>(sign(ex) * inv_coords);
        grads->coords(row, 1) += static_cast<Scalar>(sign(ey) * inv_coords);
      }
    }
  }
  return sums;
}

}  // namespace glyphmend::net
