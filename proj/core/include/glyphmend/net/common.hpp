// Shared numeric types for the network: dense row-major matrices, named
// parameters with accumulated gradients, and initialization helpers.
//
// Everything is templated on the scalar type: double for high-precision
// gradient checks, float for faster training on small hardware.
#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "glyphmend/rng.hpp"

namespace glyphmend::net {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// One learnable tensor and its gradient accumulator.
template <typename Scalar>
struct Param {
  Mat<Scalar> value;
  Mat<Scalar> grad;

  void resize(Eigen::Index rows, Eigen::Index cols) {
    value.setZero(rows, cols);
    grad.setZero(rows, cols);
  }

  // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], drawn through the shared
  // draw_unit contract so initialization is reproducible across builds.
  void init_uniform(Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in,
                    std::mt19937_64& rng) {
    resize(rows, cols);
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        value(r, c) =
            static_cast<Scalar>((2.0 * draw_unit(rng) - 1.0) * bound);
      }
    }
  }

  void zero_grad() { grad.setZero(); }
};

// Visitor signature used throughout: f(name, param). Stable names key the
// checkpoint tensors and the optimizer state.
template <typename Scalar, typename F>
void visit_param(F&& f, const std::string& name, Param<Scalar>& p) {
  f(name, p);
}

}  // namespace glyphmend::net
